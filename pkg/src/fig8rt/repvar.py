"""SL(2, C) representations of the figure-8 knot group in Riley's form.

The knot group is <x, y | w x = y w> with w = x^-1 y x y^-1. A nonabelian
representation is conjugate to x -> C(s), y -> D(s, u) with phi(s^2, u) = 0,
and it extends over the p/q surgery exactly when s^-p = lambda11(s, u)^q.
The SU(2) part is the pair of arcs s = exp(2 pi i theta), theta in
[1/6, 1/3], with u = u_+(theta) or u_-(theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .invariants import SurgeryCoefficient, _as_coefficient

__all__ = [
    "ArcError",
    "FlatConnectionClass",
    "RepMatrices",
    "RileyPoint",
    "L_pm",
    "beta_eps",
    "enumerate_su2_moduli",
    "extends_to_surgery",
    "lambda11",
    "phi_riley",
    "rep_matrices",
    "rep_residual",
    "u_pm",
]

THETA_MIN = 1.0 / 6.0
THETA_MAX = 1.0 / 3.0


class ArcError(ValueError):
    """theta lies outside the SU(2) arcs [-1/3, -1/6] u [1/6, 1/3]."""


@dataclass(frozen=True)
class RileyPoint:
    s: complex
    u: complex

    def __post_init__(self):
        if self.s == 0:
            raise ValueError("s must be nonzero")

    @property
    def on_variety(self) -> bool:
        return abs(phi_riley(self.s * self.s, self.u)) < 1e-10


@dataclass
class RepMatrices:
    C: np.ndarray
    D: np.ndarray
    W: np.ndarray

    @property
    def residual(self) -> float:
        return float(np.linalg.norm(self.W @ self.C - self.D @ self.W))


@dataclass
class FlatConnectionClass:
    """A point of the SU(2) moduli space of M_{p/q}.

    ``kind`` is "irreducible", "abelian_j" or "abelian_theta". Irreducible
    classes carry (theta, eps); abelian classes carry j or theta.
    """

    kind: str
    theta: float | None = None
    eps: int | None = None
    j: int | None = None
    level: int | None = None
    cs: float | None = None
    tangential: bool = False

    def __post_init__(self):
        if self.kind not in ("irreducible", "abelian_j", "abelian_theta"):
            raise ValueError(f"unknown class kind {self.kind!r}")
        if self.kind == "irreducible":
            if self.eps not in (1, -1):
                raise ValueError("irreducible class needs eps = +1 or -1")
            if not THETA_MIN - 1e-12 <= self.theta <= THETA_MAX + 1e-12:
                raise ArcError(f"theta = {self.theta} not in [1/6, 1/3]")


def phi_riley(t: complex, u: complex) -> complex:
    """Riley polynomial u^2 + (3 - t - 1/t)(u + 1)."""
    if t == 0:
        raise ValueError("t must be nonzero")
    return u * u + (3 - (t + 1 / t)) * (u + 1)


def _disc(c):
    # vanishes at the arc endpoints, where rounding would otherwise leave sqrt(1e-16) ~ 1e-8
    d = c * c - c - 0.75
    return 0.0 if abs(d) < 1e-13 else d


def _check_arc(theta: float) -> float:
    a = abs(theta)
    if not THETA_MIN - 1e-12 <= a <= THETA_MAX + 1e-12:
        raise ArcError(f"theta = {theta} outside [-1/3, -1/6] u [1/6, 1/3]")
    return a


def u_pm(theta: float, eps: int) -> float:
    """Real root u_eps(theta) = cos(4 pi theta) - 3/2 + eps sqrt(...) of phi(e^{4 pi i theta}, u)."""
    _check_arc(theta)
    c = math.cos(4 * math.pi * theta)
    return c - 1.5 + eps * math.sqrt(max(_disc(c), 0.0))


def lambda11(s: complex, u: complex) -> complex:
    """Longitude eigenvalue -1 + s^-2 - 2 s^2 + s^4 + u (s^-2 - s^2)."""
    if s == 0:
        raise ValueError("s must be nonzero")
    s2 = s * s
    return -1 + 1 / s2 - 2 * s2 + s2 * s2 + u * (1 / s2 - s2)


def L_pm(theta: float, eps: int) -> complex:
    """L_eps(theta) = lambda11(e^{2 pi i theta}, u_eps(theta)), written via its real and imaginary parts."""
    _check_arc(theta)
    c = math.cos(4 * math.pi * theta)
    re = 2 * c * c - c - 2
    im = -eps * 2 * math.sin(4 * math.pi * theta) * math.sqrt(max(_disc(c), 0.0))
    return complex(re, im)


def beta_eps(theta: float, eps: int) -> float:
    """Continuous branch of log(L_eps) / (2 pi i) on [1/6, 1/3] with beta(1/6) = 1/2.

    L_+ runs anticlockwise and L_- clockwise around the circle from -1 to -1,
    so |Arg L| carries the sign of -eps sin(4 pi theta);
    this fixes the endpoint branches without relying on signed zeros.
    """
    if not THETA_MIN - 1e-12 <= theta <= THETA_MAX + 1e-12:
        raise ArcError(f"theta = {theta} not in [1/6, 1/3]")
    c = math.cos(4 * math.pi * theta)
    sn = math.sin(4 * math.pi * theta)
    # |Arg L| via atan2, which keeps full accuracy near L = -1 where arccos does not
    ang = math.atan2(2 * abs(sn) * math.sqrt(max(_disc(c), 0.0)), 2 * c * c - c - 2) / (2 * math.pi)
    if abs(theta - 0.25) < 1e-15:
        sn = 0.0
    side = 1.0 if sn > 0 else (-1.0 if sn < 0 else 0.0)
    if theta - THETA_MIN < 1e-15:
        side = 1.0
    elif THETA_MAX - theta < 1e-15:
        side = -1.0
    if eps == 1:
        return 1.0 - side * ang
    if eps == -1:
        return side * ang
    raise ValueError("eps must be +1 or -1")


def rep_matrices(s: complex, u: complex) -> RepMatrices:
    s = complex(s)
    C = np.array([[s, 1 / s], [0, 1 / s]], dtype=complex)
    D = np.array([[s, 0], [-s * u, 1 / s]], dtype=complex)
    Ci = np.linalg.inv(C)
    Di = np.linalg.inv(D)
    W = Ci @ D @ C @ Di
    return RepMatrices(C, D, W)


def rep_residual(s: complex, u: complex) -> float:
    """Frobenius norm of W C - D W for the assignment x -> C(s), y -> D(s, u)."""
    return rep_matrices(s, u).residual


def extends_to_surgery(s: complex, u: complex, surgery, tol: float = 1e-8) -> tuple[bool, float]:
    """Whether rho_(s,u) extends over the surgery, with the defect |s^-p - lambda11^q|."""
    sc = _as_coefficient(surgery)
    s = complex(s)
    if abs(s * s - 1) < 1e-14:
        raise ValueError("parabolic point s^2 = 1 never extends")
    if abs(phi_riley(s * s, u)) > 1e-8 * max(1.0, abs(u) ** 2):
        raise ValueError("(s, u) is not on the Riley variety")
    defect = abs(s ** (-sc.p) - lambda11(s, u) ** sc.q)
    return defect < tol, float(defect)


def _level(sc: SurgeryCoefficient, theta: float, eps: int) -> float:
    return sc.p * theta + sc.q * beta_eps(theta, eps)


def _endpoint_level(sc: SurgeryCoefficient, end: Fraction, eps: int) -> Fraction:
    # beta_+(1/6) = beta_-(1/6) = 1/2, beta_+(1/3) = 3/2, beta_-(1/3) = -1/2
    if end == Fraction(1, 6):
        beta = Fraction(1, 2)
    else:
        beta = Fraction(3, 2) if eps == 1 else Fraction(-1, 2)
    return sc.p * end + sc.q * beta


def _irreducible_roots(sc: SurgeryCoefficient, eps: int, resolution: int):
    """All theta in [1/6, 1/3] with p theta + q beta_eps(theta) an integer."""
    g_lo = _endpoint_level(sc, Fraction(1, 6), eps)
    g_hi = _endpoint_level(sc, Fraction(1, 3), eps)
    span = abs(sc.p) / 6 + 2 * abs(sc.q) + 1
    npts = max(2000, int(resolution * span))
    grid = np.linspace(THETA_MIN, THETA_MAX, npts + 1)
    vals = np.array([_level(sc, t, eps) for t in grid])
    vals[0] = float(g_lo)
    vals[-1] = float(g_hi)
    found = []
    if g_lo.denominator == 1:
        found.append((THETA_MIN, int(g_lo), False))
    if g_hi.denominator == 1:
        found.append((THETA_MAX, int(g_hi), False))
    lo_m = math.floor(vals.min()) - 1
    hi_m = math.ceil(vals.max()) + 1
    for m in range(lo_m, hi_m + 1):
        h = vals - m
        if g_lo == m:
            h[0] = 0.0
        if g_hi == m:
            h[-1] = 0.0
        for i in range(npts):
            a, b = h[i], h[i + 1]
            if a == 0.0 or b == 0.0:
                # exact zeros at grid nodes: endpoints handled above, interior ones recorded once
                if a == 0.0 and 0 < i:
                    found.append((float(grid[i]), m, False))
                continue
            if a * b < 0:
                t = brentq(lambda th: _level(sc, th, eps) - m, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15)
                found.append((t, m, False))
            elif 0 < i < npts and abs(h[i]) < abs(h[i - 1]) and abs(h[i]) < abs(h[i + 1]) and abs(h[i]) < 1e-3:
                # local extremum close to the level: possible tangential root
                res = minimize_scalar(lambda th: abs(_level(sc, th, eps) - m), bounds=(grid[i - 1], grid[i + 1]),
                                      method="bounded", options={"xatol": 1e-14})
                if res.fun < 1e-10:
                    found.append((float(res.x), m, True))
    found.sort()
    out = []
    for t, m, tang in found:
        if out and abs(out[-1][0] - t) < 1e-10 and out[-1][1] == m:
            continue
        out.append((t, m, tang))
    return out


def enumerate_su2_moduli(surgery, resolution: int = 10_000) -> list[FlatConnectionClass]:
    """Conjugacy classes of SU(2) representations of pi_1(M_{p/q}).

    Irreducible classes are (theta, eps) with theta in [1/6, 1/3]; the
    representations at theta = 1/6 and 1/3 coincide for both signs and are
    listed once, with eps = +1. Abelian classes are j = 0..floor(|p|/2), or a
    single ``abelian_theta`` marker for the interval of classes when p = 0.
    """
    sc = _as_coefficient(surgery)
    classes: list[FlatConnectionClass] = []
    for eps in (1, -1):
        for t, m, tang in _irreducible_roots(sc, eps, resolution):
            at_end = abs(t - THETA_MIN) < 1e-12 or abs(t - THETA_MAX) < 1e-12
            if at_end and eps == -1:
                continue
            if at_end:
                t = THETA_MIN if abs(t - THETA_MIN) < 1e-12 else THETA_MAX
            classes.append(FlatConnectionClass("irreducible", theta=t, eps=eps, level=m, tangential=tang))
    if sc.p == 0:
        classes.append(FlatConnectionClass("abelian_theta", theta=0.0))
    else:
        for j in range(abs(sc.p) // 2 + 1):
            classes.append(FlatConnectionClass("abelian_j", j=j))
    return classes
