"""Chern-Simons invariants of flat SU(2) connections on M_{p/q}.

Irreducible classes use the Kirk-Klassen path formula

    CS = -1/6 - (p/q) theta^2 + (2 m theta)/q - (d/q) m^2 - 2 int_{1/6}^theta beta_eps  (mod 1),

with m = p theta + q beta_eps(theta) an integer. Abelian classes give
-c j^2 / p with c = (-q)^-1 mod p, and zero when p = 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from scipy.integrate import quad

from .invariants import _as_coefficient
from .repvar import THETA_MAX, THETA_MIN, ArcError, FlatConnectionClass, L_pm, beta_eps, u_pm

__all__ = [
    "BranchCurves",
    "ExtensionError",
    "QTriple",
    "beta_eps",
    "beta_integral",
    "branch_curves",
    "cs_abelian",
    "cs_class",
    "cs_irreducible",
    "cs_special",
    "e_eps",
    "mod1",
    "q_triple",
]

ROUND_TOL = 1e-6


class ExtensionError(ValueError):
    """The class does not extend over the requested surgery."""

    def __init__(self, msg, defect=None):
        super().__init__(msg)
        self.defect = defect


@dataclass(frozen=True)
class BranchCurves:
    theta: float
    eps: int
    beta: float
    f_shift: int
    e_shift: int


@dataclass(frozen=True)
class QTriple:
    Q1: complex
    Q2: complex
    Q3: complex


def mod1(x: float, snap: float = 1e-9) -> float:
    """Representative of x mod 1 in [0, 1), with values within ``snap`` of an integer sent to 0."""
    v = x - math.floor(x)
    if v < snap or 1 - v < snap:
        return 0.0
    return v


def _f_shift(theta: float, eps: int) -> int:
    if eps == 1:
        return 0 if abs(theta - THETA_MIN) < 1e-15 else 1
    return -1 if abs(theta - THETA_MAX) < 1e-15 else 0


def e_eps(theta: float, eps: int) -> int:
    """Branch correction e_eps(theta) in Log Q1 + Log Q3 - Log Q2 = Log(Q1 Q3 / Q2) + 2 pi i e."""
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    a = abs(theta)
    if not THETA_MIN - 1e-12 <= a <= THETA_MAX + 1e-12:
        raise ArcError(f"theta = {theta} outside [-1/3, -1/6] u [1/6, 1/3]")
    if abs(a - THETA_MIN) < 1e-15 or abs(a - THETA_MAX) < 1e-15:
        return 0
    plus = 1 if a <= 0.25 + 1e-15 else 0
    val = plus if eps == 1 else 1 - plus
    if abs(a - 0.25) < 1e-15:
        # e_+(1/4) = 1, e_-(1/4) = 0 on both arcs
        return 1 if eps == 1 else 0
    return val if theta > 0 else 1 - val


def _expi4(theta: float) -> complex:
    """exp(4 pi i theta) with exact values at quarter-turns."""
    k = 8 * theta
    if abs(k - round(k)) < 1e-13:
        return [1, 1j, -1, -1j][int(round(k)) % 4]
    return cmath.exp(4j * math.pi * theta)


def q_triple(theta: float, eps: int) -> QTriple:
    """Q1 = 1 - e^{4 pi i theta}/(1+u), Q2 = 1 - (1+u) e^{4 pi i theta}, Q3 = 1+u."""
    w = 1 + u_pm(theta, eps)
    z = _expi4(theta)
    return QTriple(1 - z / w, 1 - w * z, complex(w, 0.0))


def branch_curves(theta: float, eps: int) -> BranchCurves:
    return BranchCurves(theta, eps, beta_eps(theta, eps), _f_shift(theta, eps), e_eps(theta, eps))


def beta_integral(theta: float, eps: int, tol: float = 1e-12) -> float:
    """int_{1/6}^theta beta_eps(t) dt, split at 1/4 where the branch shift jumps."""
    if not THETA_MIN - 1e-12 <= theta <= THETA_MAX + 1e-12:
        raise ArcError(f"theta = {theta} not in [1/6, 1/3]")
    pts = [THETA_MIN] + ([0.25] if theta > 0.25 else []) + [theta]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = quad(beta_eps, a, b, args=(eps,), epsabs=tol, epsrel=tol, limit=200)
        total += val
    return total


def cs_irreducible(surgery, theta: float, eps: int, quad_tol: float = 1e-12) -> float:
    """CS of the irreducible class (theta, eps) on M_{p/q}, in [0, 1)."""
    sc = _as_coefficient(surgery)
    p, q, d = sc.p, sc.q, sc.d
    g = p * theta + q * beta_eps(theta, eps)
    m = round(g)
    if abs(g - m) > ROUND_TOL:
        raise ExtensionError(f"(theta={theta}, eps={eps}) does not extend over {p}/{q}", defect=abs(g - m))
    val = -1 / 6 - p / q * theta**2 + 2 * m * theta / q - d * m * m / q - 2 * beta_integral(theta, eps, quad_tol)
    return mod1(val)


def cs_special(surgery, theta, eps: int) -> float:
    """Closed forms at theta = 1/6, 1/3 and 1/4."""
    sc = _as_coefficient(surgery)
    p, q, c, d = sc.p, sc.q, sc.c, sc.d
    th = Fraction(theta).limit_denominator(12)
    if th == Fraction(1, 6):
        if p % 6 != 3 or q % 2 == 0:
            raise ExtensionError("theta = 1/6 extends only for p = 6m+3 with q odd")
        val = Fraction(-c * p, 36) - Fraction(d * q, 4) - Fraction(d, 2)
    elif th == Fraction(1, 3):
        if p % 6 != 3 or q % 2 != 0:
            raise ExtensionError("theta = 1/3 extends only for p = 6m+3 with q even")
        val = Fraction(1, 2) - Fraction(c * p, 9) - Fraction(d * q, 4)
    elif th == Fraction(1, 4):
        if p % 4 != 0:
            raise ExtensionError("theta = 1/4 extends only when 4 divides p")
        val = Fraction(eps, 5) - Fraction(c * p, 16)
    else:
        raise ValueError("special values exist only for theta in {1/6, 1/4, 1/3}")
    return mod1(float(val % 1))


def _inverse_mod(a: int, m: int) -> int:
    m = abs(m)
    return 0 if m == 1 else pow(a, -1, m)


def cs_abelian(surgery, j: int | None = None, theta: float | None = None) -> float:
    """CS of the abelian class j (p != 0) or theta (p = 0)."""
    sc = _as_coefficient(surgery)
    p, q = sc.p, sc.q
    if p == 0:
        return 0.0
    if j is None:
        raise ValueError("j is required when p != 0")
    if not 0 <= j <= abs(p) // 2:
        raise ValueError(f"j must lie in [0, {abs(p) // 2}]")
    c = _inverse_mod(-q, p)
    return mod1(float(Fraction(-c * j * j, p) % 1))


def cs_class(surgery, cls: FlatConnectionClass) -> float:
    """CS of any enumerated class; also stored on ``cls.cs``."""
    if cls.kind == "irreducible":
        val = cs_irreducible(surgery, cls.theta, cls.eps)
    elif cls.kind == "abelian_j":
        val = cs_abelian(surgery, j=cls.j)
    else:
        val = cs_abelian(surgery, theta=cls.theta)
    cls.cs = val
    return val


def log_L(theta: float, eps: int) -> complex:
    """Principal Log of L_eps(theta)."""
    return cmath.log(L_pm(theta, eps))
