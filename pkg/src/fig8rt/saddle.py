"""Phase functions of the surgery integral, their critical points and the
leading-order asymptotics they predict.

With z = exp(2 pi i x) and w = exp(2 pi i y) the shifted phase function is

    Psi_n^{a,b}(x, y) = a x + b y - d n^2/q - p x^2/(4q) + n x/q - x y
                        + (Li2(z w) - Li2(z / w)) / (4 pi^2),

and Phi_n^{a,b} = Psi_n^{a+b, a-b}. Critical points with x real and w < 0
(the set S) correspond to SU(2) representations of pi_1(M_{p/q}) through
x = 2 theta, w = 1 + u_eps(theta).

Points where z w or z / w is real and > 1 (they occur at theta = 1/4) are
evaluated on the side for which Log(1 - zeta) has imaginary part +pi, so Li2
and its derivative use the same side of the cut.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .chernsimons import cs_class, mod1
from .invariants import LevelContext, SurgeryCoefficient, _as_coefficient, tau_bar
from .repvar import FlatConnectionClass, enumerate_su2_moduli, u_pm
from .specfun import cl2, li2

__all__ = [
    "AsymptoticPrediction",
    "CriticalPoint",
    "DegenerateCriticalPointError",
    "PhaseIndex",
    "SolverInconsistencyError",
    "calibrate_sigma",
    "classify_nondegenerate",
    "det_hessian_closed",
    "det_hessian_on_S",
    "exceptional_cos",
    "fig8_phase",
    "fig8_phase_d2",
    "fig8_volume",
    "grad_psi",
    "hessian",
    "jones_leading",
    "leading_tau_asymptotics",
    "phi_phase",
    "positive_definite_witness",
    "psi",
    "su2_critical_points",
    "verify_cs_equals_psi",
    "w_pm",
]

TWO_PI_I = 2j * math.pi
FIG8_VOLUME = 2 * cl2(math.pi / 3)


class SolverInconsistencyError(ArithmeticError):
    """b or n computed at a critical point is not an integer."""


class DegenerateCriticalPointError(ValueError):
    """A degenerate candidate in S blocks the leading-order prediction."""


@dataclass(frozen=True)
class PhaseIndex:
    a: int
    b: int
    n: int
    surgery: SurgeryCoefficient

    @classmethod
    def from_phi(cls, a: int, b: int, n: int, surgery) -> "PhaseIndex":
        """Index of Psi equal to Phi_n^{a,b}."""
        return cls(a + b, a - b, n, _as_coefficient(surgery))


@dataclass
class CriticalPoint:
    x: complex
    y: complex
    index: PhaseIndex
    psi_value: complex
    grad_norm: float
    hessian: np.ndarray
    det_h: complex
    in_S: bool
    rep_class: FlatConnectionClass | None = None
    mirror: bool = False
    nondegenerate: bool | None = None
    positive_definite: bool | None = None
    witness: tuple | None = None
    witness_method: str | None = None


@dataclass
class AsymptoticPrediction:
    surgery: SurgeryCoefficient
    r: int
    front: complex
    terms: list = field(default_factory=list)
    value: complex = 0j

    @property
    def envelope(self) -> float:
        """|front| * sum of |m b|, the natural size of the leading term."""
        return abs(self.front) * sum(abs(t["m"] * t["amplitude"]) for t in self.terms)


def _expi(x) -> complex:
    """exp(2 pi i x); the phase is exact when Re x is a multiple of 1/4."""
    x = complex(x)
    k = 4 * x.real
    mod = math.exp(-2 * math.pi * x.imag)
    if abs(k - round(k)) < 1e-13:
        ph = int(round(k)) % 4
        return [complex(mod, 0.0), complex(0.0, mod), complex(-mod, 0.0), complex(0.0, -mod)][ph]
    return cmath.exp(TWO_PI_I * x)


def _log1m(zeta: complex) -> complex:
    """Log(1 - zeta); an exactly real negative argument takes the +i pi side."""
    v = 1 - zeta
    if v.imag == 0.0:
        v = complex(v.real, 0.0)
    return cmath.log(v)


def _li2(zeta: complex) -> complex:
    if zeta.imag == 0.0 and zeta.real > 1.0:
        return li2(zeta.real, side=-1)
    return li2(zeta)


def _zw(x, y):
    z = _expi(x)
    w = _expi(y)
    return z, w, z * w, z / w


def psi(index: PhaseIndex, x, y) -> complex:
    """Psi_n^{a,b}(x, y) with the principal dilogarithm."""
    s = index.surgery
    p, q, d = s.p, s.q, s.d
    a, b, n = index.a, index.b, index.n
    x = complex(x)
    y = complex(y)
    _, _, zp, zm = _zw(x, y)
    if abs(zp - 1) < 1e-14 or abs(zm - 1) < 1e-14:
        raise ValueError("Psi evaluated at a branch point exp(2 pi i (x +- y)) = 1")
    poly = a * x + b * y - d * n * n / q - p * x * x / (4 * q) + n * x / q - x * y
    return poly + (_li2(zp) - _li2(zm)) / (4 * math.pi**2)


def phi_phase(a: int, b: int, n: int, surgery, x, y) -> complex:
    """Phi_n^{a,b}(x, y) = a (x + y) + b (x - y) + Phi_n(x, y)."""
    return psi(PhaseIndex.from_phi(a, b, n, surgery), x, y)


def grad_psi(index: PhaseIndex, x, y) -> tuple[complex, complex]:
    s = index.surgery
    p, q = s.p, s.q
    x = complex(x)
    y = complex(y)
    _, _, zp, zm = _zw(x, y)
    l1 = _log1m(zp)
    l2 = _log1m(zm)
    gx = index.a - y - p / (2 * q) * x + index.n / q + (l1 - l2) / TWO_PI_I
    gy = index.b - x + (l1 + l2) / TWO_PI_I
    return gx, gy


def hessian(index: PhaseIndex, x, y) -> tuple[np.ndarray, complex]:
    """Second derivatives of Psi and their determinant."""
    s = index.surgery
    _, _, zp, zm = _zw(complex(x), complex(y))
    A = zp / (1 - zp)
    B = zm / (1 - zm)
    h22 = -A + B
    h11 = h22 - s.p / (2 * s.q)
    h12 = -1 - A - B
    H = np.array([[h11, h12], [h12, h22]], dtype=complex)
    return H, complex(h11 * h22 - h12 * h12)


def det_hessian_closed(surgery, x, y) -> complex:
    """1 - 2 (z + 1/z) + (p/2q)(w - 1/w), valid at critical points."""
    s = _as_coefficient(surgery)
    z, w, _, _ = _zw(complex(x), complex(y))
    return 1 - 2 * (z + 1 / z) + s.p / (2 * s.q) * (w - 1 / w)


def det_hessian_on_S(surgery, x: float, y: complex) -> float:
    """Determinant at a point of S: 1 - 4 cos(2 pi x) + (p/q) sinh(2 pi Im y).

    On S, w = -exp(-2 pi Im y), so (w - 1/w)/2 = sinh(2 pi Im y).
    """
    s = _as_coefficient(surgery)
    return 1 - 4 * math.cos(2 * math.pi * float(np.real(x))) + s.p / s.q * math.sinh(2 * math.pi * complex(y).imag)


def w_pm(x: float, sign: int) -> float:
    """Negative root of w^2 + (1 - 2 cos 2 pi x) w + 1 = 0 selected by ``sign``."""
    c = math.cos(2 * math.pi * x)
    if not -1 - 1e-12 <= c <= -0.5 + 1e-12:
        raise ValueError(f"cos(2 pi x) = {c} outside [-1, -1/2]")
    disc = c * c - c - 0.75
    disc = 0.0 if abs(disc) < 1e-13 else disc
    return c - 0.5 + sign * math.sqrt(max(disc, 0.0))


def _integral(v: complex, what: str, tol: float = 1e-6) -> int:
    k = round(v.real)
    if abs(v - k) > tol:
        raise SolverInconsistencyError(f"{what} = {v} is not an integer")
    return int(k)


def _point_for_class(sc: SurgeryCoefficient, cls: FlatConnectionClass, sign: int) -> CriticalPoint:
    theta = sign * cls.theta
    x = 2 * theta
    w = 1 + u_pm(cls.theta, cls.eps)
    y = complex(0.5, -math.log(-w) / (2 * math.pi))
    z = _expi(x)
    l1 = _log1m(z * complex(w, 0.0))
    l2 = _log1m(z / complex(w, 0.0))
    b = _integral(x + (l1 + l2) / (-TWO_PI_I), "b")
    n = _integral(sc.q * (y + sc.p / (2 * sc.q) * x + (l1 - l2) / (-TWO_PI_I)), "n")
    idx = PhaseIndex(0, b, n, sc)
    gx, gy = grad_psi(idx, x, y)
    H, det = hessian(idx, x, y)
    return CriticalPoint(
        x=complex(x),
        y=y,
        index=idx,
        psi_value=psi(idx, x, y),
        grad_norm=float(math.hypot(abs(gx), abs(gy))),
        hessian=H,
        det_h=det,
        in_S=True,
        rep_class=cls,
        mirror=sign < 0,
    )


def su2_critical_points(surgery, include_mirror: bool = False, grad_tol: float = 1e-9) -> list[CriticalPoint]:
    """Critical points in S, one per irreducible SU(2) class with x = 2 theta in [1/3, 2/3].

    With ``include_mirror`` the equivalent points at x = -2 theta are added.
    """
    sc = _as_coefficient(surgery)
    out = []
    for cls in enumerate_su2_moduli(sc):
        if cls.kind != "irreducible":
            continue
        for sign in ((1, -1) if include_mirror else (1,)):
            pt = _point_for_class(sc, cls, sign)
            if pt.grad_norm > grad_tol:
                raise SolverInconsistencyError(f"gradient {pt.grad_norm} at theta = {cls.theta}")
            out.append(pt)
    return out


def _dist_z(v: float) -> float:
    return abs(v - round(v))


def verify_cs_equals_psi(surgery, include_mirror: bool = True) -> dict:
    """Distance to Z of Psi - CS at every SU(2) critical point."""
    sc = _as_coefficient(surgery)
    rows = []
    for pt in su2_critical_points(sc, include_mirror=include_mirror):
        cs = cs_class(sc, pt.rep_class)
        rows.append(
            {
                "theta": pt.rep_class.theta,
                "eps": pt.rep_class.eps,
                "mirror": pt.mirror,
                "a": pt.index.a,
                "b": pt.index.b,
                "n": pt.index.n,
                "psi": mod1(pt.psi_value.real),
                "im_psi": pt.psi_value.imag,
                "cs": cs,
                "defect": _dist_z(pt.psi_value.real - cs),
                "det_h": pt.det_h.real,
            }
        )
    return {
        "p": sc.p,
        "q": sc.q,
        "points": rows,
        "max_defect": max((r["defect"] for r in rows), default=0.0),
        "max_im_psi": max((abs(r["im_psi"]) for r in rows), default=0.0),
    }


def exceptional_cos(pq: float) -> float | None:
    """Value of cos(2 pi x) at which an S point can degenerate, or None for |p/q| < sqrt(15)."""
    P2 = pq * pq
    if P2 < 15 or P2 == 16:
        return None
    return 0.5 + (4 - abs(pq) * math.sqrt(P2 - 15)) / (P2 - 16)


def classify_nondegenerate(surgery, pt: CriticalPoint, tol: float = 1e-9) -> dict:
    """Nondegeneracy of an S point: automatic for |p/q| < sqrt(20), otherwise by the exceptional value."""
    sc = _as_coefficient(surgery)
    if not pt.in_S:
        raise ValueError("classification applies to points of S")
    pq = sc.p / sc.q
    det = abs(pt.det_h)
    result = {"abs_det": det, "degenerate_candidate": False}
    if pq * pq < 20:
        result["nondegenerate"] = True
        result["reason"] = "|p/q| < sqrt(20)"
    else:
        c_star = exceptional_cos(pq)
        c = math.cos(2 * math.pi * pt.x.real)
        w = _expi(pt.y).real
        designated = w_pm(pt.x.real, 1 if pq < 0 else -1)
        cand = c_star is not None and abs(c - c_star) < 1e-8 and abs(w - designated) < 1e-8
        result["degenerate_candidate"] = cand
        result["nondegenerate"] = not cand or det > tol
        result["reason"] = "exceptional value" if cand else "cos(2 pi x) differs from the exceptional value"
    pt.nondegenerate = result["nondegenerate"]
    return result


def _pd(H: np.ndarray, al: complex, be: complex) -> bool:
    A11 = al * al * H[0, 0]
    A12 = al * be * H[0, 1]
    A22 = be * be * H[1, 1]
    i11, i12, i22 = A11.imag, A12.imag, A22.imag
    return i11 > 0 and i11 * i22 - i12 * i12 > 0


def positive_definite_witness(pt: CriticalPoint, grid: int = 360) -> tuple | None:
    """Unit scalars (alpha, beta) with Im(diag(alpha, beta) H diag(alpha, beta)) positive definite.

    The closed-form picks need H11 and H22 nonzero; otherwise, or when they
    fail, a grid search runs. ``pt.witness_method`` records which one
    succeeded ("closed_form", "grid" or "none").
    """
    H = pt.hessian
    h11, h22 = H[0, 0].real, H[1, 1].real
    tol = 1e-12
    picks = []
    if h11 > tol and h22 > tol:
        picks.append((cmath.exp(1j * math.pi / 4), cmath.exp(1j * math.pi / 4)))
    elif h11 < -tol and h22 < -tol:
        picks.append((cmath.exp(-1j * math.pi / 4), cmath.exp(-1j * math.pi / 4)))
    elif pt.det_h.real < 0 and abs(h11) > tol and abs(h22) > tol:
        mu = 1 if h11 > 0 else -1
        picks.append((cmath.exp(mu * 1j * math.pi / 4), cmath.exp(-mu * 1j * math.pi / 4)))
    for al, be in picks:
        if _pd(H, al, be):
            pt.positive_definite, pt.witness, pt.witness_method = True, (al, be), "closed_form"
            return al, be
    ang = 2 * math.pi * np.arange(grid) / grid
    al = np.exp(1j * ang)[:, None]
    be = np.exp(1j * ang)[None, :]
    A11 = (al * al * H[0, 0]).imag
    A12 = (al * be * H[0, 1]).imag
    A22 = (be * be * H[1, 1]).imag
    ok = (A11 > 0) & (A11 * A22 - A12 * A12 > 1e-12)
    if ok.any():
        i, j = np.argwhere(ok)[0]
        wit = (complex(al[i, 0]), complex(be[0, j]))
        pt.positive_definite, pt.witness, pt.witness_method = True, wit, "grid"
        return wit
    pt.positive_definite, pt.witness, pt.witness_method = False, None, "none"
    return None


def _front(sc: SurgeryCoefficient) -> complex:
    spq = (sc.p * sc.q > 0) - (sc.p * sc.q < 0)
    sq = 1 if sc.q > 0 else -1
    return sq / (4 * math.sqrt(abs(sc.q))) * cmath.exp(3j * math.pi / 4 * spq)


def _amplitude(sc: SurgeryCoefficient, pt: CriticalPoint) -> float:
    x = pt.x.real
    det = det_hessian_on_S(sc, x, pt.y)
    return math.sin(math.pi / sc.q * (x - 2 * pt.index.n * sc.d)) / math.sqrt(abs(det))


def _terms(sc: SurgeryCoefficient):
    pts = su2_critical_points(sc)
    for pt in pts:
        res = classify_nondegenerate(sc, pt)
        if res["degenerate_candidate"] and not res["nondegenerate"]:
            raise DegenerateCriticalPointError(f"degenerate candidate at theta = {pt.rep_class.theta}")
    return [(pt, cs_class(sc, pt.rep_class), _amplitude(sc, pt)) for pt in pts]


def leading_tau_asymptotics(surgery, r: int, m: int = 4, sigma=None) -> tuple[complex, AsymptoticPrediction]:
    """Leading large-r term of tau_bar_r(M_{p/q}) from the irreducible SU(2) classes.

    ``sigma`` maps (theta, eps) to an integer phase index (default 0 for all).
    For p = 0 the value is only the part carried by the irreducible classes;
    the reducible interval contributes at the same order.
    """
    sc = _as_coefficient(surgery)
    front = _front(sc)
    pred = AsymptoticPrediction(sc, r, front)
    total = 0j
    for pt, cs, amp in _terms(sc):
        key = (round(pt.rep_class.theta, 12), pt.rep_class.eps)
        sg = 0 if sigma is None else int(sigma.get(key, 0))
        coef = m * cmath.exp(0.5j * math.pi * sg) * amp
        total += cmath.exp(TWO_PI_I * r * cs) * coef
        pred.terms.append({"theta": pt.rep_class.theta, "eps": pt.rep_class.eps, "cs": cs,
                           "amplitude": amp, "m": m, "sigma": sg})
    pred.value = front * total
    return pred.value, pred


def calibrate_sigma(surgery, r_list, m: int = 4) -> dict:
    """Fit the integer sigma of each class against exact tau_bar values.

    Classes are grouped by Chern-Simons value; for each group the complex
    coefficient of exp(2 pi i r CS) is fitted by least squares, and the sigma
    assignment (4 choices per class) reproducing it best is returned.
    """
    sc = _as_coefficient(surgery)
    front = _front(sc)
    terms = _terms(sc)
    groups: list[list] = []
    for t in terms:
        for g in groups:
            if _dist_z(g[0][1] - t[1]) < 1e-9:
                g.append(t)
                break
        else:
            groups.append([t])
    rs = np.array(sorted(r_list), dtype=float)
    data = np.array([tau_bar(LevelContext(int(r)), sc) for r in rs]) / front
    cols = np.array([[cmath.exp(TWO_PI_I * r * g[0][1]) for g in groups] for r in rs])
    coef, *_ = np.linalg.lstsq(cols, data, rcond=None)
    sigma = {}
    for g, c in zip(groups, coef):
        best = None
        for combo in np.ndindex(*(4,) * len(g)):
            val = sum(m * 1j**s * t[2] for s, t in zip(combo, g))
            err = abs(val - c)
            if best is None or err < best[0]:
                best = (err, combo)
        for s, t in zip(best[1], g):
            sigma[(round(t[0].rep_class.theta, 12), t[0].rep_class.eps)] = int(s)
    return sigma


def fig8_phase(x: complex) -> complex:
    """Phi(x) = (Li2(e^{-2 pi i x}) - Li2(e^{2 pi i x})) / (2 pi i)."""
    x = complex(x)
    if x.imag == 0 and abs(x.real - round(x.real)) < 1e-14:
        raise ValueError("phase is not analytic on Re x in Z")
    return (li2(cmath.exp(-TWO_PI_I * x)) - li2(cmath.exp(TWO_PI_I * x))) / TWO_PI_I


def fig8_phase_d2(x: complex) -> complex:
    """Phi''(x) = 2 pi i (e^{2 pi i x} + 1)/(e^{2 pi i x} - 1)."""
    z = cmath.exp(TWO_PI_I * complex(x))
    if abs(z - 1) < 1e-14:
        raise ValueError("phase is not analytic on Re x in Z")
    return TWO_PI_I * (z + 1) / (z - 1)


def fig8_volume() -> float:
    return FIG8_VOLUME


def jones_leading(r: int) -> float:
    """3^{-1/4} r^{3/2} exp(r Vol / 2 pi)."""
    return 3 ** -0.25 * r**1.5 * math.exp(r * FIG8_VOLUME / (2 * math.pi))
