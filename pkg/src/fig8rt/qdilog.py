"""Faddeev's quantum dilogarithm S_gamma.

S_gamma(zeta) = exp( 1/4 int_{C_R} e^{zeta z} / (sinh(pi z) sinh(gamma z) z) dz )

on the strip |Re zeta| < pi + gamma. The contour C_R runs along the real
axis and passes above the origin on a half circle of radius R. The two rays
are folded onto [R, inf[, giving the integrand

    2 sinh(zeta t) / (t sinh(pi t) sinh(gamma t)),

which is evaluated in exponentially scaled form. Outside the strip S_gamma
is continued with the functional equation

    (1 + e^{i zeta}) S_gamma(zeta + gamma) = S_gamma(zeta - gamma).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .specfun import li2

__all__ = [
    "PoleError",
    "dilog_approximation",
    "QDilogContext",
    "SGammaValue",
    "StripError",
    "StripPoint",
    "fbar_nr",
    "f_nr",
    "g_r",
    "i_gamma",
    "log_s_gamma",
    "s_gamma",
    "s_gamma_shifted",
    "s_gamma_strip",
]

PI = math.pi
_GL16 = np.polynomial.legendre.leggauss(16)
_GL64 = np.polynomial.legendre.leggauss(64)


class StripError(ValueError):
    """Argument outside the region where the integral representation is valid."""


class PoleError(ArithmeticError):
    """Argument within 1e-8 of a pole of the continued S_gamma."""


@dataclass(frozen=True)
class QDilogContext:
    gamma: float
    contour_radius: float = 0.5
    tail_cutoff: float | None = None
    quad_tol: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in ]0, 1[")
        if not 0.0 < self.contour_radius < 1.0:
            raise ValueError("contour radius must lie in ]0, 1[")

    @classmethod
    def for_level(cls, r: int, **kw) -> "QDilogContext":
        if r <= 3:
            raise ValueError("need r > 3 so that gamma = pi/r < 1")
        return cls(gamma=PI / r, **kw)

    @property
    def r(self) -> float:
        """Level pi / gamma, snapped to the nearest integer when it is one."""
        val = PI / self.gamma
        return float(round(val)) if abs(val - round(val)) < 1e-9 else val

    def cutoff(self, rate: float) -> float:
        """Ray truncation point where the integrand has decayed below 1e-18."""
        if self.tail_cutoff is not None:
            return self.tail_cutoff
        return min(1e3, (41.5 + math.log(1.0 / self.gamma)) / rate)


@dataclass(frozen=True)
class StripPoint:
    zeta: complex
    gamma: float

    @property
    def in_strip(self) -> bool:
        return abs(self.zeta.real) < PI + self.gamma


@dataclass(frozen=True)
class SGammaValue:
    value: complex
    log_value: complex
    shifts: int


def _ray_integrand(zeta, t, gamma):
    """2 sinh(zeta t) / (t sinh(pi t) sinh(gamma t)) for t > 0, overflow free."""
    num = np.exp((zeta - PI - gamma) * t) - np.exp((-zeta - PI - gamma) * t)
    den = t * (-np.expm1(-2 * PI * t)) * (-np.expm1(-2 * gamma * t))
    return 4.0 * num / den


def _arc_nodes(R):
    x, w = _GL64
    s = 0.5 * PI * (x + 1.0)
    z = R * np.exp(1j * (PI - s))
    # dz = -i z ds
    return z, -1j * z * (0.5 * PI * w)


def _log_s_strip_array(ctx: QDilogContext, zeta: np.ndarray) -> np.ndarray:
    """Fixed composite Gauss-Legendre evaluation of log S_gamma, vectorized.

    Intended for |Re zeta| <= gamma, where the rays decay at rate >= pi.
    """
    zeta = np.asarray(zeta, dtype=complex)
    g = ctx.gamma
    R = ctx.contour_radius
    rate = PI + g - float(np.max(np.abs(zeta.real), initial=0.0))
    T = ctx.cutoff(rate)
    freq = float(np.max(np.abs(zeta.imag), initial=0.0))
    width = min(0.5, 4.0 / max(freq, 1e-9))
    npan = max(1, int(math.ceil((T - R) / width)))
    edges = np.linspace(R, T, npan + 1)
    xg, wg = _GL16
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    wt = (half[:, None] * wg[None, :]).ravel()
    za, wa = _arc_nodes(R)
    flat = zeta.ravel()
    out = np.empty(flat.shape, dtype=complex)
    chunk = max(1, 200_000 // (t.size + za.size))
    for i in range(0, flat.size, chunk):
        zc = flat[i:i + chunk, None]
        ray = _ray_integrand(zc, t[None, :], g) @ wt
        arc = (np.exp(zc * za[None, :]) / (np.sinh(PI * za) * np.sinh(g * za) * za)[None, :]) @ wa
        out[i:i + chunk] = 0.25 * (ray + arc)
    return out.reshape(zeta.shape)


def s_gamma_strip(ctx: QDilogContext, zeta: complex) -> complex:
    """S_gamma on the strip |Re zeta| < pi + gamma by adaptive quadrature."""
    zeta = complex(zeta)
    g = ctx.gamma
    if not abs(zeta.real) < PI + g:
        raise StripError(f"|Re zeta| = {abs(zeta.real)} is outside the strip of half-width {PI + g}")
    return cmath.exp(_log_s_quad(ctx, zeta))


def _log_s_quad(ctx: QDilogContext, zeta: complex) -> complex:
    g = ctx.gamma
    R = ctx.contour_radius
    T = ctx.cutoff(PI + g - abs(zeta.real))
    tol = ctx.quad_tol

    def re(t):
        return _ray_integrand(zeta, t, g).real

    def im(t):
        return _ray_integrand(zeta, t, g).imag

    limit = 2000
    ray = complex(quad(re, R, T, epsabs=tol, epsrel=tol, limit=limit)[0],
                  quad(im, R, T, epsabs=tol, epsrel=tol, limit=limit)[0])
    za, wa = _arc_nodes(R)
    arc = np.sum(np.exp(zeta * za) / (np.sinh(PI * za) * np.sinh(g * za) * za) * wa)
    return 0.25 * (ray + arc)


def _i_kernel(z, gamma):
    """1/sinh(gamma z) - 1/(gamma z) with a series near zero."""
    x = gamma * z
    small = np.abs(x) < 0.05
    xs = np.where(small, 1.0, x)
    with np.errstate(over="ignore"):
        direct = 1.0 / np.sinh(xs) - 1.0 / xs
    x2 = x * x
    series = -x / 6.0 * (1.0 - 7.0 * x2 / 60.0 * (1.0 - 31.0 * x2 / 294.0))
    return np.where(small, series, direct)


def i_gamma(ctx: QDilogContext, zeta: complex) -> complex:
    """Correction term I_gamma(zeta), |Re zeta| <= pi."""
    zeta = complex(zeta)
    g = ctx.gamma
    R = ctx.contour_radius
    if abs(zeta.real) > PI:
        raise StripError("i_gamma needs |Re zeta| <= pi")
    tol = ctx.quad_tol

    def ray(t):
        # e^{zeta t} k(t)/(t sinh pi t) + e^{-zeta t} k(-t)/(-t sinh(-pi t)), k odd
        num = np.exp((zeta - PI) * t) - np.exp((-zeta - PI) * t)
        return 2.0 * num / (-np.expm1(-2 * PI * t)) * _i_kernel(t, g) / t

    upper = np.inf if abs(zeta.real) > PI - 0.5 else (45.0 / (PI - abs(zeta.real)))
    rv = complex(quad(lambda t: ray(t).real, R, upper, epsabs=tol, epsrel=tol, limit=2000)[0],
                 quad(lambda t: ray(t).imag, R, upper, epsabs=tol, epsrel=tol, limit=2000)[0])
    za, wa = _arc_nodes(R)
    arc = np.sum(np.exp(zeta * za) / (za * np.sinh(PI * za)) * _i_kernel(za, g) * wa)
    return 0.25 * (rv + arc)


def log_s_gamma(ctx: QDilogContext, zeta, check_poles: bool = True):
    """log S_gamma on the whole plane, vectorized.

    The argument is shifted by multiples of 2 gamma into |Re zeta| <= gamma
    and the shift factors from the functional equation are accumulated as
    logarithms. Returns (log S, number of shifts) with the same shape as zeta.
    Zeros of S give -inf real part.
    """
    zeta = np.asarray(zeta, dtype=complex)
    g = ctx.gamma
    n = np.rint(zeta.real / (2 * g)).astype(np.int64)
    z0 = zeta - 2 * g * n
    logs = _log_s_strip_array(ctx, z0)
    nmax = int(np.max(np.abs(n), initial=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        for j in range(1, nmax + 1):
            up = n >= j
            if np.any(up):
                # S(z0 + 2j g) = S(z0 + 2(j-1) g) / (1 + e^{i(z0 + (2j-1) g)})
                fac = 1.0 + np.exp(1j * (z0[up] + (2 * j - 1) * g))
                if check_poles and np.any(np.abs(fac) < 1e-8):
                    raise PoleError("argument within 1e-8 of a pole of S_gamma")
                logs[up] -= np.log(fac)
            down = n <= -j
            if np.any(down):
                # S(z0 - 2j g) = (1 + e^{i(z0 - (2j-1) g)}) S(z0 - 2(j-1) g)
                fac = 1.0 + np.exp(1j * (z0[down] - (2 * j - 1) * g))
                logs[down] += np.log(fac)
    return logs, n


def s_gamma_shifted(ctx: QDilogContext, zeta: complex) -> SGammaValue:
    """S_gamma(zeta) with the number of functional-equation shifts applied."""
    logs, n = log_s_gamma(ctx, np.array([complex(zeta)]))
    lv = complex(logs[0])
    return SGammaValue(cmath.exp(lv) if lv.real > -745 else 0j, lv, int(n[0]))


def s_gamma(ctx: QDilogContext, zeta):
    """Meromorphic continuation of S_gamma. Accepts scalars or arrays."""
    if np.ndim(zeta) == 0:
        return s_gamma_shifted(ctx, zeta).value
    logs, _ = log_s_gamma(ctx, zeta)
    return np.exp(logs)


def g_r(ctx: QDilogContext, x):
    """g_r(x) = S_gamma(pi - 2 pi x) / S_gamma(-pi + 2 pi x)."""
    x = np.asarray(x, dtype=complex)
    la, _ = log_s_gamma(ctx, PI - 2 * PI * x)
    lb, _ = log_s_gamma(ctx, -PI + 2 * PI * x)
    out = np.exp(la - lb)
    return complex(out) if out.ndim == 0 else out


def _s_ratio(ctx, x, y):
    la, _ = log_s_gamma(ctx, -PI + 2 * PI * (x - y))
    lb, _ = log_s_gamma(ctx, -PI + 2 * PI * (x + y))
    return la - lb


def f_nr(ctx: QDilogContext, p: int, q: int, d: int, n: int, x, y):
    """Integrand f_{n,r}(x, y) of the double contour formula for tau_r(M_{p/q})."""
    r = ctx.r
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    phase = 2j * PI * r * ((d * n * n % abs(q)) / q + p / (4 * q) * x * x - n / q * x - x * y)
    out = np.sin(PI / q * (x - 2 * n * d)) * np.exp(phase + _s_ratio(ctx, x, y))
    return complex(out) if out.ndim == 0 else out


def fbar_nr(ctx: QDilogContext, p: int, q: int, d: int, n: int, x, y):
    """Integrand of the double contour formula for the conjugate invariant."""
    r = ctx.r
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    phase = 2j * PI * r * (-(d * n * n % abs(q)) / q - p / (4 * q) * x * x + n / q * x - x * y)
    out = np.sin(PI / q * (x - 2 * n * d)) * np.exp(phase + _s_ratio(ctx, x, y))
    return complex(out) if out.ndim == 0 else out


def dilog_approximation(ctx: QDilogContext, zeta: complex) -> complex:
    """exp(Li2(-e^{i zeta}) / (2 i gamma) + I_gamma(zeta)), valid for |Re zeta| < pi."""
    zeta = complex(zeta)
    return cmath.exp(li2(-cmath.exp(1j * zeta)) / (2j * ctx.gamma) + i_gamma(ctx, zeta))
