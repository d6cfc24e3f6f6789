"""Complex special functions: principal logarithm, dilogarithm, Clausen and
Bloch-Wigner functions.

All functions work in double precision. The dilogarithm is evaluated with its
power series near the origin and the Bernoulli series in ``-Log(1-z)``
elsewhere, after mapping the argument into the unit disc with the inversion
and reflection identities.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from numbers import Real

import mpmath

__all__ = [
    "BranchedValue",
    "CutAmbiguityError",
    "DilogDomainPoint",
    "arg",
    "bloch_wigner",
    "cl2",
    "li2",
    "li2_reflection",
    "log_branch",
    "principal_log",
]

PI = math.pi
PI2_6 = PI * PI / 6.0

# B_{2k} / (2k+1)! for the series Li2 = u - u^2/4 + sum_k B_{2k} u^{2k+1}/(2k+1)!
_BERN_COEFFS = tuple(
    float(mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k + 1)) for k in range(1, 23)
)


class CutAmbiguityError(ValueError):
    """Raised when a point on the branch cut ]1, inf[ carries no side."""


@dataclass(frozen=True)
class BranchedValue:
    """A logarithm-type value together with the sheet it lives on."""

    value: complex
    winding: int = 0

    def on_sheet(self, winding: int) -> "BranchedValue":
        shift = 2j * PI * (winding - self.winding)
        return BranchedValue(self.value + shift, winding)


@dataclass(frozen=True)
class DilogDomainPoint:
    z: complex

    @property
    def on_cut(self) -> bool:
        return self.z.imag == 0.0 and self.z.real > 1.0


def principal_log(z: complex) -> complex:
    """Principal logarithm, imaginary part in ]-pi, pi]."""
    return cmath.log(z)


def arg(z: complex) -> float:
    """Principal argument in ]-pi, pi]."""
    return cmath.phase(z)


def log_branch(z: complex, winding: int = 0) -> BranchedValue:
    return BranchedValue(cmath.log(z) + 2j * PI * winding, winding)


def _li2_power(z: complex) -> complex:
    total = 0j
    term = z
    n = 1
    while True:
        contrib = term / (n * n)
        total += contrib
        if abs(contrib) < 1e-18 * max(abs(total), 1e-300) or n > 200:
            return total
        n += 1
        term *= z


def _li2_bernoulli(z: complex) -> complex:
    u = -cmath.log(1.0 - z)
    u2 = u * u
    total = u - u2 / 4.0
    power = u
    for coeff in _BERN_COEFFS:
        power *= u2
        contrib = coeff * power
        total += contrib
        if abs(contrib) < 1e-18 * abs(total):
            break
    return total


def _li2(z: complex) -> complex:
    if z == 0:
        return 0j
    if z == 1:
        return complex(PI2_6, 0.0)
    if abs(z) > 1.0:
        log_mz = cmath.log(-z)
        return -PI2_6 - 0.5 * log_mz * log_mz - _li2(1.0 / z)
    if abs(z) <= 0.5:
        return _li2_power(z)
    if z.real > 0.5:
        return PI2_6 - cmath.log(z) * cmath.log(1.0 - z) - _li2(1.0 - z)
    return _li2_bernoulli(z)


def li2(z, side: int | None = None) -> complex:
    """Euler dilogarithm on its principal branch.

    On the cut ]1, inf[ the side is taken from ``side`` (+1 upper, -1 lower)
    or, for complex input, from the sign of the zero imaginary part. A plain
    real argument on the cut without ``side`` is ambiguous and rejected.
    """
    if isinstance(z, Real):
        x = float(z)
        if x > 1.0:
            if side is None:
                raise CutAmbiguityError(f"li2({x}) lies on the branch cut; pass side=+1 or -1")
            return _li2(complex(x, math.copysign(0.0, side)))
        return _li2(complex(x, 0.0))
    zc = complex(z)
    if side is not None and zc.imag == 0.0 and zc.real > 1.0:
        zc = complex(zc.real, math.copysign(0.0, side))
    return _li2(zc)


def cl2(theta: float) -> float:
    """Clausen function Cl2(theta) = Im Li2(e^{i theta})."""
    t = math.fmod(theta, 2.0 * PI)
    if t < 0:
        t += 2.0 * PI
    if t == 0.0:
        return 0.0
    return _li2(cmath.exp(1j * t)).imag


def bloch_wigner(z: complex) -> float:
    """Bloch-Wigner dilogarithm D(z) = Im Li2(z) + Arg(1-z) log|z|."""
    z = complex(z)
    if z.imag == 0.0:
        return 0.0
    return _li2(z).imag + cmath.phase(1.0 - z) * math.log(abs(z))


def li2_reflection(t: float, side: int = -1) -> complex:
    """Continuation of Li2 across ]1, inf[ via Li2(t) = -pi^2/6 - Log^2(-t)/2 - Li2(1/t).

    ``side=-1`` uses Log(-t) = log t + i pi, the convention of the M_0
    computation; ``side=+1`` uses log t - i pi.
    """
    if not t > 1.0:
        raise ValueError(f"li2_reflection needs t > 1, got {t}")
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    log_mt = complex(math.log(t), -PI * side)
    return -PI2_6 - 0.5 * log_mt * log_mt - _li2(complex(1.0 / t, 0.0))
