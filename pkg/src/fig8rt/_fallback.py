"""Pure-Python versions of the compiled kernels.

The Jones table uses Python integers as fixed-point numbers with ``prec``
fractional bits; the surgery sum uses numpy with exact integer phase
reduction and compensated summation.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np

BACKEND = "python"


def _fixed_cosines(r: int, prec: int) -> list[int]:
    with mpmath.workprec(prec + 32):
        scale = mpmath.mpf(2) ** prec
        return [int(mpmath.nint(2 * mpmath.cospi(mpmath.mpf(2 * l) / r) * scale)) for l in range(r + 1)]


def jones_table(r: int, prec: int) -> np.ndarray:
    """J'(lam) for lam = 0..r (entry 0 unused), computed with ``prec`` bits."""
    out = np.zeros(r + 1, dtype=np.float64)
    fx = _fixed_cosines(r, prec)
    one = 1 << prec
    for lam in range(1, r):
        X = fx[lam]
        prod = one
        acc = one
        for m in range(1, min(lam, r - lam)):
            prod = (prod * (X - fx[m])) >> prec
            acc += prod
        out[lam] = acc / one
    # top color: all factors 4 sin^2(pi l / r) are positive
    fac = 4.0 * np.sin(np.pi * np.arange(1, r) / r) ** 2
    out[r] = math.fsum(np.concatenate(([1.0], np.cumprod(fac))))
    return out


def surgery_sum(p: int, q: int, d: int, r: int, amp: np.ndarray, compensated: bool = True) -> complex:
    """Double sum over n mod |q| and k = 1..r-1 of the rational surgery formula,
    with amp[k] = [k] J'(k). All phases are reduced exactly in integers."""
    aq = abs(q)
    sq = 1.0 if q > 0 else -1.0
    k = np.arange(1, r, dtype=object)
    mod_e = 4 * aq * r
    k2p = (p % mod_e) * (k * k) % mod_e
    a = np.asarray(amp[1:r], dtype=np.float64)
    parts_re = []
    parts_im = []
    for n in range(aq):
        ms = np.asarray((r * ((2 * n * d) % (2 * aq)) - k) % (2 * aq * r), dtype=np.float64)
        s = sq * np.sin(np.pi * ms / (aq * r))
        me = np.asarray((k2p - r * ((4 * n * k) % (4 * aq))) % mod_e, dtype=np.float64)
        ang = 2.0 * np.pi * sq * me / mod_e
        v = s * a
        if compensated:
            re_in = math.fsum(v * np.cos(ang))
            im_in = math.fsum(v * np.sin(ang))
        else:
            re_in = float(np.sum(v * np.cos(ang)))
            im_in = float(np.sum(v * np.sin(ang)))
        ph = 2.0 * np.pi * sq * ((r * d * n * n) % aq) / aq
        inner = complex(re_in, im_in) * complex(math.cos(ph), math.sin(ph))
        parts_re.append(inner.real)
        parts_im.append(inner.imag)
    if compensated:
        return complex(math.fsum(parts_re), math.fsum(parts_im))
    return complex(sum(parts_re), sum(parts_im))
