# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: colored Jones table in MPFR and the surgery sum."""

import numpy as np
cimport numpy as cnp
from cpython.mem cimport PyMem_Malloc, PyMem_Free
from libc.math cimport sin, cos, M_PI

cnp.import_array()

cdef extern from "gmp.h":
    pass

cdef extern from "mpfr.h":
    ctypedef struct __mpfr_struct:
        pass
    ctypedef __mpfr_struct *mpfr_ptr
    ctypedef long mpfr_prec_t
    ctypedef enum mpfr_rnd_t:
        MPFR_RNDN
    void mpfr_init2(mpfr_ptr, mpfr_prec_t)
    void mpfr_clear(mpfr_ptr)
    int mpfr_set_ui(mpfr_ptr, unsigned long, mpfr_rnd_t)
    int mpfr_const_pi(mpfr_ptr, mpfr_rnd_t)
    int mpfr_mul_ui(mpfr_ptr, mpfr_ptr, unsigned long, mpfr_rnd_t)
    int mpfr_div_ui(mpfr_ptr, mpfr_ptr, unsigned long, mpfr_rnd_t)
    int mpfr_cos(mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_sub(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_mul(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    int mpfr_add(mpfr_ptr, mpfr_ptr, mpfr_ptr, mpfr_rnd_t)
    double mpfr_get_d(mpfr_ptr, mpfr_rnd_t)

BACKEND = "compiled"


def jones_table(long r, long prec):
    """J'(lam) for lam = 0..r (entry 0 unused), computed with ``prec`` bits."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(r + 1, dtype=np.float64)
    # r + 1 cosines followed by scratch registers pi, tmp, prod, acc, fac
    cdef long n = r + 6
    cdef long lam, m, top, l, i
    cdef __mpfr_struct *buf = <__mpfr_struct *> PyMem_Malloc(n * sizeof(__mpfr_struct))
    if buf == NULL:
        raise MemoryError()
    for i in range(n):
        mpfr_init2(&buf[i], prec)
    cdef mpfr_ptr pi = &buf[r + 1]
    cdef mpfr_ptr tmp = &buf[r + 2]
    cdef mpfr_ptr prod = &buf[r + 3]
    cdef mpfr_ptr acc = &buf[r + 4]
    cdef mpfr_ptr fac = &buf[r + 5]
    try:
        mpfr_const_pi(pi, MPFR_RNDN)
        for l in range(r + 1):
            # x_l = 2 cos(2 pi l / r)
            mpfr_mul_ui(tmp, pi, 2 * l, MPFR_RNDN)
            mpfr_div_ui(tmp, tmp, r, MPFR_RNDN)
            mpfr_cos(tmp, tmp, MPFR_RNDN)
            mpfr_mul_ui(&buf[l], tmp, 2, MPFR_RNDN)
        for lam in range(1, r + 1):
            top = r if lam == r else min(lam, r - lam)
            mpfr_set_ui(prod, 1, MPFR_RNDN)
            mpfr_set_ui(acc, 1, MPFR_RNDN)
            for m in range(1, top):
                mpfr_sub(fac, &buf[lam], &buf[m], MPFR_RNDN)
                mpfr_mul(prod, prod, fac, MPFR_RNDN)
                mpfr_add(acc, acc, prod, MPFR_RNDN)
            out[lam] = mpfr_get_d(acc, MPFR_RNDN)
    finally:
        for i in range(n):
            mpfr_clear(&buf[i])
        PyMem_Free(buf)
    return out


cdef inline long long _mod(long long a, long long m) nogil:
    a = a % m
    return a + m if a < 0 else a


def surgery_sum(long long p, long long q, long long d, long long r,
                cnp.float64_t[::1] amp, bint compensated=True):
    """Double sum over n mod |q| and k = 1..r-1 of the rational surgery formula,
    with amp[k] = [k] J'(k). All phases are reduced exactly in integers."""
    cdef long long aq = q if q > 0 else -q
    cdef double sq = 1.0 if q > 0 else -1.0
    cdef long long mod_e = 4 * aq * r
    cdef long long pm = _mod(p, mod_e)
    cdef long long n, k, ms, me, base
    cdef double ang, s, v, t, y, tot
    cdef double re_in, im_in, cr, ci
    cdef double re_out = 0.0, im_out = 0.0, c_re = 0.0, c_im = 0.0
    cdef double ph_re, ph_im
    with nogil:
        for n in range(aq):
            re_in = 0.0
            im_in = 0.0
            cr = 0.0
            ci = 0.0
            base = r * _mod(2 * n * d, 2 * aq)
            for k in range(1, r):
                ms = _mod(base - k, 2 * aq * r)
                s = sq * sin(M_PI * <double> ms / <double> (aq * r))
                me = _mod(pm * (k * k % mod_e) - r * _mod(4 * n * k, 4 * aq), mod_e)
                ang = 2.0 * M_PI * sq * <double> me / <double> mod_e
                v = s * amp[k]
                if compensated:
                    y = v * cos(ang) - cr
                    tot = re_in + y
                    cr = (tot - re_in) - y
                    re_in = tot
                    y = v * sin(ang) - ci
                    tot = im_in + y
                    ci = (tot - im_in) - y
                    im_in = tot
                else:
                    re_in += v * cos(ang)
                    im_in += v * sin(ang)
            me = _mod(_mod(r * _mod(d, aq), aq) * (n * n % aq), aq)
            ang = 2.0 * M_PI * sq * <double> me / <double> aq
            ph_re = cos(ang)
            ph_im = sin(ang)
            t = ph_re * re_in - ph_im * im_in
            v = ph_re * im_in + ph_im * re_in
            if compensated:
                y = t - c_re
                tot = re_out + y
                c_re = (tot - re_out) - y
                re_out = tot
                y = v - c_im
                tot = im_out + y
                c_im = (tot - im_out) - y
                im_out = tot
            else:
                re_out += t
                im_out += v
    return complex(re_out, im_out)
