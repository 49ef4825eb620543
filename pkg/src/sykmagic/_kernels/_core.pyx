# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled bit-level kernels; same signatures and results as ``_fallback``."""

import numpy as np

from libc.stdint cimport int64_t, uint8_t, uint64_t
from libc.stdlib cimport free, malloc

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

ctypedef double complex cplx


cdef struct Decoded:
    uint64_t flip
    uint64_t gmask
    int phase


cdef inline int popc(uint64_t x) noexcept nogil:
    return __builtin_popcountll(x)


cdef inline uint64_t zmask_of(uint64_t flip, int n) noexcept nogil:
    cdef uint64_t zm = 0
    cdef int i, par = 0
    for i in range(n - 1, -1, -1):
        if par:
            zm |= (<uint64_t>1) << i
        par ^= <int>((flip >> i) & 1)
    return zm


cdef inline Decoded decode_c(uint64_t v, int n) noexcept nogil:
    cdef uint64_t a = 0, b = 0, f, zm
    cdef int i, k, nf
    cdef Decoded out
    for i in range(n):
        a |= ((v >> (2 * i)) & 1) << i
        b |= ((v >> (2 * i + 1)) & 1) << i
    f = a ^ b
    zm = zmask_of(f, n)
    k = popc(a) + popc(b)
    nf = popc(f)
    out.flip = f
    out.gmask = b ^ zm
    out.phase = (k * (k - 1) // 2 + nf * (nf - 1) + 3 * popc(b) + 2 * popc(f & zm)) & 3
    return out


cdef inline void rotate(int phase, double re, double im, double *ore, double *oim) noexcept nogil:
    if phase == 0:
        ore[0] = re
        oim[0] = im
    elif phase == 1:
        ore[0] = -im
        oim[0] = re
    elif phase == 2:
        ore[0] = -re
        oim[0] = -im
    else:
        ore[0] = im
        oim[0] = -re


cdef inline void expect_c(Decoded dd, const cplx[::1] psi, const int64_t[::1] support,
                          double *ore, double *oim) noexcept nogil:
    cdef double re = 0.0, im = 0.0, ar, ai, br, bi, tr, ti
    cdef Py_ssize_t r
    cdef uint64_t s
    for r in range(support.shape[0]):
        s = <uint64_t>support[r]
        ar = psi[s ^ dd.flip].real
        ai = psi[s ^ dd.flip].imag
        br = psi[s].real
        bi = psi[s].imag
        tr = ar * br + ai * bi
        ti = ar * bi - ai * br
        if popc(s & dd.gmask) & 1:
            re -= tr
            im -= ti
        else:
            re += tr
            im += ti
    rotate(dd.phase, re, im, ore, oim)


def decode(uint64_t v, int n):
    cdef Decoded dd = decode_c(v, n)
    return int(dd.flip), int(dd.gmask), dd.phase


def string_expectations(vs, psi, support, int n):
    cdef const uint64_t[::1] vv = np.ascontiguousarray(vs, dtype=np.uint64)
    cdef const cplx[::1] p = np.ascontiguousarray(psi, dtype=np.complex128)
    cdef const int64_t[::1] sup = np.ascontiguousarray(support, dtype=np.int64)
    out = np.empty(vv.shape[0], dtype=np.complex128)
    cdef cplx[::1] o = out
    cdef Py_ssize_t r
    cdef double re, im
    with nogil:
        for r in range(vv.shape[0]):
            expect_c(decode_c(vv[r], n), p, sup, &re, &im)
            o[r].real = re
            o[r].imag = im
    return out


cdef inline uint64_t spread(uint64_t x) noexcept nogil:
    x = (x | (x << 8)) & 0x00FF00FF
    x = (x | (x << 4)) & 0x0F0F0F0F
    x = (x | (x << 2)) & 0x33333333
    return (x | (x << 1)) & 0x55555555


def even_spectrum(psi, int n):
    """All even-parity expectations, entry ``r`` belonging to string ``v`` with ``v >> 1 == r``."""
    cdef const cplx[::1] p = np.ascontiguousarray(psi, dtype=np.complex128)
    cdef uint64_t d = (<uint64_t>1) << n
    out = np.zeros(d * d // 2, dtype=np.complex128)
    cdef cplx[::1] o = out
    cdef double *yr = <double *>malloc(d * sizeof(double))
    cdef double *yi = <double *>malloc(d * sizeof(double))
    if yr == NULL or yi == NULL:
        free(yr)
        free(yi)
        raise MemoryError()
    cdef uint64_t f, s, g, zm, a, b, v, h, blk, lo, hi
    cdef double ar, ai, br, bi, ur, ui, re, im
    cdef int nonzero, k, nf, phase, base
    try:
        with nogil:
            for f in range(d):
                if popc(f) & 1:
                    continue
                nonzero = 0
                for s in range(d):
                    ar = p[s ^ f].real
                    ai = p[s ^ f].imag
                    br = p[s].real
                    bi = p[s].imag
                    yr[s] = ar * br + ai * bi
                    yi[s] = ar * bi - ai * br
                    if yr[s] != 0.0 or yi[s] != 0.0:
                        nonzero = 1
                if not nonzero:
                    continue
                h = 1
                while h < d:
                    blk = 0
                    while blk < d:
                        for lo in range(blk, blk + h):
                            hi = lo + h
                            ur = yr[lo]
                            ui = yi[lo]
                            yr[lo] = ur + yr[hi]
                            yi[lo] = ui + yi[hi]
                            yr[hi] = ur - yr[hi]
                            yi[hi] = ui - yi[hi]
                        blk += 2 * h
                    h *= 2
                zm = zmask_of(f, n)
                nf = popc(f)
                base = nf * (nf - 1) + 2 * popc(f & zm)
                for g in range(d):
                    b = g ^ zm
                    a = f ^ b
                    v = spread(a) | (spread(b) << 1)
                    k = popc(a) + popc(b)
                    phase = (k * (k - 1) // 2 + base + 3 * popc(b)) & 3
                    rotate(phase, yr[g], yi[g], &re, &im)
                    o[v >> 1].real = re
                    o[v >> 1].imag = im
    finally:
        free(yr)
        free(yi)
    return out


def metropolis_chain(psi, support, int n, uint64_t v0, site_a, site_b, op_a, op_b,
                     uniforms, bint filtered):
    cdef const cplx[::1] p = np.ascontiguousarray(psi, dtype=np.complex128)
    cdef const int64_t[::1] sup = np.ascontiguousarray(support, dtype=np.int64)
    cdef const int64_t[::1] sa = np.ascontiguousarray(site_a, dtype=np.int64)
    cdef const int64_t[::1] sb = np.ascontiguousarray(site_b, dtype=np.int64)
    cdef const int64_t[::1] oa = np.ascontiguousarray(op_a, dtype=np.int64)
    cdef const int64_t[::1] ob = np.ascontiguousarray(op_b, dtype=np.int64)
    cdef const double[::1] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t steps = u.shape[0], t
    vs_arr = np.empty(steps, dtype=np.uint64)
    xs_arr = np.empty(steps, dtype=np.float64)
    acc_arr = np.zeros(steps, dtype=np.uint8)
    cdef uint64_t[::1] vs = vs_arr
    cdef double[::1] xs = xs_arr
    cdef uint8_t[::1] acc = acc_arr
    cdef uint64_t full = ((<uint64_t>1) << (2 * n)) - 1
    cdef uint64_t v = v0, vp
    cdef double x, xp, im
    cdef int i, j, wi, wj, oi, oj, need
    cdef int table[2][2]
    table[0][0] = 0
    table[0][1] = 3
    table[1][0] = 1
    table[1][1] = 2
    with nogil:
        expect_c(decode_c(v, n), p, sup, &x, &im)
        for t in range(steps):
            i = <int>sa[t]
            j = <int>sb[t]
            if j >= i:
                j += 1
            wi = popc((v >> (2 * i)) & 3) & 1
            wj = popc((v >> (2 * j)) & 3) & 1
            oi = <int>oa[t]
            need = (wi + wj + popc(<uint64_t>oi)) & 1
            oj = table[need][ob[t]]
            vp = (v & ~(((<uint64_t>3) << (2 * i)) | ((<uint64_t>3) << (2 * j))))
            vp |= ((<uint64_t>oi) << (2 * i)) | ((<uint64_t>oj) << (2 * j))
            if not (filtered and (vp == 0 or vp == full)):
                expect_c(decode_c(vp, n), p, sup, &xp, &im)
                if u[t] * x * x < xp * xp:
                    v = vp
                    x = xp
                    acc[t] = 1
            vs[t] = v
            xs[t] = x
    return vs_arr, xs_arr, acc_arr
