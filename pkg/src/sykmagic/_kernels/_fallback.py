"""Pure-Python (numpy) versions of the bit-level kernels.

Every function here has a twin with the same signature in the compiled
``_core`` extension. Strings are 2N-bit integers with bit ``2i`` the exponent
of eta_i and bit ``2i+1`` the exponent of chi_i. A string acts on a basis
state ``s`` as::

    mu(v)|s> = i**phase * (-1)**popcount(s & sign_mask) |s ^ flip>

with ``(flip, sign_mask, phase)`` returned by :func:`decode`.
"""

from __future__ import annotations

import numpy as np

_I_POWERS = np.array([1.0, 1.0j, -1.0, -1.0j], dtype=np.complex128)
_OPS_BY_PARITY = ((0, 3), (1, 2))


def decode(v: int, n: int) -> tuple[int, int, int]:
    """Return ``(flip, sign_mask, phase)`` of string ``v`` on ``n`` sites."""
    a = b = 0
    for i in range(n):
        a |= ((v >> (2 * i)) & 1) << i
        b |= ((v >> (2 * i + 1)) & 1) << i
    flip = a ^ b
    zmask = 0
    par = 0
    for i in range(n - 1, -1, -1):
        if par:
            zmask |= 1 << i
        par ^= (flip >> i) & 1
    k = a.bit_count() + b.bit_count()
    nf = flip.bit_count()
    phase = (k * (k - 1) // 2 + nf * (nf - 1) + 3 * b.bit_count()
             + 2 * (flip & zmask).bit_count()) & 3
    return flip, b ^ zmask, phase


def _expect(v: int, psi: np.ndarray, support: np.ndarray, n: int) -> complex:
    flip, gmask, phase = decode(v, n)
    terms = np.conj(psi[support ^ flip]) * psi[support]
    sign = 1.0 - 2.0 * (np.bitwise_count(support & gmask) & 1)
    return complex(_I_POWERS[phase] * np.dot(terms, sign))


def string_expectations(vs, psi, support, n):
    vs = np.asarray(vs, dtype=np.uint64)
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    support = np.ascontiguousarray(support, dtype=np.int64)
    out = np.empty(vs.shape[0], dtype=np.complex128)
    for r, v in enumerate(vs.tolist()):
        out[r] = _expect(v, psi, support, n)
    return out


def _zmasks(flips: np.ndarray, n: int) -> np.ndarray:
    zmask = np.zeros_like(flips)
    par = np.zeros_like(flips)
    for i in range(n - 1, -1, -1):
        zmask |= par << i
        par ^= (flips >> i) & 1
    return zmask


def _spread(x: np.ndarray) -> np.ndarray:
    # 16-bit -> even bit positions of 32
    x = (x | (x << 8)) & 0x00FF00FF
    x = (x | (x << 4)) & 0x0F0F0F0F
    x = (x | (x << 2)) & 0x33333333
    return (x | (x << 1)) & 0x55555555


def _fwht_rows(y: np.ndarray) -> np.ndarray:
    rows, d = y.shape
    h = 1
    while h < d:
        y = y.reshape(rows, -1, 2, h)
        lo = y[:, :, 0, :]
        hi = y[:, :, 1, :]
        y = np.stack((lo + hi, lo - hi), axis=2)
        h *= 2
    return y.reshape(rows, d)


def even_spectrum(psi, n):
    """All even-parity expectations, entry ``r`` belonging to string ``v`` with ``v >> 1 == r``."""
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    d = 1 << n
    states = np.arange(d, dtype=np.int64)
    flips = states[(np.bitwise_count(states) & 1) == 0]
    zmasks = _zmasks(flips, n)
    out = np.zeros(d * d // 2, dtype=np.complex128)

    def pc(x):
        return np.bitwise_count(x).astype(np.int64)

    chunk = max(1, (1 << 20) // d)
    for start in range(0, flips.shape[0], chunk):
        f = flips[start:start + chunk]
        z = zmasks[start:start + chunk]
        y = np.conj(psi[states[None, :] ^ f[:, None]]) * psi[None, :]
        keep = np.any(y != 0, axis=1)
        if not keep.any():
            continue
        f, z, y = f[keep], z[keep], y[keep]
        w = _fwht_rows(y)
        b = states[None, :] ^ z[:, None]
        a = f[:, None] ^ b
        v = _spread(a) | (_spread(b) << 1)
        k = pc(a) + pc(b)
        nf = pc(f)
        phase = (k * (k - 1) // 2 + (nf * (nf - 1))[:, None] + 3 * pc(b)
                 + 2 * pc(f & z)[:, None]) & 3
        out[v >> 1] = _I_POWERS[phase] * w
    return out


def metropolis_chain(psi, support, n, v0, site_a, site_b, op_a, op_b, uniforms, filtered):
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    support = np.ascontiguousarray(support, dtype=np.int64)
    steps = len(uniforms)
    full = (1 << (2 * n)) - 1
    vs = np.empty(steps, dtype=np.uint64)
    xs = np.empty(steps, dtype=np.float64)
    acc = np.zeros(steps, dtype=np.uint8)
    v = int(v0)
    x = _expect(v, psi, support, n).real
    site_a = np.asarray(site_a).tolist()
    site_b = np.asarray(site_b).tolist()
    op_a = np.asarray(op_a).tolist()
    op_b = np.asarray(op_b).tolist()
    uniforms = np.asarray(uniforms).tolist()
    for t in range(steps):
        i = site_a[t]
        j = site_b[t]
        if j >= i:
            j += 1
        wi = ((v >> (2 * i)) & 3).bit_count() & 1
        wj = ((v >> (2 * j)) & 3).bit_count() & 1
        oi = op_a[t]
        oj = _OPS_BY_PARITY[(wi + wj + oi.bit_count()) & 1][op_b[t]]
        vp = (v & ~((3 << (2 * i)) | (3 << (2 * j)))) | (oi << (2 * i)) | (oj << (2 * j))
        if not (filtered and (vp == 0 or vp == full)):
            xp = _expect(vp, psi, support, n).real
            if uniforms[t] * x * x < xp * xp:
                v = vp
                x = xp
                acc[t] = 1
        vs[t] = v
        xs[t] = x
    return vs, xs, acc
