"""Hermitian Majorana strings and their expectation values.

A string on ``N`` sites is a 2N-bit integer ``v``: bit ``2i`` selects
``eta_{i+1}`` and bit ``2i+1`` selects ``chi_{i+1}``. The operator is the
ordered product ``eta_1^v1 chi_1^v2 ... chi_N^v2N`` times ``i**phase_exp``
with ``phase_exp = C(weight, 2) mod 4``, which makes it Hermitian.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterator

import numpy as np

from . import _kernels
from .errors import NumericalConsistencyError, ParameterError, SizeGuardError
from .fock import CHI, ETA, PureState, apply_mode_all, check_sites

IMAG_TOL = 1e-10
ORACLE_MAX_SITES = 6

_I_POWERS = (1, 1j, -1, -1j)


def hermitizing_phase_exponent(v: int) -> int:
    """Exponent ``e`` (mod 4) of the factor ``i**e`` that makes string ``v`` Hermitian."""
    k = int(v).bit_count()
    return (k * (k - 1) // 2) & 3


@dataclass(frozen=True, order=True)
class MajoranaString:
    n_sites: int
    v: int

    def __post_init__(self):
        check_sites(self.n_sites, even=False)
        if not 0 <= self.v < 1 << (2 * self.n_sites):
            raise ParameterError(f"string bits {self.v:#x} exceed 2N = {2 * self.n_sites}")

    @classmethod
    def identity(cls, n_sites: int) -> "MajoranaString":
        return cls(n_sites, 0)

    @classmethod
    def parity_operator(cls, n_sites: int) -> "MajoranaString":
        return cls(n_sites, (1 << (2 * n_sites)) - 1)

    @property
    def weight(self) -> int:
        return self.v.bit_count()

    @property
    def parity(self) -> int:
        return self.weight & 1

    @property
    def phase_exp(self) -> int:
        return hermitizing_phase_exponent(self.v)

    def site_ops(self) -> list[int]:
        """Per-site 2-bit code: 0 identity, 1 eta, 2 chi, 3 eta*chi."""
        return [(self.v >> (2 * i)) & 3 for i in range(self.n_sites)]

    def to_hex(self) -> str:
        return format(self.v, "x")

    @classmethod
    def from_hex(cls, text: str, n_sites: int) -> "MajoranaString":
        return cls(n_sites, int(text, 16))

    @property
    def label(self) -> str:
        """Human form with 1-based sites, e.g. ``eta1.chi1.eta3``; ``I`` for the identity."""
        names = []
        for bit in range(2 * self.n_sites):
            if (self.v >> bit) & 1:
                names.append(f"{ETA if bit % 2 == 0 else CHI}{bit // 2 + 1}")
        return ".".join(names) if names else "I"

    @classmethod
    def from_label(cls, text: str, n_sites: int) -> "MajoranaString":
        if text == "I":
            return cls(n_sites, 0)
        v = 0
        for name in text.split("."):
            kind, site = name[:3], name[3:]
            if kind not in (ETA, CHI) or not site.isdigit() or not 1 <= int(site) <= n_sites:
                raise ParameterError(f"bad Majorana label component {name!r}")
            bit = 1 << (2 * (int(site) - 1) + (kind == CHI))
            if v & bit:
                raise ParameterError(f"repeated mode {name!r}")
            v |= bit
        return cls(n_sites, v)

    def __str__(self) -> str:
        return self.label


def _as_string(m, n_sites: int) -> MajoranaString:
    if isinstance(m, MajoranaString):
        if m.n_sites != n_sites:
            raise ParameterError(f"string on {m.n_sites} sites applied to {n_sites}-site state")
        return m
    return MajoranaString(n_sites, int(m))


def apply_string(m: MajoranaString, psi: PureState) -> PureState:
    """``mu(v)|psi>`` built by applying the set modes one by one, rightmost first."""
    m = _as_string(m, psi.n_sites)
    amps = np.array(psi.amplitudes)
    for bit in range(2 * m.n_sites - 1, -1, -1):
        if (m.v >> bit) & 1:
            targets, phase = apply_mode_all(ETA if bit % 2 == 0 else CHI, bit // 2, m.n_sites)
            out = np.empty_like(amps)
            out[targets] = phase * amps
            amps = out
    amps *= _I_POWERS[m.phase_exp]
    return PureState(psi.n_sites, amps)


def expectation(m: MajoranaString, psi: PureState) -> float:
    """Real expectation ``<psi|mu(v)|psi>``; odd strings short-circuit to exactly 0."""
    m = _as_string(m, psi.n_sites)
    if m.parity:
        return 0.0
    value = _kernels.kernels.string_expectations(
        np.array([m.v], dtype=np.uint64), psi.amplitudes, psi.support(), psi.n_sites)[0]
    if abs(value.imag) > IMAG_TOL:
        raise NumericalConsistencyError(f"expectation of {m.label} has imaginary part {value.imag!r}")
    return float(value.real)


def expectations(vs, psi: PureState, *, backend: str | None = None) -> np.ndarray:
    """Batched :func:`expectation` for an array of raw string integers."""
    vs = np.asarray(vs, dtype=np.uint64)
    kern = _kernels.get_backend(backend)
    values = kern.string_expectations(vs, psi.amplitudes, psi.support(), psi.n_sites)
    odd = (np.bitwise_count(vs) & 1).astype(bool)
    values[odd] = 0.0
    if values.size and np.max(np.abs(values.imag)) > IMAG_TOL:
        raise NumericalConsistencyError("imaginary residue above tolerance")
    return values.real.copy()


def _single_site_ops():
    annihilate = np.array([[0, 1], [0, 0]], dtype=np.complex128)
    z = np.diag([1.0, -1.0]).astype(np.complex128)
    return annihilate, z, np.eye(2, dtype=np.complex128)


def annihilation_matrix(site: int, n_sites: int) -> np.ndarray:
    """Dense ``c_site`` from Kronecker products; bit ``i`` of the row index is site ``i``."""
    a, z, eye = _single_site_ops()
    factors = [z if j < site else a if j == site else eye for j in range(n_sites)]
    # np.kron puts its first factor on the most significant bit
    return reduce(np.kron, factors[::-1])


def dense_oracle(m: MajoranaString) -> np.ndarray:
    """Explicit ``d x d`` matrix of ``mu(v)``, independent of the bit kernels."""
    n = m.n_sites
    if n > ORACLE_MAX_SITES:
        raise SizeGuardError(f"dense oracle limited to N <= {ORACLE_MAX_SITES}")
    d = 1 << n
    out = np.eye(d, dtype=np.complex128)
    for bit in range(2 * n):
        if (m.v >> bit) & 1:
            c = annihilation_matrix(bit // 2, n)
            cd = c.conj().T
            mode = c + cd if bit % 2 == 0 else 1j * (c - cd)
            out = out @ mode
    return _I_POWERS[m.phase_exp] * out


def even_string_count(n_sites: int) -> int:
    return 1 << (2 * n_sites - 1)


def even_string_at(index: int) -> int:
    """Raw integer of the ``index``-th even string in ascending order (inverse of ``v >> 1``)."""
    return 2 * index + (int(index).bit_count() & 1)


def even_strings_array(n_sites: int) -> np.ndarray:
    idx = np.arange(even_string_count(n_sites), dtype=np.uint64)
    return 2 * idx + (np.bitwise_count(idx) & 1).astype(np.uint64)


def enumerate_even_strings(n_sites: int, start: int = 0, stop: int | None = None) -> Iterator[MajoranaString]:
    """Even-weight strings in ascending order; ``[start, stop)`` selects an index range."""
    check_sites(n_sites, even=False)
    total = even_string_count(n_sites)
    stop = total if stop is None else min(stop, total)
    for r in range(start, stop):
        yield MajoranaString(n_sites, even_string_at(r))
