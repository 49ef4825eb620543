"""Bitmask Fock basis, fixed-particle-number sectors and single-mode actions.

A basis state on ``N`` sites is an integer whose bit ``i`` is the occupation
of site ``i`` (0-based). The Jordan-Wigner string of ``c_i`` runs over the
lower sites ``j < i``, so the parity operator is diagonal with eigenvalue
``(-1)**popcount``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Mapping

import numpy as np

from .errors import DimensionError, NumericalConsistencyError, ParameterError

MAX_SITES = 16
NORM_TOL = 1e-12

ETA = "eta"
CHI = "chi"


def check_sites(n_sites: int, *, even: bool = True) -> None:
    if not isinstance(n_sites, (int, np.integer)) or n_sites < 1 or n_sites > MAX_SITES:
        raise ParameterError(f"site count must be in [1, {MAX_SITES}], got {n_sites!r}")
    if even and n_sites % 2:
        raise ParameterError(f"site count must be even, got {n_sites}")


@dataclass(frozen=True)
class SectorBasis:
    """Ascending list of all ``N``-site masks holding ``n_particles`` fermions."""

    n_sites: int
    n_particles: int
    states: np.ndarray
    _rank: dict = field(repr=False, compare=False)

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    def rank(self, state: int) -> int:
        """Position of ``state`` in :attr:`states`; ``KeyError`` if not in the sector."""
        return self._rank[int(state)]

    def ranks(self, states: np.ndarray) -> np.ndarray:
        """Vectorised :meth:`rank` (no membership check)."""
        return np.searchsorted(self.states, states)


def enumerate_sector(n_sites: int, n_particles: int) -> SectorBasis:
    """All masks of ``n_sites`` bits with popcount ``n_particles``, ascending.

    Examples
    --------
    >>> enumerate_sector(2, 1).states.tolist()
    [1, 2]
    """
    check_sites(n_sites, even=False)
    if not 0 <= n_particles <= n_sites:
        raise ParameterError(f"particle number {n_particles} outside [0, {n_sites}]")
    every = np.arange(1 << n_sites, dtype=np.int64)
    states = every[np.bitwise_count(every) == n_particles]
    states.setflags(write=False)
    assert states.shape[0] == comb(n_sites, n_particles)
    return SectorBasis(n_sites, n_particles, states, {int(s): r for r, s in enumerate(states.tolist())})


def half_filling(n_sites: int) -> SectorBasis:
    check_sites(n_sites)
    return enumerate_sector(n_sites, n_sites // 2)


def jw_sign(state: int, site: int) -> int:
    """``(-1)**(number of occupied sites below site)``."""
    return -1 if (state & ((1 << site) - 1)).bit_count() & 1 else 1


def apply_mode(kind: str, site: int, state: int, n_sites: int | None = None) -> tuple[int, complex]:
    """Act with ``eta_site`` or ``chi_site`` on a basis state.

    Returns the new mask and the phase. ``eta = c + c^dagger`` carries only
    the Jordan-Wigner sign; ``chi = i(c - c^dagger)`` adds ``+i`` on an occupied
    site and ``-i`` on an empty one.
    """
    if n_sites is not None and not 0 <= site < n_sites:
        raise ParameterError(f"site {site} outside [0, {n_sites})")
    sign = jw_sign(state, site)
    occupied = (state >> site) & 1
    if kind == ETA:
        phase = complex(sign)
    elif kind == CHI:
        phase = complex(0, sign if occupied else -sign)
    else:
        raise ParameterError(f"unknown mode kind {kind!r}")
    return state ^ (1 << site), phase


def apply_mode_all(kind: str, site: int, n_sites: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`apply_mode` over every basis state of the full space."""
    states = np.arange(1 << n_sites, dtype=np.int64)
    below = np.bitwise_count(states & ((1 << site) - 1)) & 1
    sign = 1.0 - 2.0 * below
    if kind == ETA:
        phase = sign.astype(np.complex128)
    elif kind == CHI:
        occupied = (states >> site) & 1
        phase = 1j * sign * (2.0 * occupied - 1.0)
    else:
        raise ParameterError(f"unknown mode kind {kind!r}")
    return states ^ (1 << site), phase


@dataclass(frozen=True)
class PureState:
    """Normalised amplitude vector over the full ``2**N`` Fock space."""

    n_sites: int
    amplitudes: np.ndarray
    sector_hint: int | None = None
    meta: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n_sites,):
            raise DimensionError(f"expected {1 << self.n_sites} amplitudes, got {amps.shape}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise NumericalConsistencyError(f"state not normalised: |psi|^2 = {norm2!r}")
        if self.sector_hint is not None:
            outside = np.bitwise_count(np.arange(amps.shape[0])) != self.sector_hint
            if np.any(amps[outside] != 0):
                raise NumericalConsistencyError("amplitude outside the hinted sector")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def support(self) -> np.ndarray:
        """Basis states with nonzero amplitude."""
        return np.flatnonzero(self.amplitudes).astype(np.int64)


def basis_state(n_sites: int, mask: int) -> PureState:
    amps = np.zeros(1 << n_sites, dtype=np.complex128)
    amps[mask] = 1.0
    return PureState(n_sites, amps, sector_hint=int(mask).bit_count())


def embed_sector_vector(vec: np.ndarray, basis: SectorBasis, meta: Mapping | None = None) -> PureState:
    """Place sector coefficients at their masks in the full Fock space."""
    vec = np.asarray(vec, dtype=np.complex128)
    if vec.shape != (basis.dim,):
        raise DimensionError(f"vector of length {vec.shape} for a sector of size {basis.dim}")
    amps = np.zeros(1 << basis.n_sites, dtype=np.complex128)
    amps[basis.states] = vec
    return PureState(basis.n_sites, amps, sector_hint=basis.n_particles, meta=dict(meta or {}))


def sector_vector(state: PureState, basis: SectorBasis) -> np.ndarray:
    """Inverse of :func:`embed_sector_vector`; raises if weight lies outside the sector."""
    if state.n_sites != basis.n_sites:
        raise DimensionError("site counts differ")
    vec = state.amplitudes[basis.states]
    if abs(np.vdot(vec, vec).real - 1.0) > NORM_TOL:
        raise DimensionError("state has weight outside the sector")
    return vec.copy()


def inner_product(a: PureState, b: PureState) -> complex:
    """``<a|b>``."""
    if a.n_sites != b.n_sites:
        raise DimensionError(f"site counts differ: {a.n_sites} vs {b.n_sites}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
