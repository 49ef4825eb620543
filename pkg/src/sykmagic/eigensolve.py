"""Dense Hermitian eigendecomposition, ground states and exact time evolution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, NumericalConsistencyError
from .fock import PureState, SectorBasis, embed_sector_vector

HERMITIAN_TOL = 1e-12
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        """Dimension of the space (not the number of stored pairs)."""
        return self.eigenvectors.shape[0]

    @property
    def complete(self) -> bool:
        return self.eigenvalues.shape[0] == self.dim

    def reconstruct(self) -> np.ndarray:
        if not self.complete:
            raise DimensionError("partial decomposition cannot rebuild the matrix")
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def _check_hermitian(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionError(f"square matrix required, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    if h.size and np.max(np.abs(h - h.conj().T)) > HERMITIAN_TOL * scale:
        raise NumericalConsistencyError("matrix is not Hermitian")
    return h


def eig_hermitian(h: np.ndarray) -> EigenDecomposition:
    """Full decomposition of a Hermitian matrix, eigenvalues ascending.

    Raises
    ------
    NumericalConsistencyError
        If ``h`` deviates from Hermitian by more than 1e-12 (relative to its scale)
        or LAPACK fails to converge.
    """
    h = _check_hermitian(h)
    try:
        w, u = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalConsistencyError(f"eigensolver failed: {exc}") from exc
    w.setflags(write=False)
    u.setflags(write=False)
    return EigenDecomposition(w, u)


def lowest_eigenpairs(h: np.ndarray, k: int = 2) -> EigenDecomposition:
    """The ``k`` lowest eigenpairs only; several times cheaper than the full solve for large sectors."""
    h = _check_hermitian(h)
    k = min(k, h.shape[0])
    if k < 1:
        raise DimensionError("empty matrix")
    try:
        w, u = scipy.linalg.eigh(h, subset_by_index=[0, k - 1], driver="evx")
    except np.linalg.LinAlgError as exc:
        raise NumericalConsistencyError(f"eigensolver failed: {exc}") from exc
    w.setflags(write=False)
    u.setflags(write=False)
    return EigenDecomposition(w, u)


def ground_state(dec: EigenDecomposition, basis: SectorBasis) -> PureState:
    """Lowest eigenvector embedded in the full Fock space.

    Ties closer than 1e-10 keep column 0; ``meta['degenerate']`` records it.
    """
    if dec.dim == 0:
        raise DimensionError("empty decomposition")
    if dec.dim != basis.dim:
        raise DimensionError(f"decomposition of size {dec.dim} for a sector of size {basis.dim}")
    w = dec.eigenvalues
    gap = float(w[1] - w[0]) if w.shape[0] > 1 else float("inf")
    meta = {"energy": float(w[0]), "gap": gap, "degenerate": gap < DEGENERACY_TOL}
    return embed_sector_vector(dec.eigenvectors[:, 0], basis, meta=meta)


def evolve(dec: EigenDecomposition, psi0: np.ndarray, t: float) -> np.ndarray:
    """``exp(-iHt) psi0`` for a sector vector, exact in the eigenbasis."""
    if not dec.complete:
        raise DimensionError("time evolution needs the full decomposition")
    psi0 = np.asarray(psi0, dtype=np.complex128)
    if psi0.shape != (dec.dim,):
        raise DimensionError(f"vector of length {psi0.shape} for decomposition of size {dec.dim}")
    u = dec.eigenvectors
    coeffs = u.conj().T @ psi0
    return u @ (np.exp(-1j * dec.eigenvalues * t) * coeffs)


def energy(h: np.ndarray, vec: np.ndarray) -> float:
    return float(np.vdot(vec, h @ vec).real)
