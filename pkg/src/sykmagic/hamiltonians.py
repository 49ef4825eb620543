"""Disorder sampling and fixed-sector matrices for the SYK and SYK2 models.

SYK2:  H = sum_ij J_ij c_i^dag c_j - mu N
SYK4:  H = sum_ijkl J_ijkl c_i^dag c_j^dag c_k c_l - mu N

SYK4 couplings are stored as a Hermitian matrix ``M[P, Q]`` over ordered
pairs ``P = (i<j)``, ``Q = (k<l)`` in lexicographic order, with
``J_ijkl = M[P, Q]`` and the remaining index orders fixed by antisymmetry.
Independent entries (upper triangle plus real diagonal of ``M``) have
``E|J|^2 = J^2/(2N)^3``; SYK2 entries have ``E|J_ij|^2 = J^2/N``.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from pathlib import Path

import numpy as np

from .errors import DimensionError, ParameterError
from .fock import SectorBasis, check_sites, enumerate_sector

SYK2 = "SYK2"
SYK4 = "SYK4"
PRNG_ID = "numpy.Philox4x64/SeedSequence"
CONVENTION = "independent draws on (i<j,k<l) Hermitian pair matrix; variance applied to final entries"

_KIND_CODES = {SYK2: 2, SYK4: 4}
_SIDECAR_MAGIC = b"SYKCPL01"


def normalize_kind(kind: str) -> str:
    key = str(kind).strip().upper().replace("_", "")
    if key in ("SYK2", "SYKQ2"):
        return SYK2
    if key in ("SYK", "SYK4", "SYKQ4"):
        return SYK4
    raise ParameterError(f"unknown model kind {kind!r}")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def derive_seed(master: int, *keys: int) -> int:
    """64-bit seed hashed from a master seed and integer keys (order-independent of execution)."""
    words = np.random.SeedSequence([int(master), *map(int, keys)]).generate_state(2, np.uint32)
    return int(words[0]) | (int(words[1]) << 32)


@dataclass(frozen=True)
class ModelInstance:
    kind: str
    n_sites: int
    couplings: np.ndarray = field(repr=False)
    J: float = 1.0
    mu: float = 0.0
    seed: int = 0
    prng_id: str = PRNG_ID

    def pairs(self) -> list[tuple[int, int]]:
        return list(combinations(range(self.n_sites), 2))

    def coupling_tensor(self) -> np.ndarray:
        """Full ``J_ijkl`` (SYK4) or ``J_ij`` (SYK2) array."""
        if self.kind == SYK2:
            return self.couplings.copy()
        n = self.n_sites
        out = np.zeros((n, n, n, n), dtype=np.complex128)
        pairs = self.pairs()
        for p, (i, j) in enumerate(pairs):
            for q, (k, l) in enumerate(pairs):
                val = self.couplings[p, q]
                out[i, j, k, l] = val
                out[j, i, k, l] = -val
                out[i, j, l, k] = -val
                out[j, i, l, k] = val
        return out

    def independent_entries(self) -> np.ndarray:
        """Entries drawn independently (upper triangle including diagonal)."""
        rows, cols = np.triu_indices(self.couplings.shape[0])
        return self.couplings[rows, cols]

    def empirical_variance(self) -> float:
        return float(np.mean(np.abs(self.independent_entries()) ** 2))

    def nominal_variance(self) -> float:
        if self.kind == SYK2:
            return self.J ** 2 / self.n_sites
        return self.J ** 2 / (2 * self.n_sites) ** 3


def _hermitian_gaussian(rng: np.random.Generator, size: int, variance: float) -> np.ndarray:
    rows, cols = np.triu_indices(size, 1)
    scale = np.sqrt(variance / 2.0)
    off = (rng.standard_normal(rows.shape[0]) + 1j * rng.standard_normal(rows.shape[0])) * scale
    diag = rng.standard_normal(size) * np.sqrt(variance)
    mat = np.zeros((size, size), dtype=np.complex128)
    mat[rows, cols] = off
    mat[cols, rows] = np.conj(off)
    mat[np.arange(size), np.arange(size)] = diag
    return mat


def sample_syk2(n_sites: int, J: float = 1.0, seed: int = 0, mu: float = 0.0) -> ModelInstance:
    check_sites(n_sites)
    rng = make_rng(seed)
    couplings = _hermitian_gaussian(rng, n_sites, J ** 2 / n_sites)
    couplings.setflags(write=False)
    return ModelInstance(SYK2, n_sites, couplings, J=J, mu=mu, seed=int(seed))


def sample_syk4(n_sites: int, J: float = 1.0, seed: int = 0, mu: float = 0.0) -> ModelInstance:
    check_sites(n_sites)
    if n_sites < 4:
        raise ParameterError("SYK4 needs at least 4 sites")
    rng = make_rng(seed)
    couplings = _hermitian_gaussian(rng, comb(n_sites, 2), J ** 2 / (2 * n_sites) ** 3)
    couplings.setflags(write=False)
    return ModelInstance(SYK4, n_sites, couplings, J=J, mu=mu, seed=int(seed))


def sample_model(kind: str, n_sites: int, seed: int, J: float = 1.0, mu: float = 0.0) -> ModelInstance:
    kind = normalize_kind(kind)
    sampler = sample_syk2 if kind == SYK2 else sample_syk4
    return sampler(n_sites, J=J, seed=seed, mu=mu)


def _pair_index(i: np.ndarray, j: np.ndarray, n: int) -> np.ndarray:
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def _creation_table(basis: SectorBasis, k: int):
    """For each state ``m`` with ``k`` fewer particles, every way to add ``k`` fermions.

    Returns ``(label, rank, sign)`` arrays of shape ``(n_m, L)``: ``label`` is the
    site (k=1) or lexicographic pair index (k=2), ``rank`` the position of the
    resulting state in ``basis`` and ``sign = <n| c_i^dag [c_j^dag] |m>``.
    """
    n = basis.n_sites
    lower = enumerate_sector(n, basis.n_particles - k).states
    bits = (lower[:, None] >> np.arange(n)) & 1
    empties = np.nonzero(bits == 0)[1].reshape(lower.shape[0], n - basis.n_particles + k)

    def jw(site):
        return 1 - 2 * (np.bitwise_count(lower[:, None] & ((1 << site) - 1)) & 1).astype(np.int64)

    if k == 1:
        label = empties
        sign = jw(empties)
        added = 1 << empties
    else:
        a, b = np.triu_indices(empties.shape[1], 1)
        i, j = empties[:, a], empties[:, b]
        label = _pair_index(i, j, n)
        sign = jw(i) * jw(j)
        added = (1 << i) | (1 << j)
    rank = basis.ranks(lower[:, None] | added)
    return label, rank, sign.astype(np.float64)


def build_sector_matrix(model: ModelInstance, basis: SectorBasis) -> np.ndarray:
    """Dense Hermitian matrix of the model inside ``basis``."""
    if model.n_sites != basis.n_sites:
        raise DimensionError(f"model on {model.n_sites} sites, basis on {basis.n_sites}")
    dim = basis.dim
    if model.kind == SYK2:
        need, prefactor = 1, 1.0
    else:
        # c_k c_l = -(c_k^dag c_l^dag)^dag and four equivalent index orders
        need, prefactor = 2, -4.0
    h = np.zeros((dim, dim), dtype=np.complex128)
    if basis.n_particles >= need:
        label, rank, sign = _creation_table(basis, need)
        vals = prefactor * sign[:, :, None] * model.couplings[label[:, :, None], label[:, None, :]] * sign[:, None, :]
        flat = (rank[:, :, None] * dim + rank[:, None, :]).ravel()
        h = (np.bincount(flat, vals.real.ravel(), dim * dim)
             + 1j * np.bincount(flat, vals.imag.ravel(), dim * dim)).reshape(dim, dim)
    h[np.diag_indices(dim)] -= model.mu * basis.n_particles
    return h


def write_couplings(model: ModelInstance, path: str | Path) -> None:
    """Binary sidecar: magic, u32 header length, JSON header, then little-endian
    float64 (re, im) pairs of ``couplings`` in row-major canonical order."""
    header = json.dumps({
        "kind": model.kind, "N": model.n_sites, "seed": model.seed, "prng_id": model.prng_id,
        "J": model.J, "mu": model.mu, "convention": CONVENTION,
        "shape": list(model.couplings.shape),
    }, sort_keys=True).encode()
    body = np.ascontiguousarray(model.couplings, dtype="<c16").view("<f8")
    with open(path, "wb") as fh:
        fh.write(_SIDECAR_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(body.tobytes())


def read_couplings(path: str | Path) -> ModelInstance:
    raw = Path(path).read_bytes()
    if raw[:8] != _SIDECAR_MAGIC:
        raise ParameterError(f"{path}: not a coupling sidecar")
    (hlen,) = struct.unpack("<I", raw[8:12])
    header = json.loads(raw[12:12 + hlen])
    data = np.frombuffer(raw[12 + hlen:], dtype="<f8").view("<c16").astype(np.complex128)
    couplings = data.reshape(header["shape"])
    couplings.setflags(write=False)
    return ModelInstance(header["kind"], header["N"], couplings, J=header["J"], mu=header["mu"],
                         seed=header["seed"], prng_id=header["prng_id"])
