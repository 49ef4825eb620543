"""Majorana spectrum of a pure state, its moments, stabilizer Renyi entropies and fits.

The spectrum holds ``x_v = <psi|mu(v)|psi>`` for every even string ``v``
(index ``r`` <-> ``v`` with ``v >> 1 == r``). Odd strings vanish by parity
superselection and are only counted. Natural logarithms throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import NumericalConsistencyError, ParameterError, SizeGuardError
from .fock import PureState
from .majorana import IMAG_TOL, MajoranaString, even_string_at, even_strings_array
from .serialize import write_csv

ZERO_THRESHOLD = 1e-12
EXACT_MAX_SITES = 8
MIN_FIT_POINTS = 100
MAX_AUTO_BINS = 512
GAUSSIAN = "gaussian"
LAPLACE = "laplace"


@dataclass(frozen=True)
class MajoranaSpectrum:
    n_sites: int
    values: np.ndarray
    zero_threshold: float = ZERO_THRESHOLD

    @property
    def d(self) -> int:
        return 1 << self.n_sites

    @property
    def n_odd_zero(self) -> int:
        return self.d * self.d // 2

    @property
    def n_even_zero(self) -> int:
        return int(np.count_nonzero(np.abs(self.values) < self.zero_threshold))

    @property
    def unit_peak(self) -> int:
        return int(np.count_nonzero(np.abs(np.abs(self.values) - 1.0) < self.zero_threshold))

    @property
    def parity_index(self) -> int:
        return ((1 << (2 * self.n_sites)) - 1) >> 1

    def string(self, index: int) -> MajoranaString:
        return MajoranaString(self.n_sites, even_string_at(index))

    def purity(self) -> float:
        """``sum_v x_v^2 / d``; equal to 1 for every pure state."""
        return float(np.dot(self.values, self.values) / self.d)

    def filtered_values(self) -> np.ndarray:
        """All values except the identity and parity strings."""
        mask = np.ones(self.values.shape[0], dtype=bool)
        mask[[0, self.parity_index]] = False
        return self.values[mask]

    def connected(self) -> np.ndarray:
        """Values off the atoms at ``x = 0`` and ``|x| = 1``."""
        ax = np.abs(self.values)
        keep = (ax >= self.zero_threshold) & (np.abs(ax - 1.0) >= self.zero_threshold)
        return self.values[keep]


def exact_spectrum(state: PureState, *, allow_large: bool = False, backend: str | None = None) -> MajoranaSpectrum:
    """Every even-string expectation of ``state``.

    Sizes above ``EXACT_MAX_SITES`` need ``allow_large=True``.
    """
    if state.n_sites > EXACT_MAX_SITES and not allow_large:
        raise SizeGuardError(f"exact enumeration guarded at N <= {EXACT_MAX_SITES}; pass allow_large=True")
    raw = _kernels.get_backend(backend).even_spectrum(state.amplitudes, state.n_sites)
    residue = float(np.max(np.abs(raw.imag))) if raw.size else 0.0
    if residue > IMAG_TOL:
        raise NumericalConsistencyError(f"imaginary residue {residue!r} in Majorana spectrum")
    values = raw.real.copy()
    values.setflags(write=False)
    return MajoranaSpectrum(state.n_sites, values)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha >= 1.0:
        raise ParameterError(f"Renyi index must be >= 1, got {alpha}")
    return alpha


def _power_sum(x: np.ndarray, alpha: float) -> float:
    x2 = x * x
    if alpha == 2.0:
        return float(np.dot(x2, x2))
    return float(np.sum(x2 ** alpha))


def _shannon(x: np.ndarray, norm: float) -> float:
    x2 = x * x
    x2 = x2[x2 > 0]
    return float(-np.sum(x2 * np.log(x2)) / norm)


def moments_zeta(spec: MajoranaSpectrum, alpha: float) -> float:
    """``zeta_alpha = sum_v x_v^(2 alpha) / d``."""
    alpha = _check_alpha(alpha)
    return _power_sum(spec.values, alpha) / spec.d


def filtered_moment(spec: MajoranaSpectrum, alpha: float) -> float:
    """Moment over strings other than identity and parity, normalised by ``d - 2``.

    A single site has no such strings; the result is then NaN.
    """
    alpha = _check_alpha(alpha)
    if spec.d == 2:
        return float("nan")
    return _power_sum(spec.filtered_values(), alpha) / (spec.d - 2)


def renyi_from_moment(zeta: float, alpha: float) -> float:
    if not zeta > 0:
        return float("nan")
    return float(np.log(zeta) / (1.0 - alpha)) + 0.0


@dataclass(frozen=True)
class SreResult:
    alpha: float
    zeta: float
    M: float
    M_filtered: float
    zeta_filtered: float
    method: str = "exact"
    stderr: float | None = None
    stderr_filtered: float | None = None

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def sre(spec: MajoranaSpectrum, alpha: float) -> SreResult:
    """Stabilizer Renyi entropy ``M_alpha`` and its filtered variant.

    The filtered entropy is NaN for ``N = 1``. For ``alpha == 1`` the Shannon limit ``-sum sigma_v ln x_v^2`` is used, with
    ``sigma_v = x_v^2/d`` (``x_v^2/(d-2)`` for the filtered entropy).
    """
    alpha = _check_alpha(alpha)
    if alpha == 1.0:
        m = _shannon(spec.values, spec.d)
        mf = _shannon(spec.filtered_values(), spec.d - 2) if spec.d > 2 else float("nan")
        return SreResult(1.0, 1.0, m, mf, 1.0)
    zeta = moments_zeta(spec, alpha)
    zf = filtered_moment(spec, alpha)
    return SreResult(alpha, zeta, renyi_from_moment(zeta, alpha), renyi_from_moment(zf, alpha), zf)


def filtered_sre(spec: MajoranaSpectrum, alpha: float) -> float:
    return sre(spec, alpha).M_filtered


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    density: np.ndarray
    counts: np.ndarray
    n_connected: int

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def mass(self) -> float:
        return float(np.sum(self.density * np.diff(self.edges)))


def histogram(spec: MajoranaSpectrum, bins: int | None = None) -> Histogram:
    """Connected-component histogram normalised like ``Pi(x)``.

    The density integrates to ``n_connected / d^2``. Bins follow the
    Freedman-Diaconis rule (clamped to ``[10, MAX_AUTO_BINS]``) unless ``bins``
    (>= 10) is given. A spectrum without a
    connected component (stabilizer states) yields an empty histogram.
    """
    if bins is not None and bins < 10:
        raise ParameterError(f"bin count must be >= 10, got {bins}")
    x = spec.connected()
    if x.size == 0:
        return Histogram(np.zeros(1), np.zeros(0), np.zeros(0, dtype=np.int64), 0)
    if bins is None:
        bins = int(np.clip(len(np.histogram_bin_edges(x, bins="fd")) - 1, 10, MAX_AUTO_BINS))
    edges = np.histogram_bin_edges(x, bins=bins)
    counts, edges = np.histogram(x, bins=edges)
    density = counts / (np.diff(edges) * float(spec.d) ** 2)
    return Histogram(edges, density, counts, int(x.size))


@dataclass(frozen=True)
class FitResult:
    family: str
    b_fitted: float
    b_constrained: float
    log_likelihood: float
    D0_model: int
    n_points: int
    log_likelihood_constrained: float = float("nan")

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def constrained_scale(family: str, n_sites: int) -> tuple[float, int]:
    """Purity-constrained scale and the model zero count ``D0`` of each ansatz.

    Gaussian: variance ``b = 2/(d+2)`` with ``D0 = d^2/2``.
    Laplace: ``b^2 = (d-2) / (2 (d^2 - D0 - 2))`` with ``D0 = d^2 - C(2N, N)``.
    """
    d = 1 << n_sites
    if family == GAUSSIAN:
        return 2.0 / (d + 2), d * d // 2
    if family == LAPLACE:
        d0 = d * d - comb(2 * n_sites, n_sites)
        return float(np.sqrt((d - 2) / (2.0 * (d * d - d0 - 2)))), d0
    raise ParameterError(f"unknown fit family {family!r}")


def mean_log_likelihood(x: np.ndarray, family: str, b: float) -> float:
    """Per-sample log-likelihood of a zero-centred Gaussian (variance ``b``) or Laplace (scale ``b``)."""
    x = np.asarray(x, dtype=np.float64)
    if family == GAUSSIAN:
        return float(-0.5 * np.log(2.0 * np.pi * b) - np.mean(x * x) / (2.0 * b))
    if family == LAPLACE:
        return float(-np.log(2.0 * b) - np.mean(np.abs(x)) / b)
    raise ParameterError(f"unknown fit family {family!r}")


def fit_values(x: np.ndarray, family: str, n_sites: int) -> FitResult:
    """Maximum-likelihood zero-centred Gaussian (variance) or Laplace (scale) fit.

    ``log_likelihood`` is evaluated at the fitted scale and is the statistic for
    model comparison; ``log_likelihood_constrained`` uses the purity-fixed scale.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size < MIN_FIT_POINTS:
        raise ParameterError(f"need at least {MIN_FIT_POINTS} connected values, got {x.size}")
    b_con, d0 = constrained_scale(family, n_sites)
    b = float(np.mean(x * x)) if family == GAUSSIAN else float(np.mean(np.abs(x)))
    return FitResult(family, b, b_con, mean_log_likelihood(x, family, b), d0, int(x.size),
                     mean_log_likelihood(x, family, b_con))


def fit_connected(spec: MajoranaSpectrum, family: str) -> FitResult:
    return fit_values(spec.connected(), family, spec.n_sites)


def fit_both(spec: MajoranaSpectrum) -> dict[str, FitResult]:
    return {fam: fit_connected(spec, fam) for fam in (GAUSSIAN, LAPLACE)}


def spectrum_summary(spec: MajoranaSpectrum, alphas=(1, 2, 3)) -> dict:
    """JSON-ready summary: moments, entropies, zero counts and (when possible) fits."""
    out = {
        "N": spec.n_sites,
        "n_odd_zero": spec.n_odd_zero,
        "n_even_zero": spec.n_even_zero,
        "unit_peak": spec.unit_peak,
        "n_connected": int(spec.connected().size),
        "purity": spec.purity(),
        "sre": {str(a): sre(spec, a).as_dict() for a in alphas},
    }
    if spec.connected().size >= MIN_FIT_POINTS:
        out["fits"] = {k: f.as_dict() for k, f in fit_both(spec).items()}
    return out


def write_spectrum_csv(spec: MajoranaSpectrum, path: str | Path) -> None:
    """Columns ``string_hex, x`` for every even string."""
    vs = even_strings_array(spec.n_sites)
    write_csv(path, ("string_hex", "x"), ((format(int(v), "x"), float(x)) for v, x in zip(vs, spec.values)))
