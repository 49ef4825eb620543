"""Quenches from occupation-basis product states.

The model is diagonalised once in the particle-number sector of the initial
state; every time point is then an exact rotation in the eigenbasis. Times are
in units of ``1/J``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .eigensolve import EigenDecomposition, eig_hermitian, energy, evolve
from .errors import DimensionError, ParameterError, SizeGuardError
from .fock import PureState, basis_state, check_sites, embed_sector_vector, enumerate_sector
from .hamiltonians import ModelInstance, build_sector_matrix, derive_seed
from .sampler import DIRECT, ChainConfig, run_chain
from .serialize import write_csv
from .spectrum import EXACT_MAX_SITES, exact_spectrum, fit_both, sre

EXACT = "exact"
SAMPLED = "sampled"
AUTO = "auto"
SNAPSHOT_TIMES = (0.01, 0.5, 1.0, 2.0, 10.0)
SATURATION_WINDOW = (8.0, 12.0)


def product_state(pattern: str) -> PureState:
    """Occupation product state; character ``i`` of ``pattern`` is site ``i``.

    >>> product_state("10").amplitudes.nonzero()[0].tolist()
    [1]
    """
    if not pattern or set(pattern) - {"0", "1"}:
        raise ParameterError(f"pattern must be a non-empty 0/1 string, got {pattern!r}")
    mask = sum(1 << i for i, c in enumerate(pattern) if c == "1")
    return basis_state(len(pattern), mask)


def cdw_pattern(n_sites: int) -> str:
    """Charge-density-wave occupation ``1010...``."""
    return "10" * (n_sites // 2) + "1" * (n_sites % 2)


def default_time_grid() -> np.ndarray:
    """``t = 0``, 40 log-spaced points on ``[1e-2, 10]``, the snapshot times and ``8..12``."""
    extra = np.array([0.0, *SNAPSHOT_TIMES, 8.0, 9.0, 10.0, 11.0, 12.0])
    grid = np.concatenate([np.logspace(-2, 1, 40), extra])
    return np.unique(np.round(grid, 12))


@dataclass(frozen=True)
class QuenchPlan:
    model: ModelInstance
    times: np.ndarray = field(default_factory=default_time_grid)
    snapshot_times: tuple = SNAPSHOT_TIMES
    estimator: str = AUTO
    chain: ChainConfig | None = None
    pattern: str | None = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        if times.ndim != 1 or times.size == 0 or np.any(times < 0) or np.any(np.diff(times) <= 0):
            raise ParameterError("times must be non-negative and strictly ascending")
        object.__setattr__(self, "times", times)
        snaps = tuple(float(t) for t in self.snapshot_times)
        missing = [t for t in snaps if not np.any(np.isclose(times, t, rtol=0, atol=1e-12))]
        if missing:
            raise ParameterError(f"snapshot times {missing} not on the time grid")
        object.__setattr__(self, "snapshot_times", snaps)
        if self.estimator not in (EXACT, SAMPLED, AUTO):
            raise ParameterError(f"estimator must be one of exact/sampled/auto, got {self.estimator!r}")
        pattern = self.pattern or cdw_pattern(self.model.n_sites)
        if len(pattern) != self.model.n_sites:
            raise DimensionError(f"pattern of length {len(pattern)} for N = {self.model.n_sites}")
        object.__setattr__(self, "pattern", pattern)

    @property
    def method(self) -> str:
        if self.estimator != AUTO:
            return self.estimator
        return EXACT if self.model.n_sites <= EXACT_MAX_SITES else SAMPLED


@dataclass(frozen=True)
class QuenchSeries:
    times: np.ndarray
    M2: np.ndarray
    stderr: np.ndarray
    M2_filtered: np.ndarray
    energy: np.ndarray
    purity: np.ndarray
    method: str


class _Evolution:
    """Sector decomposition and initial vector shared by all time points."""

    def __init__(self, plan: QuenchPlan):
        check_sites(plan.model.n_sites)
        init = product_state(plan.pattern)
        self.basis = enumerate_sector(plan.model.n_sites, plan.pattern.count("1"))
        self.h = build_sector_matrix(plan.model, self.basis)
        self.dec: EigenDecomposition = eig_hermitian(self.h)
        self.psi0 = init.amplitudes[self.basis.states]

    def state(self, t: float) -> tuple[PureState, float]:
        vec = evolve(self.dec, self.psi0, t)
        vec = vec / np.linalg.norm(vec)
        return embed_sector_vector(vec, self.basis, meta={"t": float(t)}), energy(self.h, vec)


def quench_series(plan: QuenchPlan, *, backend: str | None = None) -> QuenchSeries:
    """``M_2(t)`` along ``plan.times``.

    Exact enumeration gives zero error bars; the sampled route runs a direct-mode
    chain per time point with a seed derived from the chain seed and the time index.
    """
    ev = _Evolution(plan)
    method = plan.method
    cfg = plan.chain or ChainConfig(mode=DIRECT)
    rows = []
    for k, t in enumerate(plan.times):
        psi, e = ev.state(t)
        if method == EXACT:
            spec = exact_spectrum(psi, allow_large=True, backend=backend)
            r = sre(spec, 2)
            rows.append((r.M, 0.0, r.M_filtered, e, spec.purity()))
        else:
            run_cfg = ChainConfig(cfg.n_samples, cfg.burn_in, cfg.thinning, DIRECT, (2,), cfg.chain_count,
                                  derive_seed(cfg.seed, k), cfg.measure, cfg.batches_per_chain)
            r = run_chain(psi, run_cfg, backend=backend).sre[2.0]
            rows.append((r.M, r.stderr, r.M_filtered, e, float("nan")))
    cols = np.array(rows, dtype=np.float64).reshape(-1, 5).T
    return QuenchSeries(plan.times.copy(), cols[0], cols[1], cols[2], cols[3], cols[4], method)


def spectrum_snapshot(plan: QuenchPlan, t: float, *, allow_large: bool = False, backend: str | None = None):
    """Full spectrum at a snapshot time with both fits (``None`` if too few connected values)."""
    if not any(abs(t - s) <= 1e-12 for s in plan.snapshot_times):
        raise ParameterError(f"t = {t} is not a snapshot time")
    if plan.model.n_sites > EXACT_MAX_SITES and not allow_large:
        raise SizeGuardError(f"snapshots enumerate exactly; N > {EXACT_MAX_SITES} needs allow_large=True")
    psi, _ = _Evolution(plan).state(t)
    spec = exact_spectrum(psi, allow_large=allow_large, backend=backend)
    fits = fit_both(spec) if spec.connected().size >= 100 else None
    return spec, fits


def saturation_value(series: QuenchSeries, window: tuple[float, float] = SATURATION_WINDOW) -> float:
    """Mean of ``M_2`` over ``window[0] <= t <= window[1]``."""
    sel = (series.times >= window[0]) & (series.times <= window[1])
    if not sel.any():
        raise ParameterError(f"no time points inside {window}")
    return float(np.mean(series.M2[sel]))


def saturation_time(series: QuenchSeries, fraction: float = 0.9,
                    window: tuple[float, float] = SATURATION_WINDOW) -> float:
    """First time ``M_2`` reaches ``fraction`` of the saturation value, linearly interpolated.

    An estimate of the saturation scale only; nothing is extrapolated in ``N``.
    """
    if not 0 < fraction <= 1:
        raise ParameterError(f"fraction must lie in (0, 1], got {fraction}")
    target = fraction * saturation_value(series, window)
    above = np.flatnonzero(series.M2 >= target)
    if above.size == 0:
        return float("nan")
    k = int(above[0])
    if k == 0:
        return float(series.times[0])
    t0, t1 = series.times[k - 1], series.times[k]
    m0, m1 = series.M2[k - 1], series.M2[k]
    return float(t0 + (target - m0) * (t1 - t0) / (m1 - m0))


def growth_exponent(times, values, window: tuple[float, float]) -> float:
    """Least-squares slope of ``ln M_2`` against ``ln t`` inside ``window``."""
    t = np.asarray(times, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    sel = (t >= window[0]) & (t <= window[1]) & (t > 0) & (y > 0)
    if sel.sum() < 2:
        raise ParameterError("need at least two positive points inside the window")
    slope, _ = np.polyfit(np.log(t[sel]), np.log(y[sel]), 1)
    return float(slope)


def write_series_csv(path: str | Path, series: QuenchSeries, model: str, n_sites: int, seed: int) -> None:
    rows = ((float(t), float(m), float(s), model, n_sites, seed)
            for t, m, s in zip(series.times, series.M2, series.stderr))
    write_csv(path, ("t", "M2", "stderr", "model", "N", "seed"), rows)
