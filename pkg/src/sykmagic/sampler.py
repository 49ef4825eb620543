"""Metropolis sampling of Majorana strings with probability ``sigma_v = x_v^2 / d``.

Moves replace the operators on two distinct sites, each drawn from
``{I, eta, chi, eta*chi}``, conditioned on the string staying even. In filtered
mode the identity and parity strings get zero weight and the estimates refer to
the distribution ``x_v^2 / (d - 2)`` over the remaining strings.

Estimators (per recorded string): ``x^(2(alpha-1))`` for ``alpha > 1`` and
``ln x^2`` for ``alpha = 1``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import ParameterError, SamplerError
from .fock import PureState
from .majorana import MajoranaString, expectation
from .serialize import write_csv
from .spectrum import SreResult, renyi_from_moment

DIRECT = "direct"
FILTERED = "filtered"
EVERY_STEP = "every_step"
ON_ACCEPT = "on_accept"


@dataclass(frozen=True)
class ChainConfig:
    """Sampling parameters. ``n_samples`` is the total over all chains."""

    n_samples: int = 500_000
    burn_in: int = 1000
    thinning: int = 1
    mode: str = FILTERED
    alphas: tuple = (2,)
    chain_count: int = 8
    seed: int = 0
    measure: str = EVERY_STEP
    batches_per_chain: int = 1

    def __post_init__(self):
        if self.n_samples < 1 or self.thinning < 1 or self.chain_count < 1 or self.burn_in < 0:
            raise ParameterError("n_samples, thinning, chain_count must be >= 1 and burn_in >= 0")
        if self.mode not in (DIRECT, FILTERED):
            raise ParameterError(f"mode must be {DIRECT!r} or {FILTERED!r}")
        if self.measure not in (EVERY_STEP, ON_ACCEPT):
            raise ParameterError(f"measure must be {EVERY_STEP!r} or {ON_ACCEPT!r}")
        if self.chain_count * self.batches_per_chain < 2:
            raise ParameterError("error bars need at least two batches (chains x batches_per_chain)")
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if any(a < 1 for a in self.alphas):
            raise ParameterError("Renyi indices must be >= 1")

    @property
    def samples_per_chain(self) -> int:
        return -(-self.n_samples // self.chain_count)


@dataclass(frozen=True)
class SampleRecord:
    string: MajoranaString
    x: float
    d: int
    estimators: dict = field(default_factory=dict)

    @property
    def sigma(self) -> float:
        return self.x * self.x / self.d


def estimator(x, alpha: float):
    """Per-sample estimator ``X_v`` (array-friendly)."""
    x2 = np.square(x)
    if alpha == 1.0:
        return np.log(x2)
    return x2 ** (alpha - 1.0)


def propose_two_site_update(m: MajoranaString, rng: np.random.Generator) -> MajoranaString:
    """Redraw the operators on two random distinct sites until the string is even again."""
    if m.parity:
        raise ParameterError("proposals start from an even string")
    n = m.n_sites
    if n < 2:
        raise ParameterError("two-site updates need N >= 2")
    while True:
        i, j = rng.choice(n, size=2, replace=False)
        oi, oj = rng.integers(0, 4, size=2)
        v = m.v & ~((3 << (2 * int(i))) | (3 << (2 * int(j))))
        v |= (int(oi) << (2 * int(i))) | (int(oj) << (2 * int(j)))
        if not v.bit_count() & 1:
            return MajoranaString(n, v)


def _excluded(m: MajoranaString) -> bool:
    return m.v == 0 or m.v == (1 << (2 * m.n_sites)) - 1


def metropolis_step(current: SampleRecord, psi: PureState, rng: np.random.Generator,
                    mode: str = DIRECT) -> SampleRecord:
    """One accept/reject step with probability ``min(1, sigma'/sigma)``."""
    if current.x == 0:
        raise SamplerError("current string has zero weight")
    proposal = propose_two_site_update(current.string, rng)
    if mode == FILTERED and _excluded(proposal):
        return current
    xp = expectation(proposal, psi)
    if rng.random() * current.x ** 2 < xp * xp:
        return SampleRecord(proposal, xp, current.d)
    return current


def standard_error(batch_means) -> float:
    """Standard error of the mean over batch means."""
    b = np.asarray(batch_means, dtype=np.float64)
    if b.size < 2:
        raise ParameterError("standard error needs at least two batches")
    return float(np.std(b, ddof=1) / math.sqrt(b.size))


def entropy_stderr(mean: float, se: float, alpha: float) -> float:
    """Delta-method error of ``ln(mean)/(1-alpha)``; identity for ``alpha = 1``."""
    if alpha == 1.0:
        return se
    return se / (abs(1.0 - alpha) * mean) if mean > 0 else float("nan")


def find_start(psi: PureState, mode: str, max_weight: int = 4, backend: str | None = None) -> tuple[int, float]:
    """Initial string: the identity (direct) or the first low-weight string with weight > 0."""
    if mode == DIRECT:
        return 0, 1.0
    n = psi.n_sites
    kern = _kernels.get_backend(backend)
    support = psi.support()
    for weight in range(2, max_weight + 1, 2):
        cands = np.array([v for v in range(1, 1 << (2 * n)) if v.bit_count() == weight
                          and v != (1 << (2 * n)) - 1], dtype=np.uint64)
        xs = kern.string_expectations(cands, psi.amplitudes, support, n).real
        hit = np.flatnonzero(xs * xs > 0)
        if hit.size:
            return int(cands[hit[0]]), float(xs[hit[0]])
    raise SamplerError(f"no string of weight <= {max_weight} with nonzero expectation")


@dataclass(frozen=True)
class ChainResult:
    sre: dict
    acceptance_rate: float
    n_recorded: int
    mode: str
    batch_means: dict = field(repr=False, default_factory=dict)


def _draws(rng: np.random.Generator, n: int, steps: int):
    return (rng.integers(0, n, steps), rng.integers(0, n - 1, steps),
            rng.integers(0, 4, steps), rng.integers(0, 2, steps), rng.random(steps))


def _run_one(psi: PureState, cfg: ChainConfig, seed_seq, v0: int, backend):
    kern = _kernels.get_backend(backend)
    n = psi.n_sites
    steps = cfg.burn_in + cfg.samples_per_chain * cfg.thinning
    rng = np.random.Generator(np.random.Philox(seed_seq))
    vs, xs, acc = kern.metropolis_chain(psi.amplitudes, psi.support(), n, v0,
                                        *_draws(rng, n, steps), cfg.mode == FILTERED)
    return vs, xs, acc


def run_chain(psi: PureState, cfg: ChainConfig, *, trace_path: str | Path | None = None,
              workers: int = 1, backend: str | None = None) -> ChainResult:
    """Sample ``cfg.chain_count`` independent chains and estimate ``M_alpha`` and ``M~_alpha``.

    Error bars come from batch means (one batch per chain unless
    ``batches_per_chain`` > 1) propagated through the logarithm.
    """
    n = psi.n_sites
    if n < 2:
        raise ParameterError("sampling needs N >= 2")
    d = 1 << n
    v0, _ = find_start(psi, cfg.mode, backend=backend)
    seeds = np.random.SeedSequence(int(cfg.seed)).spawn(cfg.chain_count)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            runs = list(pool.map(lambda s: _run_one(psi, cfg, s, v0, backend), seeds))
    else:
        runs = [_run_one(psi, cfg, s, v0, backend) for s in seeds]

    samples = []
    accepted = 0
    total = 0
    for vs, xs, acc in runs:
        accepted += int(acc.sum())
        total += acc.shape[0]
        if cfg.measure == EVERY_STEP:
            samples.append(xs[cfg.burn_in::cfg.thinning])
        else:
            samples.append(xs[cfg.burn_in:][acc[cfg.burn_in:] == 1])
    if any(s.size < cfg.batches_per_chain for s in samples):
        raise SamplerError("too few recorded samples for the requested batches")

    if trace_path is not None:
        rows = ((t, format(int(v), "x"), float(x), int(a), c)
                for c, (vs, xs, acc) in enumerate(runs)
                for t, (v, x, a) in enumerate(zip(vs, xs, acc)))
        write_csv(trace_path, ("step", "string_hex", "x", "accepted_flag", "chain"), rows)

    results = {}
    batch_record = {}
    for alpha in cfg.alphas:
        batch = [np.mean(part) for s in samples
                 for part in np.array_split(estimator(s, alpha), cfg.batches_per_chain)]
        mean = float(np.mean(np.concatenate([estimator(s, alpha) for s in samples])))
        se = standard_error(batch)
        batch_record[alpha] = batch
        results[alpha] = _assemble(alpha, mean, se, d, cfg.mode)
    n_rec = int(sum(s.size for s in samples))
    return ChainResult(results, accepted / total if total else 0.0, n_rec, cfg.mode, batch_record)


def _assemble(alpha: float, mean: float, se: float, d: int, mode: str) -> SreResult:
    """Turn a sampled estimator mean into direct and filtered entropies.

    The identity and parity strings contribute exactly 1 each to ``sum x^(2 alpha)``,
    which lets one variant be rebuilt from the other.
    """
    if alpha == 1.0:
        m = -mean
        ratio = (d - 2) / d
        if mode == FILTERED:
            return SreResult(1.0, 1.0, ratio * m, m, 1.0, "sampled", ratio * se, se)
        return SreResult(1.0, 1.0, m, m / ratio, 1.0, "sampled", se, se / ratio)
    if mode == FILTERED:
        zf, sef = mean, se
        zeta = (2.0 + (d - 2) * zf) / d
        sez = (d - 2) / d * sef
    else:
        zeta, sez = mean, se
        zf = (d * zeta - 2.0) / (d - 2)
        sef = d / (d - 2) * sez
    return SreResult(alpha, zeta, renyi_from_moment(zeta, alpha), renyi_from_moment(zf, alpha), zf,
                     "sampled", entropy_stderr(zeta, sez, alpha), entropy_stderr(zf, sef, alpha))
