"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Ground-state ensembles use master seed 20250101 and quench ensembles 20250102,
both through ``realization_seed``. The seeds are fixed; nothing is retried.
"""

import time
from functools import lru_cache
from itertools import product

import numpy as np
import pytest

from conftest import BACKENDS, micro_state, random_state
from sykmagic import _kernels
from sykmagic.dynamics import QuenchPlan, _Evolution, product_state, quench_series, saturation_value, \
    spectrum_snapshot
from sykmagic.eigensolve import eig_hermitian, ground_state
from sykmagic.experiments import ExperimentConfig, numeric_payload, realization_seed, run
from sykmagic.fock import half_filling
from sykmagic.hamiltonians import SYK2, SYK4, build_sector_matrix, sample_model
from sykmagic.majorana import MajoranaString, dense_oracle, even_strings_array
from sykmagic.sampler import FILTERED, ChainConfig, run_chain
from sykmagic.spectrum import GAUSSIAN, LAPLACE, exact_spectrum, fit_both, sre

GS_MASTER = 20250101
QUENCH_MASTER = GS_MASTER + 1
ENSEMBLE = {4: 25, 6: 25, 8: 25, 10: 10}
MODELS = (SYK4, SYK2)

pytestmark = pytest.mark.acceptance


@lru_cache(maxsize=None)
def gs(kind, n, index):
    basis = half_filling(n)
    h = build_sector_matrix(sample_model(kind, n, realization_seed(GS_MASTER, kind, n, index)), basis)
    return ground_state(eig_hermitian(h), basis)


@lru_cache(maxsize=None)
def gs_entropies(kind, n):
    """``(M_2, M~_2)`` for every realization of the fixed ensemble."""
    rows = []
    for i in range(ENSEMBLE[n]):
        r = sre(exact_spectrum(gs(kind, n, i), allow_large=True), 2)
        rows.append((r.M, r.M_filtered))
    return np.array(rows)


def quench_plan(kind, index, n=8):
    return QuenchPlan(sample_model(kind, n, realization_seed(QUENCH_MASTER, kind, n, index)))


def test_criterion_01_oracle_equivalence(verdict):
    start = time.perf_counter()
    rng = np.random.default_rng(GS_MASTER)
    worst = 0.0
    for n in range(1, 5):
        vs = even_strings_array(n)
        oracles = [dense_oracle(MajoranaString(n, int(v))) for v in vs]
        for _ in range(100):
            psi = random_state(n, rng, parity=None)
            ref = np.array([np.vdot(psi.amplitudes, o @ psi.amplitudes) for o in oracles])
            for b in BACKENDS:
                kern = _kernels.get_backend(b)
                fast = kern.string_expectations(vs, psi.amplitudes, psi.support(), n)
                full = kern.even_spectrum(psi.amplitudes, n)
                worst = max(worst, np.max(np.abs(fast - ref)), np.max(np.abs(full - ref)))
    elapsed = time.perf_counter() - start
    ok = verdict(1, worst <= 1e-12 and elapsed < 60,
                 f"max |fast - dense| = {worst:.2e} over N=1..4, backends {BACKENDS} ({elapsed:.1f} s)")
    assert ok


def test_criterion_02_purity(verdict):
    start = time.perf_counter()
    worst = 0.0
    count = 0
    for kind, n in product(MODELS, (4, 6, 8)):
        for i in range(5):
            worst = max(worst, abs(exact_spectrum(gs(kind, n, i)).purity() - 1.0))
            count += 1
        ev = _Evolution(quench_plan(kind, 0, n))
        for t in (0.0, 0.1, 1.0, 10.0):
            worst = max(worst, abs(exact_spectrum(ev.state(t)[0]).purity() - 1.0))
            count += 1
    elapsed = time.perf_counter() - start
    ok = verdict(2, worst <= 1e-10 and elapsed < 300,
                 f"max |purity - 1| = {worst:.2e} over {count} ground and quench states ({elapsed:.1f} s)")
    assert ok


def test_criterion_03_stabilizer_zero(verdict):
    worst = 0.0
    count = 0
    for n in range(1, 9):
        for mask in range(1 << n):
            pattern = "".join("1" if (mask >> i) & 1 else "0" for i in range(n))
            spec = exact_spectrum(product_state(pattern))
            for a in (1, 2, 3):
                r = sre(spec, a)
                # one site leaves no strings besides identity and parity, so M~ is undefined there
                worst = max(worst, abs(r.M), abs(r.M_filtered) if n > 1 else 0.0)
            count += 1
    ok = verdict(3, worst <= 1e-10, f"max |M|, |M~| = {worst:.2e} over {count} product states, N=1..8 (M~ from N=2), alpha 1..3")
    assert ok


def test_criterion_04_micro_case(verdict):
    r = sre(exact_spectrum(micro_state()), 2)
    e1 = abs(r.M - np.log(4 / 3))
    e2 = abs(r.M_filtered - np.log(2))
    ok = verdict(4, e1 <= 1e-12 and e2 <= 1e-12, f"|M2 - ln 4/3| = {e1:.1e}, |M~2 - ln 2| = {e2:.1e}")
    assert ok


def test_criterion_05_sampler_vs_exact(verdict):
    start = time.perf_counter()
    parts = []
    ok = True
    for n in (6, 8):
        inside = 0
        for i in range(20):
            psi = gs(SYK4, n, i)
            exact = sre(exact_spectrum(psi), 2).M_filtered
            cfg = ChainConfig(n_samples=100_000, mode=FILTERED, seed=realization_seed(GS_MASTER, SYK4, n, i) + 1)
            r = run_chain(psi, cfg).sre[2.0]
            inside += abs(r.M_filtered - exact) <= 3 * r.stderr_filtered
        parts.append(f"N={n}: {inside}/20")
        ok &= inside >= 19
    elapsed = time.perf_counter() - start
    ok = verdict(5, bool(ok) and elapsed < 900,
                 f"filtered M~2 within 3 SE of exact, {', '.join(parts)} ({elapsed:.1f} s)")
    assert ok


def test_criterion_06_distribution_dichotomy(verdict):
    start = time.perf_counter()
    wins = {}
    for kind in MODELS:
        laplace = 0
        for i in range(10):
            fits = fit_both(exact_spectrum(gs(kind, 8, i)))
            laplace += fits[LAPLACE].log_likelihood > fits[GAUSSIAN].log_likelihood
        wins[kind] = laplace
    elapsed = time.perf_counter() - start
    ok = wins[SYK2] >= 9 and 10 - wins[SYK4] >= 9 and elapsed < 600
    ok = verdict(6, ok, f"Laplace preferred: SYK2 {wins[SYK2]}/10, SYK4 {wins[SYK4]}/10 "
                        f"(needs >= 9 and <= 1) ({elapsed:.1f} s)")
    assert ok


def test_criterion_07_magic_ordering(verdict):
    parts = []
    ok = True
    for n in (8, 10):
        a, b = gs_entropies(SYK4, n), gs_entropies(SYK2, n)
        for col, name in ((0, "M2"), (1, "M~2")):
            diff = a[:, col].mean() - b[:, col].mean()
            spread = np.hypot(a[:, col].std(ddof=1), b[:, col].std(ddof=1))
            ok &= diff > spread
            parts.append(f"N={n} {name} {diff:.3f} > {spread:.3f}")
        bound = n * np.log(2)
        ok &= max(a[:, 0].mean(), b[:, 0].mean()) < bound
    ok = verdict(7, bool(ok), "SYK - SYK2 vs combined std: " + "; ".join(parts))
    assert ok


def test_criterion_08_linear_scaling(verdict):
    ns = np.array(sorted(ENSEMBLE), dtype=float)
    parts = []
    ok = True
    for kind in MODELS:
        means = np.array([gs_entropies(kind, int(n))[:, 1].mean() for n in ns])
        slope = np.polyfit(ns, means, 1)[0]
        r2 = np.corrcoef(ns, means)[0, 1] ** 2
        ok &= slope > 0 and r2 > 0.98
        parts.append(f"{kind} slope {slope:.3f} r2 {r2:.4f}")
    ok = verdict(8, bool(ok), "; ".join(parts))
    assert ok


def test_criterion_09_quench_profile(verdict):
    start = time.perf_counter()
    realizations = 25
    curves, sat, gauss_wins, laplace_wins = {}, {}, {}, {}
    times = None
    for kind in MODELS:
        rows, s, lap = [], [], 0
        for i in range(realizations):
            plan = quench_plan(kind, i)
            series = quench_series(plan)
            times = series.times
            rows.append(series.M2)
            s.append(saturation_value(series))
            _, fits = spectrum_snapshot(plan, 10.0)
            lap += fits[LAPLACE].log_likelihood > fits[GAUSSIAN].log_likelihood
        curves[kind], sat[kind] = np.array(rows), float(np.mean(s))
        laplace_wins[kind], gauss_wins[kind] = lap, realizations - lap

    initial = max(float(np.max(np.abs(c[:, 0]))) for c in curves.values())
    early = times <= 1.0
    worst_z = np.inf
    monotone = True
    for c in curves.values():
        steps = np.diff(c[:, early], axis=1)
        mean = steps.mean(axis=0)
        se = steps.std(axis=0, ddof=1) / np.sqrt(realizations)
        monotone &= bool(np.all(mean + 3 * se >= 0))
        worst_z = min(worst_z, float(np.min(mean[se > 0] / se[se > 0])))
    need = int(np.ceil(0.9 * realizations))
    elapsed = time.perf_counter() - start
    ok = (initial <= 1e-10 and monotone and sat[SYK4] > sat[SYK2]
          and laplace_wins[SYK2] >= need and gauss_wins[SYK4] >= need and elapsed < 1800)
    ok = verdict(9, ok, f"M2(0) <= {initial:.1e}; min step z up to t=1 {worst_z:.1f}; "
                        f"saturation SYK {sat[SYK4]:.3f} > SYK2 {sat[SYK2]:.3f}; t=10 Laplace preferred "
                        f"SYK2 {laplace_wins[SYK2]}/25, Gaussian preferred SYK {gauss_wins[SYK4]}/25 "
                        f"({elapsed:.1f} s)")
    assert ok


DETERMINISM_CONFIGS = {
    "gs-spectrum": {"N": [4, 6], "realizations": {4: 3, 6: 2}},
    "gs-sre": {"N": [4, 6], "realizations": {4: 3, 6: 2}, "exact_max_sites": 4,
               "sampler": {"n_samples": 4000, "chain_count": 4, "burn_in": 100}},
    "quench": {"N": [4], "realizations": {4: 3},
               "quench": {"times": [0.0, 0.5, 1.0, 2.0], "snapshot_times": [0.5, 1.0], "estimator": "sampled"},
               "sampler": {"n_samples": 2000, "chain_count": 4, "burn_in": 100}},
    "benchmark": {"N": [4], "realizations": {4: 2},
                  "sampler": {"n_samples": 4000, "chain_count": 4, "burn_in": 100}},
}


def test_criterion_10_determinism(verdict, tmp_path):
    same = {}
    for command, extra in DETERMINISM_CONFIGS.items():
        cfg = ExperimentConfig.from_mapping({"schema_version": 1, "command": command, "models": ["syk4", "syk2"],
                                             "master_seed": GS_MASTER, **extra})
        one = run(cfg, workers=1, out_dir=tmp_path / command / "w1")
        eight = run(cfg, workers=8, out_dir=tmp_path / command / "w8")
        identical = numeric_payload(one) == numeric_payload(eight)
        for csv in sorted((tmp_path / command / "w1").glob("*.csv")):
            identical &= csv.read_bytes() == (tmp_path / command / "w8" / csv.name).read_bytes()
        same[command] = identical
    ok = verdict(10, all(same.values()),
                 "workers 1 vs 8 byte-identical: " + ", ".join(f"{k} {v}" for k, v in same.items()))
    assert ok
