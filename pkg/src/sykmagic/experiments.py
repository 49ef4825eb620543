"""Configuration-driven disorder sweeps and figure-data export.

A run is a list of ``(model, N, index)`` tasks. Each task derives its own seed
from the master seed, so results do not depend on the worker count or on the
order in which tasks finish. Aggregation happens in task order.

Config schema (YAML, ``schema_version: 1``)::

    schema_version: 1
    command: gs-sre            # gs-spectrum | gs-sre | quench | benchmark
    models: [syk4, syk2]
    N: [4, 6, 8]
    realizations: {4: 10}      # optional, per N; missing sizes use DEFAULT_REALIZATIONS
    alphas: [1, 2, 3]
    master_seed: 1234
    J: 1.0
    mu: 0.0
    workers: 1
    output: results
    exact_max_sites: 12        # gs-sre: exact enumeration up to this N, sampling above
    histogram_realizations: 1  # realizations per group that keep histograms
    histogram_bins: null       # null -> Freedman-Diaconis
    write_spectra: false       # gs-spectrum: spectrum CSV for every realization
    sampler: {n_samples: 500000, burn_in: 1000, thinning: 1, chain_count: 8,
              mode: filtered, measure: every_step, batches_per_chain: 1}
    quench: {times: null, snapshot_times: [0.01, 0.5, 1.0, 2.0, 10.0],
             estimator: auto, pattern: null,
             growth_window: null,        # [t_lo, t_hi] -> log-log slope of M_2 in that window
             saturation_fraction: 0.9}   # tau_S: first t with M_2 >= fraction * saturation
    backend: null              # null | python | cython
"""

from __future__ import annotations

import copy
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import yaml

from . import _kernels
from .dynamics import (SATURATION_WINDOW, QuenchPlan, default_time_grid, growth_exponent, quench_series,
                       saturation_time, saturation_value, spectrum_snapshot)
from .eigensolve import ground_state, lowest_eigenpairs
from .errors import ConfigError, NumericalConsistencyError, SamplerError
from .fock import half_filling
from .hamiltonians import PRNG_ID, SYK2, SYK4, build_sector_matrix, derive_seed, normalize_kind, sample_model
from .sampler import FILTERED, ChainConfig, run_chain
from .serialize import dumps, read_json, write_csv, write_json
from .spectrum import (EXACT_MAX_SITES, GAUSSIAN, LAPLACE, MIN_FIT_POINTS, exact_spectrum, fit_both, histogram,
                       sre, write_spectrum_csv)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
COMMANDS = ("gs-spectrum", "gs-sre", "quench", "benchmark")
DEFAULT_REALIZATIONS = {4: 800, 6: 400, 8: 200, 10: 100, 12: 25, 14: 5}
WORKERS_ENV = "SYKMAGIC_WORKERS"
ENVELOPE_NAME = "envelope.json"
_KIND_CODES = {SYK2: 2, SYK4: 4}
_SAMPLER_KEYS = ("n_samples", "burn_in", "thinning", "chain_count", "mode", "measure", "batches_per_chain")
_DEFAULT_SAMPLER = {"n_samples": 500_000, "burn_in": 1000, "thinning": 1, "chain_count": 8,
                    "mode": FILTERED, "measure": "every_step", "batches_per_chain": 1}
_DEFAULT_QUENCH = {"times": None, "snapshot_times": [0.01, 0.5, 1.0, 2.0, 10.0], "estimator": "auto",
                   "pattern": None, "growth_window": None, "saturation_fraction": 0.9}


@dataclass
class ExperimentConfig:
    command: str
    models: list
    N: list
    realizations: dict = field(default_factory=dict)
    alphas: list = field(default_factory=lambda: [1, 2, 3])
    master_seed: int = 0
    J: float = 1.0
    mu: float = 0.0
    workers: int = 1
    output: str = "results"
    exact_max_sites: int = 12
    histogram_realizations: int = 1
    histogram_bins: int | None = None
    write_spectra: bool = False
    sampler: dict = field(default_factory=dict)
    quench: dict = field(default_factory=dict)
    backend: str | None = None
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {self.schema_version}")
        if self.command not in COMMANDS:
            raise ConfigError(f"command must be one of {COMMANDS}, got {self.command!r}")
        try:
            self.models = [normalize_kind(m) for m in self.models]
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        self.N = [int(n) for n in self.N]
        if not self.models or not self.N:
            raise ConfigError("models and N must be non-empty")
        if any(n < 2 or n % 2 for n in self.N):
            raise ConfigError(f"every N must be even and >= 2, got {self.N}")
        self.realizations = {int(k): int(v) for k, v in (self.realizations or {}).items()}
        if any(v < 1 for v in self.realizations.values()):
            raise ConfigError("realization counts must be positive")
        if any(n not in self.realizations and n not in DEFAULT_REALIZATIONS for n in self.N):
            raise ConfigError("realization count missing for a size outside the default table")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        unknown = set(self.sampler) - set(_SAMPLER_KEYS)
        if unknown:
            raise ConfigError(f"unknown sampler keys {sorted(unknown)}")
        self.sampler = {**_DEFAULT_SAMPLER, **self.sampler}
        unknown = set(self.quench) - set(_DEFAULT_QUENCH)
        if unknown:
            raise ConfigError(f"unknown quench keys {sorted(unknown)}")
        self.quench = {**_DEFAULT_QUENCH, **self.quench}
        gw = self.quench["growth_window"]
        if gw is not None and (len(gw) != 2 or not 0 < gw[0] < gw[1]):
            raise ConfigError(f"growth_window must be [t_lo, t_hi] with 0 < t_lo < t_hi, got {gw}")
        if not 0 < self.quench["saturation_fraction"] <= 1:
            raise ConfigError("saturation_fraction must lie in (0, 1]")
        if self.backend not in (None, *_kernels.available_backends()):
            raise ConfigError(f"backend {self.backend!r} not available")
        self.master_seed = int(self.master_seed)
        self.alphas = [float(a) if float(a) != int(a) else int(a) for a in self.alphas]

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        for key in ("command", "models", "N"):
            if key not in data:
                raise ConfigError(f"missing config key {key!r}")
        return cls(**copy.deepcopy(data))

    def to_dict(self) -> dict:
        return {k: copy.deepcopy(getattr(self, k)) for k in self.__dataclass_fields__}

    def realization_count(self, n: int) -> int:
        return self.realizations.get(n, DEFAULT_REALIZATIONS.get(n, 0))

    def chain_config(self, seed: int, alphas=None) -> ChainConfig:
        s = self.sampler
        return ChainConfig(n_samples=s["n_samples"], burn_in=s["burn_in"], thinning=s["thinning"],
                           mode=s["mode"], alphas=tuple(alphas or self.alphas), chain_count=s["chain_count"],
                           seed=seed, measure=s["measure"], batches_per_chain=s["batches_per_chain"])

    def time_grid(self) -> np.ndarray:
        times = self.quench["times"]
        return default_time_grid() if times is None else np.asarray(times, dtype=np.float64)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return ExperimentConfig.from_mapping(data)


def resolve_workers(flag: int | None, config_value: int = 1) -> int:
    """Worker count: command-line flag, then the environment variable, then the config."""
    if flag is not None:
        return int(flag)
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from exc
    return int(config_value)


def realization_seed(master: int, kind: str, n_sites: int, index: int) -> int:
    return derive_seed(master, _KIND_CODES[kind], n_sites, index)


# -- per-realization work ----------------------------------------------------------

def _alpha_key(prefix: str, alpha) -> str:
    return f"{prefix}_{float(alpha):g}"


def _ground_state(cfg: ExperimentConfig, kind: str, n: int, seed: int):
    model = sample_model(kind, n, seed, J=cfg.J, mu=cfg.mu)
    basis = half_filling(n)
    return ground_state(lowest_eigenpairs(build_sector_matrix(model, basis)), basis)


def _hist_record(spec, bins) -> dict:
    h = histogram(spec, bins)
    return {"bin_center": h.centers, "density": h.density}


def _fit_record(spec) -> dict:
    fits = fit_both(spec)
    return {k: f.as_dict() for k, f in fits.items()}


def _task_gs_spectrum(cfg, kind, n, index, seed, out_dir):
    psi = _ground_state(cfg, kind, n, seed)
    spec = exact_spectrum(psi, allow_large=True, backend=cfg.backend)
    obs = {"energy": psi.meta["energy"], "gap": psi.meta["gap"], "purity": spec.purity(),
           "n_even_zero": spec.n_even_zero, "n_connected": int(spec.connected().size),
           "unit_peak": spec.unit_peak}
    for a in cfg.alphas:
        r = sre(spec, a)
        obs[_alpha_key("M", a)] = r.M
        obs[_alpha_key("Mf", a)] = r.M_filtered
    extras = {"degenerate": psi.meta["degenerate"]}
    if spec.connected().size >= MIN_FIT_POINTS:
        fits = _fit_record(spec)
        obs["ll_laplace_minus_gaussian"] = fits[LAPLACE]["log_likelihood"] - fits[GAUSSIAN]["log_likelihood"]
        extras["fits"] = fits
    if index < cfg.histogram_realizations:
        extras["histogram"] = _hist_record(spec, cfg.histogram_bins)
    if cfg.write_spectra and out_dir is not None:
        spectra = Path(out_dir) / "spectra"
        spectra.mkdir(parents=True, exist_ok=True)
        write_spectrum_csv(spec, spectra / f"{kind}_N{n}_r{index}.csv")
    return obs, extras


def _task_gs_sre(cfg, kind, n, index, seed, out_dir):
    psi = _ground_state(cfg, kind, n, seed)
    obs = {"energy": psi.meta["energy"]}
    if n <= cfg.exact_max_sites:
        spec = exact_spectrum(psi, allow_large=True, backend=cfg.backend)
        for a in cfg.alphas:
            r = sre(spec, a)
            obs[_alpha_key("M", a)] = r.M
            obs[_alpha_key("Mf", a)] = r.M_filtered
        return obs, {"method": "exact"}
    res = run_chain(psi, cfg.chain_config(derive_seed(seed, 1)), backend=cfg.backend)
    for a in cfg.alphas:
        r = res.sre[float(a)]
        obs[_alpha_key("M", a)] = r.M
        obs[_alpha_key("Mf", a)] = r.M_filtered
        obs[_alpha_key("stderr_M", a)] = r.stderr
        obs[_alpha_key("stderr_Mf", a)] = r.stderr_filtered
    return obs, {"method": "sampled", "acceptance_rate": res.acceptance_rate}


def _task_quench(cfg, kind, n, index, seed, out_dir):
    model = sample_model(kind, n, seed, J=cfg.J, mu=cfg.mu)
    q = cfg.quench
    snaps = tuple(q["snapshot_times"] or ())
    plan = QuenchPlan(model, cfg.time_grid(), snaps, q["estimator"], cfg.chain_config(derive_seed(seed, 1), (2,)),
                      q["pattern"])
    series = quench_series(plan, backend=cfg.backend)
    obs = {"M2_series": series.M2, "stderr_series": series.stderr, "energy_drift": float(np.ptp(series.energy))}
    lo, hi = SATURATION_WINDOW
    if np.any((series.times >= lo) & (series.times <= hi)):
        obs["saturation"] = saturation_value(series)
        obs["tau_S"] = saturation_time(series, q["saturation_fraction"])
    if q["growth_window"] is not None:
        obs["growth_exponent"] = growth_exponent(series.times, series.M2, tuple(q["growth_window"]))
    extras = {"method": series.method}
    if n <= EXACT_MAX_SITES:
        snap_rec = {}
        for t in snaps:
            spec, fits = spectrum_snapshot(plan, t, backend=cfg.backend)
            rec = {}
            if fits is not None:
                rec["fits"] = {k: f.as_dict() for k, f in fits.items()}
                obs[f"ll_laplace_minus_gaussian_t{t:g}"] = (fits[LAPLACE].log_likelihood
                                                           - fits[GAUSSIAN].log_likelihood)
            if index < cfg.histogram_realizations:
                rec["histogram"] = _hist_record(spec, cfg.histogram_bins)
            snap_rec[f"{t:g}"] = rec
        extras["snapshots"] = snap_rec
    return obs, extras


def _task_benchmark(cfg, kind, n, index, seed, out_dir):
    psi = _ground_state(cfg, kind, n, seed)
    exact = sre(exact_spectrum(psi, allow_large=True, backend=cfg.backend), 2)
    chain_cfg = cfg.chain_config(derive_seed(seed, 1), (2,))
    res = run_chain(psi, ChainConfig(chain_cfg.n_samples, chain_cfg.burn_in, chain_cfg.thinning, FILTERED, (2,),
                                     chain_cfg.chain_count, chain_cfg.seed, chain_cfg.measure,
                                     chain_cfg.batches_per_chain), backend=cfg.backend).sre[2.0]
    diff = abs(res.M_filtered - exact.M_filtered)
    z = diff / res.stderr_filtered if res.stderr_filtered else float("inf")
    return {"Mf_2_exact": exact.M_filtered, "Mf_2_sampled": res.M_filtered, "stderr": res.stderr_filtered,
            "abs_diff": diff, "z": z}, {}


_TASKS = {"gs-spectrum": _task_gs_spectrum, "gs-sre": _task_gs_sre, "quench": _task_quench,
          "benchmark": _task_benchmark}


def _run_task(args):
    cfg_dict, kind, n, index, out_dir = args
    cfg = ExperimentConfig.from_mapping(cfg_dict)
    seed = realization_seed(cfg.master_seed, kind, n, index)
    try:
        obs, extras = _TASKS[cfg.command](cfg, kind, n, index, seed, out_dir)
    except (NumericalConsistencyError, SamplerError, np.linalg.LinAlgError) as exc:
        return {"index": index, "seed": seed, "error": f"{type(exc).__name__}: {exc}"}
    obs = {k: (np.asarray(v).tolist() if isinstance(v, np.ndarray) else v) for k, v in obs.items()}
    return {"index": index, "seed": seed, "observables": obs, "extras": extras}


# -- aggregation ---------------------------------------------------------------------

def summarize(records: list[dict]) -> dict:
    """Mean and standard deviation (ddof=1; 0 for a single record) of every numeric observable.

    List-valued observables are summarised elementwise.
    """
    if not records:
        return {}
    out = {}
    for key in sorted(records[0]["observables"]):
        vals = [r["observables"].get(key) for r in records]
        if any(v is None or isinstance(v, bool) for v in vals):
            continue
        arr = np.asarray(vals, dtype=np.float64)
        std = np.std(arr, axis=0, ddof=1) if arr.shape[0] > 1 else np.zeros(arr.shape[1:])
        mean = np.mean(arr, axis=0)
        out[key] = {"mean": mean.tolist() if arr.ndim > 1 else float(mean),
                    "std": std.tolist() if arr.ndim > 1 else float(std)}
    return out


def _package_version() -> str:
    from . import __version__
    return __version__


def run(cfg: ExperimentConfig, *, workers: int | None = None, out_dir: str | Path | None = None) -> dict:
    """Execute every task, write ``envelope.json`` (and CSV side products), return the envelope."""
    workers = int(workers or cfg.workers)
    out = Path(out_dir if out_dir is not None else cfg.output)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory {out} is not writable: {exc}") from exc

    cfg_dict = cfg.to_dict()
    tasks = [(cfg_dict, kind, n, i, str(out)) for kind in cfg.models for n in cfg.N
             for i in range(cfg.realization_count(n))]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=1))
    else:
        results = [_run_task(t) for t in tasks]

    groups = []
    pos = 0
    for kind in cfg.models:
        for n in cfg.N:
            count = cfg.realization_count(n)
            chunk = results[pos:pos + count]
            pos += count
            ok = [r for r in chunk if "error" not in r]
            failed = [r for r in chunk if "error" in r]
            for f in failed:
                log.warning("realization %s of %s N=%d failed: %s", f["index"], kind, n, f["error"])
            group = {"model": kind, "N": n, "requested": count, "achieved": len(ok),
                     "realizations": ok, "failures": failed, "summary": summarize(ok)}
            if cfg.command == "quench":
                group["times"] = cfg.time_grid().tolist()
                series_path = out / f"series_{kind}_N{n}.csv"
                _write_group_series(series_path, group)
            groups.append(group)

    envelope = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg_dict,
        "groups": groups,
        "provenance": {
            "prng_id": PRNG_ID,
            "version": _package_version(),
            "backend": cfg.backend or _kernels.BACKEND,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        },
    }
    write_json(out / ENVELOPE_NAME, envelope)
    return envelope


def _write_group_series(path: Path, group: dict) -> None:
    times = group["times"]
    rows = ((t, m, s, group["model"], group["N"], rec["seed"])
            for rec in group["realizations"]
            for t, m, s in zip(times, rec["observables"]["M2_series"], rec["observables"]["stderr_series"]))
    write_csv(path, ("t", "M2", "stderr", "model", "N", "seed"), rows)


def numeric_payload(envelope: dict) -> bytes:
    """Serialised envelope without the wall-clock timestamp; the determinism contract."""
    env = copy.deepcopy(envelope)
    env.get("provenance", {}).pop("timestamp", None)
    return dumps(env).encode()


def load_envelope(path: str | Path) -> dict:
    p = Path(path)
    if p.is_dir():
        p = p / ENVELOPE_NAME
    try:
        return read_json(p)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read envelope {p}: {exc}") from exc


# -- figure export -------------------------------------------------------------------

FIGURES = ("fig1", "fig2a", "fig2b", "fig2c", "fig2d", "fig3", "fig4a", "fig4b", "fig4c", "fig4d", "benchmark")


def _need(envelope: dict, command: str, figure: str) -> list[dict]:
    got = envelope.get("config", {}).get("command")
    if got != command:
        raise ConfigError(f"{figure} needs a {command!r} envelope, got {got!r}")
    return envelope["groups"]


def _summary_value(group: dict, key: str, figure: str):
    try:
        s = group["summary"][key]
    except KeyError:
        raise ConfigError(f"{figure}: observable {key!r} missing for {group['model']} N={group['N']}") from None
    return s["mean"], s["std"]


def _alphas(envelope: dict) -> list:
    return envelope["config"]["alphas"]


def export_figure_data(envelope: dict, figure: str, out_dir: str | Path) -> list[Path]:
    """Write the tidy CSV (and JSON sidecars) for one figure panel; return the paths."""
    if figure not in FIGURES:
        raise ConfigError(f"unknown figure {figure!r}; choose from {FIGURES}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []

    if figure == "fig1":
        for g in _need(envelope, "gs-spectrum", figure):
            first = next((r for r in g["realizations"] if "histogram" in r["extras"]), None)
            if first is None:
                raise ConfigError(f"fig1: no stored histogram for {g['model']} N={g['N']}")
            stem = out / f"fig1_{g['model']}_N{g['N']}"
            h = first["extras"]["histogram"]
            write_csv(stem.with_suffix(".csv"), ("bin_center", "density"), zip(h["bin_center"], h["density"]))
            write_json(stem.with_name(stem.name + "_fits.json"),
                       {"model": g["model"], "N": g["N"], "seed": first["seed"],
                        "fits": first["extras"].get("fits", {})})
            paths += [stem.with_suffix(".csv"), stem.with_name(stem.name + "_fits.json")]
        return paths

    if figure == "fig2a":
        groups = _need(envelope, "gs-sre", figure)
        rows = []
        for g in groups:
            for a in _alphas(envelope):
                m, ms = _summary_value(g, _alpha_key("M", a), figure)
                f, fs = _summary_value(g, _alpha_key("Mf", a), figure)
                rows.append((g["model"], g["N"], float(a), m, ms, f, fs))
        path = out / "fig2a.csv"
        write_csv(path, ("model", "N", "alpha", "M_mean", "M_std", "Mf_mean", "Mf_std"), rows)
        return [path]

    if figure == "fig2b":
        rows = [(g["N"], *_summary_value(g, "M_2", figure), g["model"]) for g in _need(envelope, "gs-sre", figure)]
        path = out / "fig2b.csv"
        write_csv(path, ("N", "M2_mean", "M2_std", "model"), rows)
        return [path]

    if figure in ("fig2c", "fig2d"):
        kind = SYK2 if figure == "fig2c" else SYK4
        rows = [(g["N"], float(a), *_summary_value(g, _alpha_key("Mf", a), figure), g["model"])
                for g in _need(envelope, "gs-sre", figure) if g["model"] == kind
                for a in _alphas(envelope) if float(a) >= 2]
        if not rows:
            raise ConfigError(f"{figure}: no {kind} groups with alpha >= 2")
        path = out / f"{figure}.csv"
        write_csv(path, ("N", "alpha", "Mf_mean", "Mf_std", "model"), rows)
        return [path]

    if figure == "fig3":
        rows = []
        fits = []
        for g in _need(envelope, "quench", figure):
            rec = next((r for r in g["realizations"] if "snapshots" in r["extras"]), None)
            if rec is None:
                continue
            for t, snap in rec["extras"]["snapshots"].items():
                if "histogram" in snap:
                    h = snap["histogram"]
                    rows += [(g["model"], g["N"], float(t), c, d) for c, d in zip(h["bin_center"], h["density"])]
                fits.append({"model": g["model"], "N": g["N"], "t": float(t), "seed": rec["seed"],
                             "fits": snap.get("fits", {})})
        if not fits:
            raise ConfigError("fig3: envelope holds no spectrum snapshots")
        path = out / "fig3.csv"
        write_csv(path, ("model", "N", "t", "bin_center", "density"), rows)
        write_json(out / "fig3_fits.json", fits)
        return [path, out / "fig3_fits.json"]

    if figure in ("fig4a", "fig4b", "fig4c"):
        groups = _need(envelope, "quench", figure)
        if figure == "fig4a":
            groups = [g for g in groups if g["model"] == SYK2]
        elif figure == "fig4b":
            groups = [g for g in groups if g["model"] == SYK4]
        else:
            groups = [g for g in groups if g["N"] == 8]
        if not groups:
            raise ConfigError(f"{figure}: no matching quench groups")
        rows = []
        for g in groups:
            mean, std = _summary_value(g, "M2_series", figure)
            rows += [(t, m, s, g["model"], g["N"]) for t, m, s in zip(g["times"], mean, std)]
        path = out / f"{figure}.csv"
        write_csv(path, ("t", "M2_mean", "M2_std", "model", "N"), rows)
        return [path]

    if figure == "fig4d":
        groups = _need(envelope, "quench", figure)
        rows = [(g["N"], *_summary_value(g, "saturation", figure), g["model"]) for g in groups]
        path = out / "fig4d.csv"
        write_csv(path, ("N", "M2_saturation_mean", "M2_saturation_std", "model"), rows)
        tau_path = out / "fig4d_tau_S.csv"
        rows = [(g["N"], *_summary_value(g, "tau_S", figure), g["model"]) for g in groups]
        write_csv(tau_path, ("N", "tau_S_mean", "tau_S_std", "model"), rows)
        return [path, tau_path]

    rows = [(g["model"], g["N"], r["seed"], o["Mf_2_exact"], o["Mf_2_sampled"], o["stderr"], o["abs_diff"])
            for g in _need(envelope, "benchmark", figure) for r in g["realizations"]
            for o in [r["observables"]]]
    path = out / "benchmark.csv"
    write_csv(path, ("model", "N", "seed", "Mf2_exact", "Mf2_sampled", "stderr", "abs_diff"), rows)
    return [path]
