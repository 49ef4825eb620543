"""Compare the compiled and pure-Python kernels on identical inputs.

Usage: python3 benchmarks/bench_backends.py [--sites 6 8 10] [--repeat 3] [--steps 200000]

Each kernel is timed on a SYK ground state; outputs of the two backends are
checked for agreement before timings are reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sykmagic import _kernels
from sykmagic.eigensolve import ground_state, lowest_eigenpairs
from sykmagic.fock import half_filling
from sykmagic.hamiltonians import build_sector_matrix, sample_model
from sykmagic.majorana import even_strings_array


def best_of(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def chain_inputs(n, steps, seed=0):
    rng = np.random.default_rng(seed)
    return (rng.integers(0, n, steps), rng.integers(0, n - 1, steps), rng.integers(0, 4, steps),
            rng.integers(0, 2, steps), rng.random(steps))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sites", type=int, nargs="+", default=[6, 8, 10])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--strings", type=int, default=20_000, help="random even strings per batch")
    args = ap.parse_args(argv)

    backends = _kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; timing the Python fallback only")
    print(f"{'kernel':<22}{'N':>4}" + "".join(f"{b + ' [s]':>16}" for b in backends) + f"{'speed-up':>12}")
    for n in args.sites:
        basis = half_filling(n)
        psi = ground_state(lowest_eigenpairs(build_sector_matrix(sample_model("syk4", n, 1), basis)), basis)
        amps, support = psi.amplitudes, psi.support()
        rng = np.random.default_rng(n)
        vs = rng.choice(even_strings_array(n), size=min(args.strings, 1 << (2 * n - 1)), replace=False)
        draws = chain_inputs(n, args.steps)
        jobs = {
            "string_expectations": lambda k: k.string_expectations(vs, amps, support, n),
            "even_spectrum": lambda k: k.even_spectrum(amps, n),
            "metropolis_chain": lambda k: k.metropolis_chain(amps, support, n, 0, *draws, False)[1],
        }
        for name, job in jobs.items():
            times, outs = [], []
            for b in backends:
                t, out = best_of(lambda: job(_kernels.get_backend(b)), args.repeat)
                times.append(t)
                outs.append(np.asarray(out))
            if len(outs) == 2 and not np.allclose(outs[0], outs[1], atol=1e-12):
                raise SystemExit(f"{name} N={n}: backends disagree")
            ratio = f"{times[0] / times[-1]:>11.1f}x" if len(times) == 2 else f"{'-':>12}"
            print(f"{name:<22}{n:>4}" + "".join(f"{t:>16.4f}" for t in times) + ratio)


if __name__ == "__main__":
    main()
