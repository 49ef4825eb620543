import numpy as np
import pytest

from sykmagic import _kernels
from sykmagic._kernels import _fallback
from sykmagic.majorana import MajoranaString, dense_oracle, even_strings_array

from conftest import random_state, syk_ground_state

needs_compiled = pytest.mark.skipif("cython" not in _kernels.available_backends(), reason="extension not built")


def test_backend_selection():
    assert _kernels.get_backend("python") is _fallback
    assert _kernels.BACKEND in _kernels.available_backends()
    with pytest.raises(ValueError):
        _kernels.get_backend("fortran")


@pytest.mark.parametrize("n", [1, 2, 3])
def test_decode_matches_oracle(n):
    d = 1 << n
    for v in range(1 << (2 * n)):
        flip, gmask, phase = _fallback.decode(v, n)
        mat = np.zeros((d, d), dtype=np.complex128)
        for s in range(d):
            mat[s ^ flip, s] = 1j ** phase * (-1) ** (s & gmask).bit_count()
        assert np.allclose(mat, dense_oracle(MajoranaString(n, v)), atol=1e-14)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_even_spectrum_matches_string_expectations(n, backend):
    psi = random_state(n, np.random.default_rng(n), parity=0)
    kern = _kernels.get_backend(backend)
    vs = even_strings_array(n)
    full = kern.even_spectrum(psi.amplitudes, n)
    direct = kern.string_expectations(vs, psi.amplitudes, psi.support(), n)
    assert np.max(np.abs(full - direct)) < 1e-12


@needs_compiled
@pytest.mark.parametrize("n", [4, 8])
def test_backends_agree(n):
    psi = syk_ground_state("SYK4", n, 1)
    py, cy = _kernels.get_backend("python"), _kernels.get_backend("cython")
    assert np.max(np.abs(py.even_spectrum(psi.amplitudes, n) - cy.even_spectrum(psi.amplitudes, n))) < 1e-13
    rng = np.random.default_rng(0)
    steps = 3000
    draws = (rng.integers(0, n, steps), rng.integers(0, n - 1, steps), rng.integers(0, 4, steps),
             rng.integers(0, 2, steps), rng.random(steps))
    for filtered in (False, True):
        v0 = 0 if not filtered else 0b11
        a = py.metropolis_chain(psi.amplitudes, psi.support(), n, v0, *draws, filtered)
        b = cy.metropolis_chain(psi.amplitudes, psi.support(), n, v0, *draws, filtered)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[2], b[2])
        assert np.max(np.abs(a[1] - b[1])) < 1e-13


def test_benchmark_script_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_backends.py"
    spec = importlib.util.spec_from_file_location("bench_backends", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--sites", "4", "--repeat", "1", "--steps", "500", "--strings", "50"])
    out = capsys.readouterr().out
    assert "metropolis_chain" in out and "even_spectrum" in out
