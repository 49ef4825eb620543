from functools import lru_cache

import numpy as np
import pytest

from sykmagic import _kernels
from sykmagic.eigensolve import eig_hermitian, ground_state
from sykmagic.fock import PureState, half_filling
from sykmagic.hamiltonians import build_sector_matrix, sample_model

BACKENDS = _kernels.available_backends()
ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def verdict(request, capsys):
    """Record one PASS/FAIL line for an acceptance criterion and echo it immediately."""

    def record(number: int, passed: bool, detail: str) -> bool:
        line = f"{'PASS' if passed else 'FAIL'} criterion {number:>2}: {detail}"
        request.config.stash[ACCEPTANCE].append((number, line))
        with capsys.disabled():
            print("\n" + line)
        return passed

    return record


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@lru_cache(maxsize=None)
def syk_ground_state(kind: str, n: int, seed: int) -> PureState:
    basis = half_filling(n)
    return ground_state(eig_hermitian(build_sector_matrix(sample_model(kind, n, seed), basis)), basis)


def random_state(n: int, rng: np.random.Generator, sector: int | None = None, parity: int | None = 0) -> PureState:
    """Gaussian random state, restricted to a particle-number sector or a parity (None: no restriction)."""
    d = 1 << n
    amps = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    counts = np.bitwise_count(np.arange(d))
    if sector is not None:
        amps[counts != sector] = 0
    elif parity is not None:
        amps[(counts & 1) != parity] = 0
    return PureState(n, amps / np.linalg.norm(amps), sector_hint=sector)


def micro_state() -> PureState:
    """``cos(pi/8)|10> + sin(pi/8)|01>`` with site 0 occupied in the first term."""
    amps = np.zeros(4, dtype=np.complex128)
    amps[0b01] = np.cos(np.pi / 8)
    amps[0b10] = np.sin(np.pi / 8)
    return PureState(2, amps)
