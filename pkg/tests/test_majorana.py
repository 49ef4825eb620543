from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sykmagic.errors import ParameterError, SizeGuardError
from sykmagic.fock import basis_state
from sykmagic.majorana import (MajoranaString, apply_string, dense_oracle, enumerate_even_strings,
                               even_string_at, even_string_count, even_strings_array, expectation, expectations,
                               hermitizing_phase_exponent)

from conftest import micro_state, random_state


def literal_phase(v: int, bits: int) -> int:
    """``v^T omega_L v`` with omega_L the strictly lower-triangular matrix of ones."""
    vec = np.array([(v >> b) & 1 for b in range(bits)])
    omega = np.tril(np.ones((bits, bits), dtype=int), -1)
    return int(vec @ omega @ vec) & 3


def test_phase_examples():
    assert hermitizing_phase_exponent(0) == 0
    assert hermitizing_phase_exponent(0b11) == 1
    assert hermitizing_phase_exponent(0b1111) == 2


def test_phase_matches_quadratic_form():
    for bits in range(1, 13):
        for v in range(1 << bits) if bits <= 10 else range(0, 1 << bits, 7):
            assert hermitizing_phase_exponent(v) == literal_phase(v, bits)


def test_constructors_and_flags():
    assert MajoranaString.identity(3).v == 0
    p = MajoranaString.parity_operator(3)
    assert p.v == 0b111111 and p.weight == 6 and p.parity == 0
    assert MajoranaString(2, 0b0111).parity == 1
    assert MajoranaString(2, 0b1101).site_ops() == [1, 3]
    with pytest.raises(ParameterError):
        MajoranaString(2, 1 << 4)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 16).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << (2 * n)) - 1))))
def test_hex_and_label_round_trip(args):
    n, v = args
    m = MajoranaString(n, v)
    assert MajoranaString.from_hex(m.to_hex(), n) == m
    assert MajoranaString.from_label(m.label, n) == m


def test_label_format():
    assert MajoranaString(2, 0b0011).label == "eta1.chi1"
    assert MajoranaString(2, 0b0100).label == "eta2"
    assert MajoranaString(2, 0).label == "I"
    for bad in ("eta3", "foo1", "eta1.eta1"):
        with pytest.raises(ParameterError):
            MajoranaString.from_label(bad, 2)


def test_even_enumeration_counts():
    assert [m.v for m in enumerate_even_strings(1)] == [0, 3]
    assert even_string_count(2) == 8
    assert even_string_count(8) == 32768
    arr = even_strings_array(4)
    assert np.array_equal(arr, [v for v in range(256) if v.bit_count() % 2 == 0])
    assert all(even_string_at(int(v) >> 1) == v for v in arr)


def test_oracle_examples():
    assert np.array_equal(dense_oracle(MajoranaString(1, 0)), np.eye(2))
    assert np.allclose(dense_oracle(MajoranaString(1, 0b11)), np.diag([1, -1]))
    with pytest.raises(SizeGuardError):
        dense_oracle(MajoranaString(7, 0))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_oracle_orthonormal_and_hermitian(n):
    d = 1 << n
    mats = [dense_oracle(m) for m in enumerate_even_strings(n)]
    gram = np.array([[np.trace(a @ b) / d for b in mats] for a in mats])
    assert np.allclose(gram, np.eye(len(mats)), atol=1e-14)
    assert all(np.allclose(m, m.conj().T) for m in mats)


def test_all_pairs_trace_at_two_sites():
    mats = [dense_oracle(MajoranaString(2, v)) for v in range(16)]
    gram = np.array([[np.trace(a @ b) for b in mats] for a in mats])
    assert np.allclose(gram, 4 * np.eye(16), atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_apply_string_matches_oracle(n):
    rng = np.random.default_rng(n)
    psi = random_state(n, rng, parity=None)
    for v in range(1 << (2 * n)):
        m = MajoranaString(n, v)
        assert np.allclose(apply_string(m, psi).amplitudes, dense_oracle(m) @ psi.amplitudes, atol=1e-14)


def test_apply_examples():
    psi = random_state(2, np.random.default_rng(0))
    assert np.array_equal(apply_string(MajoranaString(2, 0), psi).amplitudes, psi.amplitudes)
    occupied = basis_state(2, 0b01)
    assert np.allclose(apply_string(MajoranaString(2, 0b11), occupied).amplitudes, -occupied.amplitudes)
    for v in (v for v in range(16) if v.bit_count() == 3):
        out = apply_string(MajoranaString(2, v), basis_state(2, 0b01))
        assert all(s.bit_count() % 2 == 0 for s in np.flatnonzero(out.amplitudes))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.data())
def test_involution(seed, n, data):
    v = data.draw(st.integers(0, (1 << (2 * n)) - 1))
    psi = random_state(n, np.random.default_rng(seed), parity=None)
    m = MajoranaString(n, v)
    once = apply_string(m, psi)
    twice = apply_string(m, once)
    assert abs(np.linalg.norm(once.amplitudes) - 1) < 1e-14
    sign = twice.amplitudes @ psi.amplitudes.conj()
    assert abs(abs(sign) - 1) < 1e-12 and abs(sign.imag) < 1e-12
    assert np.allclose(twice.amplitudes, sign.real * psi.amplitudes, atol=1e-14)


def test_expectation_examples():
    rng = np.random.default_rng(4)
    psi = random_state(4, rng, sector=2)
    assert abs(expectation(MajoranaString.identity(4), psi) - 1) < 1e-14
    assert abs(expectation(MajoranaString.parity_operator(4), psi) - 1) < 1e-14
    psi3 = random_state(4, rng, sector=3)
    assert abs(expectation(MajoranaString.parity_operator(4), psi3) + 1) < 1e-14
    assert expectation(MajoranaString(4, 0b1), psi) == 0.0
    assert abs(expectation(MajoranaString(2, 0b11), micro_state()) + np.sqrt(2) / 2) < 1e-14


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_expectations_match_oracle(n, backend):
    rng = np.random.default_rng(100 + n)
    vs = np.arange(1 << (2 * n), dtype=np.uint64)
    mats = [dense_oracle(MajoranaString(n, int(v))) for v in vs]
    for k in range(100):
        psi = random_state(n, rng, parity=k % 2)
        fast = expectations(vs, psi, backend=backend)
        slow = np.array([np.vdot(psi.amplitudes, m @ psi.amplitudes) for m in mats])
        assert np.max(np.abs(slow.imag)) < 1e-12
        assert np.max(np.abs(fast - slow.real)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_purity_over_all_strings(seed, n):
    psi = random_state(n, np.random.default_rng(seed), parity=seed % 2)
    x = expectations(np.arange(1 << (2 * n), dtype=np.uint64), psi)
    assert abs(np.dot(x, x) / (1 << n) - 1) < 1e-10
