import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncgdist import moyal
from ncgdist.algebra import State
from ncgdist.solver import spectral_distance
from ncgdist.triple import truncated_moyal_triple


@pytest.mark.parametrize("m, n, expected", [(0, 1, 1.0), (0, 2, 1 + 1 / math.sqrt(2)), (4, 4, 0.0)])
def test_eigenstate_examples(m, n, expected):
    assert moyal.moyal_eigenstate_distance(2.0, m, n) == pytest.approx(expected)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 5), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_eigenstate_additivity(theta, a, b, c):
    m, n, p = sorted((a, b, c))
    d = moyal.moyal_eigenstate_distance
    assert d(theta, m, p) == pytest.approx(d(theta, m, n) + d(theta, n, p), rel=1e-14)
    assert d(theta, m, n) == d(theta, n, m)


def test_truncation_converges_from_below():
    # eigenstates 0 and 1 of the truncated plane at theta = 2
    t = truncated_moyal_triple(4, 2.0)
    w0, w1 = State.pure(t.algebra, 0, [1, 0, 0, 0]), State.pure(t.algebra, 0, [0, 1, 0, 0])
    assert spectral_distance(t, w0, w1).value == pytest.approx(1.0, abs=0.02)


@pytest.mark.parametrize("kappa, expected", [(3 + 4j, 5.0), (0, 0.0)])
def test_translation(kappa, expected):
    assert moyal.translation_distance(kappa) == expected


def test_translation_phase_invariance():
    assert moyal.translation_distance(2 * np.exp(0.7j)) == pytest.approx(2.0)


def test_quantum_lengths():
    q = moyal.QuantumLengthParams(1.0, 0, 0)
    assert moyal.quantum_sq_length(q) == pytest.approx(2.0)
    shifted = moyal.QuantumLengthParams(1.0, 0, 0, 1 + 1j, 1 + 1j)
    assert moyal.quantum_sq_length(shifted) == pytest.approx(2.0)
    coherent = moyal.QuantumLengthParams(1.0, 0, 0, 0, 0.3 - 0.4j)
    assert moyal.modified_quantum_length(coherent) == pytest.approx(0.5)
    eig = moyal.QuantumLengthParams(1.0, 0, 3)
    assert moyal.modified_quantum_length(eig) == pytest.approx(math.sqrt(7) - 1)


def test_gap_decreases_below_one_percent():
    gaps = [moyal.eigen_relative_gap(1.0, 0, n) for n in (10, 20, 50, 100)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.01


@pytest.mark.parametrize("m, n", [(0, 10), (3, 40), (10, 100)])
def test_riemann_bounds(m, n):
    lo, hi = moyal.riemann_bounds(m, n)
    s = math.fsum(1 / math.sqrt(2 * k) for k in range(m + 1, n + 1))
    assert lo <= s <= hi


def test_doubled_plane():
    assert moyal.doubled_plane_distance(3.0, 0.25) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        moyal.doubled_plane_distance(1.0, 0.0)


@pytest.mark.parametrize("args", [(0.0, 0, 1), (1.0, -1, 1)])
def test_validation(args):
    with pytest.raises(ValueError):
        moyal.QuantumLengthParams(*args)
