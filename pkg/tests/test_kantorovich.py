import math

import numpy as np
import pytest

from ncgdist.algebra import Algebra, BlochPoint, State, mix_states, random_state, state_of_bloch
from ncgdist.kantorovich import (KantorovichBracket, PurePairConstraint, kantorovich_bracket,
                                 sample_pure_pairs, wasserstein_upper)
from ncgdist.solver import spectral_distance
from ncgdist.triple import m2_diagonal_triple, truncated_moyal_triple, two_point_triple


def test_two_point_single_pair(c2_points):
    t = two_point_triple(2.0)
    pairs = sample_pure_pairs(t, 3, seed=0)
    assert len(pairs) == 1
    assert pairs[0].bound == pytest.approx(0.5)


def test_two_point_is_exact(rng):
    t = two_point_triple(1.5)
    cons = sample_pure_pairs(t, 2, seed=1)
    alg = t.algebra
    for _ in range(5):
        a, b = random_state(alg, rng), random_state(alg, rng)
        d = spectral_distance(t, a, b).value
        assert wasserstein_upper(t, a, b, cons) == pytest.approx(d, rel=1e-8, abs=1e-12)


def test_m2_keeps_only_equal_heights():
    t = m2_diagonal_triple(0.0, 1.0)
    for p in sample_pure_pairs(t, 6, seed=2):
        assert abs(p.first.densities[0][0, 0] - p.second.densities[0][0, 0]) < 1e-8


def test_moyal_sandwich_and_monotonicity(rng):
    t = truncated_moyal_triple(2, 1.0)
    cons = sample_pure_pairs(t, 20, seed=3)
    a, b = random_state(t.algebra, rng), random_state(t.algebra, rng)
    d = spectral_distance(t, a, b).value
    w_all = wasserstein_upper(t, a, b, cons)
    w_some = wasserstein_upper(t, a, b, cons[:12])
    assert d <= w_all + 1e-6
    assert w_all <= w_some + 1e-9


def test_segment_exact_with_generating_pair():
    t = truncated_moyal_triple(2, 1.0)
    w1, w2 = state_of_bloch(BlochPoint(0, 0, 1)), state_of_bloch(BlochPoint(0.6, 0, -0.8))
    cons = sample_pure_pairs(t, 5, seed=4)
    a, b = mix_states(w1, w2, 0.9), mix_states(w1, w2, 0.2)
    w = wasserstein_upper(t, a, b, cons, must_include=[(w1, w2)])
    assert w == pytest.approx(0.7 * spectral_distance(t, w1, w2).value, rel=1e-6)


def test_unbounded_reports_infinite():
    t = truncated_moyal_triple(2, 1.0)
    cons = sample_pure_pairs(t, 1, seed=5)
    a, b = random_state(t.algebra, np.random.default_rng(0)), random_state(t.algebra, np.random.default_rng(1))
    assert wasserstein_upper(t, a, b, cons) == math.inf


def test_errors(c2_points):
    t = two_point_triple(0.0)
    with pytest.raises(RuntimeError):
        sample_pure_pairs(t, 2)
    with pytest.raises(ValueError):
        sample_pure_pairs(two_point_triple(1.0), 0)
    with pytest.raises(ValueError):
        PurePairConstraint(*c2_points, math.inf)
    with pytest.raises(ValueError):
        wasserstein_upper(two_point_triple(1.0), *c2_points, [])


def test_bracket_json(c2_points):
    br = kantorovich_bracket(two_point_triple(4.0), *c2_points, pairs=2)
    out = br.to_json()
    assert out["d_D"] == pytest.approx(0.25) and out["gap"] == pytest.approx(0, abs=1e-9)
    assert KantorovichBracket(math.inf, math.inf).to_json()["W_upper"] == "infinite"
