import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncgdist.algebra import Algebra, BlochPoint, State, random_state, state_of_bloch
from ncgdist.closed_forms import complete_graph_weights
from ncgdist.solver import (ConvergenceError, Outcome, SolverOptions, is_finite,
                            oracle_lower_bound, segment_check, spectral_distance)
from ncgdist.triple import (graph_triple, m2_diagonal_triple, seminorm, truncated_moyal_triple,
                            two_point_triple)

from conftest import graph_points


@pytest.mark.parametrize("m, expected", [(2.0, 0.5), (1.0, 1.0), (0.25j, 4.0)])
def test_two_point(c2_points, m, expected):
    res = spectral_distance(two_point_triple(m), *c2_points)
    assert res.outcome is Outcome.FINITE
    assert res.value == pytest.approx(expected, rel=1e-7)
    assert res.gap_estimate <= 1e-6 * res.upper_bound


def test_two_point_zero_coupling(c2_points):
    t = two_point_triple(0.0)
    assert not is_finite(t, *c2_points).finite
    res = spectral_distance(t, *c2_points)
    assert res.outcome is Outcome.INFINITE and res.distance() == math.inf
    assert res.witness is not None
    assert res.to_json()["outcome"] == "infinite"


def test_optimal_element_is_feasible_and_attains(c2_points):
    t = two_point_triple(3.0)
    res = spectral_distance(t, *c2_points)
    assert seminorm(t, res.optimal_element) <= 1 + 1e-8
    a, b = c2_points
    assert abs((a(res.optimal_element) - b(res.optimal_element)).real) == pytest.approx(res.value)


def test_complete_graph_n4():
    t = graph_triple(4, complete_graph_weights(4, 1.0))
    p = graph_points(4)
    assert spectral_distance(t, p[0], p[2]).value == pytest.approx(math.sqrt(0.5), rel=1e-6)


def test_moyal_poles():
    t = truncated_moyal_triple(2, 2.0)
    n, s = state_of_bloch(BlochPoint(0, 0, 1)), state_of_bloch(BlochPoint(0, 0, -1))
    assert spectral_distance(t, n, s).value == pytest.approx(1.0, rel=1e-6)


def test_m2_different_heights_infinite():
    t = m2_diagonal_triple(0.0, 1.0)
    a, b = state_of_bloch(BlochPoint(0, 0, 0.5)), state_of_bloch(BlochPoint(0.3, 0, 0.2))
    assert not is_finite(t, a, b).finite


def test_identical_states_zero(rng):
    t = truncated_moyal_triple(2, 1.0)
    s = random_state(t.algebra, rng)
    assert spectral_distance(t, s, s).value == 0.0


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_metric_axioms(seed):
    rng = np.random.default_rng(seed)
    t = truncated_moyal_triple(2, 1.0)
    a, b, c = (random_state(t.algebra, rng) for _ in range(3))
    dab = spectral_distance(t, a, b).value
    assert dab == pytest.approx(spectral_distance(t, b, a).value, rel=1e-6)
    assert dab <= spectral_distance(t, a, c).value + spectral_distance(t, c, b).value + 1e-7


def test_oracle_bounds_solver():
    t = graph_triple(3, np.ones((3, 3)) - np.eye(3))
    p = graph_points(3)
    lo, elem = oracle_lower_bound(t, p[0], p[1], samples=5000)
    sdp = spectral_distance(t, p[0], p[1]).value
    assert 0.999 * math.sqrt(2 / 3) <= lo <= sdp + 1e-9
    assert seminorm(t, elem) <= 1 + 1e-9


def test_oracle_two_point(c2_points):
    lo, _ = oracle_lower_bound(two_point_triple(1.0), *c2_points, samples=2000)
    assert lo >= 0.999
    assert oracle_lower_bound(two_point_triple(1.0), c2_points[0], c2_points[0])[0] == 0.0


def test_oracle_is_deterministic(c2_points):
    t = truncated_moyal_triple(2, 1.0)
    a, b = state_of_bloch(BlochPoint(0.3, 0.1, 0.2)), state_of_bloch(BlochPoint(-0.5, 0, 0.1))
    assert oracle_lower_bound(t, a, b, seed=3)[0] == oracle_lower_bound(t, a, b, seed=3)[0]


def test_segment_two_point(c2_points):
    rep = segment_check(two_point_triple(1.0), *c2_points, [0.0, 0.5, 1.0])
    row = next(r for r in rep.rows if (r[0], r[1]) == (0.0, 0.5))
    assert row[2] == pytest.approx(0.5, rel=1e-6)
    assert rep.max_deviation < 1e-6
    assert all(r[2] == 0 for r in rep.rows if r[0] == r[1])


def test_segment_m2_same_height(rng):
    t = m2_diagonal_triple(0.0, 2.0)
    p, q = state_of_bloch(BlochPoint(0.6, 0, 0.8)), state_of_bloch(BlochPoint(-0.6, 0, 0.8))
    rep = segment_check(t, p, q, [0.25, 0.75])
    assert rep.rows[1][2] == pytest.approx(0.5 * rep.base_distance, rel=1e-6)


def test_segment_infinite_endpoints(c2_points):
    with pytest.raises(ValueError):
        segment_check(two_point_triple(0.0), *c2_points, [0.0, 1.0])


def test_convergence_error(c2_points):
    t = truncated_moyal_triple(3, 1.0)
    a = State.pure(t.algebra, 0, [1, 0, 0])
    b = State.pure(t.algebra, 0, [0, 0.6, 0.8])
    with pytest.raises(ConvergenceError) as exc:
        spectral_distance(t, a, b, SolverOptions(max_iterations=1, rel_tolerance=1e-12))
    assert exc.value.upper is None or exc.value.upper >= exc.value.lower


@pytest.mark.parametrize("field, value", [("rel_tolerance", 0), ("multistarts", 0), ("seed", -1)])
def test_options_validation(field, value):
    with pytest.raises(ValueError):
        SolverOptions(**{field: value})


def test_states_on_wrong_algebra(c2_points):
    t = m2_diagonal_triple(0.0, 1.0)
    with pytest.raises(ValueError):
        is_finite(t, *c2_points)
