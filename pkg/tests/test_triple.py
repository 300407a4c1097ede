import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncgdist.algebra import Algebra, AlgebraElement, State, random_state
from ncgdist.solver import spectral_distance
from ncgdist.triple import (Representation, SpectralTriple, graph_triple, ladder_matrix,
                            m2_diagonal_triple, product_state, product_triples, project_triple,
                            seminorm, seminorm_kernel, sphere_point_triple, triple_from_json,
                            triple_to_json, truncated_moyal_triple, two_point_triple)

from conftest import graph_points


def herm(alg, rng):
    return AlgebraElement.from_coords(alg, rng.normal(size=alg.herm_dim))


@pytest.mark.parametrize("m", [1.0, 2.5, 0.3 + 0.4j])
def test_two_point_seminorm(m):
    t = two_point_triple(m)
    a = AlgebraElement(t.algebra, (np.array([[1.0]]), np.array([[0.0]])))
    assert seminorm(t, a) == pytest.approx(abs(m))
    assert seminorm(t, AlgebraElement.unit(t.algebra)) == pytest.approx(0, abs=1e-14)


def test_m2_offdiagonal_seminorm():
    t = m2_diagonal_triple(1.0, 3.5)
    a = AlgebraElement(t.algebra, (np.array([[0, 0.7j], [-0.7j, 0]]),))
    assert seminorm(t, a) == pytest.approx(0.7 * 2.5)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31), st.floats(-5, 5))
def test_seminorm_is_a_seminorm(seed, lam):
    rng = np.random.default_rng(seed)
    t = truncated_moyal_triple(2, 1.3)
    a, b = herm(t.algebra, rng), herm(t.algebra, rng)
    assert seminorm(t, a * lam) == pytest.approx(abs(lam) * seminorm(t, a), rel=1e-9, abs=1e-12)
    assert seminorm(t, a + b) <= seminorm(t, a) + seminorm(t, b) + 1e-10
    shifted = a + AlgebraElement.unit(t.algebra) * float(rng.normal())
    assert seminorm(t, shifted) == pytest.approx(seminorm(t, a), rel=1e-10)


@pytest.mark.parametrize("W, rank", [
    (np.array([[0, 1, 2], [1, 0, 3], [2, 3, 0.]]), 1),
    (np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0.]]), 2),
])
def test_graph_kernel(W, rank):
    k = seminorm_kernel(graph_triple(3, W))
    assert k.rank == rank
    np.testing.assert_allclose(k.basis.T @ k.basis, np.eye(rank), atol=1e-12)


def test_disconnected_kernel_contains_isolated_vertex():
    t = graph_triple(3, [[0, 1, 0], [1, 0, 0], [0, 0, 0]])
    K = t.kernel().basis
    e3 = t.algebra.coords_of_flat(np.array([0, 0, 1.0]))
    np.testing.assert_allclose(K @ (K.T @ e3), e3, atol=1e-12)


def test_m2_kernel_is_diagonal():
    t = m2_diagonal_triple(0.0, 1.0)
    K = t.kernel()
    assert K.rank == 2
    for e in K.elements(t.algebra):
        b = e.blocks[0]
        assert abs(b[0, 1]) < 1e-12
        assert seminorm(t, e) <= 10 * K.tol


def test_kernel_always_contains_unit(rng):
    t = sphere_point_triple(rng.normal(size=3) + 1j * rng.normal(size=3))
    K = t.kernel().basis
    u = t.algebra.unit_flat
    uc = t.algebra.coords_of_flat(u)
    np.testing.assert_allclose(K @ (K.T @ uc), uc, atol=1e-10)


def test_validation_errors():
    alg = Algebra((1, 1))
    rep = Representation.diagonal(2)
    with pytest.raises(ValueError, match="Hermitian"):
        SpectralTriple(alg, rep, np.array([[0, 1], [2, 0]]))
    with pytest.raises(ValueError, match="anticommute"):
        SpectralTriple(alg, rep, np.array([[1, 0], [0, 0]]), grading=np.diag([1, -1]))
    with pytest.raises(ValueError):
        graph_triple(2, [[0, 1], [2, 0]])
    with pytest.raises(ValueError):
        graph_triple(2, [[1, 1], [1, 0]])
    with pytest.raises(ValueError):
        sphere_point_triple([0, 0])


def test_non_multiplicative_representation_rejected():
    alg = Algebra((1, 1))
    imgs = (np.eye(2) * 0.5, np.eye(2) * 0.5)
    bad = Representation(alg, 2, imgs, kind="custom")
    with pytest.raises(ValueError):
        bad.check()


def test_ladder():
    np.testing.assert_allclose(ladder_matrix(2, 4.0), [[0, 0], [0.5, 0]])


def test_moyal_triple_shape():
    t = truncated_moyal_triple(3, 2.0)
    assert t.hilbert_dim == 18
    np.testing.assert_allclose(t.grading @ t.dirac, -t.dirac @ t.grading, atol=1e-12)


def test_product_of_two_points():
    t1, t2 = two_point_triple(1.0), two_point_triple(2.0 + 1j)
    t = product_triples(t1, t2)
    assert t.algebra.blocks == (1, 1, 1, 1)
    assert t.hilbert_dim == 4
    ev = np.sort(np.linalg.eigvalsh(t.dirac))
    r = math.sqrt(1 + 5)
    np.testing.assert_allclose(ev, [-r, -r, r, r], atol=1e-12)


def test_product_with_zero_dirac_gives_factor_distance():
    t1, t2 = two_point_triple(2.0), two_point_triple(0.0)
    t = product_triples(t1, t2)
    a, b = graph_points(2)
    x = State.mixed(t2.algebra, [0.3, 0.7], [np.ones((1, 1))] * 2)
    d = spectral_distance(t, product_state(a, x), product_state(b, x)).value
    assert d == pytest.approx(0.5, rel=1e-7)


def test_projection_identity_and_errors(rng):
    t = graph_triple(3, [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    te = project_triple(t, np.eye(3))
    a, b = random_state(t.algebra, rng), random_state(t.algebra, rng)
    assert spectral_distance(te, a, b).value == pytest.approx(spectral_distance(t, a, b).value, rel=1e-7)
    with pytest.raises(ValueError, match="commute"):
        project_triple(t, np.diag([1.0, 0, 0]))
    with pytest.raises(ValueError, match="projection"):
        project_triple(t, np.eye(3) * 0.5)


def test_projection_onto_eigenvector_gives_scalar_dirac():
    t = graph_triple(3, [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    vals, vecs = np.linalg.eigh(t.dirac)
    e = np.outer(vecs[:, 0], vecs[:, 0].conj())
    te = project_triple(t, e)
    np.testing.assert_allclose(te.dirac, [[vals[0]]], atol=1e-12)


def test_projection_reduces_to_two_points():
    # supports of delta_1 and delta_2 sum to a projection commuting with D
    W = np.zeros((4, 4))
    W[0, 1] = W[1, 0] = 2.0
    W[2, 3] = W[3, 2] = 1.0
    t = graph_triple(4, W)
    te = project_triple(t, np.diag([1.0, 1, 0, 0]))
    p = graph_points(4)
    assert spectral_distance(te, p[0], p[1]).value == pytest.approx(0.5, rel=1e-7)


def test_json_round_trip():
    for t in (two_point_triple(1 + 2j), truncated_moyal_triple(2, 1.0), sphere_point_triple([1, 1j])):
        back = triple_from_json(triple_to_json(t))
        np.testing.assert_allclose(back.dirac, t.dirac)
        assert back.algebra == t.algebra


@pytest.mark.parametrize("obj, field", [
    ({}, "algebra.blocks"),
    ({"algebra": {"blocks": [1, 1]}}, "representation.kind"),
    ({"algebra": {"blocks": [1, 1]}, "representation": {"kind": "diagonal"}}, "dirac"),
    ({"algebra": {"blocks": [1], "field": "real"}}, "algebra.field"),
])
def test_json_errors_name_the_field(obj, field):
    with pytest.raises(ValueError, match=field.replace(".", r"\.")):
        triple_from_json(obj)
