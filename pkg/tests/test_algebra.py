import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncgdist.algebra import (Algebra, AlgebraElement, BlochPoint, State, bloch_of_state,
                             eval_state, hermitian_basis, mix_states, random_pure_state,
                             random_state, state_from_json, state_of_bloch, state_to_json)

block_lists = st.lists(st.integers(1, 3), min_size=1, max_size=3).map(tuple)


@pytest.mark.parametrize("blocks, dim", [((1, 1), 2), ((2,), 4), ((2, 1), 5), ((3, 2, 1), 14)])
def test_herm_dim(blocks, dim):
    alg = Algebra(blocks)
    assert alg.herm_dim == dim
    assert len(hermitian_basis(alg)) == dim


def test_c2_basis_is_block_units():
    basis = hermitian_basis(Algebra((1, 1)))
    np.testing.assert_allclose([b.blocks[0][0, 0] for b in basis], [1, 0])
    np.testing.assert_allclose([b.blocks[1][0, 0] for b in basis], [0, 1])


@pytest.mark.parametrize("blocks", [(0,), (), (2, -1)])
def test_invalid_blocks(blocks):
    with pytest.raises(ValueError):
        Algebra(blocks)


@settings(max_examples=25, deadline=None)
@given(block_lists)
def test_basis_orthonormal_and_hermitian(blocks):
    basis = hermitian_basis(Algebra(blocks))
    G = np.array([[sum(np.vdot(x, y) for x, y in zip(a.blocks, b.blocks)) for b in basis]
                  for a in basis])
    np.testing.assert_allclose(G, np.eye(len(basis)), atol=1e-10)
    assert all(b.is_hermitian for b in basis)


def test_eval_examples():
    m2 = Algebra((2,))
    e11 = AlgebraElement(m2, (np.diag([1.0, 0.0]),))
    assert eval_state(State.pure(m2, 0, [1, 0]), e11) == pytest.approx(1)
    mixed = State.mixed(m2, [1.0], [np.eye(2) / 2])
    assert eval_state(mixed, e11) == pytest.approx(0.5)
    c2 = Algebra((1, 1))
    a = AlgebraElement(c2, (np.array([[3.0]]), np.array([[7.0]])))
    assert eval_state(State.pure(c2, 0, [1]), a) == pytest.approx(3)


def test_eval_shape_mismatch():
    with pytest.raises(ValueError):
        eval_state(State.pure(Algebra((2,)), 0, [1, 0]), AlgebraElement.unit(Algebra((1, 1))))


def test_mix_examples():
    c2 = Algebra((1, 1))
    d1, d2 = State.pure(c2, 0, [1]), State.pure(c2, 1, [1])
    assert mix_states(d1, d2, 1.0) is d1
    a = AlgebraElement(c2, (np.array([[3.0]]), np.array([[7.0]])))
    assert eval_state(mix_states(d1, d2, 0.5), a) == pytest.approx(5)
    m2 = Algebra((2,))
    half = mix_states(State.pure(m2, 0, [1, 0]), State.pure(m2, 0, [0, 1]), 0.5)
    np.testing.assert_allclose(half.densities[0], np.eye(2) / 2, atol=1e-12)
    with pytest.raises(ValueError):
        mix_states(d1, d2, 1.5)


@settings(max_examples=30, deadline=None)
@given(block_lists, st.floats(0, 1), st.integers(0, 2 ** 31))
def test_mix_is_affine(blocks, lam, seed):
    rng = np.random.default_rng(seed)
    alg = Algebra(blocks)
    s0, s1 = random_state(alg, rng), random_state(alg, rng)
    a = AlgebraElement.from_flat(alg, rng.normal(size=alg.herm_dim) + 1j * rng.normal(size=alg.herm_dim))
    got = eval_state(mix_states(s0, s1, lam), a)
    np.testing.assert_allclose(got, lam * eval_state(s0, a) + (1 - lam) * eval_state(s1, a), atol=1e-10)


@pytest.mark.parametrize("vec, point", [([1, 0], (0, 0, 1)), ([1 / math.sqrt(2), 1 / math.sqrt(2)], (1, 0, 0))])
def test_bloch_examples(vec, point):
    p = bloch_of_state(State.pure(Algebra((2,)), 0, vec))
    np.testing.assert_allclose(p.as_array(), point, atol=1e-12)


def test_bloch_center():
    s = State.mixed(Algebra((2,)), [1.0], [np.eye(2) / 2])
    np.testing.assert_allclose(bloch_of_state(s).as_array(), 0, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31), st.booleans())
def test_bloch_round_trip(seed, pure):
    rng = np.random.default_rng(seed)
    alg = Algebra((2,))
    s = random_pure_state(alg, rng) if pure else random_state(alg, rng)
    back = state_of_bloch(bloch_of_state(s))
    np.testing.assert_allclose(back.functional, s.functional, atol=1e-10)
    if pure:
        assert bloch_of_state(s).as_array() @ bloch_of_state(s).as_array() == pytest.approx(1)


def test_bloch_outside_ball():
    with pytest.raises(ValueError):
        BlochPoint(1.0, 1.0, 0.0)


def test_state_invariants():
    alg = Algebra((2,))
    with pytest.raises(ValueError):
        State.mixed(alg, [1.0], [np.diag([2.0, -1.0])])
    with pytest.raises(ValueError):
        State.mixed(alg, [0.5], [np.eye(2) / 2])
    with pytest.raises(ValueError):
        State.pure(alg, 0, [0, 0])


def test_pure_detection_and_phase():
    alg = Algebra((2, 1))
    s = State.pure(alg, 0, [1j, 1j])
    assert s.is_pure
    np.testing.assert_allclose(s.vector, [1 / math.sqrt(2)] * 2)
    again = State.from_functional(alg, s.functional)
    assert again.is_pure and again.block == 0
    assert not random_state(alg, np.random.default_rng(0)).is_pure


@settings(max_examples=20, deadline=None)
@given(block_lists, st.integers(0, 2 ** 31), st.booleans())
def test_json_round_trip(blocks, seed, pure):
    rng = np.random.default_rng(seed)
    alg = Algebra(blocks)
    s = random_pure_state(alg, rng) if pure else random_state(alg, rng)
    back = state_from_json(alg, state_to_json(s))
    np.testing.assert_allclose(back.functional, s.functional, atol=1e-12)


@pytest.mark.parametrize("obj", [{"type": "pure"}, {"type": "weird"}, {"type": "mixed", "weights": [1]}])
def test_json_errors(obj):
    with pytest.raises(ValueError):
        state_from_json(Algebra((2,)), obj)


def test_pullback_by_unitary():
    alg = Algebra((2,))
    s = State.pure(alg, 0, [1, 0])
    u = AlgebraElement(alg, (np.array([[0, 1], [1, 0]], dtype=complex),))
    np.testing.assert_allclose(s.pullback(u).densities[0], np.diag([0, 1]), atol=1e-12)
