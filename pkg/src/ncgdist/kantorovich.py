"""Outer approximation of the Kantorovich-type functional W_D from sampled pure pairs.

``W_D(phi, phi') = sup |phi(a) - phi'(a)|`` over Hermitian ``a`` with
``|omega_1(a) - omega_2(a)| <= d_D(omega_1, omega_2)`` for all pure pairs.
Keeping only finitely many pairs relaxes the constraint set, so the linear
program returns an upper bound on ``W_D`` (and hence on ``d_D``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import expm, null_space
from scipy.optimize import linprog

from .algebra import AlgebraElement, State, random_pure_state
from .solver import SolverOptions, spectral_distance
from .triple import SpectralTriple

SPAN_TOL = 1e-9


@dataclass(frozen=True)
class PurePairConstraint:
    first: State
    second: State
    bound: float

    def __post_init__(self):
        if not (self.bound >= 0 and math.isfinite(self.bound)):
            raise ValueError("pair bound must be finite and nonnegative")

    @property
    def row(self) -> np.ndarray:
        return self.first.functional - self.second.functional


def central_kernel_generators(t: SpectralTriple, kernel_tol: float = 1e-9) -> np.ndarray:
    """Hermitian coordinates spanning the center of the algebra ``Ker L_D``.

    Unitaries ``exp(i h)`` built from these commute with every kernel element,
    so pulling a state back by one leaves its values on ``Ker L_D`` unchanged.
    """
    alg = t.algebra
    K = t.kernel(kernel_tol).basis
    k = K.shape[1]
    if k <= 1:
        return K
    elems = [AlgebraElement.from_coords(alg, K[:, j]) for j in range(k)]
    rows = []
    for e in elems:
        # the linear map x -> [x, e] on kernel coordinates
        cols = [(x @ e - e @ x).flat for x in elems]
        M = np.stack(cols, axis=1)
        rows.append(np.vstack([M.real, M.imag]))
    Z = null_space(np.vstack(rows), rcond=1e-10)
    return K @ Z


def _partner(t: SpectralTriple, omega: State, gens: np.ndarray, rng) -> State:
    h = gens @ rng.normal(size=gens.shape[1])
    a = AlgebraElement.from_coords(t.algebra, h)
    u = AlgebraElement(t.algebra, tuple(expm(1j * b) for b in a.blocks))
    return omega.pullback(u)


def sample_pure_pairs(t: SpectralTriple, count: int, seed: int = 0,
                      opts: SolverOptions | None = None) -> list[PurePairConstraint]:
    """Up to ``count`` distinct finite-distance pure pairs with their distances.

    Each draw pairs a Haar-random vector state either with an independent one
    or, alternately, with a partner obtained through a central kernel unitary
    (the only way to stay at finite distance when ``Ker L_D`` is large).
    Draws stop after ``10 * count`` attempts.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    opts = opts or SolverOptions()
    rng = np.random.default_rng(seed)
    gens = central_kernel_generators(t, opts.kernel_tol)
    out: list[PurePairConstraint] = []
    seen: list[np.ndarray] = []
    for attempt in range(10 * count):
        if len(out) >= count:
            break
        w1 = random_pure_state(t.algebra, rng)
        if attempt % 2 == 1 and gens.shape[1] > 1:
            w2 = _partner(t, w1, gens, rng)
        else:
            w2 = random_pure_state(t.algebra, rng)
        row = w1.functional - w2.functional
        if np.linalg.norm(row) <= 1e-12:
            continue
        if any(min(np.linalg.norm(row - s), np.linalg.norm(row + s)) <= 1e-10 for s in seen):
            continue
        res = spectral_distance(t, w1, w2, opts)
        if not res.is_finite:
            continue
        seen.append(row)
        out.append(PurePairConstraint(w1, w2, res.value))
    if not out:
        raise RuntimeError(f"no finite-distance pure pair found in {10 * count} draws")
    return out


def _as_constraints(t, pairs, opts) -> list[PurePairConstraint]:
    out = []
    for p in pairs:
        if isinstance(p, PurePairConstraint):
            out.append(p)
            continue
        w1, w2 = p
        res = spectral_distance(t, w1, w2, opts)
        if not res.is_finite:
            raise ValueError("must_include pair is at infinite distance")
        out.append(PurePairConstraint(w1, w2, res.value))
    return out


def wasserstein_upper(t: SpectralTriple, phi: State, psi: State,
                      constraints: Sequence[PurePairConstraint],
                      must_include: Iterable | None = None,
                      opts: SolverOptions | None = None) -> float:
    """Upper bound on ``W_D(phi, psi)`` from a finite list of pure-pair constraints.

    Returns ``inf`` when the objective is unbounded, i.e. when ``phi - psi``
    has a component outside the span of the constraint rows.
    """
    cons = list(constraints)
    if must_include is not None:
        cons += _as_constraints(t, must_include, opts or SolverOptions())
    if not cons:
        raise ValueError("at least one constraint is required")
    A = np.stack([c.row for c in cons])
    b = np.array([c.bound for c in cons])
    f = phi.functional - psi.functional
    if np.linalg.norm(f) <= 1e-15:
        return 0.0
    # restrict to the span of the constraint rows, where the polytope is bounded
    U, s, _ = np.linalg.svd(A.T, full_matrices=False)
    U = U[:, s > SPAN_TOL * s[0]]
    resid = f - U @ (U.T @ f)
    if np.linalg.norm(resid) > SPAN_TOL * max(1.0, np.linalg.norm(f)):
        return math.inf
    Ar = A @ U
    fr = U.T @ f
    res = linprog(-fr, A_ub=np.vstack([Ar, -Ar]), b_ub=np.concatenate([b, b]),
                  bounds=[(None, None)] * U.shape[1], method="highs")
    if res.status == 3:
        return math.inf
    if res.status != 0:
        raise RuntimeError(f"linear program failed: {res.message}")
    return float(-res.fun)


@dataclass(frozen=True)
class KantorovichBracket:
    d_D: float
    W_upper: float

    @property
    def gap(self) -> float:
        return self.W_upper - self.d_D

    def to_json(self) -> dict:
        def enc(x):
            return "infinite" if math.isinf(x) else x
        return {"d_D": enc(self.d_D), "W_upper": enc(self.W_upper),
                "gap": enc(self.gap) if math.isfinite(self.d_D) else None}


def kantorovich_bracket(t: SpectralTriple, phi: State, psi: State, pairs: int, seed: int = 0,
                        opts: SolverOptions | None = None) -> KantorovichBracket:
    """``d_D`` together with the sampled upper bound on ``W_D``."""
    opts = opts or SolverOptions()
    d = spectral_distance(t, phi, psi, opts).distance()
    cons = sample_pure_pairs(t, pairs, seed, opts)
    return KantorovichBracket(d, wasserstein_upper(t, phi, psi, cons, opts=opts))
