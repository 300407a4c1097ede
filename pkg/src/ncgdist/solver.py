"""Spectral distance: finiteness test, SDP solve with certificates, brute-force oracle.

The supremum ``sup { f(a) : ||[D, pi(a)]|| <= 1 }`` with ``f = phi - phi'`` is
taken over Hermitian coordinates orthogonal to ``Ker L_D``, where the seminorm
is a norm.  Each Hermitian commutator block ``H_b(y)`` enters as the pair of
linear matrix inequalities ``I - H_b(y) >= 0`` and ``I + H_b(y) >= 0`` in their
real ``2n x 2n`` embedding, solved by Clarabel.

Bounds reported with every finite result:

* lower: the primal point rescaled to ``L_D = 1`` (a feasible element, exact);
* upper: ``sum_b ||Y_b||_*`` for the dual matrices ``Y_b``, after a least-squares
  repair making them satisfy the dual equality constraints exactly.  Since
  ``f(y) = sum_b <Y_b, H_b(y)>`` this bounds the supremum by Hoelder.
"""
from __future__ import annotations

import math
import threading
import weakref
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Sequence

import clarabel
import numpy as np
import scipy.sparse as sp

from . import kernels
from .algebra import AlgebraElement, State, mix_states
from .triple import KERNEL_TOL, SpectralTriple

FINITE_TOL = 1e-8


class ConvergenceError(RuntimeError):
    """The optimizer could not certify the requested tolerance."""

    def __init__(self, message: str, lower: float | None = None, upper: float | None = None,
                 iterations: int = 0):
        super().__init__(f"{message} (best bounds: lower={lower}, upper={upper})")
        self.lower = lower
        self.upper = upper
        self.iterations = iterations


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances and budgets.

    ``multistarts`` is the number of hill-climbing restarts used by the
    sampling oracle; the SDP path is deterministic and does not use it.
    """

    rel_tolerance: float = 1e-6
    multistarts: int = 16
    max_iterations: int = 5000
    seed: int = 0
    kernel_tol: float = KERNEL_TOL
    finite_tol: float = FINITE_TOL

    def __post_init__(self):
        for name in ("rel_tolerance", "multistarts", "max_iterations", "kernel_tol", "finite_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


class Outcome(str, Enum):
    FINITE = "finite"
    INFINITE = "infinite"


@dataclass
class DistanceResult:
    outcome: Outcome
    value: float | None = None
    optimal_element: AlgebraElement | None = None
    attained: float | None = None
    gap_estimate: float | None = None
    upper_bound: float | None = None
    witness: AlgebraElement | None = None
    iterations: int = 0

    @property
    def is_finite(self) -> bool:
        return self.outcome is Outcome.FINITE

    def distance(self) -> float:
        """Value as a float, ``inf`` for the infinite outcome."""
        return self.value if self.is_finite else math.inf

    def to_json(self) -> dict:
        def elem(a):
            if a is None:
                return None
            return {"blocks": [np.stack([b.real, b.imag], axis=-1).tolist() for b in a.blocks]}
        return {"outcome": self.outcome.value, "value": self.value,
                "optimal_element": elem(self.optimal_element), "witness": elem(self.witness),
                "iterations": self.iterations, "gap": self.gap_estimate,
                "upper_bound": self.upper_bound, "attained": self.attained}


class FinitenessVerdict(NamedTuple):
    finite: bool
    witness: AlgebraElement | None
    discrepancy: float


# -- reduced problem cache -------------------------------------------------

@dataclass
class _Reduced:
    Q: np.ndarray          # (herm_dim, r) kernel complement
    K: np.ndarray          # (herm_dim, k) kernel basis
    tens: np.ndarray       # (r, total) Hermitian blocks in y coordinates
    sizes: np.ndarray
    offsets: np.ndarray
    A1: np.ndarray | None = None   # svec of the real embeddings, one column per y_j
    b1: np.ndarray | None = None
    cone_dims: list = field(default_factory=list)
    two_sided: list = field(default_factory=list)
    gram_chol: np.ndarray | None = None


_CACHE: "weakref.WeakKeyDictionary[SpectralTriple, dict]" = weakref.WeakKeyDictionary()
_CACHE_LOCK = threading.Lock()


def _svec_index(m: int):
    rows, cols = [], []
    for c in range(m):
        for r in range(c + 1):
            rows.append(r)
            cols.append(c)
    rows, cols = np.array(rows), np.array(cols)
    scale = np.where(rows == cols, 1.0, math.sqrt(2.0))
    return rows, cols, scale


def _real_embed(H: np.ndarray) -> np.ndarray:
    return np.block([[H.real, -H.imag], [H.imag, H.real]])


def _reduced(t: SpectralTriple, kernel_tol: float) -> _Reduced:
    with _CACHE_LOCK:
        per = _CACHE.setdefault(t, {})
        if kernel_tol in per:
            return per[kernel_tol]
    kb = t.kernel(kernel_tol)
    cb = t.commutator_blocks
    tens = cb.reduce(kb.complement)
    red = _Reduced(kb.complement, kb.basis, tens, cb.sizes, cb.offsets)
    r = tens.shape[0]
    if r > 0:
        cols, b_parts = [], []
        for n, off in zip(cb.sizes, cb.offsets):
            m = 2 * n
            ri, ci, sc = _svec_index(m)
            blk = tens[:, off: off + n * n].reshape(r, n, n)
            emb = np.stack([_real_embed(blk[j]) for j in range(r)])
            cols.append(emb[:, ri, ci] * sc)
            b_parts.append(np.where(ri == ci, 1.0, 0.0))
            red.cone_dims.append(m)
        red.two_sided = [not bp for bp in cb.bipartite]
        S = np.concatenate(cols, axis=1).T  # (nsvec, r)
        red.A1 = S
        red.b1 = np.concatenate(b_parts)
        G = S.T @ S
        red.gram_chol = np.linalg.cholesky(G + 1e-300 * np.eye(r))
    with _CACHE_LOCK:
        _CACHE.setdefault(t, {})[kernel_tol] = red
    return red


# -- finiteness ------------------------------------------------------------

def _functional(phi: State, psi: State) -> np.ndarray:
    if phi.algebra != psi.algebra:
        raise ValueError("states live on different algebras")
    return phi.functional - psi.functional


def is_finite(t: SpectralTriple, phi: State, psi: State, tol: float = FINITE_TOL,
              kernel_tol: float = KERNEL_TOL) -> FinitenessVerdict:
    """Decide whether ``phi`` and ``psi`` agree on ``Ker L_D``.

    Returns ``(finite, witness, discrepancy)``; the witness is the kernel
    element (unit Frobenius norm) on which the states differ the most.
    """
    if phi.algebra != t.algebra:
        raise ValueError("states do not live on the triple's algebra")
    v = _functional(phi, psi)
    K = t.kernel(kernel_tol).basis
    if K.shape[1] == 0:
        return FinitenessVerdict(True, None, 0.0)
    vals = K.T @ v
    j = int(np.argmax(np.abs(vals)))
    disc = float(abs(vals[j]))
    if disc <= tol:
        return FinitenessVerdict(True, None, disc)
    # the witness is the normalized kernel projection of the functional
    w = K @ (vals / np.linalg.norm(vals))
    return FinitenessVerdict(False, AlgebraElement.from_coords(t.algebra, w),
                             float(np.linalg.norm(vals)))


# -- SDP -------------------------------------------------------------------

def _settings(max_iter: int, tight: bool):
    s = clarabel.DefaultSettings()
    s.verbose = False
    s.max_iter = max_iter
    s.presolve_enable = False
    if tight:
        s.tol_gap_abs = 1e-11
        s.tol_gap_rel = 1e-11
        s.tol_feas = 1e-11
        s.tol_ktratio = 1e-9
    return s


def _block_rows(red: _Reduced):
    pos, rows = 0, []
    for m in red.cone_dims:
        k = m * (m + 1) // 2
        rows.append(np.arange(pos, pos + k))
        pos += k
    return rows


def _nuclear_upper(red: _Reduced, g: np.ndarray, z: np.ndarray) -> float:
    half = red.A1.shape[0]
    y_vec = z[:half].copy()
    rows = _block_rows(red)
    pos = half
    for rb, two in zip(rows, red.two_sided):
        if two:
            y_vec[rb] -= z[pos: pos + rb.size]
            pos += rb.size
    res = g - red.A1.T @ y_vec
    L = red.gram_chol
    corr = np.linalg.solve(L.T, np.linalg.solve(L, res))
    y_vec = y_vec + red.A1 @ corr
    total, pos = 0.0, 0
    for m in red.cone_dims:
        ri, ci, sc = _svec_index(m)
        k = ri.size
        M = np.zeros((m, m))
        M[ri, ci] = y_vec[pos: pos + k] / sc
        M[ci, ri] = M[ri, ci]
        total += float(np.abs(np.linalg.eigvalsh(M)).sum())
        pos += k
    return total


def _solve_sdp(red: _Reduced, g: np.ndarray, max_iter: int, tight: bool):
    # a bipartite block H satisfies S H S = -H, so I + H >= 0 repeats I - H >= 0
    r = g.size
    rows = _block_rows(red)
    extra = [rb for rb, two in zip(rows, red.two_sided) if two]
    A = sp.csc_matrix(np.vstack([red.A1] + [-red.A1[rb] for rb in extra]))
    b = np.concatenate([red.b1] + [red.b1[rb] for rb in extra])
    cones = [clarabel.PSDTriangleConeT(m) for m in red.cone_dims]
    cones += [clarabel.PSDTriangleConeT(m) for m, two in zip(red.cone_dims, red.two_sided) if two]
    P = sp.csc_matrix((r, r))
    solver = clarabel.DefaultSolver(P, -g, A, b, cones, _settings(max_iter, tight))
    sol = solver.solve()
    return sol


def spectral_distance(t: SpectralTriple, phi: State, psi: State,
                      opts: SolverOptions | None = None) -> DistanceResult:
    """Spectral distance between two states of ``t``.

    Raises :class:`ConvergenceError` when the certified gap exceeds
    ``opts.rel_tolerance`` (relative to the upper bound).
    """
    opts = opts or SolverOptions()
    verdict = is_finite(t, phi, psi, opts.finite_tol, opts.kernel_tol)
    if not verdict.finite:
        return DistanceResult(Outcome.INFINITE, witness=verdict.witness)
    red = _reduced(t, opts.kernel_tol)
    v = _functional(phi, psi)
    g = red.Q.T @ v
    gnorm = float(np.linalg.norm(g))
    zero = AlgebraElement.from_coords(t.algebra, np.zeros(t.algebra.herm_dim))
    if red.Q.shape[1] == 0 or gnorm <= opts.finite_tol:
        return DistanceResult(Outcome.FINITE, 0.0, zero, 0.0, 0.0, 0.0)
    gn = g / gnorm
    best_lower, best_upper, best_y, iters = -np.inf, np.inf, None, 0
    for tight in (False, True):
        sol = _solve_sdp(red, gn, opts.max_iterations, tight)
        iters += int(sol.iterations)
        y = np.asarray(sol.x, dtype=float)
        L = kernels.lipschitz_batch(y, red.tens, red.sizes, red.offsets)[0]
        if L > 0 and np.isfinite(L):
            lower = float(gn @ y) / L
            if lower > best_lower:
                best_lower, best_y = lower, y / L
        z = np.asarray(sol.z, dtype=float)
        if np.all(np.isfinite(z)):
            best_upper = min(best_upper, _nuclear_upper(red, gn, z))
        if best_upper - best_lower <= opts.rel_tolerance * best_upper:
            break
    if best_y is None or best_upper - best_lower > opts.rel_tolerance * best_upper:
        # polish the primal point before giving up
        if best_y is not None:
            y, ratio, sweeps = kernels.hill_climb(best_y, gn, red.tens, red.sizes, red.offsets,
                                                  step0=1e-3, min_step=1e-12,
                                                  max_sweeps=opts.max_iterations)
            iters += sweeps
            if ratio > best_lower:
                L = kernels.lipschitz_batch(y, red.tens, red.sizes, red.offsets)[0]
                best_lower, best_y = ratio, y / L
        if best_y is None or best_upper - best_lower > opts.rel_tolerance * best_upper:
            lo = None if best_y is None else best_lower * gnorm
            raise ConvergenceError("spectral distance not certified within tolerance",
                                   lo, best_upper * gnorm, iters)
    coords = red.Q @ best_y
    elem = AlgebraElement.from_coords(t.algebra, coords)
    attained = float(v @ coords)
    upper = best_upper * gnorm
    return DistanceResult(Outcome.FINITE, attained, elem, attained,
                          max(upper - attained, 0.0), upper, iterations=iters)


# -- oracle ----------------------------------------------------------------

def oracle_lower_bound(t: SpectralTriple, phi: State, psi: State, samples: int = 2000,
                       seed: int = 0, starts: int = 16,
                       kernel_tol: float = KERNEL_TOL) -> tuple[float, AlgebraElement]:
    """Certified lower bound by random search plus coordinate hill climbing.

    Draws ``samples`` Gaussian directions in the kernel complement, keeps the
    ``starts`` best ratios ``f(a)/L_D(a)`` and refines each.  The returned
    element is rescaled to ``L_D = 1``; among equal values the one with the
    smallest Frobenius norm is kept.
    """
    red = _reduced(t, kernel_tol)
    v = _functional(phi, psi)
    g = red.Q.T @ v
    r = g.size
    zero = AlgebraElement.from_coords(t.algebra, np.zeros(t.algebra.herm_dim))
    if r == 0 or not np.any(np.abs(g) > 1e-15):
        return 0.0, zero
    rng = np.random.default_rng(seed)
    Y = rng.normal(size=(samples, r))
    Y /= np.linalg.norm(Y, axis=1)[:, None]
    ratios = kernels.batch_ratio(Y, g, red.tens, red.sizes, red.offsets)
    # f is odd, so a negative ratio flips to a positive one
    Y *= np.where(ratios < 0, -1.0, 1.0)[:, None]
    ratios = np.abs(ratios)
    order = np.argsort(-ratios, kind="stable")[: max(1, starts)]
    best_val, best_y = -np.inf, None
    for i in order:
        y, val, _ = kernels.hill_climb(Y[i], g, red.tens, red.sizes, red.offsets)
        L = kernels.lipschitz_batch(y, red.tens, red.sizes, red.offsets)[0]
        y = y / L
        if best_y is None or val > best_val + 1e-12 or (
                abs(val - best_val) <= 1e-12 and np.linalg.norm(y) < np.linalg.norm(best_y)):
            best_val, best_y = val, y
    coords = red.Q @ best_y
    elem = AlgebraElement.from_coords(t.algebra, coords)
    return float(v @ coords), elem


# -- segment linearity -----------------------------------------------------

@dataclass
class SegmentReport:
    base_distance: float
    rows: list            # (s, t, computed, expected)
    max_deviation: float


def segment_check(t: SpectralTriple, phi0: State, phi1: State, grid: Sequence[float],
                  opts: SolverOptions | None = None) -> SegmentReport:
    """Compare ``d(phi_s, phi_t)`` with ``|s - t| d(phi0, phi1)`` on all grid pairs."""
    opts = opts or SolverOptions()
    base = spectral_distance(t, phi0, phi1, opts)
    if not base.is_finite:
        raise ValueError("segment endpoints are at infinite distance")
    states = {s: mix_states(phi0, phi1, s) for s in grid}
    rows, dev = [], 0.0
    for i, s in enumerate(grid):
        for u in grid[i:]:
            d = spectral_distance(t, states[s], states[u], opts).distance()
            # phi_s = s*phi0 + (1-s)*phi1, so d(phi_s, phi_u) = |s-u| d(phi0, phi1)
            exp = abs(s - u) * base.value
            rows.append((s, u, d, exp))
            dev = max(dev, abs(d - exp))
    return SegmentReport(base.value, rows, dev)


def distance_value(t: SpectralTriple, phi: State, psi: State,
                   opts: SolverOptions | None = None) -> float:
    """Shorthand returning the distance as a float (``inf`` when infinite)."""
    return spectral_distance(t, phi, psi, opts).distance()
