"""Catalog-vs-solver verification suites producing a deterministic CSV report.

Every case id starts with the acceptance criterion it feeds (``C01`` ...
``C16``).  Each group draws from its own generator seeded by
``(seed, group index)``, so results do not depend on which groups run or on
thread scheduling; rows are sorted by case id before writing.
"""
from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm
from scipy.sparse.csgraph import connected_components as _cc

from . import bundle, closed_forms as cf, moyal
from .algebra import (Algebra, AlgebraElement, BlochPoint, State, mix_states, random_state,
                      state_of_bloch)
from .kantorovich import sample_pure_pairs, wasserstein_upper
from .solver import ConvergenceError, SolverOptions, is_finite, segment_check, spectral_distance
from .triple import (graph_triple, m2_diagonal_triple, product_state, product_triples,
                     project_triple, sphere_point_triple, truncated_moyal_triple, two_point_triple)

COLUMNS = ("case_id", "formula_ref", "expected", "computed", "abs_err", "rel_err", "status",
           "runtime_ms")
OPTS = SolverOptions(rel_tolerance=1e-7)


@dataclass
class Row:
    """One comparison.  ``kind`` is ``eq``, ``le`` (computed <= expected) or ``ge``.

    For inequalities the error is the size of the violation; any slack the
    criterion allows is folded into ``expected``.
    """

    case_id: str
    formula_ref: str
    expected: float
    computed: float
    tol: float
    kind: str = "eq"
    runtime_ms: float | None = None

    @property
    def abs_err(self) -> float:
        e, c = self.expected, self.computed
        if math.isnan(c) or math.isnan(e):
            return math.nan
        if self.kind == "eq":
            if math.isinf(e) or math.isinf(c):
                return 0.0 if e == c else math.inf
            return abs(c - e)
        diff = c - e if self.kind == "le" else e - c
        if math.isinf(diff) and diff < 0 or (math.isinf(e) and math.isinf(c) and e == c):
            return 0.0
        return max(0.0, diff)

    @property
    def rel_err(self) -> float:
        a = self.abs_err
        if a == 0.0:
            return 0.0
        e = abs(self.expected)
        return a / e if e > 0 and math.isfinite(e) else a

    @property
    def passed(self) -> bool:
        r = self.rel_err
        return not math.isnan(r) and r <= self.tol

    def cells(self, timings: bool) -> list[str]:
        t = "" if not timings or self.runtime_ms is None else "%.1f" % self.runtime_ms
        return [self.case_id, self.formula_ref, _fmt(self.expected), _fmt(self.computed),
                _fmt_err(self.abs_err), _fmt_err(self.rel_err),
                "pass" if self.passed else "fail", t]


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "infinite" if x > 0 else "-infinite"
    return "%.12g" % x


def _fmt_err(x: float) -> str:
    return "infinite" if math.isinf(x) else "%.3e" % x


@dataclass
class Report:
    rows: list[Row]
    group_seconds: dict[str, float] = field(default_factory=dict)

    @property
    def failures(self) -> list[Row]:
        return [r for r in self.rows if not r.passed]

    def summary(self) -> dict:
        return {"total": len(self.rows), "passed": len(self.rows) - len(self.failures),
                "failed": len(self.failures)}

    def to_csv(self, timings: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow(r.cells(timings))
        return buf.getvalue()


class _Collector:
    """Accumulates rows for one group, timing each computation."""

    def __init__(self, prefix: str):
        self.prefix = prefix
        self.rows: list[Row] = []

    def check(self, case: str, ref: str, expected: float, compute: Callable[[], float],
              tol: float, kind: str = "eq") -> float:
        t0 = time.perf_counter()
        try:
            value = float(compute())
        except ConvergenceError:
            value = math.nan
        ms = 1e3 * (time.perf_counter() - t0)
        self.rows.append(Row(f"{self.prefix}.{case}", ref, float(expected), value, tol, kind, ms))
        return value


def _dist(t, a, b) -> float:
    return spectral_distance(t, a, b, OPTS).distance()


def _log_uniform(rng, lo, hi, size=None):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def _bloch_point(rng, pure: bool) -> BlochPoint:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    if not pure:
        v *= rng.uniform() ** (1.0 / 3.0)
    return BlochPoint(*v)


def _bloch_same_z(rng, z: float, pure: bool = False) -> BlochPoint:
    rmax = math.sqrt(max(0.0, 1.0 - z * z))
    r = rmax if pure else rmax * math.sqrt(rng.uniform())
    a = rng.uniform(0, 2 * math.pi)
    return BlochPoint(r * math.cos(a), r * math.sin(a), z)


# -- discrete spaces --------------------------------------------------------

def group_two_point(rng, c: _Collector):
    alg = Algebra((1, 1))
    d1, d2 = State.pure(alg, 0, [1]), State.pure(alg, 1, [1])
    for i in range(20):
        mod = rng.uniform(0.1, 10)
        m = mod * np.exp(1j * rng.uniform(0, 2 * math.pi))
        t = two_point_triple(m)
        c.check(f"{i:03d}", "two-point: 1/|m|", 1 / mod, lambda: _dist(t, d1, d2), 1e-6)
    t0 = two_point_triple(0.0)
    c.check("zero_coupling", "two-point: 1/|m|", math.inf, lambda: _dist(t0, d1, d2), 0.0)


def _graph_points(N):
    alg = Algebra((1,) * N)
    return [State.pure(alg, i, [1]) for i in range(N)]


def group_three_point(rng, c: _Collector):
    pts = _graph_points(3)
    for i in range(50):
        p = cf.ThreePointParams(*_log_uniform(rng, 0.2, 5, 3))
        t = cf.three_point_triple(p)
        exp = cf.three_point_distance(p)
        got = []
        for lab, (a, b), e in zip(("12", "13", "23"), ((0, 1), (0, 2), (1, 2)), exp):
            got.append(c.check(f"{i:03d}.d{lab}", "three-point closed form", e,
                               lambda: _dist(t, pts[a], pts[b]), 1e-5))
        s = sorted(v * v for v in got)
        # squared triangle inequality on the solver output: s0 + s1 >= s2
        c.check(f"{i:03d}.squared_triangle", "squared triangle inequality", s[0] + s[1],
                lambda: s[2], 0.0, kind="le")


def _strict_squared_triangle(rng):
    while True:
        a, b, c = _log_uniform(rng, 0.2, 5, 3)
        s = sorted([a * a, b * b, c * c])
        if s[0] + s[1] > 1.05 * s[2]:
            return a, b, c


def group_three_point_inverse(rng, c: _Collector):
    pts = _graph_points(3)
    for i in range(50):
        a, b, cc = _strict_squared_triangle(rng)
        p = cf.three_point_inverse(a, b, cc)
        t = cf.three_point_triple(p)
        for lab, (x, y), e in zip(("12", "13", "23"), ((0, 1), (0, 2), (1, 2)), (a, b, cc)):
            c.check(f"{i:03d}.d{lab}", "three-point couplings from distances", e,
                    lambda: _dist(t, pts[x], pts[y]), 1e-4)
        r = cf.star_resistances(a, b, cc)
        R = cf.triangle_resistances(*r)
        for lab, e, D in zip(("12", "13", "23"), R, (p.D12, p.D13, p.D23)):
            c.check(f"{i:03d}.triangle_R{lab}", "star and triangle resistances", e,
                    lambda: 1.0 / D ** 2, 1e-10)


def group_four_point(rng, c: _Collector):
    pts = _graph_points(4)
    regions = {0: ("short_link", "c_nonpositive", "orthogonal_max"),
               1: ("path_via_4", "path_via_2", "orthogonal_max")}
    names = {0: ("d12", (0, 1)), 1: ("d13", (0, 2))}
    for which, labels in regions.items():
        name, (a, b) = names[which]
        for label in labels:
            n = 0
            while n < 50:
                p = cf.FourPointParams.cycle(*_log_uniform(rng, 0.1, 10, 4))
                if cf.four_point_region(p)[which] != label:
                    continue
                t = graph_triple(4, p.weights())
                e = cf.four_point_special(p)[which]
                c.check(f"{name}.{label}.{n:03d}", f"four-point cycle, {name} branch {label}", e,
                        lambda: _dist(t, pts[a], pts[b]), 1e-4)
                n += 1
    ones = cf.FourPointParams.cycle(1.0, 1.0, 1.0, 1.0)
    t = graph_triple(4, ones.weights())
    c.check("all_ones.d12", "four-point cycle, all-ones", 1.0, lambda: _dist(t, pts[0], pts[1]), 1e-4)
    c.check("all_ones.formula", "four-point cycle, all-ones", 1.0,
            lambda: cf.four_point_special(ones)[0], 1e-12)


# -- graphs -------------------------------------------------------------------

def group_complete_graph(rng, c: _Collector):
    for N in range(3, 9):
        pts = _graph_points(N)
        for k in (1.0, 2.5):
            t = graph_triple(N, cf.complete_graph_weights(N, k))
            e = cf.complete_graph_distance(N, k)
            for i in range(N):
                for j in range(i + 1, N):
                    c.check(f"N{N}.k{k}.{i}-{j}", "complete graph: sqrt(2/N)/|k|", e,
                            lambda: _dist(t, pts[i], pts[j]), 1e-5)
            tc = graph_triple(N, cf.complete_graph_weights(N, k, cut=(0, 1)))
            c.check(f"N{N}.k{k}.cut", "complete graph with one link removed", cf.cut_link_distance(N, k),
                    lambda: _dist(tc, pts[0], pts[1]), 1e-5)


def _random_graph(rng, N, disconnected: bool) -> np.ndarray:
    W = np.zeros((N, N))
    for i in range(N):
        for j in range(i + 1, N):
            if rng.uniform() < 0.6:
                W[i, j] = W[j, i] = _log_uniform(rng, 0.3, 3)
    if disconnected:
        cut = int(rng.integers(1, N))
        W[:cut, cut:] = 0.0
        W[cut:, :cut] = 0.0
    return W


def group_graph_properties(rng, c: _Collector):
    for g in range(20):
        N = int(rng.integers(3, 8))
        W = _random_graph(rng, N, disconnected=(g % 4 == 3))
        t = graph_triple(N, W)
        pts = _graph_points(N)
        k = int(rng.integers(N))
        Wd = W.copy()
        Wd[k, :] = 0.0
        Wd[:, k] = 0.0
        td = graph_triple(N, Wd)
        for i in range(N):
            for j in range(i + 1, N):
                L = cf.graph_geodesic_length(W, i, j)
                case = f"{g:02d}.{i}-{j}"
                if math.isinf(L):
                    d = c.check(f"{case}.disconnected", "disconnected iff infinite", math.inf,
                                lambda: _dist(t, pts[i], pts[j]), 0.0)
                else:
                    d = c.check(f"{case}.geodesic", "bounded by the geodesic length", L + 1e-8,
                                lambda: _dist(t, pts[i], pts[j]), 0.0, kind="le")
                    c.check(f"{case}.finite", "disconnected iff infinite", 1.0,
                            lambda: float(math.isfinite(d)), 0.0)
                if k not in (i, j):
                    c.check(f"{case}.deleted_{k}", "line deletion does not decrease distance",
                            d * (1 - 1e-6), lambda: _dist(td, pts[i], pts[j]), 0.0, kind="ge")


def _segment_case(rng, kind: int):
    """A triple with two states at finite distance and a third state ``phi``
    such that both lie in its connected component."""
    if kind == 0:
        N = int(rng.integers(3, 6))
        W = _random_graph(rng, N, False)
        W += np.diag(np.full(N - 1, 0.5), 1) + np.diag(np.full(N - 1, 0.5), -1)
        t = graph_triple(N, W)
        alg = t.algebra
        return t, random_state(alg, rng), random_state(alg, rng), random_state(alg, rng)
    if kind == 1:
        t = truncated_moyal_triple(2, float(rng.uniform(0.5, 2)))
        return (t, state_of_bloch(_bloch_point(rng, False)), state_of_bloch(_bloch_point(rng, True)),
                state_of_bloch(_bloch_point(rng, False)))
    if kind == 2:
        t = m2_diagonal_triple(*rng.uniform(-2, 2, 2) + np.array([0.0, 3.0]))
        z = float(rng.uniform(-0.9, 0.9))
        pts = [state_of_bloch(_bloch_same_z(rng, z)) for _ in range(3)]
        return (t, *pts)
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    t = sphere_point_triple(v)
    xi, zeta = _aligned_pair(rng, v)
    alg = t.algebra
    return t, State.pure(alg, 0, xi), State.pure(alg, 0, zeta), State.pure(alg, 0, xi)


def group_segment(rng, c: _Collector):
    grid = [0.0, 0.25, 0.5, 0.75, 1.0]
    for i in range(20):
        t, phi0, phi1, base = _segment_case(rng, i % 4)
        rep = segment_check(t, phi0, phi1, grid, OPTS)
        for s, u, d, e in rep.rows:
            c.check(f"{i:02d}.seg_{s:.2f}_{u:.2f}", "segment linearity |s-t| d(phi0, phi1)", e,
                    lambda: d, 1e-5)
        # Con(base) is convex: mixes of two states at finite distance from base stay finite
        a, b = phi0, phi1
        if not is_finite(t, base, a).finite or not is_finite(t, base, b).finite:
            a, b = base, phi1 if is_finite(t, base, phi1).finite else base
        for s in grid[1:-1]:
            mix = mix_states(a, b, s)
            c.check(f"{i:02d}.con_{s:.2f}", "connected component is convex", 1.0,
                    lambda: float(is_finite(t, base, mix).finite), 0.0)


# -- ball -------------------------------------------------------------------

def group_m2_eigen(rng, c: _Collector):
    for i in range(100):
        d1, d2 = rng.uniform(-3, 3, 2)
        if abs(d1 - d2) < 0.2:
            d2 = d1 + 0.2 * (1 if d2 >= d1 else -1)
        t = m2_diagonal_triple(d1, d2)
        z = float(rng.uniform(-0.95, 0.95))
        p, q = _bloch_same_z(rng, z, i % 2 == 0), _bloch_same_z(rng, z, i % 2 == 0)
        c.check(f"same_z.{i:03d}", "M_2 with diagonal D: chord over |d1 - d2|",
                cf.m2_eigen_distance(d1, d2, p, q),
                lambda: _dist(t, state_of_bloch(p), state_of_bloch(q)), 1e-5)
    for i in range(20):
        t = m2_diagonal_triple(*rng.uniform(-3, 3, 2))
        p = _bloch_point(rng, False)
        q = _bloch_point(rng, False)
        if abs(p.z - q.z) < 0.05:
            q = BlochPoint(0.0, 0.0, p.z - 0.5 if p.z > 0 else p.z + 0.5)
        c.check(f"diff_z.{i:03d}", "M_2 with diagonal D: different heights", math.inf,
                lambda: _dist(t, state_of_bloch(p), state_of_bloch(q)), 0.0)


def group_moyal_ball(rng, c: _Collector):
    thetas = (0.5, 1.0, 2.0, 3.0)
    triples = {th: truncated_moyal_triple(2, th) for th in thetas}
    for i in range(100):
        th = thetas[i % 4]
        pure = i % 2 == 0
        p, q = _bloch_point(rng, pure), _bloch_point(rng, pure)
        c.check(f"{'pure' if pure else 'mixed'}.{i:03d}", "two-level truncated plane on the Bloch ball",
                cf.moyal_ball_distance(th, p, q),
                lambda: _dist(triples[th], state_of_bloch(p), state_of_bloch(q)), 1e-5)


def _aligned_pair(rng, v):
    """Unit vectors whose components orthogonal to ``v`` agree up to a phase."""
    n = v.size
    vhat = v / np.linalg.norm(v)
    w = rng.normal(size=n) + 1j * rng.normal(size=n)
    w -= vhat * np.vdot(vhat, w)
    s = rng.uniform(0.2, 0.95)
    w *= s / np.linalg.norm(w)
    c = math.sqrt(1 - s * s)
    xi = c * np.exp(1j * rng.uniform(0, 2 * math.pi)) * vhat + w
    zeta = np.exp(1j * rng.uniform(0, 2 * math.pi)) * (
        c * np.exp(1j * rng.uniform(0, 2 * math.pi)) * vhat + w)
    return xi, zeta


def group_sphere_point(rng, c: _Collector):
    for n in (2, 3):
        for i in range(20):
            v = rng.normal(size=n) + 1j * rng.normal(size=n)
            t = sphere_point_triple(v)
            alg = t.algebra
            xi, zeta = _aligned_pair(rng, v)
            e, _ = cf.sphere_point_distance(cf.SpherePointParams(v, xi, zeta))
            c.check(f"n{n}.aligned.{i:02d}", "projective space plus a point", e,
                    lambda: _dist(t, State.pure(alg, 0, xi), State.pure(alg, 0, zeta)), 1e-5)
        for i in range(5):
            v = rng.normal(size=n) + 1j * rng.normal(size=n)
            t = sphere_point_triple(v)
            alg = t.algebra
            vhat = v / np.linalg.norm(v)
            _, e = cf.sphere_point_distance(cf.SpherePointParams(v, vhat, vhat))
            wc, wv = State.pure(alg, 1, [1]), State.pure(alg, 0, vhat)
            c.check(f"n{n}.point_to_v.{i:02d}", "point to the state along v: 1/|v|", e,
                    lambda: _dist(t, wc, wv), 1e-5)
            xi = rng.normal(size=n) + 1j * rng.normal(size=n)
            zeta = rng.normal(size=n) + 1j * rng.normal(size=n)
            xi, zeta = xi / np.linalg.norm(xi), zeta / np.linalg.norm(zeta)
            e, e2 = cf.sphere_point_distance(cf.SpherePointParams(v, xi, zeta))
            c.check(f"n{n}.not_aligned.{i:02d}", "projective space plus a point", e,
                    lambda: _dist(t, State.pure(alg, 0, xi), State.pure(alg, 0, zeta)), 0.0)
            c.check(f"n{n}.point_generic.{i:02d}", "point to the state along v: 1/|v|", e2,
                    lambda: _dist(t, wc, State.pure(alg, 0, xi)), 0.0)


# -- products and lemmas --------------------------------------------------

def group_pythagoras(rng, c: _Collector):
    alg = Algebra((1, 1))

    def two_point_pair():
        m = _log_uniform(rng, 0.3, 3) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        return two_point_triple(m), abs(m)

    def factor_dist(s, s2, mod):
        return abs(s.weights[0] - s2.weights[0]) / mod

    for i in range(70):
        (t1, m1), (t2, m2) = two_point_pair(), two_point_pair()
        t = product_triples(t1, t2)
        a1, b1 = random_state(alg, rng), random_state(alg, rng)
        a2, b2 = random_state(alg, rng), random_state(alg, rng)
        if i >= 60:
            a2 = b2          # only the first factor differs
        elif i >= 50:
            a1 = b1          # only the second factor differs
        d1, d2 = factor_dist(a1, b1, m1), factor_dist(a2, b2, m2)
        pa, pb = product_state(a1, a2), product_state(b1, b2)
        if i < 50:
            lo, hi = cf.pythagoras_bounds(d1, d2)
            hi = min(hi, math.sqrt(2) * lo)
            d = c.check(f"bounds.{i:02d}.lower", "product bounds (sqrt(d1^2 + d2^2), d1 + d2)",
                        lo - 1e-5, lambda: _dist(t, pa, pb), 0.0, kind="ge")
            c.check(f"bounds.{i:02d}.upper", "product bounds (sqrt(d1^2 + d2^2), d1 + d2)",
                    hi + 1e-5, lambda: d, 0.0, kind="le")
        else:
            e = d1 if i >= 60 else d2
            c.check(f"single_factor.{i:02d}", "one factor differs: d = d_i", e,
                    lambda: _dist(t, pa, pb), 1e-6)
    # two-point times two-point: d^2 = d1^2 + d2^2 between product states
    for i in range(20):
        (t1, m1), (t2, m2) = two_point_pair(), two_point_pair()
        t = product_triples(t1, t2)
        a1, b1 = random_state(alg, rng), random_state(alg, rng)
        a2, b2 = State.pure(alg, 0, [1]), State.pure(alg, 1, [1])
        d1, d2 = factor_dist(a1, b1, m1), 1.0 / m2
        pa, pb = product_state(a1, a2), product_state(b1, b2)
        c.check(f"equality.{i:02d}", "two-point products: d^2 = d1^2 + d2^2", d1 * d1 + d2 * d2,
                lambda: _dist(t, pa, pb) ** 2, 1e-5)


def _kernel_unitary(t, rng) -> AlgebraElement:
    K = t.kernel(OPTS.kernel_tol).basis
    h = AlgebraElement.from_coords(t.algebra, K @ rng.normal(size=K.shape[1]))
    u = AlgebraElement(t.algebra, tuple(expm(1j * b) for b in h.blocks))
    U = t.rep(u)
    U = U.toarray() if hasattr(U, "toarray") else U
    if not np.allclose(U @ t.dirac, t.dirac @ U, atol=1e-9):
        raise AssertionError("kernel unitary does not commute with D")
    return u


def connected_components(W) -> np.ndarray:
    return _cc(np.abs(W) > 0, directed=False)[1]


def _component_projection_case(rng):
    """Disconnected graph and the indicator of a union of components.

    The indicator lies in the diagonal algebra and commutes with ``D``.  The
    two states live on one component inside the union.
    """
    while True:
        N = int(rng.integers(4, 8))
        W = _random_graph(rng, N, True)
        labels = connected_components(W)
        comps = [np.flatnonzero(labels == k) for k in range(labels.max() + 1)]
        big = [c for c in comps if c.size >= 2]
        if big:
            break
    home = big[int(rng.integers(len(big)))]
    keep = [c for c in comps if c is home or rng.uniform() < 0.5]
    mask = np.zeros(N)
    mask[np.concatenate(keep)] = 1.0
    alg = Algebra((1,) * N)

    def state():
        w = np.zeros(N)
        w[home] = rng.dirichlet(np.ones(home.size))
        return State.mixed(alg, w, [np.ones((1, 1))] * N)
    return graph_triple(N, W), np.diag(mask), state(), state()


def _sphere_projection_case(rng):
    """Projective space plus a point, compressed to ``span(v, w) + C``.

    ``e = (P, 1)`` with ``P`` the projection on ``span(v, w)`` lies in the
    algebra and commutes with ``D``; the states are an aligned pair in ``range(P)``.
    """
    n = 3
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    vhat = v / np.linalg.norm(v)
    w = rng.normal(size=n) + 1j * rng.normal(size=n)
    w -= vhat * np.vdot(vhat, w)
    w /= np.linalg.norm(w)
    P = np.outer(vhat, vhat.conj()) + np.outer(w, w.conj())
    e = np.zeros((n + 1, n + 1), dtype=complex)
    e[:n, :n] = P
    e[n, n] = 1.0
    s = rng.uniform(0.2, 0.95)
    c = math.sqrt(1 - s * s)
    ph = np.exp(1j * rng.uniform(0, 2 * math.pi, 3))
    xi = c * ph[0] * vhat + s * w
    zeta = ph[2] * (c * ph[1] * vhat + s * w)
    t = sphere_point_triple(v)
    return t, e, State.pure(t.algebra, 0, xi), State.pure(t.algebra, 0, zeta)


def group_isometry_projection(rng, c: _Collector):
    for i in range(20):
        if i % 2 == 0:
            t = m2_diagonal_triple(*(rng.uniform(-2, 2, 2) + np.array([0.0, 3.0])))
            z = float(rng.uniform(-0.9, 0.9))
            a, b = (state_of_bloch(_bloch_same_z(rng, z)) for _ in range(2))
        else:
            n = 2 + (i // 2) % 2
            v = rng.normal(size=n) + 1j * rng.normal(size=n)
            t = sphere_point_triple(v)
            xi, zeta = _aligned_pair(rng, v)
            a, b = State.pure(t.algebra, 0, xi), State.pure(t.algebra, 0, zeta)
        u = _kernel_unitary(t, rng)
        e = _dist(t, a, b)
        c.check(f"isometry.{i:02d}", "commuting unitaries preserve the distance", e,
                lambda: _dist(t, a.pullback(u), b.pullback(u)), 1e-5)
    for i in range(20):
        case = _component_projection_case if i % 2 == 0 else _sphere_projection_case
        t, e, a, b = case(rng)
        te = project_triple(t, e)
        ref = _dist(t, a, b)
        c.check(f"projection.{i:02d}", "compression by a projection in the algebra commuting with D",
                ref, lambda: _dist(te, a, b), 1e-5)


# -- bundle -------------------------------------------------------------------

def _non_integer(rng, lo=-3.0, hi=3.0, margin=0.05) -> float:
    while True:
        w = float(rng.uniform(lo, hi))
        if abs(math.sin(math.pi * w)) > margin:
            return w


def group_bundle(rng, c: _Collector):
    for i in range(1000):
        R1 = float(rng.uniform(0.05, 1.95))
        w = _non_integer(rng)
        ph = float(rng.uniform(0, 2 * math.pi))
        k = int(rng.integers(-3, 4))
        p = bundle.CircleBundleParams((R1, 2 - R1), (0.0, w), (0.0, ph), k)
        Xi = 2 * math.pi * k * w + ph
        c.check(f"n2_reduction.{i:04d}", "fiber: pi * trace norm of S_k vs two-direction chord form",
                bundle.fiber_distance_n2(math.sqrt(R1 * (2 - R1)), w, Xi),
                lambda: bundle.fiber_distance_general(p), 1e-10)
    for i in range(200):
        w = _non_integer(rng, margin=0.1)
        k = int(rng.integers(-2, 3))
        tau0 = float(rng.uniform(0.01, 2 * math.pi - 0.01))
        ph = float(rng.uniform(0, 2 * math.pi))
        c.check(f"torus_z0.{i:03d}", "torus at z = 0: value at the triangle corner",
                bundle.torus_value_at_origin(1.0, w, k, tau0, ph),
                lambda: bundle.torus_distance_n2(1.0, 0.0, w, k, tau0, ph), 1e-6)
    for i in range(20):
        w = float(rng.integers(-3, 4))
        tau0 = float(rng.uniform(0, 2 * math.pi))
        z = float(rng.uniform(-0.9, 0.9))
        R = math.sqrt(1 - z * z)
        ph = 0.0 if i % 2 == 0 else float(rng.uniform(0.1, 2 * math.pi - 0.1))
        e = min(tau0, 2 * math.pi - tau0) if ph == 0.0 else math.inf
        c.check(f"far.{i:02d}", "far directions: min(tau0, 2 pi - tau0) or infinite", e,
                lambda: bundle.torus_distance_n2(R, z, w, 0, tau0, ph), 1e-12)
    for i, (theta, n_c) in enumerate((([0.0, 2 * math.pi, math.pi], 2), ([0.0, 1.0, 2.0], 3),
                                      ([0.0, 4 * math.pi, -2 * math.pi], 1))):
        c.check(f"far_classes.{i}", "holonomy classes mod 2 pi", n_c,
                lambda: bundle.far_classes(theta)[1], 0.0)
    for k in range(4):
        c.check(f"horizontal.{k}", "horizontal length 2 k pi", 2 * k * math.pi,
                lambda: bundle.horizontal_fiber_distance(k), 1e-15)


# -- Moyal ------------------------------------------------------------------

def group_moyal_convergence(rng, c: _Collector):
    prev = None
    for N in (4, 8, 12, 16):
        t = truncated_moyal_triple(N, 2.0)
        alg = t.algebra
        w0, w1 = State.pure(alg, 0, np.eye(N)[0]), State.pure(alg, 0, np.eye(N)[1])
        d = c.check(f"N{N:02d}.d01", "truncated plane: d(omega_0, omega_1) tends to sqrt(theta/2)",
                    1.0, lambda: _dist(t, w0, w1), 0.02)
        dev = abs(d - 1.0)
        if prev is not None:
            c.check(f"N{N:02d}.monotone", "error in N non-increasing within solver tolerance",
                    prev + 1e-6, lambda: dev, 0.0, kind="le")
        prev = dev
    for i in range(20):
        th = float(rng.uniform(0.1, 5))
        m, n, p = sorted(int(x) for x in rng.integers(0, 60, 3))
        c.check(f"additivity.{i:02d}", "oscillator eigenstates: additivity",
                moyal.moyal_eigenstate_distance(th, m, n) + moyal.moyal_eigenstate_distance(th, n, p),
                lambda: moyal.moyal_eigenstate_distance(th, m, p), 1e-14)


def group_quantum_length(rng, c: _Collector):
    for i in range(20):
        lam = float(rng.uniform(0.2, 3))
        m, n = (int(x) for x in rng.integers(0, 30, 2))
        k, kt, s = (complex(*rng.normal(size=2)) for _ in range(3))
        base = moyal.QuantumLengthParams(lam, m, n, k, kt)
        shifted = moyal.QuantumLengthParams(lam, m, n, k + s, kt + s)
        c.check(f"translation.{i:02d}", "squared quantum length is translation invariant",
                moyal.quantum_sq_length(base), lambda: moyal.quantum_sq_length(shifted), 1e-12)
        c.check(f"eigen.{i:02d}", "modified length on eigenstates",
                moyal.eigen_modified_length(lam, m, n),
                lambda: moyal.modified_quantum_length(moyal.QuantumLengthParams(lam, m, n)), 1e-12)
        c.check(f"coherent.{i:02d}", "coherent pair: modified length equals |dkappa|", abs(k - kt),
                lambda: moyal.modified_quantum_length(moyal.QuantumLengthParams(lam, m, m, k, kt)),
                1e-12)
    c.check("eigen.0_3", "modified length on eigenstates", math.sqrt(7) - 1,
            lambda: moyal.modified_quantum_length(moyal.QuantumLengthParams(1.0, 0, 3)), 1e-14)
    prev = None
    for n in (10, 20, 50, 100):
        gap = moyal.eigen_relative_gap(1.0, 0, n)
        if prev is not None:
            c.check(f"gap.decreasing.{n:03d}", "relative gap decreases in n", prev, lambda: gap, 0.0,
                    kind="le")
        prev = gap
    c.check("gap.n100", "relative gap below one percent at n = 100", 0.01,
            lambda: moyal.eigen_relative_gap(1.0, 0, 100), 0.0, kind="le")
    for i, (m, n) in enumerate(((0, 10), (3, 40), (10, 100))):
        lo, hi = moyal.riemann_bounds(m, n)
        s = math.fsum(1 / math.sqrt(2 * k) for k in range(m + 1, n + 1))
        c.check(f"riemann.{i}.lower", "sum between the integrals", s, lambda: lo, 0.0, kind="le")
        c.check(f"riemann.{i}.upper", "sum between the integrals", s, lambda: hi, 0.0, kind="ge")
    for i in range(5):
        tr, L = float(rng.uniform(0, 3)), float(rng.uniform(0.2, 3))
        c.check(f"doubled_plane.{i}", "two-sheeted plane: sqrt(t^2 + 1/Lambda^2)",
                math.sqrt(tr * tr + 1 / (L * L)),
                lambda: moyal.doubled_plane_distance(tr, L), 1e-14)


# -- Kantorovich ----------------------------------------------------------

def group_kantorovich(rng, c: _Collector):
    alg2 = Algebra((1, 1))
    for i in range(20):
        t = two_point_triple(_log_uniform(rng, 0.2, 5))
        cons = sample_pure_pairs(t, 3, int(rng.integers(2 ** 31)), OPTS)
        a, b = random_state(alg2, rng), random_state(alg2, rng)
        d = _dist(t, a, b)
        w = c.check(f"two_point.{i:02d}.exact", "two points: W_D equals d_D", d,
                    lambda: wasserstein_upper(t, a, b, cons), 1e-8)
        c.check(f"two_point.{i:02d}.sandwich", "d_D <= W_D", d - 1e-6, lambda: w, 0.0, kind="ge")
    t = truncated_moyal_triple(2, 1.0)
    cons = sample_pure_pairs(t, 30, int(rng.integers(2 ** 31)), OPTS)
    for i in range(20):
        a = state_of_bloch(_bloch_point(rng, i % 2 == 0))
        b = state_of_bloch(_bloch_point(rng, i % 2 == 0))
        d = _dist(t, a, b)
        c.check(f"moyal.{i:02d}.sandwich", "d_D <= W_D", d - 1e-6,
                lambda: wasserstein_upper(t, a, b, cons), 0.0, kind="ge")
    for i in range(10):
        w1 = state_of_bloch(_bloch_point(rng, True))
        w2 = state_of_bloch(_bloch_point(rng, True))
        lam, mu = rng.uniform(size=2)
        a, b = mix_states(w1, w2, lam), mix_states(w1, w2, mu)
        e = abs(lam - mu) * _dist(t, w1, w2)
        c.check(f"segment.{i:02d}", "segment states: |lambda - mu| d_D(omega_1, omega_2)", e,
                lambda: wasserstein_upper(t, a, b, cons, must_include=[(w1, w2)], opts=OPTS), 1e-6)


GROUPS: dict[str, tuple[str, Callable]] = {
    "two_point": ("C01", group_two_point),
    "three_point": ("C02", group_three_point),
    "three_point_inverse": ("C03", group_three_point_inverse),
    "four_point": ("C04", group_four_point),
    "complete_graph": ("C05", group_complete_graph),
    "graph_properties": ("C06", group_graph_properties),
    "m2_eigen": ("C07", group_m2_eigen),
    "moyal_ball": ("C08", group_moyal_ball),
    "sphere_point": ("C09", group_sphere_point),
    "pythagoras": ("C10", group_pythagoras),
    "segment": ("C11", group_segment),
    "isometry_projection": ("C12", group_isometry_projection),
    "bundle": ("C13", group_bundle),
    "moyal_convergence": ("C14", group_moyal_convergence),
    "quantum_length": ("C15", group_quantum_length),
    "kantorovich": ("C16", group_kantorovich),
}
GROUP_INDEX = {name: i for i, name in enumerate(GROUPS)}

SUITES: dict[str, tuple[str, ...]] = {
    "discrete": ("two_point", "three_point", "three_point_inverse", "four_point"),
    "graphs": ("complete_graph", "graph_properties", "segment"),
    "ball": ("m2_eigen", "moyal_ball", "sphere_point"),
    "products": ("pythagoras", "isometry_projection"),
    "bundle": ("bundle",),
    "moyal": ("moyal_convergence", "quantum_length"),
    "kantorovich": ("kantorovich",),
}
SUITES["all"] = tuple(GROUPS)


def run_group(name: str, seed: int) -> tuple[list[Row], float]:
    prefix, fn = GROUPS[name]
    rng = np.random.default_rng([seed, GROUP_INDEX[name]])
    col = _Collector(f"{prefix}.{name}")
    t0 = time.perf_counter()
    fn(rng, col)
    return col.rows, time.perf_counter() - t0


def thread_count() -> int:
    raw = os.environ.get("NCGDIST_THREADS")
    if raw:
        return max(1, int(raw))
    return min(4, os.cpu_count() or 1)


def run_suite(suite: str, seed: int = 0, groups: tuple[str, ...] | None = None) -> Report:
    """Run a named suite (or an explicit group list) and return the sorted report."""
    if groups is None:
        if suite not in SUITES:
            raise KeyError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
        groups = SUITES[suite]
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    with ThreadPoolExecutor(max_workers=thread_count()) as ex:
        results = list(ex.map(lambda g: run_group(g, seed), groups))
    rows = [r for rs, _ in results for r in rs]
    rows.sort(key=lambda r: r.case_id)
    return Report(rows, {g: s for g, (_, s) in zip(groups, results)})
