"""Closed-form distances for small discrete spaces, graphs, M_2 and the sphere+point.

Every evaluator is a pure function.  Where a realizing triple exists, a
``*_triple`` helper builds it so the formula can be checked against the solver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .algebra import BlochPoint, State, bloch_of_state
from .triple import graph_triple, m2_diagonal_triple, sphere_point_triple

INF = math.inf


# -- three points -----------------------------------------------------------

@dataclass(frozen=True)
class ThreePointParams:
    D12: float
    D13: float
    D23: float

    def __post_init__(self):
        for name in ("D12", "D13", "D23"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    def weights(self) -> np.ndarray:
        return np.array([[0, self.D12, self.D13],
                         [self.D12, 0, self.D23],
                         [self.D13, self.D23, 0]], dtype=float)


def three_point_distance(p: ThreePointParams) -> tuple[float, float, float]:
    """``(d12, d13, d23)`` for ``C^3`` with real symmetric ``D``."""
    a2, b2, c2 = p.D12 ** 2, p.D13 ** 2, p.D23 ** 2
    den = a2 * b2 + a2 * c2 + b2 * c2
    d12 = math.sqrt((b2 + c2) / den)
    d13 = math.sqrt((a2 + c2) / den)
    d23 = math.sqrt((a2 + b2) / den)
    return d12, d13, d23


def three_point_triple(p: ThreePointParams):
    return graph_triple(3, p.weights())


def squared_triangle_holds(d12: float, d13: float, d23: float, atol: float = 1e-12) -> bool:
    s = sorted([d12 ** 2, d13 ** 2, d23 ** 2])
    return s[0] + s[1] >= s[2] - atol


def three_point_inverse(a: float, b: float, c: float) -> ThreePointParams:
    """Couplings realizing ``d12 = a``, ``d13 = b``, ``d23 = c``.

    Requires the strict squared triangle inequalities; equality needs an
    infinite coupling and is rejected.
    """
    if min(a, b, c) <= 0:
        raise ValueError("distances must be positive")
    r3 = b * b + c * c - a * a
    r2 = a * a + c * c - b * b
    r1 = a * a + b * b - c * c
    if min(r1, r2, r3) < 0:
        raise ValueError("squared triangle inequality violated")
    if min(r1, r2, r3) == 0:
        raise ValueError("infinite coupling: squared triangle inequality is an equality")
    P = (a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c)
    return ThreePointParams(math.sqrt(2 * r3 / P), math.sqrt(2 * r2 / P), math.sqrt(2 * r1 / P))


def star_resistances(a: float, b: float, c: float) -> tuple[float, float, float]:
    """Star resistances ``r_i`` with ``d(1,2)^2 = r_1 + r_2`` (and cyclic).

    These are half the raw combinations ``a^2 + b^2 - c^2`` etc.; only with
    the factor 1/2 do the sums reproduce the squared distances.
    """
    return (0.5 * (a * a + b * b - c * c), 0.5 * (a * a + c * c - b * b),
            0.5 * (b * b + c * c - a * a))


def triangle_resistances(r1: float, r2: float, r3: float) -> tuple[float, float, float]:
    """Star to triangle transform: ``(R12, R13, R23)``."""
    s = r1 * r2 + r2 * r3 + r3 * r1
    return s / r3, s / r2, s / r1


# -- four points ------------------------------------------------------------

@dataclass(frozen=True)
class FourPointParams:
    """Inverse couplings ``d_k = 1/D_ij``; an infinite entry encodes ``D_ij = 0``.

    Index map: d1 = 1/D12, d2 = 1/D13, d3 = 1/D14, d4 = 1/D23, d5 = 1/D24, d6 = 1/D34.
    """

    d1: float
    d2: float
    d3: float
    d4: float
    d5: float
    d6: float

    _PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

    def __post_init__(self):
        for k in range(1, 7):
            v = getattr(self, f"d{k}")
            if not (v > 0):
                raise ValueError(f"d{k} must be positive or +inf, got {v}")

    @classmethod
    def cycle(cls, d1, d3, d4, d6) -> "FourPointParams":
        return cls(d1, INF, d3, d4, INF, d6)

    def weights(self) -> np.ndarray:
        W = np.zeros((4, 4))
        for k, (i, j) in enumerate(self._PAIRS, start=1):
            v = getattr(self, f"d{k}")
            W[i, j] = W[j, i] = 0.0 if math.isinf(v) else 1.0 / v
        return W


def _four_point_c(d1, d3, d4, d6) -> float:
    return (((d3 + d4) ** 2 * d6 + (d1 - d6) * (d3 * d4 - d6 ** 2))
            * ((d3 - d4) ** 2 * d6 + (d1 + d6) * (d3 * d4 + d6 ** 2)))


def four_point_special(p: FourPointParams, printed: bool = False) -> tuple[float, float]:
    """``(d(1,2), d(1,3))`` on the 4-cycle with ``D13 = D24 = 0``.

    Guards are tested top-down and the first match wins.  With
    ``printed=False`` (default) the last branch of ``d(1,2)`` uses
    ``(d3 + d4)^2`` and ``(d3 - d4)^2`` in the numerators, the ``d(1,3)``
    guards compare against ``|d1 d6 - d3 d4|``, and the balanced case
    ``d1 d6 = d3 d4`` has no branch of its own (there ``C > 0`` and the last
    branch applies); these are the forms that agree with the SDP.
    ``printed=True`` evaluates the widely quoted variant with ``d3^2 + d4^2``,
    ``d3^2 - d4^2``, a squared guard right-hand side and the balanced branch.
    """
    if not (math.isinf(p.d2) and math.isinf(p.d5)):
        raise ValueError("four_point_special needs d2 = d5 = inf (D13 = D24 = 0)")
    d1, d3, d4, d6 = p.d1, p.d3, p.d4, p.d6
    if any(math.isinf(x) for x in (d1, d3, d4, d6)):
        raise ValueError("d1, d3, d4, d6 must be finite")
    C = _four_point_c(d1, d3, d4, d6)
    prod = d1 * d6 - d3 * d4
    if d1 * d1 <= d6 * d6:
        d12 = d1
    elif printed and math.isclose(d1 * d6, d3 * d4, rel_tol=1e-12):
        d12 = (d3 * d3 + d1 * d6) / (d3 * math.sqrt(d3 * d3 + d6 * d6))
    elif C <= 0:
        d12 = math.sqrt(d1 ** 2 * (d3 ** 2 + d6 ** 2) * (d4 ** 2 + d6 ** 2) / prod ** 2)
    elif printed:
        # the second term is real only when d3 >= d4
        second = d1 ** 2 * (d3 ** 2 - d4 ** 2) / ((d3 - d4) ** 2 + (d1 + d6) ** 2)
        d12 = max(math.sqrt(d1 ** 2 * (d3 ** 2 + d4 ** 2) / ((d3 + d4) ** 2 + (d1 - d6) ** 2)),
                  math.sqrt(second) if second > 0 else 0.0)
    else:
        d12 = max(d1 * (d3 + d4) / math.hypot(d3 + d4, d1 - d6),
                  d1 * abs(d3 - d4) / math.hypot(d3 - d4, d1 + d6))
    guard = prod ** 2 if printed else abs(prod)
    num = abs(d1 * d3 + d4 * d6)
    if d3 * d3 + d6 * d6 <= guard:
        d13 = math.hypot(d3, d6)
    elif d1 * d1 + d4 * d4 <= guard:
        d13 = math.hypot(d1, d4)
    else:
        d13 = max(num / math.hypot(d3 + d4, d1 - d6), num / math.hypot(d3 - d4, d1 + d6))
    return d12, d13


def four_point_region(p: FourPointParams) -> tuple[str, str]:
    """Labels of the guard branches taken by :func:`four_point_special`."""
    d1, d3, d4, d6 = p.d1, p.d3, p.d4, p.d6
    C = _four_point_c(d1, d3, d4, d6)
    prod = abs(d1 * d6 - d3 * d4)
    if d1 * d1 <= d6 * d6:
        a = "short_link"
    elif C <= 0:
        a = "c_nonpositive"
    else:
        a = "orthogonal_max"
    if d3 * d3 + d6 * d6 <= prod:
        b = "path_via_4"
    elif d1 * d1 + d4 * d4 <= prod:
        b = "path_via_2"
    else:
        b = "orthogonal_max"
    return a, b


def n_point_realization(distances) -> np.ndarray:
    """Dirac operator realizing an arbitrary finite metric: not provided.

    Existence is known but no construction is available to implement.
    """
    raise NotImplementedError("no explicit construction is available for N-point realization")


# -- graphs -----------------------------------------------------------------

def complete_graph_distance(N: int, k: float) -> float:
    if N < 2:
        raise ValueError("N must be at least 2")
    if k == 0:
        raise ValueError("k must be nonzero")
    return math.sqrt(2.0 / N) / abs(k)


def cut_link_distance(N: int, k: float) -> float:
    """Distance between the two endpoints of the single removed link."""
    if N < 3:
        raise ValueError("cut-link distance needs N >= 3")
    if k == 0:
        raise ValueError("k must be nonzero")
    return math.sqrt(2.0 / (N - 2)) / abs(k)


def complete_graph_weights(N: int, k: float, cut: tuple[int, int] | None = None) -> np.ndarray:
    W = k * (np.ones((N, N)) - np.eye(N))
    if cut is not None:
        i, j = cut
        W[i, j] = W[j, i] = 0.0
    return W


def graph_geodesic_length(weights, i: int, j: int) -> float:
    """Shortest path with edge cost ``1/|D_pq|``; ``inf`` when disconnected."""
    W = np.abs(np.asarray(weights, dtype=float))
    cost = np.zeros_like(W)
    mask = W > 0
    cost[mask] = 1.0 / W[mask]
    dist = shortest_path(cost, method="D", directed=False, indices=[i])
    return float(dist[0, j])


# -- M_2 --------------------------------------------------------------------

def m2_eigen_distance(d1: float, d2: float, p: BlochPoint, q: BlochPoint,
                      atol: float = 1e-10) -> float:
    """Chord distance scaled by ``1/|d1 - d2|`` at equal height, else ``inf``."""
    if d1 == d2:
        return INF
    if abs(p.z - q.z) > atol:
        return INF
    return math.hypot(p.x - q.x, p.y - q.y) / abs(d1 - d2)


def moyal_ball_distance(theta: float, p: BlochPoint, q: BlochPoint) -> float:
    """Distance on the two-level truncation of the plane, as a function of Bloch points."""
    d_eq = math.hypot(p.x - q.x, p.y - q.y)
    dz = abs(p.z - q.z)
    scale = math.sqrt(theta / 2.0)
    if dz <= d_eq:
        return scale * d_eq
    d_ec2 = d_eq * d_eq + dz * dz
    return scale * d_ec2 / (2.0 * dz)


def bloch_pair(phi: State, psi: State) -> tuple[BlochPoint, BlochPoint]:
    return bloch_of_state(phi), bloch_of_state(psi)


# -- sphere + point ---------------------------------------------------------

@dataclass(frozen=True)
class SpherePointParams:
    v: np.ndarray
    xi: np.ndarray
    zeta: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=complex).ravel()
        xi = np.asarray(self.xi, dtype=complex).ravel()
        zeta = np.asarray(self.zeta, dtype=complex).ravel()
        if not np.any(v):
            raise ValueError("v must be nonzero")
        if xi.shape != v.shape or zeta.shape != v.shape:
            raise ValueError("xi, zeta and v must have the same length")
        for name, u in (("xi", xi), ("zeta", zeta)):
            if abs(np.linalg.norm(u) - 1) > 1e-12:
                raise ValueError(f"{name} must be a unit vector")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "zeta", zeta)

    def triple(self):
        return sphere_point_triple(self.v)


def _orthogonal_part(u: np.ndarray, vhat: np.ndarray) -> np.ndarray:
    return u - vhat * np.vdot(vhat, u)


def phase_aligned(xi, zeta, v, atol: float = 1e-10) -> bool:
    """Components orthogonal to ``v`` agree up to one common phase."""
    vhat = np.asarray(v, dtype=complex) / np.linalg.norm(v)
    a = _orthogonal_part(np.asarray(xi, dtype=complex), vhat)
    b = _orthogonal_part(np.asarray(zeta, dtype=complex), vhat)
    if np.linalg.norm(a) <= atol and np.linalg.norm(b) <= atol:
        return True
    ip = np.vdot(a, b)
    return abs(abs(ip) - np.linalg.norm(a) * np.linalg.norm(b)) <= atol and \
        abs(np.linalg.norm(a) - np.linalg.norm(b)) <= atol


def sphere_point_distance(p: SpherePointParams) -> tuple[float, float]:
    """``(d(omega_xi, omega_zeta), d(omega_c, omega_xi))``.

    The first value is finite only for phase-aligned pairs; the second only
    when ``xi`` is proportional to ``v``.
    """
    nv = float(np.linalg.norm(p.v))
    if phase_aligned(p.xi, p.zeta, p.v):
        # sqrt(1 - |<xi, zeta>|^2) as the norm of the part of zeta orthogonal to xi
        first = 2.0 / nv * float(np.linalg.norm(p.zeta - p.xi * np.vdot(p.xi, p.zeta)))
    else:
        first = INF
    vhat = p.v / nv
    second = 1.0 / nv if abs(abs(np.vdot(vhat, p.xi)) - 1.0) <= 1e-10 else INF
    return first, second


# -- products -----------------------------------------------------------------

def pythagoras_bounds(d1: float, d2: float) -> tuple[float, float]:
    """``(sqrt(d1^2 + d2^2), d1 + d2)``; a product distance lies in between."""
    if d1 < 0 or d2 < 0:
        raise ValueError("distances must be nonnegative")
    return math.hypot(d1, d2), d1 + d2


def m2_triple(d1: float, d2: float):
    return m2_diagonal_triple(d1, d2)
