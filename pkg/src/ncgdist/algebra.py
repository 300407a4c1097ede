"""Finite-dimensional C*-algebras: block algebras, Hermitian coordinates and states.

An algebra is a direct sum of full complex matrix blocks ``M_n1 + ... + M_nB``.
Elements are stored block by block; most of the numerics instead work in a
fixed real coordinate system given by an orthonormal Hermitian basis (see
:func:`hermitian_basis`).  The flat layout concatenates each block raveled in
row-major order, so the flat vector of any element has length ``herm_dim``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

HERMITIAN_ATOL = 1e-12
PSD_ATOL = 1e-10
TRACE_ATOL = 1e-12


@dataclass(frozen=True)
class Algebra:
    """Direct sum of complex matrix blocks with the given dimensions."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(n) for n in self.blocks)
        if len(blocks) < 1:
            raise ValueError("an algebra needs at least one block")
        if any(n < 1 for n in blocks):
            raise ValueError(f"block dimensions must be positive, got {blocks}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def herm_dim(self) -> int:
        return sum(n * n for n in self.blocks)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for n in self.blocks:
            out.append(acc)
            acc += n * n
        return tuple(out)

    @cached_property
    def basis_matrix(self) -> np.ndarray:
        """Unitary ``(herm_dim, herm_dim)`` matrix whose columns are the flat basis elements."""
        d = self.herm_dim
        B = np.zeros((d, d), dtype=complex)
        col = 0
        s = 1.0 / math.sqrt(2.0)
        for off, n in zip(self.offsets, self.blocks):
            for p in range(n):
                B[off + p * n + p, col] = 1.0
                col += 1
            for p in range(n):
                for q in range(p + 1, n):
                    B[off + p * n + q, col] = s
                    B[off + q * n + p, col] = s
                    col += 1
                    B[off + p * n + q, col] = 1j * s
                    B[off + q * n + p, col] = -1j * s
                    col += 1
        return B

    @cached_property
    def unit_flat(self) -> np.ndarray:
        """Flat vector of the unit element."""
        u = np.zeros(self.herm_dim, dtype=complex)
        for off, n in zip(self.offsets, self.blocks):
            u[off: off + n * n] = np.eye(n).ravel()
        return u

    def split(self, flat: np.ndarray) -> tuple[np.ndarray, ...]:
        flat = np.asarray(flat)
        return tuple(flat[off: off + n * n].reshape(n, n)
                     for off, n in zip(self.offsets, self.blocks))

    def coords_of_flat(self, flat: np.ndarray) -> np.ndarray:
        """Coordinates in the Hermitian basis (real iff the element is Hermitian)."""
        return self.basis_matrix.conj().T @ np.asarray(flat, dtype=complex)

    def flat_of_coords(self, coords: np.ndarray) -> np.ndarray:
        return self.basis_matrix @ np.asarray(coords)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Element of an :class:`Algebra`, one complex matrix per block."""

    algebra: Algebra
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(np.asarray(b, dtype=complex) for b in self.blocks)
        if len(blocks) != len(self.algebra.blocks):
            raise ValueError(f"expected {len(self.algebra.blocks)} blocks, got {len(blocks)}")
        for b, n in zip(blocks, self.algebra.blocks):
            if b.shape != (n, n):
                raise ValueError(f"block of shape {b.shape} does not match dimension {n}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_flat(cls, algebra: Algebra, flat) -> "AlgebraElement":
        return cls(algebra, algebra.split(np.asarray(flat, dtype=complex)))

    @classmethod
    def from_coords(cls, algebra: Algebra, coords) -> "AlgebraElement":
        return cls.from_flat(algebra, algebra.flat_of_coords(coords))

    @classmethod
    def unit(cls, algebra: Algebra) -> "AlgebraElement":
        return cls.from_flat(algebra, algebra.unit_flat)

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate([b.ravel() for b in self.blocks])

    @property
    def coords(self) -> np.ndarray:
        """Hermitian-basis coordinates; real-valued for Hermitian elements."""
        c = self.algebra.coords_of_flat(self.flat)
        return c.real if self.is_hermitian else c

    @property
    def is_hermitian(self) -> bool:
        return all(np.allclose(b, b.conj().T, rtol=0, atol=HERMITIAN_ATOL) for b in self.blocks)

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.flat))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __mul__(self, scalar) -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(scalar * b for b in self.blocks))

    __rmul__ = __mul__

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(b.conj().T for b in self.blocks))


def hermitian_basis(algebra: Algebra) -> list[AlgebraElement]:
    """Orthonormal basis of the Hermitian part, in the fixed enumeration order.

    Per block: the diagonal matrix units, then for each ``p < q`` the symmetric
    element ``(e_pq + e_qp)/sqrt(2)`` followed by ``i(e_pq - e_qp)/sqrt(2)``.
    """
    B = algebra.basis_matrix
    return [AlgebraElement.from_flat(algebra, B[:, i]) for i in range(algebra.herm_dim)]


def _phase_normalize(v: np.ndarray) -> np.ndarray:
    idx = np.flatnonzero(np.abs(v) > 1e-12)
    if idx.size == 0:
        return v
    ph = v[idx[0]] / abs(v[idx[0]])
    return v / ph


@dataclass(frozen=True, eq=False)
class State:
    """State given by block weights and per-block density matrices.

    A pure state additionally keeps its (phase-normalized) vector and block.
    Construct through :meth:`pure`, :meth:`mixed` or :meth:`from_functional`.
    """

    algebra: Algebra
    weights: np.ndarray
    densities: tuple[np.ndarray, ...]
    vector: np.ndarray | None = field(default=None)
    block: int | None = field(default=None)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        dens = tuple(np.asarray(r, dtype=complex) for r in self.densities)
        if w.shape != (len(self.algebra.blocks),) or len(dens) != len(self.algebra.blocks):
            raise ValueError("weights/densities do not match the algebra blocks")
        if np.any(w < -TRACE_ATOL) or abs(w.sum() - 1.0) > TRACE_ATOL * max(1, len(w)):
            raise ValueError(f"weights must be nonnegative and sum to 1, got {w}")
        for r, n in zip(dens, self.algebra.blocks):
            if r.shape != (n, n):
                raise ValueError(f"density of shape {r.shape} does not match block {n}")
            if not np.allclose(r, r.conj().T, rtol=0, atol=1e-10):
                raise ValueError("density matrix is not Hermitian")
            if abs(np.trace(r).real - 1.0) > 1e-10:
                raise ValueError("density matrix must have unit trace")
            if np.linalg.eigvalsh(r).min() < -PSD_ATOL:
                raise ValueError("density matrix is not positive semidefinite")
        object.__setattr__(self, "weights", np.clip(w, 0.0, None))
        object.__setattr__(self, "densities", dens)

    # -- constructors -----------------------------------------------------
    @classmethod
    def pure(cls, algebra: Algebra, block: int, vector) -> "State":
        v = np.asarray(vector, dtype=complex).ravel()
        n = algebra.blocks[block]
        if v.shape != (n,):
            raise ValueError(f"vector of length {v.size} does not fit block {block} of size {n}")
        nv = np.linalg.norm(v)
        if nv == 0:
            raise ValueError("zero vector does not define a state")
        v = _phase_normalize(v / nv)
        w = np.zeros(len(algebra.blocks))
        w[block] = 1.0
        dens = [np.eye(m, dtype=complex) / m for m in algebra.blocks]
        dens[block] = np.outer(v, v.conj())
        return cls(algebra, w, tuple(dens), vector=v, block=block)

    @classmethod
    def mixed(cls, algebra: Algebra, weights, densities) -> "State":
        return cls(algebra, np.asarray(weights, dtype=float), tuple(densities))

    @classmethod
    def from_functional(cls, algebra: Algebra, values) -> "State":
        """State whose values on the Hermitian basis are ``values``."""
        sigma = algebra.split(algebra.flat_of_coords(np.asarray(values, dtype=float)))
        weights, dens = [], []
        for s in sigma:
            s = 0.5 * (s + s.conj().T)
            t = float(np.trace(s).real)
            weights.append(max(t, 0.0))
            dens.append(s / t if t > TRACE_ATOL else np.eye(s.shape[0], dtype=complex) / s.shape[0])
        w = np.array(weights)
        w = w / w.sum()
        # eigenvalue clipping only absorbs round-off from the coordinate change
        dens = [_clip_psd(r) for r in dens]
        st = cls(algebra, w, tuple(dens))
        return st._with_purity()

    def _with_purity(self) -> "State":
        idx = np.flatnonzero(self.weights > 1.0 - 1e-12)
        if idx.size != 1:
            return self
        b = int(idx[0])
        vals, vecs = np.linalg.eigh(self.densities[b])
        if vals[-1] < 1.0 - 1e-10:
            return self
        return State.pure(self.algebra, b, vecs[:, -1])

    # -- properties -------------------------------------------------------
    @property
    def is_pure(self) -> bool:
        return self.vector is not None

    @cached_property
    def functional(self) -> np.ndarray:
        """Values ``phi(e_i)`` on the Hermitian basis (a real vector)."""
        s = np.concatenate([w * r.T.ravel() for w, r in zip(self.weights, self.densities)])
        return (self.algebra.basis_matrix.T @ s).real

    def __call__(self, a: AlgebraElement) -> complex:
        return eval_state(self, a)

    def pullback(self, u: AlgebraElement) -> "State":
        """The state ``a -> phi(u a u*)`` (inner automorphism by a unitary ``u``)."""
        dens = tuple(ub.conj().T @ r @ ub for ub, r in zip(u.blocks, self.densities))
        if self.is_pure:
            b = self.block
            return State.pure(self.algebra, b, u.blocks[b].conj().T @ self.vector)
        return State(self.algebra, self.weights.copy(), dens)


def _clip_psd(r: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(r)
    if vals.min() >= 0:
        return r
    vals = np.clip(vals, 0.0, None)
    out = (vecs * vals) @ vecs.conj().T
    return out / np.trace(out).real


def eval_state(state: State, a: AlgebraElement) -> complex:
    """``phi(a) = sum_b w_b Tr(rho_b a_b)``."""
    if a.algebra != state.algebra:
        raise ValueError("state and element live on different algebras")
    return complex(sum(w * np.trace(r @ ab) for w, r, ab in
                       zip(state.weights, state.densities, a.blocks)))


def mix_states(s0: State, s1: State, lam: float) -> State:
    """Convex combination ``lam*s0 + (1-lam)*s1``."""
    if s0.algebra != s1.algebra:
        raise ValueError("states live on different algebras")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"mixing parameter must lie in [0, 1], got {lam}")
    if lam == 1.0:
        return s0
    if lam == 0.0:
        return s1
    return State.from_functional(s0.algebra, lam * s0.functional + (1 - lam) * s1.functional)


# -- Bloch ball ------------------------------------------------------------

@dataclass(frozen=True)
class BlochPoint:
    """Mean point of a state of ``M_2`` in the closed unit ball."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.x * self.x + self.y * self.y + self.z * self.z > 1.0 + 1e-10:
            raise ValueError(f"point ({self.x}, {self.y}, {self.z}) lies outside the unit ball")

    @property
    def r(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def phase(self) -> float:
        return math.atan2(self.y, self.x)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def _check_m2(state: State):
    if state.algebra.blocks != (2,):
        raise ValueError("Bloch coordinates need the single-block algebra M_2")


def bloch_of_state(state: State) -> BlochPoint:
    """Hopf coordinates: ``x + iy = 2 rho_12``, ``z = rho_11 - rho_22``."""
    _check_m2(state)
    rho = state.densities[0]
    c = 2.0 * rho[0, 1]
    return BlochPoint(float(c.real), float(c.imag), float((rho[0, 0] - rho[1, 1]).real))


def state_of_bloch(p: BlochPoint) -> State:
    algebra = Algebra((2,))
    rho = 0.5 * np.array([[1 + p.z, p.x + 1j * p.y],
                          [p.x - 1j * p.y, 1 - p.z]], dtype=complex)
    return State.from_functional(algebra, State.mixed(algebra, [1.0], [_clip_psd(rho)]).functional)


# -- JSON ------------------------------------------------------------------

def _pairs_to_complex(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex numbers must be encoded as [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _complex_to_pairs(arr: np.ndarray) -> list:
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def state_from_json(algebra: Algebra, obj: dict) -> State:
    kind = obj.get("type")
    if kind == "pure":
        if "block" not in obj or "vector" not in obj:
            raise ValueError("pure state needs 'block' and 'vector'")
        return State.pure(algebra, int(obj["block"]), _pairs_to_complex(obj["vector"]))
    if kind == "mixed":
        if "weights" not in obj or "densities" not in obj:
            raise ValueError("mixed state needs 'weights' and 'densities'")
        dens = []
        for raw, n in zip(obj["densities"], algebra.blocks):
            m = _pairs_to_complex(raw)
            dens.append(m.reshape(n, n))
        if len(dens) != len(algebra.blocks):
            raise ValueError("'densities' must list one matrix per block")
        return State.mixed(algebra, obj["weights"], dens)
    raise ValueError(f"'type' must be 'pure' or 'mixed', got {kind!r}")


def state_to_json(state: State) -> dict:
    if state.is_pure:
        return {"type": "pure", "block": int(state.block), "vector": _complex_to_pairs(state.vector)}
    return {"type": "mixed", "weights": state.weights.tolist(),
            "densities": [_complex_to_pairs(r.ravel()) for r in state.densities]}


def random_pure_state(algebra: Algebra, rng: np.random.Generator,
                      block: int | None = None) -> State:
    """Haar-distributed vector state on a (random) block."""
    if block is None:
        block = int(rng.integers(len(algebra.blocks)))
    n = algebra.blocks[block]
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return State.pure(algebra, block, v)


def random_state(algebra: Algebra, rng: np.random.Generator, rank: int | None = None) -> State:
    """Random mixed state: Dirichlet block weights and Wishart-type densities."""
    w = rng.dirichlet(np.ones(len(algebra.blocks)))
    dens = []
    for n in algebra.blocks:
        k = n if rank is None else min(rank, n)
        g = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
        r = g @ g.conj().T
        dens.append(r / np.trace(r).real)
    return State.mixed(algebra, w, dens)


def coords_to_element(algebra: Algebra, coords: Sequence[float]) -> AlgebraElement:
    return AlgebraElement.from_coords(algebra, np.asarray(coords, dtype=float))
