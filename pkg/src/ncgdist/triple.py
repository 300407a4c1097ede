"""Spectral triples: representation, Dirac operator, seminorm and its kernel.

The seminorm ``L_D(a) = ||[D, pi(a)]||`` is evaluated on Hermitian coordinates.
For a Hermitian ``a`` the commutator is anti-Hermitian, so ``i[D, pi(a)]`` is
Hermitian.  The union sparsity pattern of the basis commutators splits the
Hilbert space into independent blocks; identical blocks are stored once.  For
left-multiplication representations this removes the trivial ``I_k`` factor.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .algebra import Algebra, AlgebraElement, State, _complex_to_pairs, _pairs_to_complex

KERNEL_TOL = 1e-9
DIRAC_ATOL = 1e-12
GRADING_ATOL = 1e-10
REP_ATOL = 1e-9

REP_KINDS = ("diagonal", "defining", "left_mult_tensor", "custom")


@dataclass(frozen=True, eq=False)
class Representation:
    """Images of the Hermitian basis elements as sparse operators on ``C^hilbert_dim``."""

    algebra: Algebra
    hilbert_dim: int
    images: tuple
    kind: str = "custom"
    tensor_copies: int = 1

    def __post_init__(self):
        if self.kind not in REP_KINDS:
            raise ValueError(f"unknown representation kind {self.kind!r}")
        imgs = tuple(sp.csr_matrix(m, dtype=complex) for m in self.images)
        if len(imgs) != self.algebra.herm_dim:
            raise ValueError(f"need {self.algebra.herm_dim} images, got {len(imgs)}")
        for m in imgs:
            if m.shape != (self.hilbert_dim, self.hilbert_dim):
                raise ValueError(f"image of shape {m.shape} does not act on C^{self.hilbert_dim}")
        object.__setattr__(self, "images", imgs)

    # -- constructors -----------------------------------------------------
    @classmethod
    def left_mult_tensor(cls, algebra: Algebra, k: int = 1) -> "Representation":
        """``a -> (a_1 + ... + a_B) (x) I_k`` on ``C^(sum n_b) (x) C^k``."""
        if k < 1:
            raise ValueError("tensor_copies must be >= 1")
        n = sum(algebra.blocks)
        B = algebra.basis_matrix
        starts = np.cumsum((0,) + algebra.blocks[:-1])
        eye_k = sp.identity(k, dtype=complex, format="csr")
        imgs = []
        for i in range(algebra.herm_dim):
            rows, cols, vals = [], [], []
            for off, s, nb in zip(algebra.offsets, starts, algebra.blocks):
                blk = B[off: off + nb * nb, i].reshape(nb, nb)
                pp, qq = np.nonzero(blk)
                rows.extend(s + pp)
                cols.extend(s + qq)
                vals.extend(blk[pp, qq])
            m = sp.csr_matrix((vals, (rows, cols)), shape=(n, n), dtype=complex)
            imgs.append(sp.kron(m, eye_k, format="csr"))
        kind = "left_mult_tensor" if k > 1 else "defining"
        return cls(algebra, n * k, tuple(imgs), kind=kind, tensor_copies=k)

    @classmethod
    def defining(cls, algebra: Algebra) -> "Representation":
        return cls.left_mult_tensor(algebra, 1)

    @classmethod
    def diagonal(cls, n: int) -> "Representation":
        """``C^n`` acting by diagonal matrices on ``C^n``."""
        rep = cls.defining(Algebra((1,) * n))
        return cls(rep.algebra, rep.hilbert_dim, rep.images, kind="diagonal")

    # -- evaluation -------------------------------------------------------
    def __call__(self, a: AlgebraElement) -> np.ndarray:
        return self.image_of_coords(a.algebra.coords_of_flat(a.flat))

    def image_of_coords(self, coords) -> np.ndarray:
        out = sp.csr_matrix((self.hilbert_dim, self.hilbert_dim), dtype=complex)
        for c, m in zip(coords, self.images):
            if c != 0:
                out = out + c * m
        return out.toarray()

    def check(self, rng: np.random.Generator | None = None, pairs: int = 3) -> None:
        """Check unitality, *-preservation and multiplicativity on random pairs."""
        rng = np.random.default_rng(0) if rng is None else rng
        alg = self.algebra
        unit = self(AlgebraElement.unit(alg))
        if not np.allclose(unit, np.eye(self.hilbert_dim), atol=REP_ATOL):
            raise ValueError("representation does not map the unit to the identity")
        d = alg.herm_dim
        for _ in range(pairs):
            a = AlgebraElement.from_flat(alg, rng.normal(size=d) + 1j * rng.normal(size=d))
            b = AlgebraElement.from_flat(alg, rng.normal(size=d) + 1j * rng.normal(size=d))
            pa, pb = self(a), self(b)
            scale = max(1.0, np.abs(pa).max() * np.abs(pb).max())
            if not np.allclose(self(a @ b), pa @ pb, atol=REP_ATOL * scale):
                raise ValueError("representation is not multiplicative")
            if not np.allclose(self(a.adjoint()), pa.conj().T, atol=REP_ATOL * scale):
                raise ValueError("representation does not preserve the adjoint")


@dataclass(frozen=True)
class KernelBasis:
    """Orthonormal Hermitian coordinates spanning ``Ker L_D`` and its complement."""

    basis: np.ndarray       # (herm_dim, rank) real, orthonormal columns
    complement: np.ndarray  # (herm_dim, herm_dim - rank)
    rank: int
    tol: float
    singular_values: np.ndarray

    def elements(self, algebra: Algebra) -> list[AlgebraElement]:
        return [AlgebraElement.from_coords(algebra, self.basis[:, j]) for j in range(self.rank)]


@dataclass(frozen=True)
class CommutatorBlocks:
    """Distinct Hermitian blocks of ``i[D, pi(e_j)]``, stacked per basis element."""

    tens: np.ndarray      # (herm_dim, total) complex
    sizes: np.ndarray     # int64
    offsets: np.ndarray   # int64
    hilbert_blocks: tuple  # index sets of the blocks kept
    bipartite: tuple       # per block: True when a diagonal sign flip maps H to -H

    def reduce(self, Q: np.ndarray) -> np.ndarray:
        """Blocks in the coordinates ``y`` with ``c = Q y``."""
        return np.ascontiguousarray(Q.T @ self.tens)


@dataclass(eq=False)
class SpectralTriple:
    """Finite spectral triple ``(A, H, D)`` with an optional grading."""

    algebra: Algebra
    rep: Representation
    dirac: np.ndarray
    grading: np.ndarray | None = None
    validate: bool = True
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self):
        if self.rep.algebra != self.algebra:
            raise ValueError("representation belongs to a different algebra")
        D = np.asarray(self.dirac, dtype=complex)
        n = self.rep.hilbert_dim
        if D.shape != (n, n):
            raise ValueError(f"Dirac matrix of shape {D.shape} does not act on C^{n}")
        if not np.allclose(D, D.conj().T, rtol=0, atol=DIRAC_ATOL):
            raise ValueError("Dirac operator is not Hermitian")
        self.dirac = D
        if self.grading is not None:
            G = np.asarray(self.grading, dtype=complex)
            if G.shape != (n, n):
                raise ValueError("grading has the wrong shape")
            self.grading = G
            if self.validate:
                self._check_grading()
        if self.validate:
            self.rep.check()

    def _check_grading(self):
        G, D = self.grading, self.dirac
        n = G.shape[0]
        if not np.allclose(G, G.conj().T, atol=GRADING_ATOL):
            raise ValueError("grading is not Hermitian")
        if not np.allclose(G @ G, np.eye(n), atol=GRADING_ATOL):
            raise ValueError("grading does not square to the identity")
        if not np.allclose(G @ D, -D @ G, atol=GRADING_ATOL * max(1.0, np.abs(D).max())):
            raise ValueError("grading does not anticommute with the Dirac operator")
        for m in self.rep.images:
            if abs(G @ m - m @ G).max() > GRADING_ATOL:
                raise ValueError("grading does not commute with the representation")

    @property
    def hilbert_dim(self) -> int:
        return self.rep.hilbert_dim

    @cached_property
    def commutator_blocks(self) -> CommutatorBlocks:
        Ds = sp.csr_matrix(self.dirac)
        coms = [(1j * (Ds @ m - m @ Ds)).tocsr() for m in self.rep.images]
        n = self.hilbert_dim
        pattern = sp.csr_matrix((n, n), dtype=bool)
        for c in coms:
            c.eliminate_zeros()
            pattern = pattern + (abs(c) > 0)
        ncomp, labels = connected_components(pattern, directed=False)
        groups = [np.flatnonzero(labels == k) for k in range(ncomp)]
        # singletons carry a zero 1x1 block and do not affect the norm
        groups = [g for g in groups if g.size > 1 or any(abs(c[g[0], g[0]]) > 0 for c in coms)]
        kept, stacks, signs = [], [], []
        for g in groups:
            stack = np.stack([c[g][:, g].toarray() for c in coms])
            if any(s.shape == stack.shape and np.allclose(s, stack, rtol=0, atol=1e-14)
                   for s in stacks):
                continue
            kept.append(g)
            stacks.append(stack)
            signs.append(_is_bipartite(np.any(stack != 0, axis=0)))
        if not stacks:
            stacks = [np.zeros((len(coms), 1, 1), dtype=complex)]
            kept = [np.array([0])]
            signs = [False]
        sizes = np.array([s.shape[1] for s in stacks], dtype=np.int64)
        offsets = np.concatenate([[0], np.cumsum(sizes ** 2)[:-1]]).astype(np.int64)
        tens = np.concatenate([s.reshape(len(coms), -1) for s in stacks], axis=1)
        return CommutatorBlocks(np.ascontiguousarray(tens), sizes, offsets, tuple(kept),
                                tuple(signs))

    def kernel(self, tol: float = KERNEL_TOL) -> KernelBasis:
        with self._lock:
            cache = self.__dict__.setdefault("_kernel_cache", {})
            if tol not in cache:
                cache[tol] = _kernel_of(self.commutator_blocks.tens, tol)
            return cache[tol]

    def commutator(self, a: AlgebraElement) -> np.ndarray:
        pa = self.rep(a)
        return self.dirac @ pa - pa @ self.dirac


def _is_bipartite(adj: np.ndarray) -> bool:
    """Two-colour the pattern graph; a self-loop (diagonal entry) rules it out."""
    n = adj.shape[0]
    if np.any(np.diag(adj)):
        return False
    colour = -np.ones(n, dtype=int)
    for start in range(n):
        if colour[start] >= 0:
            continue
        colour[start] = 0
        stack = [start]
        while stack:
            u = stack.pop()
            for w in np.flatnonzero(adj[u]):
                if colour[w] < 0:
                    colour[w] = 1 - colour[u]
                    stack.append(w)
                elif colour[w] == colour[u]:
                    return False
    return True


def _kernel_of(tens: np.ndarray, tol: float) -> KernelBasis:
    d = tens.shape[0]
    M = np.vstack([tens.real.T, tens.imag.T])
    _, s, vt = np.linalg.svd(M, full_matrices=True)
    smax = s[0] if s.size else 0.0
    sv = np.zeros(d)
    sv[: s.size] = s
    if smax == 0:
        rank_null = d
    else:
        rank_null = int(np.sum(sv <= tol * smax))
    V = vt.T
    order = np.argsort(sv, kind="stable")
    null = V[:, order[:rank_null]]
    comp = V[:, order[rank_null:]]
    return KernelBasis(null, comp, rank_null, tol, sv)


# -- seminorm --------------------------------------------------------------

def seminorm(t: SpectralTriple, a: AlgebraElement) -> float:
    """Operator norm of ``[D, pi(a)]``."""
    return float(np.linalg.norm(t.commutator(a), 2))


def seminorm_kernel(t: SpectralTriple, tol: float = KERNEL_TOL) -> KernelBasis:
    """Null space of ``a -> [D, pi(a)]`` on Hermitian coordinates (relative SVD threshold)."""
    return t.kernel(tol)


# -- constructors ----------------------------------------------------------

def two_point_triple(m: complex) -> SpectralTriple:
    """``C^2`` on ``C^2`` with ``D = [[0, m], [conj(m), 0]]`` and grading ``diag(1, -1)``."""
    D = np.array([[0, m], [np.conj(m), 0]], dtype=complex)
    return SpectralTriple(Algebra((1, 1)), Representation.diagonal(2), D,
                          grading=np.diag([1.0, -1.0]).astype(complex))


def graph_triple(N: int, weights) -> SpectralTriple:
    """``C^N`` acting diagonally, with the symmetric real weight matrix as Dirac operator."""
    W = np.asarray(weights)
    if W.shape != (N, N):
        raise ValueError(f"weights must be {N}x{N}")
    if np.iscomplexobj(W):
        if np.abs(W.imag).max() > 0:
            raise ValueError("graph weights must be real")
        W = W.real
    W = W.astype(float)
    if not np.allclose(W, W.T, rtol=0, atol=1e-14):
        raise ValueError("graph weights must be symmetric")
    if np.abs(np.diag(W)).max() > 0:
        raise ValueError("graph weights must have zero diagonal")
    return SpectralTriple(Algebra((1,) * N), Representation.diagonal(N), W.astype(complex))


def m2_diagonal_triple(d1: float, d2: float) -> SpectralTriple:
    """``M_2`` in its defining representation with ``D = diag(d1, d2)``."""
    return SpectralTriple(Algebra((2,)), Representation.defining(Algebra((2,))),
                          np.diag([d1, d2]).astype(complex))


def sphere_point_triple(v) -> SpectralTriple:
    """``M_n + C`` on ``C^n + C`` with ``D = [[0, v], [v*, 0]]``."""
    v = np.asarray(v, dtype=complex).ravel()
    n = v.size
    if not np.any(v):
        raise ValueError("coupling vector v must be nonzero")
    D = np.zeros((n + 1, n + 1), dtype=complex)
    D[:n, n] = v
    D[n, :n] = v.conj()
    alg = Algebra((n, 1))
    return SpectralTriple(alg, Representation.defining(alg), D)


def ladder_matrix(N: int, theta: float) -> np.ndarray:
    """Lowering matrix with ``X[m+1, m] = sqrt(m+1)/sqrt(theta)``."""
    X = np.zeros((N, N))
    for m in range(N - 1):
        X[m + 1, m] = math.sqrt(m + 1) / math.sqrt(theta)
    return X


def truncated_moyal_triple(N: int, theta: float) -> SpectralTriple:
    """``M_N`` acting by left multiplication on ``M_N (x) C^2`` with the truncated plane Dirac.

    The Hilbert space index is ``(p, q, s)`` with ``p`` slowest, so ``pi(a) = a (x) I_{2N}``.
    ``D = -i sqrt(2) (ad_{X*} (x) e_01 - ad_X (x) e_10)`` with ``ad_Y = Y (x) I - I (x) Y^T``
    acting on the ``(p, q)`` pair, and grading ``I_{N^2} (x) diag(1, -1)``.
    """
    if N < 2:
        raise ValueError("truncation size N must be at least 2")
    if not theta > 0:
        raise ValueError("theta must be positive")
    X = ladder_matrix(N, theta)
    I = np.eye(N)

    def ad(Y):
        return np.kron(Y, I) - np.kron(I, Y.T)

    e01 = np.array([[0, 1], [0, 0]])
    e10 = e01.T
    D = -1j * math.sqrt(2) * (np.kron(ad(X.conj().T), e01) - np.kron(ad(X), e10))
    G = np.kron(np.eye(N * N), np.diag([1.0, -1.0]))
    alg = Algebra((N,))
    return SpectralTriple(alg, Representation.left_mult_tensor(alg, 2 * N), D,
                          grading=G.astype(complex))


def _kron_algebra(a1: Algebra, a2: Algebra) -> tuple[Algebra, list[tuple[int, int]]]:
    pairs = [(i, j) for i in range(len(a1.blocks)) for j in range(len(a2.blocks))]
    return Algebra(tuple(a1.blocks[i] * a2.blocks[j] for i, j in pairs)), pairs


def product_triples(t1: SpectralTriple, t2: SpectralTriple) -> SpectralTriple:
    """Product with ``D = D1 (x) I + G1 (x) D2`` and algebra ``A1 (x) A2``.

    The block ``(i, j)`` of the product algebra is ``M_{n_i} (x) M_{m_j}``; its
    flat layout is that of the Kronecker product of the factor blocks.  The
    product grading is ``G1 (x) G2`` when ``t2`` is graded.
    """
    if t1.grading is None:
        raise ValueError("the first factor needs a grading")
    alg, pairs = _kron_algebra(t1.algebra, t2.algebra)
    n1, n2 = t1.hilbert_dim, t2.hilbert_dim
    # images of product matrix units, then change to the Hermitian basis
    B = alg.basis_matrix
    unit_imgs = []
    for (i, j), nb in zip(pairs, alg.blocks):
        na, nc = t1.algebra.blocks[i], t2.algebra.blocks[j]
        for p in range(nb):
            for q in range(nb):
                p1, p2 = divmod(p, nc)
                q1, q2 = divmod(q, nc)
                u1 = _unit_image(t1, i, p1, q1)
                u2 = _unit_image(t2, j, p2, q2)
                unit_imgs.append(sp.kron(u1, u2, format="csr"))
    imgs = []
    for k in range(alg.herm_dim):
        col = B[:, k]
        m = sp.csr_matrix((n1 * n2, n1 * n2), dtype=complex)
        for idx in np.flatnonzero(col):
            m = m + col[idx] * unit_imgs[idx]
        imgs.append(m)
    rep = Representation(alg, n1 * n2, tuple(imgs), kind="custom")
    D = np.kron(t1.dirac, np.eye(n2)) + np.kron(t1.grading, t2.dirac)
    G = np.kron(t1.grading, t2.grading) if t2.grading is not None else None
    return SpectralTriple(alg, rep, D, grading=G)


def _unit_image(t: SpectralTriple, block: int, p: int, q: int) -> sp.csr_matrix:
    alg = t.algebra
    flat = np.zeros(alg.herm_dim, dtype=complex)
    n = alg.blocks[block]
    flat[alg.offsets[block] + p * n + q] = 1.0
    coords = alg.coords_of_flat(flat)
    m = sp.csr_matrix((t.hilbert_dim, t.hilbert_dim), dtype=complex)
    for c, img in zip(coords, t.rep.images):
        if abs(c) > 0:
            m = m + c * img
    return m


def product_state(s1: State, s2: State, product_algebra: Algebra | None = None) -> State:
    """Separable state ``s1 (x) s2`` on the product algebra."""
    alg, pairs = _kron_algebra(s1.algebra, s2.algebra)
    if product_algebra is not None and product_algebra != alg:
        raise ValueError("product algebra does not match the factors")
    if s1.is_pure and s2.is_pure:
        k = pairs.index((s1.block, s2.block))
        return State.pure(alg, k, np.kron(s1.vector, s2.vector))
    w = [s1.weights[i] * s2.weights[j] for i, j in pairs]
    dens = [np.kron(s1.densities[i], s2.densities[j]) for i, j in pairs]
    return State.mixed(alg, w, dens)


def project_triple(t: SpectralTriple, e) -> SpectralTriple:
    """Compression ``(A, eH, eDe)`` by a projection ``e`` commuting with ``D``.

    The algebra is unchanged; its images are compressed to ``range(e)``.  States
    of the original algebra are states of the compressed triple as they are.
    """
    e = np.asarray(e, dtype=complex)
    n = t.hilbert_dim
    if e.shape != (n, n):
        raise ValueError("projection has the wrong shape")
    if not (np.allclose(e, e.conj().T, atol=1e-10) and np.allclose(e @ e, e, atol=1e-10)):
        raise ValueError("e is not a projection (need e = e* = e^2)")
    if not np.allclose(e @ t.dirac, t.dirac @ e, atol=1e-10 * max(1.0, np.abs(t.dirac).max())):
        raise ValueError("projection does not commute with the Dirac operator")
    vals, vecs = np.linalg.eigh(e)
    V = vecs[:, vals > 0.5]
    if V.shape[1] == 0:
        raise ValueError("projection is zero")
    imgs = tuple(sp.csr_matrix(V.conj().T @ (m @ V)) for m in t.rep.images)
    rep = Representation(t.algebra, V.shape[1], imgs, kind="custom")
    De = V.conj().T @ t.dirac @ V
    De = 0.5 * (De + De.conj().T)
    return SpectralTriple(t.algebra, rep, De, validate=False)


# -- JSON ------------------------------------------------------------------

def _matrix_from_json(obj, n: int, name: str) -> np.ndarray:
    if not isinstance(obj, dict) or "re" not in obj:
        raise ValueError(f"'{name}' must be an object with 're' (and optional 'im') arrays")
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != (n, n) or im.shape != (n, n):
        raise ValueError(f"'{name}' must be {n}x{n}")
    return re + 1j * im


def triple_from_json(obj: dict) -> SpectralTriple:
    try:
        blocks = obj["algebra"]["blocks"]
    except (KeyError, TypeError):
        raise ValueError("missing field 'algebra.blocks'") from None
    if obj.get("algebra", {}).get("field", "complex") != "complex":
        raise ValueError("only complex algebras are supported ('algebra.field')")
    alg = Algebra(tuple(blocks))
    rep_obj = obj.get("representation")
    if not isinstance(rep_obj, dict) or "kind" not in rep_obj:
        raise ValueError("missing field 'representation.kind'")
    kind = rep_obj["kind"]
    if kind == "diagonal":
        if any(b != 1 for b in alg.blocks):
            raise ValueError("'representation.kind' diagonal needs all blocks of size 1")
        rep = Representation.diagonal(len(alg.blocks))
    elif kind == "defining":
        rep = Representation.defining(alg)
    elif kind == "left_mult_tensor":
        rep = Representation.left_mult_tensor(alg, int(rep_obj.get("tensor_copies", 1)))
    elif kind == "custom":
        if "images" not in rep_obj:
            raise ValueError("missing field 'representation.images'")
        raw = rep_obj["images"]
        n = int(rep_obj.get("hilbert_dim", len(raw[0]) if raw else 0))
        imgs = [_pairs_to_complex(m).reshape(n, n) for m in raw]
        rep = Representation(alg, n, tuple(imgs), kind="custom")
    else:
        raise ValueError(f"'representation.kind' must be one of {REP_KINDS}, got {kind!r}")
    if "dirac" not in obj:
        raise ValueError("missing field 'dirac'")
    D = _matrix_from_json(obj["dirac"], rep.hilbert_dim, "dirac")
    G = None
    if obj.get("grading") is not None:
        G = _matrix_from_json(obj["grading"], rep.hilbert_dim, "grading")
    return SpectralTriple(alg, rep, D, grading=G)


def triple_to_json(t: SpectralTriple) -> dict:
    rep = t.rep
    if rep.kind == "custom":
        rep_obj = {"kind": "custom", "hilbert_dim": rep.hilbert_dim,
                   "images": [_complex_to_pairs(m.toarray()) for m in rep.images]}
    else:
        rep_obj = {"kind": rep.kind, "tensor_copies": rep.tensor_copies}
    out = {"algebra": {"blocks": list(t.algebra.blocks)}, "representation": rep_obj,
           "dirac": {"re": t.dirac.real.tolist(), "im": t.dirac.imag.tolist()}}
    if t.grading is not None:
        out["grading"] = {"re": t.grading.real.tolist(), "im": t.grading.imag.tolist()}
    return out


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.eye(1)
    for m in mats:
        out = np.kron(out, m)
    return out
