"""Hot loops with a numba implementation and a pure-numpy twin.

The commutator of an element with coordinates ``y`` is stored as a stack of
Hermitian blocks: ``tens`` has shape ``(r, total)`` with block ``b`` occupying
columns ``offsets[b] : offsets[b] + sizes[b]**2`` (row-major ``n x n``).  The
seminorm is the largest absolute eigenvalue over all blocks.

Public entry points dispatch on :data:`ncgdist._accel.USE_NUMBA`; the ``_nb``
and ``_np`` variants are exported for testing and benchmarking.
"""
import numpy as np

from . import _accel
from ._accel import njit


# -- seminorm of a batch of coordinate vectors ----------------------------

def lipschitz_batch_np(Y, tens, sizes, offsets):
    M = np.asarray(Y, dtype=float) @ tens
    out = np.zeros(M.shape[0])
    for n, off in zip(sizes, offsets):
        blk = M[:, off: off + n * n].reshape(-1, n, n)
        ev = np.linalg.eigvalsh(blk)
        out = np.maximum(out, np.abs(ev).max(axis=1))
    return out


@njit(cache=True)
def _lipschitz_one_nb(y, tens, sizes, offsets):
    best = 0.0
    r = y.shape[0]
    for b in range(sizes.shape[0]):
        n = sizes[b]
        off = offsets[b]
        m = np.zeros((n, n), dtype=np.complex128)
        for j in range(r):
            c = y[j]
            if c == 0.0:
                continue
            for p in range(n):
                for q in range(n):
                    m[p, q] += c * tens[j, off + p * n + q]
        ev = np.linalg.eigvalsh(m)
        for v in ev:
            if abs(v) > best:
                best = abs(v)
    return best


@njit(cache=True)
def lipschitz_batch_nb(Y, tens, sizes, offsets):
    k = Y.shape[0]
    out = np.empty(k)
    for i in range(k):
        out[i] = _lipschitz_one_nb(Y[i], tens, sizes, offsets)
    return out


def lipschitz_batch(Y, tens, sizes, offsets):
    """Seminorm of each row of ``Y`` (coordinates in the reduced basis)."""
    Y = np.ascontiguousarray(np.atleast_2d(Y), dtype=float)
    if _accel.USE_NUMBA:
        return lipschitz_batch_nb(Y, tens, sizes, offsets)
    return lipschitz_batch_np(Y, tens, sizes, offsets)


def batch_ratio(Y, g, tens, sizes, offsets):
    """``g.y / L(y)`` for each row; rows with vanishing seminorm give 0."""
    Y = np.ascontiguousarray(np.atleast_2d(Y), dtype=float)
    L = lipschitz_batch(Y, tens, sizes, offsets)
    num = Y @ g
    out = np.zeros_like(num)
    ok = L > 0
    out[ok] = num[ok] / L[ok]
    return out


# -- best-improvement coordinate search -----------------------------------
# Each sweep evaluates y +- step*e_j for all j and moves to the best candidate;
# the step halves when no candidate improves the ratio.

def hill_climb_np(y0, g, tens, sizes, offsets, step0, min_step, max_sweeps):
    y = np.array(y0, dtype=float)
    y /= np.linalg.norm(y)
    cur = batch_ratio(y[None, :], g, tens, sizes, offsets)[0]
    r = y.size
    step = step0
    sweeps = 0
    eye = np.eye(r)
    while step > min_step and sweeps < max_sweeps:
        sweeps += 1
        cand = np.vstack([y + step * eye, y - step * eye])
        cand /= np.linalg.norm(cand, axis=1)[:, None]
        vals = batch_ratio(cand, g, tens, sizes, offsets)
        j = int(np.argmax(vals))
        if vals[j] > cur:
            y, cur = cand[j], vals[j]
        else:
            step *= 0.5
    return y, cur, sweeps


@njit(cache=True)
def _ratio_one_nb(y, g, tens, sizes, offsets):
    L = _lipschitz_one_nb(y, tens, sizes, offsets)
    if L <= 0.0:
        return 0.0
    return np.dot(y, g) / L


@njit(cache=True)
def hill_climb_nb(y0, g, tens, sizes, offsets, step0, min_step, max_sweeps):
    y = y0 / np.sqrt(np.dot(y0, y0))
    cur = _ratio_one_nb(y, g, tens, sizes, offsets)
    r = y.shape[0]
    step = step0
    sweeps = 0
    cand = np.empty(r)
    best = np.empty(r)
    while step > min_step and sweeps < max_sweeps:
        sweeps += 1
        best_val = -np.inf
        for s in range(2 * r):
            j = s % r
            sign = 1.0 if s < r else -1.0
            for i in range(r):
                cand[i] = y[i]
            cand[j] += sign * step
            cand /= np.sqrt(np.dot(cand, cand))
            v = _ratio_one_nb(cand, g, tens, sizes, offsets)
            if v > best_val:
                best_val = v
                for i in range(r):
                    best[i] = cand[i]
        if best_val > cur:
            cur = best_val
            for i in range(r):
                y[i] = best[i]
        else:
            step *= 0.5
    return y, cur, sweeps


def hill_climb(y0, g, tens, sizes, offsets, step0=0.25, min_step=1e-7, max_sweeps=5000):
    """Locally maximize ``g.y / L(y)`` starting from ``y0``; returns ``(y, ratio, sweeps)``."""
    y0 = np.ascontiguousarray(y0, dtype=float)
    g = np.ascontiguousarray(g, dtype=float)
    if _accel.USE_NUMBA:
        y, cur, sweeps = hill_climb_nb(y0.copy(), g, tens, sizes, offsets,
                                       float(step0), float(min_step), int(max_sweeps))
        return y, float(cur), int(sweeps)
    return hill_climb_np(y0, g, tens, sizes, offsets, step0, min_step, max_sweeps)


# -- torus objective on a triangle grid -----------------------------------

def _safe_sqrt_np(x):
    # arguments in [-1e-12, 0) are boundary round-off
    return np.sqrt(np.where((x < 0) & (x >= -1e-12), 0.0, x))


def torus_objective_np(T, Dl, z, a, b, tau0):
    return (T + z * Dl + a * _safe_sqrt_np((tau0 - T) ** 2 - Dl ** 2)
            + b * _safe_sqrt_np((2 * np.pi - tau0 - T) ** 2 - Dl ** 2))


def torus_grid_np(m, sgn, z, a, b, tau0, ngrid):
    u = np.linspace(0.0, 1.0, ngrid)
    U, V = np.meshgrid(u, u, indexing="ij")
    T = m * U
    Dl = sgn * m * (1.0 - U) * V
    H = torus_objective_np(T, Dl, z, a, b, tau0)
    i, j = np.unravel_index(np.argmax(H), H.shape)
    return float(u[i]), float(u[j]), float(H[i, j])


@njit(cache=True)
def _safe_sqrt_nb(x):
    if x < 0.0:
        return 0.0 if x >= -1e-12 else np.nan
    return np.sqrt(x)


@njit(cache=True)
def torus_grid_nb(m, sgn, z, a, b, tau0, ngrid):
    best = -np.inf
    bu = 0.0
    bv = 0.0
    for i in range(ngrid):
        u = i / (ngrid - 1)
        T = m * u
        for j in range(ngrid):
            v = j / (ngrid - 1)
            Dl = sgn * m * (1.0 - u) * v
            h = (T + z * Dl + a * _safe_sqrt_nb((tau0 - T) ** 2 - Dl ** 2)
                 + b * _safe_sqrt_nb((2 * np.pi - tau0 - T) ** 2 - Dl ** 2))
            if h > best:
                best = h
                bu = u
                bv = v
    return bu, bv, best


def torus_grid(m, sgn, z, a, b, tau0, ngrid=256):
    """Grid maximum of the torus objective over ``T = m u``, ``Delta = sgn m (1-u) v``."""
    if _accel.USE_NUMBA:
        u, v, h = torus_grid_nb(float(m), float(sgn), float(z), float(a), float(b),
                                float(tau0), int(ngrid))
        return float(u), float(v), float(h)
    return torus_grid_np(m, sgn, z, a, b, tau0, ngrid)
