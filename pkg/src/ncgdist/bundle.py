"""Distances on a circle bundle with a flat connection: fibers and the n = 2 torus.

Directions ``j = 1..n`` of the fiber carry holonomy ratios ``omega_j`` (gauge
``omega_1 = 0``) and phases ``phi_j`` (gauge ``phi_1 = 0``).  Two directions
are *far* when their holonomies agree mod 1, i.e. ``omega_i - omega_j`` is an
integer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import kernels

INF = math.inf
TWO_PI = 2.0 * math.pi


def _is_integer(x: float, tol: float = 1e-12) -> bool:
    return abs(x - round(x)) <= tol


@dataclass(frozen=True)
class CircleBundleParams:
    """Fiber data: weights ``R_j`` (sum 2), holonomy ratios, phases, winding, base point."""

    R: tuple
    omega: tuple
    phi: tuple
    k: int = 0
    tau0: float = 0.0

    def __post_init__(self):
        R = tuple(float(r) for r in self.R)
        om = tuple(float(w) for w in self.omega)
        ph = tuple(float(p) for p in self.phi)
        n = len(R)
        if n < 1 or len(om) != n or len(ph) != n:
            raise ValueError("R, omega and phi must have the same positive length")
        if min(R) < 0 or abs(sum(R) - 2.0) > 1e-10:
            raise ValueError(f"weights R_j must be nonnegative and sum to 2, got {R}")
        if om[0] != 0.0 or ph[0] != 0.0:
            raise ValueError("gauge requires omega_1 = phi_1 = 0")
        if not 0.0 <= self.tau0 < TWO_PI:
            raise ValueError("tau0 must lie in [0, 2 pi)")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "omega", om)
        object.__setattr__(self, "phi", ph)

    @property
    def n(self) -> int:
        return len(self.R)

    @property
    def z_xi(self) -> float:
        if self.n != 2:
            raise ValueError("z_xi is defined for n = 2")
        return 0.5 * (self.R[0] - self.R[1])

    @property
    def R_n2(self) -> float:
        if self.n != 2:
            raise ValueError("R is defined for n = 2")
        return math.sqrt(self.R[0] * self.R[1])


def far_classes(theta_values, tol: float = 1e-10) -> tuple[list[list[int]], int]:
    """Partition directions by equality of ``Theta_j`` mod ``2 pi``; returns ``(classes, n_c)``."""
    th = np.mod(np.asarray(theta_values, dtype=float), TWO_PI)
    classes: list[list[int]] = []
    reps: list[float] = []
    for j, t in enumerate(th):
        for c, r in zip(classes, reps):
            d = abs(t - r)
            if min(d, TWO_PI - d) <= tol:
                c.append(j)
                break
        else:
            classes.append([j])
            reps.append(t)
    return classes, len(classes)


def fiber_connected(omega, phi, tol: float = 1e-10) -> bool:
    """A fiber state is at finite distance iff phases agree (mod 2 pi) inside each far class."""
    classes, _ = far_classes(TWO_PI * np.asarray(omega, dtype=float), tol)
    ph = np.asarray(phi, dtype=float)
    for c in classes:
        for j in c[1:]:
            d = abs(np.mod(ph[j] - ph[c[0]], TWO_PI))
            if min(d, TWO_PI - d) > tol:
                return False
    return True


def fiber_distance_n2(R: float, omega: float, Xi: float) -> float:
    """``(2 pi R / |sin(omega pi)|) |sin(Xi / 2)|``."""
    if _is_integer(omega):
        raise ValueError("omega must not be an integer (sin(omega pi) = 0)")
    return TWO_PI * R * abs(math.sin(Xi / 2.0)) / abs(math.sin(omega * math.pi))


def horizontal_fiber_distance(k: int) -> float:
    """Horizontal length to the ``k``-th accessible fiber point: ``2 k pi``."""
    return TWO_PI * abs(k)


def winding_matrix(p: CircleBundleParams) -> np.ndarray:
    """Matrix with zero diagonal and off-diagonal entries
    ``sqrt(R_i R_j) sin(k pi (w_j - w_i) + (phi_j - phi_i)/2) / sin(pi (w_j - w_i))``."""
    n = p.n
    S = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            dw = p.omega[j] - p.omega[i]
            if _is_integer(dw):
                raise ValueError(f"directions {i + 1} and {j + 1} have integer holonomy difference")
            S[i, j] = (math.sqrt(p.R[i] * p.R[j])
                       * math.sin(p.k * math.pi * dw + 0.5 * (p.phi[j] - p.phi[i]))
                       / math.sin(math.pi * dw))
    return S


def fiber_distance_general(p: CircleBundleParams) -> float:
    """``pi * (sum of singular values of S_k)`` for a fiber (``tau0 = 0``); ``inf`` if disconnected."""
    if p.tau0 != 0.0:
        raise ValueError("fiber distance needs tau0 = 0")
    if not fiber_connected(p.omega, p.phi):
        return INF
    S = winding_matrix(p)
    return math.pi * float(np.linalg.svd(S, compute_uv=False).sum())


def winding_weight(k: int, omega: float, phi: float) -> float:
    """``|sin(k omega pi + phi/2)| / |sin(omega pi)|``."""
    return abs(math.sin(k * omega * math.pi + 0.5 * phi)) / abs(math.sin(omega * math.pi))


def torus_objective(T, Delta, z, a, b, tau0):
    return kernels.torus_objective_np(np.asarray(T, float), np.asarray(Delta, float), z, a, b, tau0)


def torus_distance_n2(R: float, z_xi: float, omega: float, k: int, tau0: float, phi: float,
                      ngrid: int = 256) -> float:
    """Distance on the n = 2 torus between the base point and its image after ``k`` windings.

    Far directions (integer ``omega``): ``min(tau0, 2 pi - tau0)`` when ``phi = 0``,
    else ``inf``.  Otherwise the maximum of
    ``H(T, D) = T + z D + a sqrt((tau0-T)^2 - D^2) + b sqrt((2 pi - tau0 - T)^2 - D^2)``
    with ``a = R W_{k+1}``, ``b = R W_k`` over the triangle ``T >= 0``,
    ``T + |D| <= min(tau0, 2 pi - tau0)``, ``sign(D) = sign(z)``.
    """
    if R < 0 or abs(R * R + z_xi * z_xi - 1.0) > 1e-10:
        raise ValueError("need R >= 0 and R^2 + z_xi^2 = 1")
    if not 0.0 <= tau0 < TWO_PI:
        raise ValueError("tau0 must lie in [0, 2 pi)")
    m = min(tau0, TWO_PI - tau0)
    if _is_integer(omega):
        ph = abs(math.remainder(phi, TWO_PI))
        return m if ph <= 1e-12 else INF
    a = R * winding_weight(k + 1, omega, phi)
    b = R * winding_weight(k, omega, phi)
    sgn = 1.0 if z_xi >= 0 else -1.0
    if m == 0.0:
        return float(torus_objective(0.0, 0.0, z_xi, a, b, tau0))
    u0, v0, best = kernels.torus_grid(m, sgn, z_xi, a, b, tau0, ngrid)

    def neg(x):
        u, v = np.clip(x, 0.0, 1.0)
        return -float(torus_objective(m * u, sgn * m * (1 - u) * v, z_xi, a, b, tau0))

    res = minimize(neg, np.array([u0, v0]), method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
    return max(best, -float(res.fun))


def torus_value_at_origin(R: float, omega: float, k: int, tau0: float, phi: float) -> float:
    """``H(0, 0) = R W_{k+1} tau0 + R W_k (2 pi - tau0)``."""
    return (R * winding_weight(k + 1, omega, phi) * tau0
            + R * winding_weight(k, omega, phi) * (TWO_PI - tau0))
