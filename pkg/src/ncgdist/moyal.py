"""Moyal-plane closed forms: oscillator eigenstates, translations, quantum length."""
from __future__ import annotations

import math
from dataclasses import dataclass


def moyal_eigenstate_distance(theta: float, m: int, n: int) -> float:
    """``sqrt(theta/2) * sum_{k=m+1}^{n} 1/sqrt(k)``; symmetric in ``(m, n)``."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    if m < 0 or n < 0:
        raise ValueError("levels must be nonnegative")
    lo, hi = min(m, n), max(m, n)
    s = math.fsum(1.0 / math.sqrt(k) for k in range(lo + 1, hi + 1))
    return math.sqrt(theta / 2.0) * s


def translation_distance(kappa: complex) -> float:
    """Distance between a state and its translate by ``kappa``: ``|kappa|``."""
    return abs(complex(kappa))


@dataclass(frozen=True)
class QuantumLengthParams:
    """Length scale ``lambda_p`` (``theta = lambda_p^2``), levels ``m, n`` and translations."""

    lambda_p: float
    m: int
    n: int
    kappa: complex = 0j
    kappa_t: complex = 0j

    def __post_init__(self):
        if not self.lambda_p > 0:
            raise ValueError("lambda_p must be positive")
        if self.m < 0 or self.n < 0:
            raise ValueError("levels must be nonnegative")

    @property
    def theta(self) -> float:
        return self.lambda_p ** 2


def oscillator_energy(lambda_p: float, m: int) -> float:
    """``E_m = lambda_p^2 (m + 1/2)``."""
    return lambda_p ** 2 * (m + 0.5)


def quantum_sq_length(q: QuantumLengthParams) -> float:
    """``2 E_m + 2 E_n + |kappa - kappa_t|^2``."""
    return (2 * oscillator_energy(q.lambda_p, q.m) + 2 * oscillator_energy(q.lambda_p, q.n)
            + abs(complex(q.kappa) - complex(q.kappa_t)) ** 2)


def intrinsic_sq_length(q: QuantumLengthParams) -> float:
    """``sqrt(dL2(phi, phi) dL2(phi~, phi~)) = 4 sqrt(E_m E_n)``."""
    return 4.0 * math.sqrt(oscillator_energy(q.lambda_p, q.m) * oscillator_energy(q.lambda_p, q.n))


def modified_quantum_length(q: QuantumLengthParams) -> float:
    """``sqrt(|dL2 - Lambda^-2|)``."""
    return math.sqrt(abs(quantum_sq_length(q) - intrinsic_sq_length(q)))


def eigen_modified_length(lambda_p: float, m: int, n: int) -> float:
    """Closed form on eigenstates: ``lambda_p (sqrt(2n+1) - sqrt(2m+1))``."""
    return lambda_p * abs(math.sqrt(2 * n + 1) - math.sqrt(2 * m + 1))


def eigen_relative_gap(lambda_p: float, m: int, n: int) -> float:
    """Relative gap between the eigenstate spectral distance and the modified length."""
    d = moyal_eigenstate_distance(lambda_p ** 2, m, n)
    q = eigen_modified_length(lambda_p, m, n)
    return abs(d - q) / q


def riemann_bounds(m: int, n: int) -> tuple[float, float]:
    """``(lower, upper)``: integrals of ``1/sqrt(2k)`` over ``[m+1, n+1]`` and ``[m, n]``.

    The integrand decreases, so ``sum_{k=m+1}^{n} 1/sqrt(2k)`` lies in between.
    """
    def F(x):
        return math.sqrt(2 * x)
    return F(n + 1) - F(m + 1), F(n) - F(m)


def doubled_plane_distance(translation: float, Lambda: float) -> float:
    """``sqrt(translation^2 + (1/|Lambda|)^2)`` for the two-sheeted plane."""
    if Lambda == 0:
        raise ValueError("Lambda must be nonzero")
    return math.hypot(translation, 1.0 / abs(Lambda))
