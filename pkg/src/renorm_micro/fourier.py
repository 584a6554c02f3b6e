"""Fourier-side tools for real phases on the unit circle.

A real phase ``phi(e^{it}) = c_0 + sum_{n != 0} c_n e^{int}`` is stored by its
mean and the coefficients ``c_1..c_nmax``; ``c_{-n} = conj(c_n)`` is implied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import VortexConfig
from .errors import MismatchedTruncation

__all__ = [
    "FourierPhase",
    "dephasing_coefficients",
    "h_half_seminorm_sq",
    "interior_extension_energy",
    "exterior_extension_energy",
    "optimal_split",
    "k_functional",
]


@dataclass(frozen=True, eq=False)
class FourierPhase:
    coeffs: np.ndarray  # coeffs[k] is c_{k+1}
    mean: float = 0.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.size == 0:
            raise ValueError("need at least one positive-frequency coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "mean", float(self.mean))

    @property
    def n_max(self) -> int:
        return int(self.coeffs.size)

    @property
    def modes(self) -> np.ndarray:
        return np.arange(1, self.n_max + 1)

    def __add__(self, other: "FourierPhase") -> "FourierPhase":
        _same_length(self, other)
        return FourierPhase(self.coeffs + other.coeffs, self.mean + other.mean)

    def __sub__(self, other: "FourierPhase") -> "FourierPhase":
        _same_length(self, other)
        return FourierPhase(self.coeffs - other.coeffs, self.mean - other.mean)

    def scaled(self, factor: float) -> "FourierPhase":
        return FourierPhase(factor * self.coeffs, factor * self.mean)

    def evaluate(self, theta) -> np.ndarray:
        """Point values of the real phase at angles ``theta``."""
        t = np.asarray(theta, dtype=float)
        e = np.exp(1j * np.multiply.outer(t, self.modes))
        return self.mean + 2.0 * np.real(e @ self.coeffs)

    def allclose(self, other: "FourierPhase", atol: float = 0.0, rtol: float = 1e-12) -> bool:
        return (self.n_max == other.n_max
                and np.allclose(self.coeffs, other.coeffs, atol=atol, rtol=rtol)
                and math.isclose(self.mean, other.mean, abs_tol=atol, rel_tol=rtol))


def _same_length(a: FourierPhase, b: FourierPhase) -> None:
    if a.n_max != b.n_max:
        raise MismatchedTruncation(f"n_max {a.n_max} != {b.n_max}")


def dephasing_coefficients(cfg: VortexConfig, n_max: int) -> FourierPhase:
    """Coefficients ``gamma_n = sum_j d_j conj(z_j)^n / (i n)`` for n = 1..n_max.

    The constant term of the dephasing is a gauge choice and is set to zero.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    n = np.arange(1, n_max + 1)
    zc = np.conj(cfg.z)
    powers = zc[:, None] ** n[None, :]
    gamma = (cfg.d.astype(float) @ powers) / (1j * n)
    return FourierPhase(gamma, 0.0)


def h_half_seminorm_sq(phase: FourierPhase) -> float:
    """Squared H^1/2 seminorm ``pi sum_{n in Z} |n||c_n|^2 = 2 pi sum_{n>=1} n|c_n|^2``."""
    c = phase.coeffs
    return float(2.0 * math.pi * np.sum(phase.modes * (c.real ** 2 + c.imag ** 2)))


def interior_extension_energy(phase: FourierPhase) -> float:
    """Half Dirichlet energy of the harmonic extension ``sum c_n r^|n| e^{int}`` into the disk."""
    return h_half_seminorm_sq(phase)


def exterior_extension_energy(phase: FourierPhase) -> float:
    """Half Dirichlet energy of the decaying extension ``sum c_n r^-|n| e^{int}`` outside the disk."""
    return h_half_seminorm_sq(phase)


def optimal_split(gamma: FourierPhase, b: float) -> tuple[FourierPhase, FourierPhase]:
    """Mode-wise minimiser of ``|c0|^2 + b^2 |cinf|^2`` subject to ``cinf - c0 = gamma``.

    Returns ``(c0, cinf)`` with ``c0 = -b^2 gamma/(1+b^2)`` and
    ``cinf = gamma/(1+b^2)``.
    """
    if not b > 0:
        raise ValueError("b must be positive")
    b2 = b * b
    c0 = FourierPhase(-b2 * gamma.coeffs / (1 + b2), 0.0)
    cinf = FourierPhase(gamma.coeffs / (1 + b2), 0.0)
    return c0, cinf


def k_functional(c0: FourierPhase, cinf: FourierPhase, b: float) -> float:
    """Exchange energy ``2 pi sum_n n (|c0_n|^2 + b^2 |cinf_n|^2)``.

    The b^2 factor sits on ``cinf``, matching the mode-wise quadratic whose
    minimum gives ``b^2/(1+b^2)`` times the squared seminorm of the dephasing.
    """
    _same_length(c0, cinf)
    return h_half_seminorm_sq(c0) + b * b * h_half_seminorm_sq(cinf)
