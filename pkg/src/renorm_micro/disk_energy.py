"""Closed-form energies for the circular impurity (unit disk, weight 1 outside).

Two independent routes to the microscopic renormalized energy are provided:
``w_micro_closed`` evaluates the explicit logarithmic formula, while
``w_micro_series`` adds ``b^2 W`` to the minimal exchange energy computed
from the Fourier series of the dephasing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import VortexConfig
from .errors import BoundaryDegenerate, NearBoundaryWarning, NearCoincidentWarning, TruncationOverflow
from .fourier import dephasing_coefficients, h_half_seminorm_sq

__all__ = [
    "EnergyExpansion",
    "lr_renormalized_energy",
    "k_min",
    "series_cutoff",
    "w_micro_closed",
    "w_micro_series",
    "w_micro_gradient",
]

NEAR_BOUNDARY = 1.0 - 1e-6
NEAR_COINCIDENT = 1e-4
MAX_TERMS = 10 ** 6


@dataclass(frozen=True)
class EnergyExpansion:
    """Split ``total = topological + core + w_micro + residual``."""

    topological: float
    core: float
    w_micro: float
    residual: float
    total: float

    @classmethod
    def from_total(cls, total: float, topological: float, core: float, w_micro: float) -> "EnergyExpansion":
        residual = total - topological - core - w_micro
        return cls(topological, core, w_micro, residual, total)

    def reconstruct(self) -> float:
        return self.topological + self.core + self.w_micro + self.residual


def _check_inside(cfg: VortexConfig) -> np.ndarray:
    z = cfg.z
    r2 = z.real ** 2 + z.imag ** 2
    if np.any(r2 >= 1.0):
        i = int(np.argmax(r2))
        raise BoundaryDegenerate(f"|z[{i}]| = {math.sqrt(r2[i]):.17g} >= 1")
    if np.any(r2 > NEAR_BOUNDARY ** 2):
        warnings.warn("vortex within 1e-6 of the unit circle", NearBoundaryWarning, stacklevel=3)
    return z


def _pair_sums_arrays(z: np.ndarray, d: np.ndarray) -> tuple[float, float, float]:
    """(sum_{i!=j} d_i d_j ln|z_i-z_j|, sum d_j^2 ln(1-|z_j|^2), sum_{i!=j} d_i d_j ln|1-z_i conj z_j|)."""
    self_term = float(np.sum(d * d * np.log1p(-(z.real ** 2 + z.imag ** 2))))
    if z.size == 1:
        return 0.0, self_term, 0.0
    iu, ju = np.triu_indices(z.size, k=1)
    dd = d[iu] * d[ju]
    diff = z[iu] - z[ju]
    mob = 1.0 - z[iu] * np.conj(z[ju])
    log_diff = 0.5 * np.log(diff.real ** 2 + diff.imag ** 2)
    log_mob = 0.5 * np.log(mob.real ** 2 + mob.imag ** 2)
    # (i,j) and (j,i) contribute the same value
    return 2.0 * float(dd @ log_diff), self_term, 2.0 * float(dd @ log_mob)


def _w_micro_arrays(z: np.ndarray, d: np.ndarray, b: float) -> float:
    inter, self_term, mob = _pair_sums_arrays(z, d)
    beta = (1 - b * b) / (1 + b * b)
    return -b * b * math.pi * (inter + beta * self_term + beta * mob)


def _w_micro_grad_arrays(z: np.ndarray, d: np.ndarray, b: float) -> np.ndarray:
    """Complex gradient df/dx + i df/dy (= 2 df/d conj z) for every vortex."""
    beta = (1 - b * b) / (1 + b * b)
    g = -2.0 * beta * d * d * z / (1.0 - (z.real ** 2 + z.imag ** 2))
    if z.size > 1:
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inter = 1.0 / np.conj(diff)
        mob = z[None, :] / (1.0 - np.conj(z)[:, None] * z[None, :])
        np.fill_diagonal(inter, 0.0)
        np.fill_diagonal(mob, 0.0)
        g = g + 2.0 * d * (inter @ d) - 2.0 * beta * d * (mob @ d)
    return -b * b * math.pi * g


def _pair_sums(cfg: VortexConfig) -> tuple[float, float, float]:
    z = _check_inside(cfg)
    return _pair_sums_arrays(z, cfg.d.astype(float))


def lr_renormalized_energy(cfg: VortexConfig) -> float:
    """Renormalized energy W of the unit disk (weight 1, no pinning)."""
    inter, self_term, mob = _pair_sums(cfg)
    return math.pi * (-inter + self_term + mob)


def series_cutoff(cfg: VortexConfig, b: float, tol: float) -> int:
    """Smallest n whose geometric tail bound is below the requested tolerance."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    z = _check_inside(cfg)
    r = float(np.max(np.abs(z)))
    if r == 0.0 or not np.any(cfg.d):
        return 0
    mass = float(np.sum(np.abs(cfg.d))) ** 2
    target = tol * (1 + b * b) / (2 * math.pi * b * b)
    # bound(n) = mass r^{2n} / (n (1 - r^2)); work in logs
    log_r2 = 2.0 * math.log(r)
    base = math.log(mass) - math.log1p(-r * r) - math.log(target)

    def above(n: int) -> bool:
        return base + n * log_r2 - math.log(n) >= 0

    if above(MAX_TERMS):
        raise TruncationOverflow(f"series needs more than {MAX_TERMS} terms (max|z| = {r})")
    lo, hi = 1, MAX_TERMS  # bound is decreasing in n: bisect for the first n below target
    while lo < hi:
        mid = (lo + hi) // 2
        if above(mid):
            lo = mid + 1
        else:
            hi = mid
    return lo


def k_min(cfg: VortexConfig, b: float, tol: float = 1e-12) -> float:
    """Minimal exchange energy ``(b^2/(1+b^2)) 2 pi sum_n n |gamma_n|^2``, truncated within ``tol``."""
    if not b > 0:
        raise ValueError("b must be positive")
    n_max = series_cutoff(cfg, b, tol)
    if n_max == 0:
        return 0.0
    gamma = dephasing_coefficients(cfg, n_max)
    return (b * b / (1 + b * b)) * h_half_seminorm_sq(gamma)


def w_micro_closed(cfg: VortexConfig, b: float) -> float:
    """Microscopic renormalized energy of the unit-disk impurity from the explicit formula."""
    if not b > 0:
        raise ValueError("b must be positive")
    z = _check_inside(cfg)
    return _w_micro_arrays(z, cfg.d.astype(float), b)


def w_micro_series(cfg: VortexConfig, b: float, tol: float = 1e-12) -> float:
    """Same quantity as ``w_micro_closed`` via ``b^2 W + min K`` (Fourier route)."""
    return b * b * lr_renormalized_energy(cfg) + k_min(cfg, b, tol)


def w_micro_gradient(cfg: VortexConfig, b: float) -> np.ndarray:
    """Gradient of ``w_micro_closed`` with respect to (Re z_k, Im z_k); shape (N, 2)."""
    if not b > 0:
        raise ValueError("b must be positive")
    z = _check_inside(cfg)
    d = cfg.d.astype(float)
    if cfg.n > 1 and cfg.min_separation() < NEAR_COINCIDENT:
        warnings.warn("vortices closer than 1e-4", NearCoincidentWarning, stacklevel=2)
    g = _w_micro_grad_arrays(z, d, b)
    return np.column_stack([g.real, g.imag])
