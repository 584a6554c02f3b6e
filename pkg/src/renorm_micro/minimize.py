"""Minimisation of the microscopic renormalized energy over vortex positions.

Regimes are decided from the degrees and ``b`` alone.  Closed forms cover a
single active vortex and two vortices of positive degree; everything else in
the confined regime (``b < 1``, no sign change) goes through a multi-start
quasi-Newton search with a vanishing log-barrier at the unit circle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import RegimeLabel, VortexConfig
from .disk_energy import _w_micro_arrays, _w_micro_grad_arrays, w_micro_closed, w_micro_gradient
from .errors import DomainError, NoConvergence, WrongRegime, ZeroDegree

__all__ = [
    "Status",
    "WitnessPath",
    "MinimizationResult",
    "SolverOptions",
    "classify_regime",
    "n1_minimizer",
    "n2_positive_minimizer",
    "n2_parameters",
    "minimize_numeric",
    "gauge_fix",
    "align_rotation",
    "unboundedness_witness",
]

WITNESS_STEPS = (10, 100, 1000)
_B_ONE_TOL = 1e-12


class Status(enum.Enum):
    Converged = "Converged"
    UnboundedBelow = "UnboundedBelow"
    InfimumNotAttained = "InfimumNotAttained"
    FlatZero = "FlatZero"


@dataclass(frozen=True)
class WitnessPath:
    """An explicit family ``n -> z(n)`` along which the energy decreases without bound."""

    family: str  # "collision" or "boundary"
    degrees: tuple[int, ...]
    b: float
    description: str
    samples: tuple[tuple[int, float], ...] = ()
    movers: tuple[int, ...] = ()  # indices of the vortices that move along the path

    def points(self, n: float) -> list[complex]:
        N = len(self.degrees)
        if self.family == "collision":
            k, l = self.movers
            pts = [0j] * N
            pts[k], pts[l] = -1.0 / n, 1.0 / n
            for m in range(N):
                if m not in (k, l):
                    pts[m] = 0.5 * np.exp(2j * math.pi * (m + 1) / N)
            return pts
        r = 1.0 - 1.0 / n
        if len(self.movers) == N:
            return [r * np.exp(2j * math.pi * (m + 1) / N) for m in range(N)]
        # single active vortex escaping; the others are parked inside
        return _park(N, {self.movers[0]: complex(r)})

    def energy(self, n: float) -> float:
        return w_micro_closed(VortexConfig(self.points(n), self.degrees), self.b)


@dataclass(frozen=True)
class MinimizationResult:
    status: Status
    points: Optional[tuple[complex, ...]] = None
    value: Optional[float] = None
    witness_path: Optional[WitnessPath] = None
    iterations: int = 0
    regime: Optional[RegimeLabel] = None
    seed: Optional[int] = None
    bounds: Optional[tuple[float, float]] = None  # open interval containing the infimum
    grad_norm: Optional[float] = None


@dataclass(frozen=True)
class SolverOptions:
    max_iters: int = 400
    n_starts: int = 32
    seed: int = 0
    barrier_schedule: tuple[float, ...] = (1e-2, 1e-4, 1e-6, 0.0)
    ring_radii: tuple[float, ...] = (0.2, 0.4, 0.6)
    grad_tol: float = 1e-10
    coincidence: float = 1e-6
    max_restarts: int = 8


# ---------------------------------------------------------------------------
# regimes

def _b_is_one(b: float) -> bool:
    return abs(b - 1.0) <= _B_ONE_TOL


def classify_regime(degrees: Sequence[int], b: float) -> RegimeLabel:
    if not b > 0:
        raise ValueError("b must be positive")
    d = [int(x) for x in degrees]
    active = [x for x in d if x != 0]
    if not active:
        return RegimeLabel.AllZeroDegrees
    if len(active) == 1:
        return RegimeLabel.FlatBEqualsOne if _b_is_one(b) else RegimeLabel.SingleActiveVortex
    if min(active) < 0 < max(active):
        return RegimeLabel.MixedSignUnbounded
    if _b_is_one(b):
        return RegimeLabel.InfimumNotAttainedBEqualsOne
    if b > 1:
        return RegimeLabel.BoundaryEscapeBGreaterOne
    return RegimeLabel.ConfinedBLessOne


def _park(N: int, fixed: dict[int, complex]) -> list[complex]:
    """Positions for zero-degree vortices, which do not affect the energy."""
    pts = []
    for m in range(N):
        if m in fixed:
            pts.append(complex(fixed[m]))
        else:
            pts.append(0.5 * complex(np.exp(1j * (2 * math.pi * m / N + 0.123))))
    return pts


# ---------------------------------------------------------------------------
# closed forms

def n1_minimizer(d: int, b: float) -> MinimizationResult:
    """Single vortex of degree ``d``: centre for b<1, flat for b=1, escape for b>1."""
    if d == 0:
        raise ZeroDegree("degree 0 has identically zero energy; use classify_regime")
    if not b > 0:
        raise DomainError("b must be positive")
    if _b_is_one(b):
        return MinimizationResult(Status.FlatZero, value=0.0, regime=RegimeLabel.FlatBEqualsOne)
    if b < 1:
        return MinimizationResult(Status.Converged, points=(0j,), value=0.0,
                                  regime=RegimeLabel.SingleActiveVortex, grad_norm=0.0)
    path = _witness((d,), b, "boundary", (0,),
                    "z(t) = 1 - 1/t on the positive real axis, t -> infinity")
    return MinimizationResult(Status.UnboundedBelow, witness_path=path,
                              regime=RegimeLabel.SingleActiveVortex)


@dataclass(frozen=True)
class N2Parameters:
    A: float
    Bc: float
    lam: float
    delta: float
    sigma0: float
    s0: float

    def poly(self, sigma: float) -> float:
        a2 = self.lam + (self.A + 1) * self.Bc * self.lam * (1 + self.lam)
        a1 = 1 - self.lam + (self.A - self.lam) * self.Bc * (1 + self.lam)
        return a2 * sigma ** 2 + a1 * sigma - 1.0


def n2_parameters(p: int, q: int, b: float) -> N2Parameters:
    """Intermediate quantities of the two-vortex solution, with ``A = min/max <= 1``."""
    if p < 1 or q < 1:
        raise DomainError("p and q must both be positive")
    if not 0 < b < 1:
        raise DomainError("b must lie in (0, 1)")
    A = min(p, q) / max(p, q)
    Bc = (1 - b * b) / (1 + b * b)
    lam = (1 + Bc * (A + 1)) / (1 + Bc * (1 / A + 1))
    a1 = 1 - lam + (A - lam) * Bc * (1 + lam)
    a2 = lam + (A + 1) * Bc * lam * (1 + lam)
    delta = a1 * a1 + 4 * a2
    sigma0 = (-a1 + math.sqrt(delta)) / (2 * a2)
    return N2Parameters(A, Bc, lam, delta, sigma0, math.sqrt(sigma0))


def n2_positive_minimizer(p: int, q: int, b: float) -> MinimizationResult:
    """Global minimiser (up to rotation) for degrees ``(p, q)``, both positive, ``0 < b < 1``.

    The smaller-degree vortex sits at ``s0`` on the positive real axis and the
    larger-degree one at ``-lam*s0``; points are returned in input order.
    """
    par = n2_parameters(p, q, b)
    outer, inner = complex(par.s0), complex(-par.lam * par.s0)
    pts = (outer, inner) if p <= q else (inner, outer)
    cfg = VortexConfig(pts, (p, q))
    value = w_micro_closed(cfg, b)
    grad = float(np.max(np.abs(w_micro_gradient(cfg, b))))
    return MinimizationResult(Status.Converged, points=pts, value=value,
                              regime=RegimeLabel.ConfinedBLessOne, grad_norm=grad)


# ---------------------------------------------------------------------------
# gauge

def gauge_fix(points: Sequence[complex], tie_tol: float = 1e-8) -> list[complex]:
    """Rotate so the largest-modulus point lies on the positive real axis.

    Moduli within ``tie_tol`` (relative) of the largest count as ties; the
    smallest index wins.
    """
    z = np.asarray(points, dtype=complex)
    if z.size == 0:
        raise ValueError("empty point list")
    r = np.abs(z)
    rmax = r.max()
    if rmax == 0:
        return [complex(p) for p in z]
    k = int(np.flatnonzero(r >= rmax - tie_tol * max(1.0, rmax))[0])
    rot = np.conj(z[k]) / r[k]
    out = z * rot
    out[k] = complex(r[k], 0.0)
    return [complex(p) for p in out]


def align_rotation(points: Sequence[complex], reference: Sequence[complex]) -> list[complex]:
    """Rotate ``points`` by the common phase that best matches ``reference`` (least squares)."""
    z = np.asarray(points, dtype=complex)
    ref = np.asarray(reference, dtype=complex)
    s = np.vdot(z, ref)
    if abs(s) == 0:
        return [complex(p) for p in z]
    return [complex(p) for p in z * (s / abs(s))]


# ---------------------------------------------------------------------------
# witnesses

def _witness(degrees, b, family, movers, description) -> WitnessPath:
    path = WitnessPath(family, tuple(int(x) for x in degrees), float(b), description, (), tuple(movers))
    samples = tuple((n, path.energy(n)) for n in WITNESS_STEPS)
    return WitnessPath(path.family, path.degrees, path.b, description, samples, path.movers)


def unboundedness_witness(degrees: Sequence[int], b: float) -> WitnessPath:
    """Explicit energy-decreasing family for the unbounded regimes, sampled at n = 10, 100, 1000."""
    regime = classify_regime(degrees, b)
    d = tuple(int(x) for x in degrees)
    N = len(d)
    if regime is RegimeLabel.MixedSignUnbounded:
        k, l = next((i, j) for i in range(N) for j in range(i + 1, N) if d[i] * d[j] < 0)
        return _witness(d, b, "collision", (k, l),
                        f"z[{k}] = -1/n, z[{l}] = 1/n, others fixed at exp(2 i pi m/N)/2")
    if regime is RegimeLabel.BoundaryEscapeBGreaterOne:
        return _witness(d, b, "boundary", tuple(range(N)),
                        "z[k] = (1 - 1/n) exp(2 i pi (k+1)/N)")
    if regime is RegimeLabel.SingleActiveVortex and b > 1:
        k = next(i for i in range(N) if d[i] != 0)
        return _witness(d, b, "boundary", (k,), f"z[{k}] = 1 - 1/n, others parked")
    raise WrongRegime(f"{regime.value} is not an unbounded regime")


# ---------------------------------------------------------------------------
# numerical search

def _objective(x: np.ndarray, d: np.ndarray, b: float, mu: float):
    z = x[0::2] + 1j * x[1::2]
    val = _w_micro_arrays(z, d, b)
    gz = _w_micro_grad_arrays(z, d, b)
    if mu > 0:
        r2 = z.real ** 2 + z.imag ** 2
        val += mu * float(np.sum(-np.log1p(-r2)))
        gz = gz + mu * 2.0 * z / (1.0 - r2)
    g = np.empty(x.size)
    g[0::2], g[1::2] = gz.real, gz.imag
    return val, g


def _feasible(x: np.ndarray, coincidence: float) -> bool:
    z = x[0::2] + 1j * x[1::2]
    if np.any(np.abs(z) >= 1.0 - 1e-12):
        return False
    if z.size > 1:
        diff = np.abs(z[:, None] - z[None, :])
        diff[np.diag_indices(z.size)] = np.inf
        if diff.min() < coincidence:
            return False
    return True


class _Collapsed(Exception):
    pass


def _bfgs(x, d, b, mu, tol, max_iters, coincidence):
    """BFGS with Armijo backtracking that never leaves the feasible set."""
    f, g = _objective(x, d, b, mu)
    H = np.eye(x.size) * 0.1
    it = 0
    for it in range(1, max_iters + 1):
        if np.max(np.abs(g)) <= tol:
            break
        p = -H @ g
        slope = float(p @ g)
        if slope >= 0:
            H = np.eye(x.size) * 0.1
            p = -H @ g
            slope = float(p @ g)
        step = 1.0
        while True:
            xn = x + step * p
            if _feasible(xn, coincidence):
                fn, gn = _objective(xn, d, b, mu)
                if fn <= f + 1e-4 * step * slope:
                    break
            step *= 0.5
            if step < 1e-16:
                if not _feasible(x, 1e-4):
                    raise _Collapsed  # stalled next to a collision: restart this start
                return x, f, g, it
        s, y = xn - x, gn - g
        sy = float(s @ y)
        if sy > 1e-14 * np.linalg.norm(s) * np.linalg.norm(y):
            rho = 1.0 / sy
            V = np.eye(x.size) - rho * np.outer(s, y)
            H = V @ H @ V.T + rho * np.outer(s, s)
        x, f, g = xn, fn, gn
    return x, f, g, it


def _newton_polish(x, d, b, tol_rel, max_iters, coincidence):
    f, g = _objective(x, d, b, 0.0)
    it = 0
    eps = 1e-6
    for it in range(1, max_iters + 1):
        if np.max(np.abs(g)) <= tol_rel * max(1.0, abs(f)):
            return x, f, g, it, True
        Hm = np.empty((x.size, x.size))
        for k in range(x.size):
            e = np.zeros_like(x)
            e[k] = eps
            Hm[:, k] = (_objective(x + e, d, b, 0.0)[1] - _objective(x - e, d, b, 0.0)[1]) / (2 * eps)
        Hm = 0.5 * (Hm + Hm.T)
        p = -np.linalg.lstsq(Hm, g, rcond=1e-10)[0]
        step = 1.0
        gnorm = np.linalg.norm(g)
        while step > 1e-8:
            xn = x + step * p
            if _feasible(xn, coincidence):
                fn, gn = _objective(xn, d, b, 0.0)
                if np.linalg.norm(gn) < gnorm or fn < f - 1e-14 * max(1.0, abs(f)):
                    break
            step *= 0.5
        else:
            return x, f, g, it, np.max(np.abs(g)) <= tol_rel * max(1.0, abs(f))
        x, f, g = xn, fn, gn
    return x, f, g, it, np.max(np.abs(g)) <= tol_rel * max(1.0, abs(f))


def _initial_points(rng: np.random.Generator, n: int, radii: Sequence[float], start: int) -> np.ndarray:
    r = radii[start % len(radii)]
    theta = rng.uniform(0.0, 2 * math.pi, n)
    z = r * np.exp(1j * theta)
    return np.column_stack([z.real, z.imag]).ravel()


def _descend(x0, d, b, opts: SolverOptions):
    x = x0
    total = 0
    for mu in opts.barrier_schedule:
        tol = 1e-6 if mu == 0 else 1e-4
        x, f, g, it = _bfgs(x, d, b, mu, tol, opts.max_iters, opts.coincidence)
        total += it
    x, f, g, it, ok = _newton_polish(x, d, b, opts.grad_tol, 50, opts.coincidence)
    return x, f, float(np.max(np.abs(g))), total + it, ok


def minimize_numeric(degrees: Sequence[int], b: float, opts: Optional[SolverOptions] = None) -> MinimizationResult:
    """Best local minimum from a multi-start search, gauge-fixed.

    Runs the numerical search whenever the energy is confining (``b < 1`` and no
    sign change among the degrees); other regimes return their analytic result.
    Zero-degree vortices do not enter the energy and are parked at fixed
    positions on the circle of radius 1/2.
    """
    opts = opts or SolverOptions()
    d_all = tuple(int(x) for x in degrees)
    regime = classify_regime(d_all, b)
    N = len(d_all)
    if regime is RegimeLabel.AllZeroDegrees:
        return MinimizationResult(Status.FlatZero, value=0.0, regime=regime)
    if regime is RegimeLabel.FlatBEqualsOne:
        return MinimizationResult(Status.FlatZero, value=0.0, regime=regime)
    if regime is RegimeLabel.InfimumNotAttainedBEqualsOne:
        s = sum(d_all[i] * d_all[j] for i in range(N) for j in range(N) if i != j)
        return MinimizationResult(Status.InfimumNotAttained, regime=regime,
                                  bounds=(-math.pi * s * math.log(2.0), 0.0))
    if regime is RegimeLabel.MixedSignUnbounded or regime is RegimeLabel.BoundaryEscapeBGreaterOne or (
            regime is RegimeLabel.SingleActiveVortex and b > 1):
        return MinimizationResult(Status.UnboundedBelow, regime=regime,
                                  witness_path=unboundedness_witness(d_all, b))

    active = [i for i in range(N) if d_all[i] != 0]
    d = np.array([d_all[i] for i in active], dtype=float)
    rng = np.random.default_rng(opts.seed)
    found = []
    iterations = 0
    for start in range(opts.n_starts):
        for _ in range(opts.max_restarts):
            x0 = _initial_points(rng, d.size, opts.ring_radii, start)
            if not _feasible(x0, opts.coincidence):
                continue
            try:
                x, f, gmax, it, ok = _descend(x0, d, b, opts)
            except _Collapsed:
                continue
            iterations += it
            if ok:
                z = x[0::2] + 1j * x[1::2]
                found.append((f, gauge_fix(z), gmax))
            break
    if not found:
        raise NoConvergence(f"no start reached the gradient tolerance for degrees {d_all}, b={b}")
    best_val = min(v for v, _, _ in found)
    close = [c for c in found if c[0] <= best_val + 1e-10 * max(1.0, abs(best_val))]
    f, z_act, gmax = min(close, key=lambda c: [round(v, 9) for p in c[1] for v in (p.real, p.imag)])
    pts = _park(N, {i: z_act[k] for k, i in enumerate(active)})
    pts = gauge_fix(pts) if len(active) == N else pts
    return MinimizationResult(Status.Converged, points=tuple(pts), value=float(f),
                              iterations=iterations, regime=regime, seed=opts.seed, grad_norm=gmax)
