"""Oracle studies built on the grid solver: f(R), the expansion residual,
winding numbers of loops and the Neumann/Dirichlet annulus comparison."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, fields, replace
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from ..core import DomainSpec, Impurity, PinningWeight, VortexConfig
from ..disk_energy import EnergyExpansion, w_micro_closed
from ..errors import LoopCrossesHole, NotUnitDisk, RadiusOutOfRange, SolverDivergence
from .grid import TWO_PI, Circle, Ellipse, GridField, GridOptions, build_grid, build_ring_grid
from .solve import _factor, discrete_energy, edge_alpha, incidence, solve_phase, total_energy

__all__ = [
    "OracleRecord",
    "RECORD_FIELDS",
    "Richardson",
    "richardson",
    "f_of_R",
    "expansion_residual",
    "oracle_run",
    "ExpansionStudy",
    "expansion_study",
    "GridLoop",
    "winding_check",
    "AnnulusComparison",
    "annulus_comparison",
]


@dataclass(frozen=True)
class OracleRecord:
    """One oracle run; field order is the CSV column order."""

    R: float
    rho: float
    h: float
    energy: float
    f_R: float
    residual: float
    iterations: int
    wall_time: float
    level: int = 0
    n_nodes: int = 0


RECORD_FIELDS = tuple(f.name for f in fields(OracleRecord))


@dataclass(frozen=True)
class Richardson:
    value: float  # extrapolated from the two finest levels
    error_estimate: float  # spread of the last two extrapolants (nan with two levels)
    table: tuple[float, ...]  # extrapolants of consecutive pairs


def richardson(values: Sequence[float], order: float = 2.0) -> Richardson:
    """Extrapolate values computed at spacings h, h/2, h/4, ... with error ~ h**order."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise ValueError("need at least two levels")
    f = 2.0 ** order
    table = (f * v[1:] - v[:-1]) / (f - 1.0)
    est = abs(table[-1] - table[-2]) if table.size > 1 else math.nan
    return Richardson(float(table[-1]), float(est), tuple(float(t) for t in table))


# ---------------------------------------------------------------------------
# f(R)

def _exterior_weight(w: PinningWeight) -> PinningWeight:
    # only the weight outside the impurity enters f(R); dropping the impurity
    # keeps cut edges along its boundary from picking up b^2
    return replace(w, impurity=None)


def f_of_R(w: PinningWeight, impurity: Optional[Impurity], R: float, h: float, bisect: int = 0,
           options: GridOptions = GridOptions(), grid_out: Optional[list] = None) -> float:
    """Minimal degree-one energy ``1/2 int alpha |grad v|^2`` over ``B_R`` minus the impurity.

    ``h`` is the spacing next to the impurity before ``bisect`` refinements.
    Origin-centred disks use the log-polar grid, except under a square
    checkerboard, whose cells the log-polar spacing cannot follow far out.
    Other cases use the cartesian grid with the impurity cut out exactly.
    """
    imp = impurity if impurity is not None else (w.impurity or Impurity.unit_disk())
    if not R > imp.bounding_radius:
        raise RadiusOutOfRange(f"R={R} must exceed the impurity extent {imp.bounding_radius:g}")
    ext = _exterior_weight(w)
    square = ext.custom is None and ext.outside.kind == "checkerboard"
    if imp.shape == "disk" and imp.center == 0 and options.geometry == "logpolar" and not square:
        grid = build_ring_grid(imp.radius, R, h, bisect, options, degree=1, weight=ext)
    else:
        if imp.shape == "disk":
            hole: Circle | Ellipse = Circle(complex(imp.center), imp.radius)
        else:
            hole = Ellipse(complex(imp.center), imp.a, imp.b)
        grid = build_ring_grid(hole.radius, R, h, bisect, replace(options, geometry="cartesian"),
                               degree=1, weight=ext, hole=hole)
    grid = solve_phase(grid, ext)
    if grid_out is not None:
        grid_out.append(grid)
    return total_energy(grid)


# ---------------------------------------------------------------------------
# expansion

def _require_disk(dom: DomainSpec, w: PinningWeight) -> None:
    if not dom.impurity.is_unit_disk:
        raise NotUnitDisk("the expansion needs the unit-disk impurity")
    if not w.is_disk_weight:
        raise NotUnitDisk("the expansion needs b^2 on the unit disk and 1 outside")


def expansion_residual(dom: DomainSpec, cfg: VortexConfig, w: PinningWeight, h: float,
                       bisect: int = 0, options: GridOptions = GridOptions(),
                       f_R: Optional[float] = None) -> EnergyExpansion:
    """Split the oracle energy into ``d^2 f(R) + b^2 pi sum d_i^2 |ln rho| + W^micro + residual``.

    ``f_R`` may be passed to reuse a value; otherwise it is computed on a
    ring grid with the same refinement level.
    """
    _require_disk(dom, w)
    grid = solve_phase(build_grid(dom, cfg, h, bisect, options, weight=w), w)
    energy = total_energy(grid)
    return _split(dom, cfg, w, energy, f_R if f_R is not None else
                  _f_for(dom, w, bisect, options))


def _f_for(dom: DomainSpec, w: PinningWeight, bisect: int, options: GridOptions) -> float:
    return f_of_R(w, dom.impurity, float(dom.R), options.dzeta, bisect, options)


def _split(dom, cfg, w, energy, f_R) -> EnergyExpansion:
    d = cfg.d
    topological = float(d.sum()) ** 2 * f_R
    core = w.b ** 2 * math.pi * float(np.sum(d * d)) * abs(math.log(dom.rho))
    return EnergyExpansion.from_total(energy, topological, core, w_micro_closed(cfg, w.b))


def oracle_run(dom: DomainSpec, cfg: VortexConfig, w: PinningWeight, h: float, bisect: int = 0,
               options: GridOptions = GridOptions()) -> OracleRecord:
    """Solve once and return the run record (energy, f(R), residual, cost)."""
    _require_disk(dom, w)
    t0 = time.perf_counter()
    grid = solve_phase(build_grid(dom, cfg, h, bisect, options, weight=w), w)
    energy = total_energy(grid)
    f_R = _f_for(dom, w, bisect, options)
    exp = _split(dom, cfg, w, energy, f_R)
    return OracleRecord(R=float(dom.R), rho=float(dom.rho), h=grid.h, energy=energy, f_R=f_R,
                        residual=exp.residual, iterations=grid.iterations,
                        wall_time=time.perf_counter() - t0, level=bisect, n_nodes=grid.n_nodes)


@dataclass(frozen=True)
class ExpansionStudy:
    records: tuple[OracleRecord, ...]
    residual: Richardson
    energy: Richardson


def expansion_study(dom: DomainSpec, cfg: VortexConfig, w: PinningWeight, h0: Optional[float] = None,
                    levels: int = 3, options: GridOptions = GridOptions()) -> ExpansionStudy:
    """Runs at ``h0, h0/2, ...`` (default ``h0 = rho/8``) with Richardson extrapolation."""
    h0 = dom.rho / 8 if h0 is None else h0
    recs = tuple(oracle_run(dom, cfg, w, h0, k, options) for k in range(levels))
    return ExpansionStudy(recs, richardson([r.residual for r in recs]),
                          richardson([r.energy for r in recs]))


# ---------------------------------------------------------------------------
# winding numbers

@dataclass(frozen=True)
class GridLoop:
    """Rectangle ``[x0, x1] x [y0, y1]`` in grid coordinates, snapped to the nearest lines.

    On a log-polar grid, a ``y`` range of at least 2 pi is the annulus
    between the circles ``u = x0`` and ``u = x1`` (boundary: outer circle
    counter-clockwise, inner circle clockwise); ``x0 == x1`` then gives the
    single circle.
    """

    x0: float
    x1: float
    y0: float
    y1: float


def _nearest(lines: np.ndarray, v: float) -> int:
    return int(np.argmin(np.abs(lines - v)))


def _loop_paths(grid: GridField, loop: GridLoop) -> list[list[tuple[int, int]]]:
    i0, i1 = sorted((_nearest(grid.x, loop.x0), _nearest(grid.x, loop.x1)))
    ny = grid.y.size
    if grid.geometry == "logpolar":
        if loop.y1 - loop.y0 >= TWO_PI - 1e-12:
            outer = [(i1, j) for j in range(ny)]
            if i0 == i1:
                return [outer]
            return [outer, [(i0, j) for j in reversed(range(ny))]]
        ys = np.mod(grid.y - grid.y[0], TWO_PI)
        j0 = _nearest(ys, (loop.y0 - grid.y[0]) % TWO_PI)
        j1 = _nearest(ys, (loop.y1 - grid.y[0]) % TWO_PI)
        js = [j0]
        while js[-1] != j1:
            js.append((js[-1] + 1) % ny)
    else:
        j0, j1 = sorted((_nearest(grid.y, loop.y0), _nearest(grid.y, loop.y1)))
        js = list(range(j0, j1 + 1))
    if i0 == i1 or len(js) < 2:
        raise ValueError("degenerate loop")
    path = [(i, js[0]) for i in range(i0, i1)]
    path += [(i1, j) for j in js[:-1]]
    path += [(i, js[-1]) for i in range(i1, i0, -1)]
    path += [(i0, j) for j in reversed(js[1:])]
    return [path]


def winding_check(grid: GridField, loop: GridLoop) -> int:
    """Degree of ``exp(i psi)`` along a grid-aligned loop, ``psi = Theta + phi``.

    Raises
    ------
    LoopCrossesHole
        if a loop node lies in a closed hole or a loop edge is missing.
    """
    total = 0.0
    for path in _loop_paths(grid, loop):
        ij = np.array(path)
        idx = grid.node_index[ij[:, 1], ij[:, 0]]
        if np.any(idx < 0):
            raise LoopCrossesHole("loop leaves the grid domain")
        pts = grid.to_plane(grid.nodes[idx])
        for hole in grid.holes:
            if np.any(hole.closure_contains(pts)):
                raise LoopCrossesHole("loop passes through a hole")
        try:
            total += grid.circulation(idx, with_phi=True)
        except KeyError:
            raise LoopCrossesHole("loop uses an edge cut by a hole") from None
    k = total / TWO_PI
    n = int(round(k))
    if abs(k - n) >= 0.01:
        raise ValueError(f"circulation {total} is not a multiple of 2 pi")
    return n


# ---------------------------------------------------------------------------
# annulus comparison

@dataclass(frozen=True)
class AnnulusComparison:
    mu: float  # free (Neumann) degree-one minimum
    mu_dir: float  # minimum with e^{i theta} inside and e^{i(theta + theta0)} outside
    theta0: float  # optimal outer rotation
    r: float
    R: float
    h: float
    n_nodes: int

    @property
    def gap(self) -> float:
        return self.mu_dir - self.mu


def annulus_comparison(w: PinningWeight, r: float, R: float, h: float, bisect: int = 0,
                       options: GridOptions = GridOptions()) -> AnnulusComparison:
    """Neumann and rotated-Dirichlet degree-one minima on ``r < |x| < R`` (same grid, same weight).

    The Dirichlet energy is quadratic in ``theta0``; it is minimised exactly
    from three evaluations.
    """
    if not 0 < r < R:
        raise RadiusOutOfRange("need 0 < r < R")
    if options.geometry != "logpolar":
        raise ValueError("the annulus comparison runs on the log-polar grid")
    grid = build_ring_grid(r, R, h, bisect, options, degree=1, weight=w)
    neu = solve_phase(grid, w)
    alpha = neu.alpha
    mu = discrete_energy(neu, alpha)

    a = alpha * grid.weights
    D = incidence(grid)
    L = (D.T @ sp.diags(a) @ D).tocsr()
    rhs = -(D.T @ (a * grid.dtheta))
    u = grid.nodes.real
    inner = np.isclose(u, grid.x[0], rtol=0, atol=1e-12)
    outer = np.isclose(u, grid.x[-1], rtol=0, atol=1e-12)
    free = np.flatnonzero(~(inner | outer))
    Lff = L[free][:, free]
    solve = _factor(Lff)

    def refined(b):
        x = solve(b)
        return x + solve(b - Lff @ x)

    base = refined(rhs[free])
    lift = refined(-(L[free][:, np.flatnonzero(outer)] @ np.ones(int(outer.sum()))))

    def energy(theta0: float) -> float:
        phi = np.zeros(grid.n_nodes)
        phi[outer] = theta0
        phi[free] = base + theta0 * lift
        return discrete_energy(grid, alpha, phi)

    e0, e1, em = energy(0.0), energy(1.0), energy(-1.0)
    curv = 0.5 * (e1 + em - 2.0 * e0)
    theta0 = -0.25 * (e1 - em) / curv if curv > 0 else 0.0
    mu_dir = energy(theta0)
    if mu_dir < mu - 1e-9 * max(1.0, abs(mu)):
        raise SolverDivergence(f"Dirichlet minimum {mu_dir} below the free minimum {mu}")
    return AnnulusComparison(mu=mu, mu_dir=mu_dir, theta0=theta0, r=r, R=R, h=grid.h,
                             n_nodes=grid.n_nodes)
