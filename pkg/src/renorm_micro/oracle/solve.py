"""Phase solve and energy evaluation on a GridField.

The discrete energy of ``psi = Theta + phi`` is
``1/2 sum_edges alpha w (dTheta + dphi)^2``; its minimiser solves
``L phi = -D^T (alpha w dTheta)`` with ``L = D^T diag(alpha w) D`` the
weighted graph Laplacian (singular, constants in the kernel).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from ..core import PinningWeight
from ..errors import SolverDivergence
from .grid import Circle, GridField, arg_increment

__all__ = [
    "CGResult",
    "pcg",
    "edge_alpha",
    "incidence",
    "laplacian",
    "solve_phase",
    "discrete_energy",
    "EnergyReport",
    "energy_report",
    "total_energy",
]

RTOL = 1e-10


@dataclass(frozen=True)
class CGResult:
    x: np.ndarray
    iterations: int
    residual: float  # final relative residual
    converged: bool


def pcg(A, b: np.ndarray, precond: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        rtol: float = RTOL, maxiter: int = 20000, mean_zero: bool = True,
        x0: Optional[np.ndarray] = None) -> CGResult:
    """Preconditioned conjugate gradients for a symmetric positive semi-definite ``A``.

    With ``mean_zero`` the right-hand side, residual and search directions are
    projected onto mean-zero vectors each iteration, which removes the
    constant kernel of a Neumann Laplacian.
    """

    def proj(v):
        return v - v.mean() if mean_zero else v

    b = proj(np.asarray(b, dtype=float))
    bnorm = float(np.linalg.norm(b))
    x = np.zeros_like(b) if x0 is None else proj(np.array(x0, dtype=float))
    if bnorm == 0.0:
        return CGResult(np.zeros_like(b), 0, 0.0, True)
    r = proj(b - A @ x)
    M = precond if precond is not None else (lambda v: v)
    zvec = proj(M(r))
    p = zvec.copy()
    rz = float(r @ zvec)
    res = float(np.linalg.norm(r)) / bnorm
    it = 0
    while res > rtol and it < maxiter:
        Ap = A @ p
        pAp = float(p @ Ap)
        if not pAp > 0:
            break
        a = rz / pAp
        x += a * p
        r -= a * Ap
        if it % 50 == 49:
            r = proj(b - A @ x)  # guard against drift
        res = float(np.linalg.norm(r)) / bnorm
        it += 1
        zvec = proj(M(r))
        rz_new = float(r @ zvec)
        p = zvec + (rz_new / rz) * p
        rz = rz_new
    res = float(np.linalg.norm(proj(b - A @ x))) / bnorm
    return CGResult(proj(x), it, res, res <= rtol)


def incidence(grid: GridField) -> sp.csr_matrix:
    """Signed edge-node incidence matrix D with ``(D u)_e = u[end] - u[start]``."""
    E = grid.n_edges
    rows = np.repeat(np.arange(E), 2)
    cols = grid.edges.ravel()
    vals = np.tile([-1.0, 1.0], E)
    return sp.csr_matrix((vals, (rows, cols)), shape=(E, grid.n_nodes))


def laplacian(grid: GridField, a: np.ndarray) -> sp.csr_matrix:
    D = incidence(grid)
    return (D.T @ sp.diags(a) @ D).tocsr()


def edge_alpha(grid: GridField, w: PinningWeight) -> np.ndarray:
    """Weight on each edge.

    ``midpoint`` samples at the edge midpoint.  ``cell_average`` and
    ``layered`` refine edges whose dual cell meets a jump of the weight with
    8x8 subsamples: the plain mean, or the harmonic mean along the edge
    followed by the mean across it.
    """
    alpha = np.asarray(w(grid.plane_midpoints), dtype=float)
    mode = grid.options.alpha_sampling
    if mode == "midpoint":
        return alpha
    if mode not in ("cell_average", "layered"):
        raise ValueError(f"unknown alpha sampling {mode!r}")
    along = grid.edge_direction()
    unit = grid.directions
    lo, hi = grid.face_lo, grid.face_hi
    corners = [grid.midpoints + sa * 0.5 * along + 1j * unit * f
               for sa in (-1, 1) for f in (lo, hi)]
    vals = np.stack([w(grid.to_plane(c)) for c in corners])
    uniform = vals.max(axis=0) == vals.min(axis=0)
    # a midpoint on a grid-aligned jump is ambiguous, the dual-cell corners are not
    alpha[uniform] = vals[0, uniform]
    mixed = np.flatnonzero(~uniform)
    if mixed.size:
        t = (np.arange(8) + 0.5) / 8
        ta, tb = np.meshgrid(t - 0.5, t, indexing="ij")  # ta along the edge, tb across
        cross = lo[mixed, None] + tb.ravel()[None, :] * (hi - lo)[mixed, None]
        pts = (grid.midpoints[mixed, None] + ta.ravel()[None, :] * along[mixed, None]
               + 1j * unit[mixed, None] * cross)
        sub = w(grid.to_plane(pts)).reshape(mixed.size, 8, 8)
        if mode == "cell_average":
            alpha[mixed] = sub.mean(axis=(1, 2))
        else:
            alpha[mixed] = (1.0 / (1.0 / sub).mean(axis=1)).mean(axis=1)
    return alpha


def solve_phase(grid: GridField, w: PinningWeight, method: str = "auto",
                rtol: float = RTOL, maxiter: int = 20000) -> GridField:
    """Minimise the discrete energy over mean-zero ``phi``; returns a grid with ``phi`` set.

    ``method`` is ``"jacobi"`` (diagonally preconditioned CG), ``"direct"``
    (sparse Cholesky with one node pinned, then iterative refinement) or
    ``"auto"`` (Jacobi-PCG up to 20000 unknowns, direct above).

    Raises
    ------
    SolverDivergence
        if the relative residual stays above ``rtol`` after ``maxiter`` iterations.
    """
    alpha = edge_alpha(grid, w)
    a = alpha * grid.weights
    if grid.n_nodes == 0:
        raise SolverDivergence("grid has no unknowns")
    D = incidence(grid)
    L = (D.T @ sp.diags(a) @ D).tocsr()
    rhs = -(D.T @ (a * grid.dtheta))
    if method == "auto":
        method = "direct" if grid.n_nodes > 20000 else "jacobi"
    if method == "direct":
        res = _pinned_lu(L, rhs, rtol)
    else:
        if method != "jacobi":
            raise ValueError(f"unknown method {method!r}")
        diag = L.diagonal()
        inv = np.where(diag > 0, 1.0 / np.where(diag > 0, diag, 1.0), 0.0)
        precond = lambda v: inv * v  # noqa: E731
        res = pcg(L, rhs, precond, rtol=rtol, maxiter=maxiter)
    if not res.converged:
        raise SolverDivergence(
            f"relative residual {res.residual:.3e} after {res.iterations} iterations ({method})")
    return grid.with_phi(res.x, alpha, res.iterations, res.residual)


def _factor(Lr: sp.spmatrix):
    """Factorisation of the pinned (SPD) matrix; returns a solve callable.

    CHOLMOD (through cvxopt) when available, SuperLU otherwise.
    """
    try:
        from cvxopt import cholmod, matrix, spmatrix
    except ImportError:  # pragma: no cover - cvxopt is a declared dependency
        import scipy.sparse.linalg as spl

        return spl.splu(Lr.tocsc(), permc_spec="MMD_AT_PLUS_A").solve
    coo = Lr.tocoo()
    A = spmatrix(coo.data, coo.row.astype(int), coo.col.astype(int), size=coo.shape)
    F = cholmod.symbolic(A)
    cholmod.numeric(A, F)

    def solve(v: np.ndarray) -> np.ndarray:
        B = matrix(np.ascontiguousarray(v, dtype=float))
        cholmod.solve(F, B)
        return np.array(B).ravel()

    return solve


def _pinned_lu(L: sp.csr_matrix, rhs: np.ndarray, rtol: float, max_refine: int = 8) -> CGResult:
    """Direct solve with the first unknown pinned, followed by iterative refinement."""
    b = rhs - rhs.mean()
    bnorm = float(np.linalg.norm(b))
    x = np.zeros(L.shape[0])
    if bnorm == 0.0:
        return CGResult(x, 0, 0.0, True)
    solve = _factor(L[1:, 1:])
    r = b
    res = 1.0
    for it in range(max_refine + 1):
        x[1:] += solve(r[1:])
        x -= x.mean()
        r = b - L @ x
        r -= r.mean()
        res = float(np.linalg.norm(r)) / bnorm
        if res <= rtol:
            break
    return CGResult(x, it, res, res <= rtol)


def discrete_energy(grid: GridField, alpha: np.ndarray, phi: Optional[np.ndarray] = None) -> float:
    """``1/2 sum alpha w (dTheta + dphi)^2`` for a given nodal ``phi`` (default: the solved one)."""
    phi = grid.phi if phi is None else phi
    inc = grid.dtheta.copy()
    if phi is not None:
        inc += phi[grid.edges[:, 1]] - phi[grid.edges[:, 0]]
    return 0.5 * float(np.sum(alpha * grid.weights * inc * inc))


# ---------------------------------------------------------------------------
# singular corrections

def _smooth_step(t: np.ndarray) -> np.ndarray:
    """1 for t <= 0, 0 for t >= 1, C^2 quintic in between."""
    t = np.clip(t, 0.0, 1.0)
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)


def _window_log_integral(a: float, b: float, rising: bool) -> float:
    """Integral over [a, b] of the window transition divided by r."""
    r = 0.5 * (b - a) * _GL_X + 0.5 * (a + b)
    t = (r - a) / (b - a)
    chi = _smooth_step(1.0 - t) if rising else _smooth_step(t)
    return float(0.5 * (b - a) * np.sum(_GL_W * chi / r))


@dataclass(frozen=True)
class Correction:
    kind: str  # "hole" or "outer"
    center: complex
    radius: float
    degree: int
    applied: bool
    value: float


def _correction(grid: GridField, alpha: np.ndarray, circle: Circle, degree: int,
                r1: float, r2: float) -> Correction:
    """Replace the discrete self-energy of ``degree * arg(x - c)`` inside a window by its exact value.

    The window is 1 between the circle and ``r1`` and decays smoothly to 0 at
    ``r2`` (radii measured from the centre, on the domain side).
    """
    c = circle.center
    dist = np.abs(grid.plane_midpoints - c)
    if circle.outer:
        chi = _smooth_step((r1 - dist) / (r1 - r2))
        sel = dist > r2
        exact = 2 * math.pi * (math.log(circle.radius / r1) + _window_log_integral(r2, r1, True))
    else:
        chi = _smooth_step((dist - r1) / (r2 - r1))
        sel = dist < r2
        exact = 2 * math.pi * (math.log(r1 / circle.radius) + _window_log_integral(r1, r2, False))
    idx = np.flatnonzero(sel)
    a_win = alpha[idx]
    if idx.size == 0 or a_win.max() != a_win.min():
        return Correction("outer" if circle.outer else "hole", c, circle.radius, degree, False, 0.0)
    nodes = grid.to_plane(grid.nodes[grid.edges[idx].ravel()]).reshape(-1, 2)
    p1, p2 = nodes[:, 0], nodes[:, 1]
    inc = arg_increment(p1, p2, c)
    discrete = float(np.sum(chi[idx] * grid.weights[idx] * inc * inc))
    value = 0.5 * float(a_win[0]) * degree * degree * (exact - discrete)
    return Correction("outer" if circle.outer else "hole", c, circle.radius, degree, True, value)


def _corrections(grid: GridField, alpha: np.ndarray) -> list[Correction]:
    out = []
    opts = grid.options
    for hole in grid.holes:
        if hole.aligned or not isinstance(hole, Circle):
            continue  # aligned: the phase is linear in the grid coordinates there
        deg = sum(d for c, d in grid.sources if c == hole.center)
        if deg == 0:
            continue
        if grid.rho is not None and hole.radius == grid.rho:
            r1, r2 = 3.0 * hole.radius, 6.0 * hole.radius
        else:
            width = max(0.2 * hole.radius, 8 * opts.h_core)
            r1, r2 = hole.radius + 0.5 * width, hole.radius + 1.5 * width
        out.append(_correction(grid, alpha, hole, deg, r1, r2))
    total = sum(d for _, d in grid.sources)
    if total != 0 and not grid.outer.aligned:
        R = grid.outer.radius
        out.append(_correction(grid, alpha, grid.outer, total, 0.8 * R, 0.5 * R))
    return out


@dataclass(frozen=True)
class EnergyReport:
    raw: float
    corrected: float
    corrections: tuple[Correction, ...]


def energy_report(grid: GridField, w: Optional[PinningWeight] = None) -> EnergyReport:
    if grid.phi is None:
        raise ValueError("solve_phase first")
    alpha = grid.alpha if w is None else edge_alpha(grid, w)
    raw = discrete_energy(grid, alpha)
    corr = tuple(_corrections(grid, alpha))
    return EnergyReport(raw, raw + sum(c.value for c in corr), corr)


def total_energy(grid: GridField, w: Optional[PinningWeight] = None, corrected: bool = True) -> float:
    """Energy of the solved phase; ``corrected`` adds the singular self-energy corrections."""
    rep = energy_report(grid, w)
    return rep.corrected if corrected else rep.raw
