"""Rectilinear grids on perforated disks, in plane or log-polar coordinates.

Two geometries share one assembly routine:

* ``cartesian``: lines in x and y with a uniform fine lattice around every
  hole coordinate (the hole centre sits midway between two lines), a moderate
  spacing over the impurity and a spacing growing linearly further out.
* ``logpolar``: lines in ``u = ln r`` and ``t = arg x`` (periodic).  The
  Dirichlet energy is conformally invariant, so the five-point scheme in
  ``zeta = u + i t`` discretizes the same energy.  Circles centred at the
  origin (outer rim, impurity boundary, radial weight jumps) become grid
  lines, which removes the first-order error of cutting a weight jump
  obliquely.

Unknowns live on nodes; an edge joins two adjacent unknowns and carries the
weight ``(face length in the domain) / (edge length)``.  Nodes just inside a
hole are kept when one of their faces meets the domain, so hole boundaries are
cut rather than staircased.  Refinement bisects every cell, which keeps the
levels nested for extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from ..core import DomainSpec, PinningWeight, VortexConfig, validate_config
from ..errors import HoleOverlap, ResolutionTooCoarse

__all__ = [
    "GridOptions",
    "Circle",
    "Ellipse",
    "GridField",
    "NodeState",
    "axis_lines",
    "bisect_lines",
    "build_grid",
    "build_ring_grid",
    "arg_increment",
]

TWO_PI = 2.0 * math.pi


class NodeState:
    INTERIOR = 0
    HOLE_BOUNDARY = 1
    OUTER_BOUNDARY = 2
    EXCLUDED = 3


@dataclass(frozen=True)
class GridOptions:
    geometry: str = "logpolar"  # or "cartesian"
    fine_half: float = 8.0  # half-width of the uniform zone around a hole, in hole radii
    kappa: float = 0.1  # spacing growth per unit distance (computational units)
    h_core: float = 0.04  # cartesian: spacing over the impurity
    core_margin: float = 1.25  # cartesian: core box half-width relative to the impurity extent
    dzeta: float = TWO_PI / 128  # logpolar: base spacing in u and t
    r_min: float = 1e-4  # logpolar: radius of the small Neumann disk cut at the origin
    alpha_sampling: str = "cell_average"  # "midpoint", "cell_average" or "layered"
    boundary: str = "cut"  # or "staircase"


@dataclass(frozen=True)
class Circle:
    """A circular piece of boundary: hole (domain outside) or outer rim (domain inside)."""

    center: complex
    radius: float
    outer: bool = False
    aligned: bool = False  # boundary coincides with a grid line

    def closure_contains(self, pts: np.ndarray) -> np.ndarray:
        return np.abs(pts - self.center) <= self.radius

    def chord(self, pos: np.ndarray, vertical: bool) -> tuple[np.ndarray, np.ndarray]:
        """Centre and half-length of the chord cut from the line ``x=pos`` (or ``y=pos``)."""
        if vertical:
            a, o = self.center.real, self.center.imag
        else:
            a, o = self.center.imag, self.center.real
        half = np.sqrt(np.maximum(0.0, self.radius ** 2 - (pos - a) ** 2))
        return np.full_like(pos, o), half


@dataclass(frozen=True)
class Ellipse:
    """Axis-aligned elliptic hole with semi-axes ``a`` (along x) and ``b``."""

    center: complex
    a: float
    b: float
    outer: bool = False
    aligned: bool = False

    @property
    def radius(self) -> float:
        return max(self.a, self.b)

    def closure_contains(self, pts: np.ndarray) -> np.ndarray:
        x = pts - self.center
        return (x.real / self.a) ** 2 + (x.imag / self.b) ** 2 <= 1.0

    def chord(self, pos: np.ndarray, vertical: bool) -> tuple[np.ndarray, np.ndarray]:
        if vertical:
            a, o, s, t = self.center.real, self.center.imag, self.a, self.b
        else:
            a, o, s, t = self.center.imag, self.center.real, self.b, self.a
        half = t * np.sqrt(np.maximum(0.0, 1.0 - ((pos - a) / s) ** 2))
        return np.full_like(pos, o), half


# ---------------------------------------------------------------------------
# lines

@dataclass(frozen=True)
class _Zone:
    center: float
    step: float
    half: float  # half-width of the zone
    node_centered: bool = False  # lattice through the centre instead of around it


def _spacing(x: np.ndarray, zones: Sequence[_Zone], base: Callable[[np.ndarray], np.ndarray],
             kappa: float) -> np.ndarray:
    s = base(x)
    for z in zones:
        s = np.minimum(s, z.step + kappa * np.maximum(0.0, np.abs(x - z.center) - z.half))
    return s


def _fill(a: float, b: float, spacing) -> np.ndarray:
    """Nodes strictly between a and b with local spacing close to ``spacing(x)``.

    The spacing integral uses a uniform sample of [a, b], so mirrored inputs
    give mirrored nodes.
    """
    if b <= a:
        return np.empty(0)
    h_min = float(np.min(spacing(np.linspace(a, b, 1001))))
    m = int(min(2_000_000, max(64, math.ceil(20.0 * (b - a) / h_min))))
    xs = np.linspace(a, b, m + 1)
    inv = 1.0 / spacing(xs)
    t = np.concatenate([[0.0], np.cumsum(0.5 * (inv[1:] + inv[:-1]) * np.diff(xs))])
    n = max(1, int(round(t[-1])))
    targets = np.linspace(0.0, t[-1], n + 1)[1:-1]
    return np.interp(targets, t, xs)


def _zone_lattice(z: _Zone) -> np.ndarray:
    K = max(1, int(math.ceil(z.half / z.step - 1e-9)))
    if z.node_centered:
        return z.center + z.step * np.arange(-K, K + 1)
    return z.center + z.step * (np.arange(-K, K) + 0.5)


def _cluster_lattice(cluster: Sequence[_Zone]) -> np.ndarray:
    if len(cluster) == 1:
        return _zone_lattice(cluster[0])
    # overlapping zones share one lattice with the finest step; a pinned
    # (node-centred) zone keeps its centre on a line, otherwise the lattice is
    # centred on the union so that mirrored zones give mirrored lines
    step = min(z.step for z in cluster)
    lo = min(z.center - z.half for z in cluster)
    hi = max(z.center + z.half for z in cluster)
    pinned = [z for z in cluster if z.node_centered]
    if pinned:
        c = pinned[0].center
        k0 = int(math.floor((lo - c) / step + 1e-9))
        k1 = int(math.ceil((hi - c) / step - 1e-9))
        return c + step * np.arange(k0, k1 + 1)
    return _zone_lattice(_Zone(0.5 * (lo + hi), step, 0.5 * (hi - lo)))


def _lines(lo: float, hi: float, zones: Sequence[_Zone], base, kappa: float) -> np.ndarray:
    """Lines from ``lo`` to ``hi`` (both included) with uniform lattices on the zones."""
    zones = sorted(zones, key=lambda z: z.center)
    clusters: list[list[_Zone]] = []
    for z in zones:
        if clusters:
            last = clusters[-1]
            reach = max(c.center + c.half + 0.5 * c.step for c in last)
            if z.center - z.half - 0.5 * z.step <= reach:
                last.append(z)
                continue
        clusters.append([z])
    blocks: list[np.ndarray] = []
    for cl in clusters:
        lat = _cluster_lattice(cl)
        lat = lat[(lat > lo) & (lat < hi)]
        if lat.size:
            blocks.append(lat)

    def sp(x):
        return _spacing(x, zones, base, kappa)

    parts = [np.array([lo])]
    left = lo
    for blk in blocks:
        parts.append(_fill(left, blk[0], sp))
        parts.append(blk)
        left = blk[-1]
    parts.append(_fill(left, hi, sp))
    parts.append(np.array([hi]))
    out = np.concatenate(parts)
    # drop lines crowding a fixed end
    keep = np.ones(out.size, dtype=bool)
    s_lo, s_hi = float(sp(np.array([lo]))[0]), float(sp(np.array([hi]))[0])
    keep[1:-1] &= (out[1:-1] - lo > 0.1 * s_lo) & (hi - out[1:-1] > 0.1 * s_hi)
    return out[keep]


def axis_lines(anchors: Sequence[float], h_fine: float, fine_half: float, h_core: float,
               core_half: float, kappa: float, extent: float) -> np.ndarray:
    """Cartesian lines covering [-extent, extent] with fine lattices centred on ``anchors``."""
    h_core = max(h_core, h_fine)
    zones = [_Zone(float(c), h_fine, fine_half) for c in sorted(set(anchors))]
    for z in zones:
        if abs(z.center) + z.half >= extent:
            raise HoleOverlap("fine zone reaches the edge of the grid")

    def base(x):
        return h_core + kappa * np.maximum(0.0, np.abs(x) - core_half)

    return _lines(-extent, extent, zones, base, kappa)


def bisect_lines(lines: np.ndarray, times: int = 1, period: Optional[float] = None) -> np.ndarray:
    """Insert midpoints ``times`` times; with ``period`` the last cell wraps to the first line."""
    for _ in range(times):
        ext = np.append(lines, lines[0] + period) if period is not None else lines
        mid = 0.5 * (ext[1:] + ext[:-1])
        out = np.empty(lines.size + mid.size)
        out[0::2] = lines
        out[1::2] = mid
        lines = out
    return lines


def arg_increment(p1: np.ndarray, p2: np.ndarray, center: complex) -> np.ndarray:
    """Increment of arg(x - center) from p1 to p2 along a short path avoiding the centre."""
    return np.angle((p2 - center) * np.conj(p1 - center))


# ---------------------------------------------------------------------------
# grid container

@dataclass(eq=False)
class GridField:
    """Nodes, edges and singular phase data of one discretized domain.

    Coordinates in ``nodes``/``midpoints`` are computational (x + iy, or
    u + it for log-polar); ``to_plane`` maps them to the physical plane.
    ``dtheta`` holds the exact increment of the multivalued phase along each
    edge and ``theta_grad`` its gradient at the edge midpoint, in
    computational coordinates (as a complex number).
    """

    geometry: str
    x: np.ndarray  # lines of the first coordinate (x or u)
    y: np.ndarray  # lines of the second coordinate (y or t)
    h: float
    state: np.ndarray  # (ny, nx) NodeState codes
    node_index: np.ndarray  # (ny, nx) unknown number or -1
    nodes: np.ndarray
    edges: np.ndarray  # (E, 2) unknown numbers
    lengths: np.ndarray
    directions: np.ndarray  # 1 or 1j
    face_lo: np.ndarray  # dual face extent, offsets along i*direction
    face_hi: np.ndarray
    weights: np.ndarray  # face length in the domain / edge length
    midpoints: np.ndarray
    dtheta: np.ndarray
    theta_grad: np.ndarray
    sources: tuple[tuple[complex, int], ...]
    holes: tuple[Circle, ...]
    outer: Circle
    R: float
    rho: Optional[float] = None
    options: GridOptions = field(default_factory=GridOptions)
    phi: Optional[np.ndarray] = None
    iterations: int = 0
    residual: float = math.nan
    alpha: Optional[np.ndarray] = None  # weight sampled on the edges

    def to_plane(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=complex)
        return np.exp(pts) if self.geometry == "logpolar" else pts

    @property
    def plane_nodes(self) -> np.ndarray:
        return self.to_plane(self.nodes)

    @property
    def plane_midpoints(self) -> np.ndarray:
        return self.to_plane(self.midpoints)

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.size)

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    def with_phi(self, phi: np.ndarray, alpha: np.ndarray, iterations: int,
                 residual: float) -> "GridField":
        return replace(self, phi=phi, alpha=alpha, iterations=iterations, residual=residual)

    def edge_direction(self) -> np.ndarray:
        return self.lengths * self.directions

    def edge_lookup(self, a, b) -> tuple[np.ndarray, np.ndarray]:
        """Edge numbers and orientation signs for node pairs (a -> b); -1 where absent."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        n = self.n_nodes
        key = self.edges[:, 0].astype(np.int64) * n + self.edges[:, 1]
        order = np.argsort(key)
        skey = key[order]
        out = np.full(a.size, -1, dtype=np.int64)
        sign = np.zeros(a.size)
        for s, (p, q) in ((1.0, (a, b)), (-1.0, (b, a))):
            k = p * n + q
            pos = np.clip(np.searchsorted(skey, k), 0, skey.size - 1)
            hit = (skey[pos] == k) & (out < 0)
            out[hit] = order[pos[hit]]
            sign[hit] = s
        return out, sign

    def circulation(self, path: Sequence[int], with_phi: bool = False) -> float:
        """Sum of phase increments along a closed path of unknown numbers."""
        a = np.asarray(path, dtype=np.int64)
        b = np.roll(a, -1)
        k, sgn = self.edge_lookup(a, b)
        if np.any(k < 0):
            raise KeyError("path uses a missing edge")
        inc = self.dtheta[k].copy()
        if with_phi and self.phi is not None:
            inc += self.phi[self.edges[k, 1]] - self.phi[self.edges[k, 0]]
        return float(np.sum(sgn * inc))


# ---------------------------------------------------------------------------
# assembly

def _overlap(lo, hi, c, half) -> np.ndarray:
    return np.maximum(0.0, np.minimum(hi, c + half) - np.maximum(lo, c - half))


def _face_offsets(lines: np.ndarray, period: Optional[float]) -> tuple[np.ndarray, np.ndarray]:
    d = np.diff(lines)
    if period is not None:
        wrap = lines[0] + period - lines[-1]
        before = np.concatenate([[wrap], d])
        after = np.concatenate([d, [wrap]])
    else:
        before = np.concatenate([[0.0], d])
        after = np.concatenate([d, [0.0]])
    return 0.5 * before, 0.5 * after


def _assemble(geometry: str, x: np.ndarray, y: np.ndarray, period_y: Optional[float],
              in_domain: Callable[[np.ndarray], np.ndarray],
              in_hole: Callable[[np.ndarray], np.ndarray],
              apertures: Callable[[np.ndarray, np.ndarray, np.ndarray, bool], np.ndarray],
              sources: Sequence[tuple[complex, int]], h: float, holes: Sequence[Circle],
              R: float, rho: Optional[float], options: GridOptions) -> GridField:
    X, Y = np.meshgrid(x, y)
    Z = X + 1j * Y
    dom = in_domain(Z)
    hole = in_hole(Z) & ~dom
    ny, nx = Z.shape

    state = np.full(Z.shape, NodeState.EXCLUDED, dtype=np.int8)
    state[dom] = NodeState.INTERIOR

    def padded(m, v):
        p = np.pad(m, 1, constant_values=v)
        if period_y is not None:
            p[0, 1:-1], p[-1, 1:-1] = m[-1], m[0]
        return p

    pad_dom, pad_hole, pad_out = padded(dom, False), padded(hole, False), padded(~dom & ~hole, True)
    near_dom = np.zeros_like(dom)
    near_hole = np.zeros_like(dom)
    near_out = np.zeros_like(dom)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            sl = (slice(1 + dy, 1 + dy + ny), slice(1 + dx, 1 + dx + nx))
            near_dom |= pad_dom[sl]
            if abs(dx) + abs(dy) == 1:
                near_hole |= pad_hole[sl]
                near_out |= pad_out[sl]
    state[dom & near_out] = NodeState.OUTER_BOUNDARY
    state[dom & near_hole] = NodeState.HOLE_BOUNDARY

    if options.boundary not in ("cut", "staircase"):
        raise ValueError(f"unknown boundary treatment {options.boundary!r}")
    cut = options.boundary == "cut"
    active = dom | (near_dom & hole & cut)
    state[active & ~dom] = NodeState.HOLE_BOUNDARY

    dx_lo, dx_hi = _face_offsets(x, None)
    dy_lo, dy_hi = _face_offsets(y, period_y)

    # edges along the first coordinate; their faces run along the second one
    jj, ii = np.nonzero(active[:, :-1] & active[:, 1:])
    len_a = x[ii + 1] - x[ii]
    lo_a, hi_a = -dy_lo[jj], dy_hi[jj]
    # edges along the second coordinate; their faces run along -first (i * i = -1)
    rows = ny - 1 if period_y is None else ny
    nxt = (np.arange(rows) + 1) % ny
    jj2, ii2 = np.nonzero(active[:rows, :] & active[nxt, :])
    y_next = np.where(jj2 + 1 < ny, y[np.minimum(jj2 + 1, ny - 1)], y[0] + (period_y or 0.0))
    len_b = y_next - y[jj2]
    lo_b, hi_b = -dx_hi[ii2], dx_lo[ii2]

    if cut:
        face_a = apertures(0.5 * (x[ii] + x[ii + 1]), y[jj] + lo_a, y[jj] + hi_a, True)
        face_b = apertures(y[jj2] + 0.5 * len_b, x[ii2] - hi_b, x[ii2] - lo_b, False)
    else:
        face_a = (hi_a - lo_a) * (dom[jj, ii] & dom[jj, ii + 1])
        face_b = (hi_b - lo_b) * (dom[jj2, ii2] & dom[nxt[jj2], ii2])

    flat = np.arange(Z.size).reshape(Z.shape)
    ends = np.concatenate([np.column_stack([flat[jj, ii], flat[jj, ii + 1]]),
                           np.column_stack([flat[jj2, ii2], flat[nxt[jj2], ii2]])])
    lengths = np.concatenate([len_a, len_b])
    directions = np.concatenate([np.ones(len_a.size, dtype=complex), np.full(len_b.size, 1j)])
    face_lo = np.concatenate([lo_a, lo_b])
    face_hi = np.concatenate([hi_a, hi_b])
    faces = np.concatenate([face_a, face_b])
    starts = np.concatenate([Z[jj, ii], Z[jj2, ii2]])

    keep = faces > 1e-12 * (face_hi - face_lo)
    ends, lengths, directions = ends[keep], lengths[keep], directions[keep]
    face_lo, face_hi, faces, starts = face_lo[keep], face_hi[keep], faces[keep], starts[keep]

    used = np.zeros(Z.size, dtype=bool)
    used[ends.ravel()] = True
    used &= active.ravel()
    index = np.full(Z.size, -1, dtype=np.int64)
    index[used] = np.arange(int(used.sum()))
    state.ravel()[active.ravel() & ~used] = NodeState.EXCLUDED
    edges = index[ends]
    nodes = Z.ravel()[used]
    mid = starts + 0.5 * lengths * directions

    logpolar = geometry == "logpolar"
    plane = np.exp if logpolar else (lambda v: v)
    p1 = plane(starts)
    p2 = plane(starts + lengths * directions)
    pm = plane(mid)
    dtheta = np.zeros(edges.shape[0])
    grad = np.zeros(edges.shape[0], dtype=complex)
    for c, d in sources:
        if d == 0:
            continue
        dtheta += d * arg_increment(p1, p2, c)
        dfdz = 1.0 / (pm - c)  # derivative of log(x - c)
        if logpolar:
            dfdz = dfdz * pm  # chain rule through x = exp(zeta)
        grad += d * 1j * np.conj(dfdz)
    return GridField(geometry=geometry, x=x, y=y, h=h, state=state,
                     node_index=index.reshape(Z.shape), nodes=nodes, edges=edges,
                     lengths=lengths, directions=directions, face_lo=face_lo, face_hi=face_hi,
                     weights=faces / lengths, midpoints=mid, dtheta=dtheta, theta_grad=grad,
                     sources=tuple((complex(c), int(d)) for c, d in sources),
                     holes=tuple(holes), outer=Circle(0j, R, outer=True, aligned=logpolar),
                     R=R, rho=rho, options=options)


# ---------------------------------------------------------------------------
# cartesian

def _cartesian(x, y, R, holes, sources, h, options, rho) -> GridField:
    def in_hole(Z):
        out = np.zeros(Z.shape, dtype=bool)
        for c in holes:
            out |= c.closure_contains(Z)
        return out

    def in_domain(Z):
        return (np.abs(Z) < R) & ~in_hole(Z)

    def apertures(pos, lo, hi, vertical):
        c, half = Circle(0j, R).chord(pos, vertical)
        length = _overlap(lo, hi, c, half)
        for hole in holes:
            c, half = hole.chord(pos, vertical)
            length = length - _overlap(lo, hi, c, half)
        return np.maximum(length, 0.0)

    return _assemble("cartesian", x, y, None, in_domain, in_hole, apertures, sources, h,
                     holes, R, rho, options)


# ---------------------------------------------------------------------------
# log-polar

def _polar_chord_t(hole: Circle, u: np.ndarray, tc: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Angular chord of the hole on the circle r = e^u, centred near ``tc``."""
    s, ts = abs(hole.center), math.atan2(hole.center.imag, hole.center.real)
    r = np.exp(u)
    cosv = (r * r + s * s - hole.radius ** 2) / (2 * r * s)
    half = np.where(np.abs(cosv) <= 1, np.arccos(np.clip(cosv, -1, 1)), 0.0)
    centre = ts + TWO_PI * np.round((tc - ts) / TWO_PI)
    return centre, half


def _polar_chord_u(hole: Circle, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Chord of the hole on the ray of angle t, as a u-interval (centre, half-length)."""
    s, ts = abs(hole.center), math.atan2(hole.center.imag, hole.center.real)
    c = np.cos(t - ts)
    disc = hole.radius ** 2 - (s * s) * (1 - c * c)
    ok = (disc > 0) & (c > 0)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    r_lo = np.where(ok, s * c - sq, 1.0)
    r_hi = np.where(ok, s * c + sq, 1.0)
    u_lo, u_hi = np.log(np.maximum(r_lo, 1e-300)), np.log(r_hi)
    return 0.5 * (u_lo + u_hi), np.where(ok, 0.5 * (u_hi - u_lo), 0.0)


def _logpolar(u, t, u_min, u_max, holes, sources, h, options, R, rho, origin_hole) -> GridField:
    def in_hole(Z):
        out = np.zeros(Z.shape, dtype=bool)
        P = np.exp(Z)
        for c in holes:
            out |= c.closure_contains(P)
        return out

    def in_domain(Z):
        return (Z.real >= u_min) & (Z.real <= u_max) & ~in_hole(Z)

    def apertures(pos, lo, hi, along_t):
        if along_t:  # face on the circle u = pos spanning t in [lo, hi]
            length = (hi - lo) * ((pos >= u_min) & (pos <= u_max))
            for hole in holes:
                c, half = _polar_chord_t(hole, pos, 0.5 * (lo + hi))
                length = length - _overlap(lo, hi, c, half)
        else:  # face on the ray t = pos spanning u in [lo, hi]
            length = np.maximum(0.0, np.minimum(hi, u_max) - np.maximum(lo, u_min))
            for hole in holes:
                c, half = _polar_chord_u(hole, pos)
                length = length - _overlap(lo, hi, c, half)
        return np.maximum(length, 0.0)

    all_holes = list(holes) + ([origin_hole] if origin_hole is not None else [])
    return _assemble("logpolar", u, t, TWO_PI, in_domain, in_hole, apertures, sources, h,
                     all_holes, R, rho, options)


def _aligned_radii(weight: Optional[PinningWeight], r_lo: float, r_hi: float) -> list[float]:
    """Radii of origin-centred circles across which the weight jumps."""
    out: list[float] = []
    if weight is None:
        return out
    imp = weight.impurity
    if imp is not None and imp.shape == "disk" and imp.center == 0:
        out.append(imp.radius)
    if weight.custom is None and weight.outside.kind in ("radial_stripes", "polar_checkerboard"):
        q = weight.outside.scale
        k_lo = math.floor(math.log(r_lo) / math.log(q))
        k_hi = math.ceil(math.log(r_hi) / math.log(q))
        out.extend(q ** k for k in range(k_lo, k_hi + 1))
    return [r for r in out if r_lo < r < r_hi]


def _checkerboard_cell(weight: Optional[PinningWeight]) -> Optional[float]:
    if weight is None or weight.custom is not None or weight.outside.kind != "checkerboard":
        return None
    return float(weight.outside.scale)


def _aligned_angles(weight: Optional[PinningWeight]) -> list[float]:
    if weight is None or weight.custom is not None or \
            weight.outside.kind not in ("angular_sectors", "polar_checkerboard"):
        return []
    n = weight.outside.count
    return [TWO_PI * k / n for k in range(n)]


def _polar_lines(u_min: float, u_max: float, holes: Sequence[Circle], h: float, opts: GridOptions,
                 aligned_u: Sequence[float], aligned_t: Sequence[float],
                 u_inner: Optional[float]) -> tuple[np.ndarray, np.ndarray]:
    du = opts.dzeta
    zu, zt = [], []
    for c in holes:
        s = abs(c.center)
        step = h / s
        half = opts.fine_half * c.radius / s
        zu.append(_Zone(math.log(s), step, half))
        zt.append(_Zone(math.atan2(c.center.imag, c.center.real), step, half))
    for v in aligned_u:
        zu.append(_Zone(v, du, 2 * du, node_centered=True))
    for v in aligned_t:
        zt.append(_Zone(v, du, 2 * du, node_centered=True))

    def base_u(v):
        s = np.full_like(v, du)
        if u_inner is not None:  # the region around the origin carries little energy
            s = s + 3 * opts.kappa * np.maximum(0.0, u_inner - v)
        return s

    u = _lines(u_min, u_max, zu, base_u, opts.kappa)
    # periodic t: start opposite the first zone so no zone straddles the cut
    t0 = (zt[0].center + math.pi) if zt else -math.pi
    shifted = [replace(z, center=t0 + ((z.center - t0) % TWO_PI)) for z in zt]
    t = _lines(t0, t0 + TWO_PI, shifted, lambda v: np.full_like(v, du), opts.kappa)[:-1]
    return u, t


# ---------------------------------------------------------------------------
# public builders

def build_grid(dom: DomainSpec, cfg: VortexConfig, h: float, bisect: int = 0,
               options: GridOptions = GridOptions(),
               weight: Optional[PinningWeight] = None) -> GridField:
    """Grid of ``B_R`` minus the core disks ``B(z_i, rho)``, with phase sources at the vortices.

    ``h`` is the fine spacing around the holes (physical units) before
    ``bisect`` rounds of refinement; the returned grid reports the refined
    spacing.  ``weight`` lets the log-polar grid align lines with circular
    jumps of the weight.

    Raises
    ------
    ResolutionTooCoarse
        if ``h > rho/8``.
    HoleOverlap
        if closed core disks intersect each other or the outer circle.
    """
    if dom.R is None or dom.rho is None:
        raise ValueError("the domain needs both R and rho")
    R, rho = float(dom.R), float(dom.rho)
    if not h > 0 or h > rho / 8 * (1 + 1e-12):
        raise ResolutionTooCoarse(f"h={h} must be at most rho/8={rho / 8}")
    z = cfg.z
    for i in range(z.size):
        if abs(z[i]) + rho >= R:
            raise HoleOverlap(f"core disk {i} meets the outer circle")
        for j in range(i + 1, z.size):
            if abs(z[i] - z[j]) <= 2 * rho:
                raise HoleOverlap(f"core disks {i} and {j} intersect")
    validate_config(cfg, dom)
    sources = list(zip(z, cfg.degrees))
    h_out = h / 2 ** bisect

    if options.geometry == "cartesian":
        core_half = options.core_margin * dom.impurity.bounding_radius
        s_R = options.h_core + options.kappa * max(0.0, R - core_half)
        extent = R + 2.0 * s_R
        fine_half = options.fine_half * rho
        xl = axis_lines(z.real, h, fine_half, options.h_core, core_half, options.kappa, extent)
        yl = axis_lines(z.imag, h, fine_half, options.h_core, core_half, options.kappa, extent)
        xl, yl = bisect_lines(xl, bisect), bisect_lines(yl, bisect)
        holes = [Circle(complex(c), rho) for c in z]
        return _cartesian(xl, yl, R, holes, sources, h_out, options, rho)
    if options.geometry != "logpolar":
        raise ValueError(f"unknown geometry {options.geometry!r}")

    at_origin = bool(np.any(z == 0))
    off = [Circle(complex(c), rho) for c in z if c != 0]
    if at_origin:
        u_min = math.log(rho)
        origin_hole: Optional[Circle] = Circle(0j, rho, aligned=True)
    else:
        r_min = min(options.r_min, 0.01 * min(abs(c) - rho for c in z))
        u_min = math.log(r_min)
        origin_hole = None
    for c in off:
        if abs(c.center) - rho <= math.exp(u_min):
            raise HoleOverlap("core disk reaches the origin cut-out")
    u_inner = math.log(0.5 * min(abs(c.center) for c in off)) if off and not at_origin else None
    radii = _aligned_radii(weight, math.exp(u_min), R)
    u, t = _polar_lines(u_min, math.log(R), off, h, options, [math.log(r) for r in radii],
                        _aligned_angles(weight), u_inner)
    u, t = bisect_lines(u, bisect), bisect_lines(t, bisect, period=TWO_PI)
    return _logpolar(u, t, u_min, math.log(R), off, sources, h_out, options, R, rho, origin_hole)


def build_ring_grid(inner: float, R: float, h: float, bisect: int = 0,
                    options: GridOptions = GridOptions(), degree: int = 1,
                    weight: Optional[PinningWeight] = None,
                    hole: Optional[Circle | Ellipse] = None) -> GridField:
    """Grid of the annulus ``inner < |x| < R`` with a phase source of ``degree`` at the origin.

    ``h`` is the physical spacing at the inner circle (log-polar spacing
    ``h / inner``).  The cartesian variant accepts any ``hole`` (a Circle or
    an Ellipse) inside ``B_R`` in place of the inner circle; for a square
    checkerboard ``weight`` it uses a uniform lattice aligned with the cells.
    """
    if not 0 < inner < R:
        raise HoleOverlap("need 0 < inner radius < R")
    opts = replace(options, dzeta=h / inner)
    sources = [(0j, degree)]
    if options.geometry == "cartesian":
        hole = hole or Circle(0j, inner)
        sources = [(hole.center, degree)]
        core_half = options.core_margin * (abs(hole.center) + hole.radius)
        if core_half >= R:
            raise HoleOverlap("hole reaches the outer circle")
        opts = replace(opts, h_core=h)
        cell = _checkerboard_cell(weight)
        if cell is not None:
            # uniform lattice with every cell edge of the weight on a grid line
            h = cell / math.ceil(cell / h - 1e-9)
            k = math.ceil((R + 2.0 * h) / h)
            xl = yl = h * np.arange(-k, k + 1)
        else:
            s_R = h + opts.kappa * max(0.0, R - core_half)
            extent = R + 2.0 * s_R
            xl = axis_lines([], h, 0.0, h, core_half, opts.kappa, extent)
            yl = axis_lines([], h, 0.0, h, core_half, opts.kappa, extent)
        xl, yl = bisect_lines(xl, bisect), bisect_lines(yl, bisect)
        return _cartesian(xl, yl, R, [hole], sources, h / 2 ** bisect, opts, None)
    u_min, u_max = math.log(inner), math.log(R)
    radii = _aligned_radii(weight, inner, R)
    u, t = _polar_lines(u_min, u_max, [], h, opts, [math.log(r) for r in radii],
                        _aligned_angles(weight), None)
    u, t = bisect_lines(u, bisect), bisect_lines(t, bisect, period=TWO_PI)
    return _logpolar(u, t, u_min, u_max, [], sources, h / 2 ** bisect, opts, R, None,
                     Circle(0j, inner, aligned=True))
