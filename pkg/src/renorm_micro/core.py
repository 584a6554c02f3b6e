"""Domain types shared by every module: vortex data, impurity, weight, domain.

Points are complex numbers (plane coordinates).  Everything here is immutable
once constructed, so handles can be passed freely between threads/processes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DuplicatePoint, PointOutsideImpurity, RadiusOutOfRange

__all__ = [
    "VortexConfig",
    "Impurity",
    "OutsideField",
    "PinningWeight",
    "DomainSpec",
    "ValidatedConfig",
    "RegimeLabel",
    "validate_config",
    "total_degree",
]


@dataclass(frozen=True)
class VortexConfig:
    """Vortex positions ``points`` with integer ``degrees`` (same length N >= 1)."""

    points: tuple[complex, ...]
    degrees: tuple[int, ...]

    def __init__(self, points: Sequence[complex], degrees: Sequence[int]):
        pts = tuple(complex(p) for p in points)
        degs = tuple(int(d) for d in degrees)
        if len(pts) == 0:
            raise ValueError("a configuration needs at least one vortex")
        if len(pts) != len(degs):
            raise ValueError(f"{len(pts)} points but {len(degs)} degrees")
        for d_raw, d in zip(degrees, degs):
            if d_raw != d:
                raise ValueError(f"degree {d_raw!r} is not an integer")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "degrees", degs)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def z(self) -> np.ndarray:
        return np.array(self.points, dtype=complex)

    @property
    def d(self) -> np.ndarray:
        return np.array(self.degrees, dtype=np.int64)

    def total_degree(self) -> int:
        return sum(self.degrees)

    def rotated(self, angle: float) -> "VortexConfig":
        w = complex(math.cos(angle), math.sin(angle))
        return VortexConfig([w * p for p in self.points], self.degrees)

    def conjugated(self) -> "VortexConfig":
        return VortexConfig([p.conjugate() for p in self.points], self.degrees)

    def negated(self) -> "VortexConfig":
        return VortexConfig(self.points, [-d for d in self.degrees])

    def min_separation(self) -> float:
        if self.n < 2:
            return math.inf
        z = self.z
        diff = np.abs(z[:, None] - z[None, :])
        diff[np.diag_indices(self.n)] = np.inf
        return float(diff.min())


def total_degree(cfg: VortexConfig) -> int:
    """Exact integer sum of the degrees."""
    return cfg.total_degree()


# --------------------------------------------------------------------------
# impurity region

@dataclass(frozen=True)
class Impurity:
    """Bounded impurity region given by a signed-distance-like function.

    ``shape`` is ``"disk"`` (``center``, ``radius``) or ``"ellipse"``
    (axis-aligned, semi-axes ``a`` and ``b`` about ``center``).  Only the unit
    disk is accepted by the closed-form modules.
    """

    shape: str = "disk"
    center: complex = 0j
    radius: float = 1.0
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if self.shape not in ("disk", "ellipse"):
            raise ValueError(f"unknown impurity shape {self.shape!r}")
        if self.shape == "disk" and not self.radius > 0:
            raise ValueError("disk radius must be positive")
        if self.shape == "ellipse" and not (self.a > 0 and self.b > 0):
            raise ValueError("ellipse semi-axes must be positive")

    @classmethod
    def unit_disk(cls) -> "Impurity":
        return cls()

    @property
    def is_unit_disk(self) -> bool:
        return self.shape == "disk" and self.center == 0 and self.radius == 1.0

    def sdf(self, pts) -> np.ndarray:
        """Negative inside, positive outside; exact distance for disks."""
        x = np.asarray(pts, dtype=complex) - self.center
        if self.shape == "disk":
            return np.abs(x) - self.radius
        q = np.sqrt((x.real / self.a) ** 2 + (x.imag / self.b) ** 2)
        return (q - 1.0) * min(self.a, self.b)

    def contains(self, pts) -> np.ndarray:
        return self.sdf(pts) < 0

    def boundary_distance(self, z: complex) -> float:
        return float(abs(self.sdf(z)))

    @property
    def diameter(self) -> float:
        if self.shape == "disk":
            return 2.0 * self.radius
        return 2.0 * max(self.a, self.b)

    @property
    def bounding_radius(self) -> float:
        """Radius of the smallest origin-centred disk containing the closure."""
        if self.shape == "disk":
            return abs(self.center) + self.radius
        return abs(self.center) + max(self.a, self.b)


# --------------------------------------------------------------------------
# weights

@dataclass(frozen=True)
class OutsideField:
    """Weight values outside the impurity.

    kinds: ``constant`` (value ``lo``), ``checkerboard`` (``lo``/``hi`` on
    square cells of side ``scale``), ``radial_stripes`` (``lo``/``hi`` on
    rings whose radii grow by the factor ``scale``), ``angular_sectors``
    (``lo``/``hi`` on ``count`` equal sectors), ``polar_checkerboard``
    (``lo``/``hi`` alternating over both the rings of ``radial_stripes`` and
    the ``count`` sectors).
    """

    kind: str = "constant"
    lo: float = 1.0
    hi: float = 1.0
    scale: float = 1.0
    count: int = 4

    def __post_init__(self):
        if self.kind not in ("constant", "checkerboard", "radial_stripes", "angular_sectors",
                             "polar_checkerboard"):
            raise ValueError(f"unknown weight kind {self.kind!r}")

    def __call__(self, pts) -> np.ndarray:
        x = np.asarray(pts, dtype=complex)
        if self.kind == "constant":
            return np.full(x.shape, float(self.lo))
        if self.kind == "checkerboard":
            parity = (np.floor(x.real / self.scale) + np.floor(x.imag / self.scale)) % 2
        else:
            parity = np.zeros(x.shape)
            if self.kind in ("radial_stripes", "polar_checkerboard"):
                with np.errstate(divide="ignore"):
                    k = np.floor(np.log(np.abs(x)) / math.log(self.scale))
                parity = parity + np.where(np.isfinite(k), k, 0.0)
            if self.kind in ("angular_sectors", "polar_checkerboard"):
                theta = np.mod(np.angle(x), 2 * math.pi)
                parity = parity + np.floor(theta * self.count / (2 * math.pi))
            parity = parity % 2
        return np.where(parity == 0, float(self.lo), float(self.hi))


@dataclass(frozen=True)
class PinningWeight:
    """Weight field alpha: ``b**2`` inside the impurity, ``outside(x)`` elsewhere.

    With ``impurity=None`` the weight is ``outside`` everywhere (used for the
    annulus comparison, where no impurity is involved).  ``custom`` overrides
    the outside field with an arbitrary vectorised callable.
    """

    b: float
    B: float
    outside: OutsideField = field(default_factory=OutsideField)
    impurity: Optional[Impurity] = field(default_factory=Impurity)
    custom: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def __post_init__(self):
        if not (0 < self.B < 1):
            raise ValueError(f"B must lie in (0,1), got {self.B}")
        if not (self.B <= self.b <= 1 / self.B):
            raise ValueError(f"b={self.b} is outside [B, 1/B] with B={self.B}")

    def __call__(self, pts) -> np.ndarray:
        x = np.asarray(pts, dtype=complex)
        out = self.custom(x) if self.custom is not None else self.outside(x)
        out = np.asarray(out, dtype=float)
        if self.impurity is None:
            return out
        return np.where(self.impurity.contains(x), self.b ** 2, out)

    # factories -----------------------------------------------------------
    @classmethod
    def disk(cls, b: float, B: Optional[float] = None, outside: float = 1.0) -> "PinningWeight":
        """The circular impurity weight: ``b**2`` in the unit disk, constant outside."""
        if B is None:
            B = min(b, 1 / b, math.sqrt(outside), 1 / math.sqrt(outside), 0.5)
        return cls(b=b, B=B, outside=OutsideField("constant", outside, outside),
                   name=f"disk(b={b:g})")

    @classmethod
    def checkerboard(cls, b: float, B: float, cell: float = 1.0,
                     impurity: Optional[Impurity] = None) -> "PinningWeight":
        return cls(b=b, B=B, outside=OutsideField("checkerboard", B ** 2, B ** -2, cell),
                   impurity=impurity or Impurity.unit_disk(), name=f"checkerboard(B={B:g})")

    @classmethod
    def radial_stripes(cls, B: float, ratio: float = 2.0) -> "PinningWeight":
        return cls(b=1.0, B=B, outside=OutsideField("radial_stripes", B ** 2, B ** -2, ratio),
                   impurity=None, name=f"radial_stripes(B={B:g})")

    @classmethod
    def angular_sectors(cls, B: float, count: int = 4) -> "PinningWeight":
        return cls(b=1.0, B=B, outside=OutsideField("angular_sectors", B ** 2, B ** -2, count=count),
                   impurity=None, name=f"angular_sectors(B={B:g},k={count})")

    @classmethod
    def polar_checkerboard(cls, B: float, ratio: float = 2.0, count: int = 8) -> "PinningWeight":
        return cls(b=1.0, B=B, outside=OutsideField("polar_checkerboard", B ** 2, B ** -2, ratio, count),
                   impurity=None, name=f"polar_checkerboard(B={B:g},k={count})")

    @classmethod
    def constant(cls, value: float = 1.0, B: float = 0.5) -> "PinningWeight":
        return cls(b=math.sqrt(value), B=B, outside=OutsideField("constant", value, value),
                   impurity=None, name=f"constant({value:g})")

    # checks --------------------------------------------------------------
    @property
    def is_disk_weight(self) -> bool:
        """True for the weight of the closed forms: b^2 on the unit disk, 1 outside."""
        return (self.impurity is not None and self.impurity.is_unit_disk
                and self.custom is None and self.outside.kind == "constant"
                and self.outside.lo == 1.0)

    def check(self, extent: float = 4.0, n: int = 4001, seed: int = 0) -> None:
        """Sample the field and raise ValueError if an invariant is violated."""
        rng = np.random.default_rng(seed)
        pts = extent * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n))
        vals = self(pts)
        lo, hi = self.B ** 2, self.B ** -2
        if np.any(vals < lo * (1 - 1e-12)) or np.any(vals > hi * (1 + 1e-12)):
            raise ValueError("weight leaves [B^2, B^-2]")
        if self.impurity is not None:
            inside = pts[self.impurity.contains(pts)]
            if inside.size and not np.allclose(self(inside), self.b ** 2, rtol=0, atol=0):
                raise ValueError("weight differs from b^2 inside the impurity")


# --------------------------------------------------------------------------
# domain and validation

@dataclass(frozen=True)
class DomainSpec:
    """Outer radius ``R`` and core radius ``rho`` around an impurity.

    ``R`` and ``rho`` may be None when only the closed forms are needed.
    """

    impurity: Impurity = field(default_factory=Impurity)
    R: Optional[float] = None
    rho: Optional[float] = None

    @property
    def R0(self) -> float:
        return max(1.0, 100.0 * self.impurity.diameter)


def _rho0(cfg: VortexConfig, impurity: Impurity) -> float:
    cands = [1.0, cfg.min_separation()]
    cands.extend(impurity.boundary_distance(z) for z in cfg.points)
    return 1e-2 * min(cands)


class RegimeLabel(enum.Enum):
    AllZeroDegrees = "AllZeroDegrees"
    SingleActiveVortex = "SingleActiveVortex"
    MixedSignUnbounded = "MixedSignUnbounded"
    FlatBEqualsOne = "FlatBEqualsOne"
    InfimumNotAttainedBEqualsOne = "InfimumNotAttainedBEqualsOne"
    BoundaryEscapeBGreaterOne = "BoundaryEscapeBGreaterOne"
    ConfinedBLessOne = "ConfinedBLessOne"


@dataclass(frozen=True)
class ValidatedConfig:
    cfg: VortexConfig
    domain: DomainSpec
    R0: float
    rho0: float
    strict: bool = False

    @property
    def points(self):
        return self.cfg.points

    @property
    def degrees(self):
        return self.cfg.degrees


def validate_config(cfg, dom: Optional[DomainSpec] = None, strict: bool = False) -> ValidatedConfig:
    """Check a configuration against a domain and compute ``R0`` and ``rho0``.

    In the default (desk-scale) mode the radii only need ``closure(omega)`` inside
    ``B_R`` and closed core disks that are disjoint and inside the impurity.
    ``strict=True`` additionally enforces ``R > R0`` and ``rho < rho0``.

    Raises
    ------
    DuplicatePoint, PointOutsideImpurity, RadiusOutOfRange
    """
    if isinstance(cfg, ValidatedConfig):
        if dom is None or dom == cfg.domain:
            return validate_config(cfg.cfg, cfg.domain, strict=strict or cfg.strict)
        cfg = cfg.cfg
    dom = dom if dom is not None else DomainSpec()
    pts = cfg.points
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if pts[i] == pts[j]:
                raise DuplicatePoint(f"z[{i}] == z[{j}] == {pts[i]}")
    inside = dom.impurity.contains(np.array(pts))
    if not np.all(inside):
        bad = int(np.flatnonzero(~inside)[0])
        raise PointOutsideImpurity(f"z[{bad}] = {pts[bad]} is not inside the impurity")

    R0 = dom.R0
    rho0 = _rho0(cfg, dom.impurity)
    if dom.R is not None:
        floor = R0 if strict else max(1.0, dom.impurity.bounding_radius)
        if not dom.R > floor:
            raise RadiusOutOfRange(f"R={dom.R} must exceed {floor:g} (R0={R0:g})")
    if dom.rho is not None:
        rho = dom.rho
        if not rho > 0:
            raise RadiusOutOfRange("rho must be positive")
        if strict and not rho < rho0:
            raise RadiusOutOfRange(f"rho={rho} must be below rho0={rho0:g}")
        for i, z in enumerate(pts):
            if not rho < dom.impurity.boundary_distance(z):
                raise RadiusOutOfRange(f"core disk around z[{i}] leaves the impurity")
        if not cfg.min_separation() > 2 * rho:
            raise RadiusOutOfRange("core disks overlap")
    return ValidatedConfig(cfg=cfg, domain=dom, R0=R0, rho0=rho0, strict=strict)
