import math

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from renorm_micro.core import (DomainSpec, Impurity, OutsideField, PinningWeight, VortexConfig,
                               total_degree, validate_config)
from renorm_micro.errors import DuplicatePoint, PointOutsideImpurity, RadiusOutOfRange

from strategies import configs


def test_config_shape_checks():
    with pytest.raises(ValueError):
        VortexConfig([], [])
    with pytest.raises(ValueError):
        VortexConfig([0.1, 0.2], [1])
    with pytest.raises(ValueError):
        VortexConfig([0.1], [1.5])
    cfg = VortexConfig([0.1, 0.2j], [1, -2])
    assert cfg.n == 2 and total_degree(cfg) == -1
    assert cfg.d.dtype.kind == "i"


def test_validation_errors():
    with pytest.raises(DuplicatePoint):
        validate_config(VortexConfig([0.3, 0.3], [1, 1]))
    with pytest.raises(PointOutsideImpurity):
        validate_config(VortexConfig([1.2], [1]))
    with pytest.raises(RadiusOutOfRange):
        validate_config(VortexConfig([0.3], [1]), DomainSpec(Impurity(), R=0.8, rho=1e-3))
    with pytest.raises(RadiusOutOfRange):
        validate_config(VortexConfig([0.3, -0.3], [1, 1]), DomainSpec(Impurity(), R=10, rho=0.4))


def test_strict_mode_needs_large_R():
    cfg = VortexConfig([0.3], [1])
    validate_config(cfg, DomainSpec(Impurity(), R=25, rho=1e-2))
    with pytest.raises(RadiusOutOfRange):
        validate_config(cfg, DomainSpec(Impurity(), R=25, rho=1e-2), strict=True)
    v = validate_config(cfg, DomainSpec(Impurity(), R=500, rho=1e-4), strict=True)
    assert v.R0 == 200.0 and v.rho0 == pytest.approx(7e-3)


def test_ellipse_impurity():
    imp = Impurity(shape="ellipse", a=1.0, b=0.5)
    assert imp.contains(np.array([0.9, 0.4j])).all()
    assert not imp.contains(np.array([0.6j]))[0]
    assert imp.bounding_radius == 1.0


@pytest.mark.parametrize("w", [
    PinningWeight.disk(0.5),
    PinningWeight.checkerboard(0.5, 0.5),
    PinningWeight.radial_stripes(0.5),
    PinningWeight.angular_sectors(0.5, 6),
    PinningWeight.constant(2.0, 0.5),
])
def test_weights_respect_bounds(w):
    w.check(extent=30.0)


def test_disk_weight_values():
    w = PinningWeight.disk(0.5)
    assert w(np.array([0.2 + 0.1j]))[0] == 0.25
    assert w(np.array([3.0]))[0] == 1.0
    assert w.is_disk_weight
    assert not PinningWeight.checkerboard(0.5, 0.5).is_disk_weight


def test_outside_field_kinds():
    cb = OutsideField("checkerboard", 0.25, 4.0, 1.0)
    v = cb(np.array([0.5 + 0.5j, 1.5 + 0.5j]))
    assert set(v) == {0.25, 4.0}
    rs = OutsideField("radial_stripes", 0.25, 4.0, 2.0)
    assert rs(np.array([1.5]))[0] != rs(np.array([3.0]))[0]


@given(configs())
def test_validation_accepts_generated(cfg):
    v = validate_config(cfg)
    assert v.points == cfg.points and v.degrees == cfg.degrees
    assert 0 < v.rho0 <= 1e-2


@given(st.floats(0.0, 2 * math.pi), configs())
def test_rotation_helpers(theta, cfg):
    rot = cfg.rotated(theta)
    assert np.allclose(np.abs(rot.z), np.abs(cfg.z))
    assert cfg.negated().negated() == cfg
