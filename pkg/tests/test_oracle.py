import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from renorm_micro.core import DomainSpec, Impurity, PinningWeight, VortexConfig
from renorm_micro.disk_energy import w_micro_closed
from renorm_micro.errors import HoleOverlap, LoopCrossesHole, ResolutionTooCoarse
from renorm_micro.oracle import (Circle, GridLoop, GridOptions, NodeState, annulus_comparison, build_grid,
                                 build_ring_grid, discrete_energy, expansion_residual, f_of_R,
                                 richardson, solve_phase, total_energy, winding_check)

CART = GridOptions(geometry="cartesian")
POLAR = GridOptions()
DISK = PinningWeight.disk(0.5)


def hole_loop(grid, hole, pad=1.5):
    """Closed grid path of unknowns around ``hole`` (cartesian grids)."""
    c, r = hole.center, hole.radius * pad
    i0, i1 = np.searchsorted(grid.x, [c.real - r, c.real + r])
    j0, j1 = np.searchsorted(grid.y, [c.imag - r, c.imag + r])
    ij = [(i, j0) for i in range(i0, i1)] + [(i1, j) for j in range(j0, j1)]
    ij += [(i, j1) for i in range(i1, i0, -1)] + [(i0, j) for j in range(j1, j0, -1)]
    return [int(grid.node_index[j, i]) for i, j in ij]


def plaquette_circulations(grid):
    """Circulation of the singular phase around every complete grid cell."""
    ni = grid.node_index
    a, b, c, d = ni[:-1, :-1], ni[:-1, 1:], ni[1:, 1:], ni[1:, :-1]
    ok = (a >= 0) & (b >= 0) & (c >= 0) & (d >= 0)
    a, b, c, d = a[ok], b[ok], c[ok], d[ok]
    total = np.zeros(a.size)
    present = np.ones(a.size, dtype=bool)
    for p, q in ((a, b), (b, c), (c, d), (d, a)):
        k, s = grid.edge_lookup(p, q)
        present &= k >= 0
        total += np.where(k >= 0, s * grid.dtheta[np.maximum(k, 0)], 0.0)
    return total[present]


# ---------------------------------------------------------------------------
# grid

def test_circulation_single_hole():
    cfg = VortexConfig([0], [1])
    dom = DomainSpec(Impurity(), R=4, rho=0.25)
    g = build_grid(dom, cfg, 0.03125, options=CART)
    assert g.h == 0.03125
    assert g.circulation(hole_loop(g, g.holes[0])) == pytest.approx(2 * math.pi, abs=1e-8)


def test_circulation_dipole_and_empty_loop():
    cfg = VortexConfig([0.4, -0.4], [1, -1])
    dom = DomainSpec(Impurity(), R=4, rho=0.05)
    g = build_grid(dom, cfg, 0.05 / 8, options=CART)
    assert g.circulation(hole_loop(g, g.holes[0])) == pytest.approx(2 * math.pi, abs=1e-8)
    assert g.circulation(hole_loop(g, g.holes[1])) == pytest.approx(-2 * math.pi, abs=1e-8)
    empty = hole_loop(g, Circle(0.0 + 0.5j, 0.1))
    assert g.circulation(empty) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("options", [CART, POLAR], ids=["cartesian", "logpolar"])
def test_plaquettes_curl_free(options):
    cfg = VortexConfig([0.3, -0.2j], [2, -1])
    g = build_grid(DomainSpec(Impurity(), R=5, rho=0.04), cfg, 0.005, options=options)
    circ = plaquette_circulations(g)
    assert circ.size > 1000
    assert np.max(np.abs(circ)) < 1e-10


def test_grid_errors():
    cfg = VortexConfig([0.3], [1])
    with pytest.raises(ResolutionTooCoarse):
        build_grid(DomainSpec(Impurity(), R=5, rho=0.04), cfg, 0.006)
    with pytest.raises((HoleOverlap, Exception)):
        build_grid(DomainSpec(Impurity(), R=5, rho=0.2), VortexConfig([0.1, -0.1], [1, 1]), 0.02)


def test_nodes_lie_in_domain():
    cfg = VortexConfig([0.5, -0.3j], [1, 1])
    for opts in (CART, POLAR):
        g = build_grid(DomainSpec(Impurity(), R=6, rho=0.03), cfg, 0.03 / 8, options=opts)
        inside = g.node_index[g.state == NodeState.INTERIOR]
        p = g.plane_nodes[inside[inside >= 0]]
        assert p.size > 1000
        assert np.all(np.abs(p) <= 6 * (1 + 1e-12))
        for z in cfg.points:
            assert np.all(np.abs(p - z) > 0.03 * (1 - 1e-12))


# ---------------------------------------------------------------------------
# solve

def test_zero_degrees_give_zero():
    cfg = VortexConfig([0.3, -0.3], [0, 0])
    g = solve_phase(build_grid(DomainSpec(Impurity(), R=4, rho=0.05), cfg, 0.05 / 8), DISK)
    assert np.allclose(g.phi, 0.0, atol=1e-12)
    assert total_energy(g) == pytest.approx(0.0, abs=1e-12)


def test_radial_case_exact():
    cfg = VortexConfig([0], [1])
    R, rho = 25.0, 1e-2
    # passing the weight puts a grid line on its jump at |x| = 1
    g = solve_phase(build_grid(DomainSpec(Impurity(), R=R, rho=rho), cfg, rho / 8, weight=DISK), DISK)
    assert np.max(np.abs(g.phi)) < 1e-10
    expect = math.pi * math.log(R) + 0.25 * math.pi * math.log(1 / rho)
    assert total_energy(g) == pytest.approx(expect, rel=1e-12)


def test_radial_case_cartesian_converges():
    cfg = VortexConfig([0], [1])
    dom = DomainSpec(Impurity(), R=4, rho=0.25)
    expect = math.pi * math.log(4) + 0.25 * math.pi * math.log(4)
    errs = [abs(total_energy(solve_phase(build_grid(dom, cfg, 0.03125, k, CART), DISK)) - expect)
            for k in range(2)]
    assert errs[1] < errs[0] and errs[1] < 0.02


@pytest.fixture(scope="module")
def solved():
    cfg = VortexConfig([0.4, -0.3j], [1, 1])
    return solve_phase(build_grid(DomainSpec(Impurity(), R=5, rho=0.05), cfg, 0.05 / 8), DISK)


def test_residual_small(solved):
    assert solved.residual <= 1e-10


def test_energy_is_strict_minimum(solved):
    rng = np.random.default_rng(0)
    e0 = discrete_energy(solved, solved.alpha)
    for _ in range(20):
        k = rng.integers(solved.n_nodes)
        for eps in (1e-3, -1e-3):
            phi = solved.phi.copy()
            phi[k] += eps
            assert discrete_energy(solved, solved.alpha, phi) > e0
    pert = rng.normal(size=solved.n_nodes) * 1e-3
    assert discrete_energy(solved, solved.alpha, solved.phi + pert) > e0
    # constants are the kernel
    assert discrete_energy(solved, solved.alpha, solved.phi + 0.7) == pytest.approx(e0, rel=1e-12)


@given(st.floats(0.1, 10.0))
@settings(max_examples=5)
def test_alpha_scaling(c):
    cfg = VortexConfig([0.4], [1])
    grid = build_grid(DomainSpec(Impurity(), R=4, rho=0.05), cfg, 0.05 / 8)
    base = PinningWeight.disk(0.5)
    scaled = PinningWeight(b=0.5 * math.sqrt(c), B=min(0.5 * math.sqrt(c), 1 / (0.5 * math.sqrt(c)), 0.5),
                           custom=lambda p: c * base(p))
    e1 = total_energy(solve_phase(grid, base), corrected=False)
    e2 = total_energy(solve_phase(grid, scaled), corrected=False)
    assert e2 == pytest.approx(c * e1, rel=1e-9)


def test_rotation_by_quarter_turn():
    cfg = VortexConfig([0.4 + 0.1j, -0.2], [1, 2])
    dom = DomainSpec(Impurity(), R=4, rho=0.05)
    e = [total_energy(solve_phase(build_grid(dom, c, 0.05 / 8, options=CART), DISK))
         for c in (cfg, cfg.rotated(math.pi / 2))]
    assert e[1] == pytest.approx(e[0], rel=1e-10)


# ---------------------------------------------------------------------------
# f(R), expansion, winding, annulus

def test_f_constant_weight_exact():
    for R in (10.0, 25.0):
        assert f_of_R(DISK, Impurity(), R, 2 * math.pi / 128) == pytest.approx(math.pi * math.log(R), rel=1e-12)


def test_f_increasing_and_bracketed():
    w = PinningWeight.checkerboard(0.5, 0.5)
    f10, f25 = (f_of_R(w, Impurity(), R, 2 * math.pi / 128) for R in (10.0, 25.0))
    assert f25 > f10
    for R, f in ((10.0, f10), (25.0, f25)):
        assert 0.25 * math.pi * math.log(R) <= f <= 4 * math.pi * math.log(R)


def test_f_cartesian_route():
    f = f_of_R(DISK, Impurity(), 10.0, 0.05, options=CART)
    assert f == pytest.approx(math.pi * math.log(10), abs=0.03)


def test_f_ellipse_between_disks():
    # the ellipse sits between the disks of radius 1/2 and 1, so f lies between
    w = PinningWeight.constant(1.0)
    f = f_of_R(w, Impurity(shape="ellipse", a=1.0, b=0.5), 10.0, 0.05)
    assert math.pi * math.log(10) < f < math.pi * math.log(20)


def test_expansion_radial():
    cfg = VortexConfig([0], [1])
    dom = DomainSpec(Impurity(), R=10.0, rho=0.02)
    e = expansion_residual(dom, cfg, DISK, 0.02 / 8)
    assert abs(e.residual) < 1e-10
    assert e.reconstruct() == pytest.approx(e.total, rel=1e-12)


def test_expansion_off_center_small():
    cfg = VortexConfig([0.4], [1])
    dom = DomainSpec(Impurity(), R=10.0, rho=0.02)
    e = expansion_residual(dom, cfg, DISK, 0.02 / 8)
    assert e.w_micro == w_micro_closed(cfg, 0.5)
    assert abs(e.residual) < 0.01


def test_winding_numbers():
    cfg = VortexConfig([0.4, -0.4], [1, 2])
    g = solve_phase(build_grid(DomainSpec(Impurity(), R=5, rho=0.05), cfg, 0.05 / 8, options=CART), DISK)
    assert winding_check(g, GridLoop(0.3, 0.5, -0.1, 0.1)) == 1
    assert winding_check(g, GridLoop(-0.5, -0.3, -0.1, 0.1)) == 2
    assert winding_check(g, GridLoop(-2, 2, -2, 2)) == 3
    assert winding_check(g, GridLoop(0.1, 0.2, 0.5, 0.9)) == 0
    with pytest.raises(LoopCrossesHole):
        winding_check(g, GridLoop(0.4, 0.6, -0.1, 0.1))


def test_winding_logpolar_circles():
    cfg = VortexConfig([0.4, -0.4j], [1, -3])
    g = solve_phase(build_grid(DomainSpec(Impurity(), R=5, rho=0.05), cfg, 0.05 / 8), DISK)
    assert winding_check(g, GridLoop(math.log(3), math.log(3), 0, 2 * math.pi)) == -2
    assert winding_check(g, GridLoop(math.log(0.1), math.log(0.1), 0, 2 * math.pi)) == 0
    assert winding_check(g, GridLoop(math.log(0.3), math.log(0.5), -0.2, 0.2)) == 1


def test_annulus_constant_weight():
    w = PinningWeight.constant(1.0)
    res = annulus_comparison(w, 1.0, 8.0, 0.05)
    assert res.mu == pytest.approx(math.pi * math.log(8), rel=1e-12)
    assert res.mu_dir == pytest.approx(res.mu, rel=1e-12)


@pytest.mark.parametrize("w", [PinningWeight.angular_sectors(0.5, 3),
                               PinningWeight.checkerboard(0.5, 0.5)], ids=["sectors", "checkerboard"])
def test_annulus_order(w):
    res = annulus_comparison(w, 1.0, 6.0, 0.05)
    assert res.mu <= res.mu_dir + 1e-9


def test_richardson_second_order():
    vals = [1.0 + 0.3 * h ** 2 + 0.01 * h ** 3 for h in (1.0, 0.5, 0.25)]
    r = richardson(vals)
    assert r.value == pytest.approx(1.0, abs=2e-3)
    with pytest.raises(ValueError):
        richardson([1.0])
