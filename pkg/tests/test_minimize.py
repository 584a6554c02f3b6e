import math

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from renorm_micro.core import RegimeLabel, VortexConfig
from renorm_micro.disk_energy import w_micro_closed, w_micro_gradient
from renorm_micro.errors import DomainError, WrongRegime, ZeroDegree
from renorm_micro.minimize import (SolverOptions, Status, align_rotation, classify_regime, gauge_fix,
                                   minimize_numeric, n1_minimizer, n2_parameters,
                                   n2_positive_minimizer, unboundedness_witness)

# frozen: p=1, q=2, b^2=1/2 evaluated in 40-digit arithmetic
N2_12_LAMBDA = 0.75
N2_12_SIGMA0 = 0.80704995683479959046
S0_EQUAL_B2_HALF = 0.80910671157022121429  # (7/3)^(-1/4)


@pytest.mark.parametrize("degrees,b,label", [
    ((1, -1), 0.5, RegimeLabel.MixedSignUnbounded),
    ((1, -1), 3.0, RegimeLabel.MixedSignUnbounded),
    ((1, 1), 1.0, RegimeLabel.InfimumNotAttainedBEqualsOne),
    ((0, 0, 0), 0.7, RegimeLabel.AllZeroDegrees),
    ((2,), 0.5, RegimeLabel.SingleActiveVortex),
    ((0, 3), 1.0, RegimeLabel.FlatBEqualsOne),
    ((1, 2), 2.0, RegimeLabel.BoundaryEscapeBGreaterOne),
    ((1, 1, 1), 0.5, RegimeLabel.ConfinedBLessOne),
])
def test_classify(degrees, b, label):
    assert classify_regime(degrees, b) is label


def test_n1():
    r = n1_minimizer(1, 0.5)
    assert r.status is Status.Converged and r.points == (0j,) and r.value == 0.0
    assert n1_minimizer(3, 1.0).status is Status.FlatZero
    r = n1_minimizer(1, 2.0)
    assert r.status is Status.UnboundedBelow
    e = [v for _, v in r.witness_path.samples]
    assert e[0] > e[1] > e[2]
    with pytest.raises(ZeroDegree):
        n1_minimizer(0, 0.5)


def test_n2_equal_degrees():
    b = math.sqrt(0.5)
    par = n2_parameters(2, 2, b)
    assert par.lam == 1.0
    assert par.s0 == pytest.approx((1 + 4 * (1 - b * b) / (1 + b * b)) ** -0.25, rel=1e-12)
    assert par.s0 == pytest.approx(S0_EQUAL_B2_HALF, rel=1e-12)
    r = n2_positive_minimizer(1, 1, b)
    assert r.points[0] == pytest.approx(-r.points[1])


def test_n2_one_two():
    par = n2_parameters(1, 2, math.sqrt(0.5))
    assert par.lam == pytest.approx(N2_12_LAMBDA, rel=1e-14)
    assert par.sigma0 == pytest.approx(N2_12_SIGMA0, rel=1e-13)
    # brute-force the antipodal slice: z1 = s, z2 = -t
    s = np.linspace(0.005, 0.995, 199)
    S, T = np.meshgrid(s, s)
    vals = np.vectorize(lambda a, c: w_micro_closed(VortexConfig([a, -c], [1, 2]), math.sqrt(0.5)))(S, T)
    k = np.unravel_index(np.argmin(vals), vals.shape)
    r = n2_positive_minimizer(1, 2, math.sqrt(0.5))
    assert abs(S[k] - r.points[0].real) < 0.01 and abs(T[k] + r.points[1].real) < 0.01
    assert r.value <= vals.min() + 1e-12


def test_n2_domain():
    with pytest.raises(DomainError):
        n2_parameters(1, 1, 1.0)
    with pytest.raises(DomainError):
        n2_parameters(0, 1, 0.5)


def test_n2_limit_b_to_one():
    assert n2_parameters(1, 1, 1 - 1e-9).s0 == pytest.approx(1.0, abs=1e-6)


@given(st.integers(1, 6), st.integers(1, 6), st.floats(0.01, 0.99))
def test_n2_sigma_and_ordering(p, q, b):
    par = n2_parameters(p, q, b)
    assert 0 < par.sigma0 < 1
    assert par.poly(0.0) == -1.0 and par.poly(1.0) > 0
    assert abs(par.poly(par.sigma0)) < 1e-10
    z1, z2 = n2_positive_minimizer(p, q, b).points
    if p == q:
        assert abs(abs(z1) - abs(z2)) < 1e-12
    else:
        assert (abs(z1) < abs(z2)) == (p > q)


@given(st.integers(1, 3), st.integers(1, 3), st.floats(0.2, 0.9))
def test_closed_form_is_critical(p, q, b):
    r = n2_positive_minimizer(p, q, b)
    g = w_micro_gradient(VortexConfig(r.points, (p, q)), b)
    assert np.max(np.abs(g)) < 1e-9


def test_gauge_fix_examples():
    assert gauge_fix([0.5j]) == [0.5 + 0j]
    assert gauge_fix([0.3, -0.3]) == [0.3 + 0j, -0.3 + 0j]


@given(st.lists(st.complex_numbers(max_magnitude=0.9, allow_nan=False), min_size=1, max_size=5),
       st.floats(0.2, 0.9))
def test_gauge_fix_properties(pts, b):
    g = gauge_fix(pts)
    assert np.allclose(gauge_fix(g), g, atol=1e-14)
    assert np.allclose(np.abs(g), np.abs(pts))
    seps = [abs(a - c) for i, a in enumerate(pts) for c in pts[i + 1:]]
    if min(seps, default=1.0) > 1e-3:
        cfg, cfg_g = VortexConfig(pts, [1] * len(pts)), VortexConfig(g, [1] * len(pts))
        assert w_micro_closed(cfg_g, b) == pytest.approx(w_micro_closed(cfg, b), rel=1e-10, abs=1e-12)


def test_align_rotation():
    ref = [0.5, -0.5j]
    rot = [p * complex(math.cos(1.1), math.sin(1.1)) for p in ref]
    assert np.allclose(align_rotation(rot, ref), ref)


def test_witness_examples():
    w = unboundedness_witness((1, -1), 0.5)
    e = [v for _, v in w.samples]
    assert w.family == "collision" and [n for n, _ in w.samples] == [10, 100, 1000]
    assert e[0] > e[1] > e[2]
    for n, v in w.samples:
        assert v == pytest.approx(w_micro_closed(VortexConfig(w.points(n), (1, -1)), 0.5), rel=1e-12)
    w = unboundedness_witness((1, 1), 2.0)
    e = [v for _, v in w.samples]
    assert w.family == "boundary" and e[0] > e[1] > e[2]
    with pytest.raises(WrongRegime):
        unboundedness_witness((1, 1), 0.5)


def test_numeric_single():
    r = minimize_numeric([1], 0.5, SolverOptions(n_starts=8))
    assert r.status is Status.Converged and abs(r.points[0]) < 1e-8


def test_numeric_pair_matches_closed_form():
    b = math.sqrt(0.5)
    r = minimize_numeric([1, 1], b, SolverOptions(n_starts=8))
    s0 = S0_EQUAL_B2_HALF
    assert np.allclose(align_rotation(r.points, [s0, -s0]), [s0, -s0], atol=1e-6)


def test_numeric_three_symmetric():
    r = minimize_numeric([1, 1, 1], 0.5, SolverOptions(n_starts=16))
    z = np.array(r.points)
    assert np.ptp(np.abs(z)) < 1e-6
    ang = np.sort(np.mod(np.angle(z), 2 * math.pi))
    gaps = np.diff(np.append(ang, ang[0] + 2 * math.pi))
    assert np.allclose(gaps, 2 * math.pi / 3, atol=1e-6)
    collinear = w_micro_closed(VortexConfig([-0.5, 0.0, 0.5], [1, 1, 1]), 0.5)
    assert r.value < collinear
    # random search with many starts does not beat it
    rng = np.random.default_rng(1)
    best = math.inf
    for _ in range(1000):
        pts = 0.95 * np.sqrt(rng.uniform(0, 1, 3)) * np.exp(2j * math.pi * rng.uniform(0, 1, 3))
        best = min(best, w_micro_closed(VortexConfig(pts, [1, 1, 1]), 0.5))
    assert r.value <= best


def test_numeric_delegates():
    assert minimize_numeric([0, 0], 0.3).status is Status.FlatZero
    r = minimize_numeric([1, 1], 1.0)
    assert r.status is Status.InfimumNotAttained
    assert r.bounds == pytest.approx((-2 * math.pi * math.log(2), 0.0))
    assert minimize_numeric([1, -1], 0.5).status is Status.UnboundedBelow


def test_numeric_is_seeded():
    a = minimize_numeric([1, 2, 1], 0.4, SolverOptions(seed=5, n_starts=6))
    b = minimize_numeric([1, 2, 1], 0.4, SolverOptions(seed=5, n_starts=6))
    assert a.points == b.points and a.value == b.value and a.seed == 5


@given(st.lists(st.integers(1, 3), min_size=2, max_size=4), st.floats(0.2, 0.9))
def test_converged_results_are_valid(degrees, b):
    r = minimize_numeric(degrees, b, SolverOptions(n_starts=3))
    assert r.status is Status.Converged
    assert max(abs(p) for p in r.points) <= 1 - 1e-6
    cfg = VortexConfig(r.points, degrees)
    assert r.value == pytest.approx(w_micro_closed(cfg, b), rel=1e-9, abs=1e-12)
    assert r.grad_norm <= 1e-10 * max(1.0, abs(r.value))
