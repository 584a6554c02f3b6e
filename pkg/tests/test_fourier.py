import math

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st
from hypothesis.extra.numpy import arrays

from renorm_micro.core import VortexConfig
from renorm_micro.errors import MismatchedTruncation
from renorm_micro.fourier import (FourierPhase, dephasing_coefficients, exterior_extension_energy,
                                  h_half_seminorm_sq, interior_extension_energy, k_functional,
                                  optimal_split)

from strategies import configs

finite = st.floats(-10, 10)


@st.composite
def phases(draw, n=None):
    n = n or draw(st.integers(1, 40))
    re = draw(arrays(float, n, elements=finite))
    im = draw(arrays(float, n, elements=finite))
    return FourierPhase(re + 1j * im, draw(finite))


def test_dephasing_examples():
    assert np.all(dephasing_coefficients(VortexConfig([0], [7]), 10).coeffs == 0)
    t = 0.6
    g = dephasing_coefficients(VortexConfig([t], [1]), 12)
    n = np.arange(1, 13)
    assert np.allclose(g.coeffs, t ** n / (1j * n), rtol=1e-15)
    assert g.mean == 0.0


def test_seminorm_examples():
    assert h_half_seminorm_sq(FourierPhase(np.zeros(5))) == 0.0
    one = FourierPhase([1.0])
    assert h_half_seminorm_sq(one) == pytest.approx(2 * math.pi)
    assert interior_extension_energy(one) == exterior_extension_energy(one) == pytest.approx(2 * math.pi)
    t = 0.8
    g = dephasing_coefficients(VortexConfig([t], [1]), 400)
    assert h_half_seminorm_sq(g) == pytest.approx(-2 * math.pi * math.log1p(-t * t), rel=1e-12)


def test_split_examples():
    g = FourierPhase(np.zeros(3))
    c0, ci = optimal_split(g, 0.7)
    assert k_functional(c0, ci, 0.7) == 0.0
    g = FourierPhase([1 + 2j, -0.5j])
    c0, ci = optimal_split(g, 1.0)
    assert c0.allclose(g.scaled(-0.5)) and ci.allclose(g.scaled(0.5))


def test_mismatched_lengths():
    with pytest.raises(MismatchedTruncation):
        k_functional(FourierPhase([1.0]), FourierPhase([1.0, 2.0]), 0.5)
    with pytest.raises(MismatchedTruncation):
        FourierPhase([1.0]) + FourierPhase([1.0, 2.0])


def test_evaluate_is_real_series():
    ph = FourierPhase([1.0 + 0.5j, 0.25], mean=0.3)
    th = np.linspace(0, 2 * math.pi, 7)
    expect = 0.3 + 2 * ((1.0 * np.cos(th) - 0.5 * np.sin(th)) + 0.25 * np.cos(2 * th))
    assert np.allclose(ph.evaluate(th), expect)


@given(phases())
def test_extensions_agree(ph):
    assert interior_extension_energy(ph) == exterior_extension_energy(ph)
    assert h_half_seminorm_sq(ph) >= 0


@given(phases(), st.floats(0.05, 20))
def test_optimal_split_value(g, b):
    c0, ci = optimal_split(g, b)
    assert np.allclose((ci - c0).coeffs, g.coeffs, rtol=1e-14, atol=1e-14)
    ref = b * b / (1 + b * b) * h_half_seminorm_sq(g)
    assert k_functional(c0, ci, b) == pytest.approx(ref, rel=1e-12, abs=1e-300)


@given(st.data(), st.floats(0.05, 20))
def test_optimal_split_is_minimal(data, b):
    g = data.draw(phases())
    shift = data.draw(phases(g.n_max))
    c0, ci = optimal_split(g, b)
    best = k_functional(c0, ci, b)
    other = k_functional(c0 + shift, ci + shift, b)
    assert other >= best * (1 - 1e-12) - 1e-12
    # the all-exterior split
    assert k_functional(FourierPhase(np.zeros(g.n_max)), g, b) >= best * (1 - 1e-12)


@given(st.complex_numbers(max_magnitude=10, allow_nan=False), st.floats(0.05, 20), st.floats(1e-4, 1))
def test_mode_quadratic_strict_minimum(gamma, b, eps):
    c0 = -b * b * gamma / (1 + b * b)
    q = lambda c: abs(c) ** 2 + b * b * abs(c + gamma) ** 2  # noqa: E731
    for d in (eps, -eps, 1j * eps, -1j * eps):
        assert q(c0 + d) > q(c0)


@given(configs(n_max=3), configs(n_max=3))
def test_dephasing_additive(a, b):
    both = VortexConfig(a.points + b.points, a.degrees + b.degrees)
    ga, gb, gab = (dephasing_coefficients(c, 20) for c in (a, b, both))
    assert np.allclose((ga + gb).coeffs, gab.coeffs, rtol=1e-12, atol=1e-14)


@given(configs(), st.floats(0, 2 * math.pi))
def test_rotation_keeps_moduli(cfg, theta):
    g = dephasing_coefficients(cfg, 25)
    gr = dephasing_coefficients(cfg.rotated(theta), 25)
    assert np.allclose(np.abs(g.coeffs), np.abs(gr.coeffs), rtol=1e-10, atol=1e-14)
