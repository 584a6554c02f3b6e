"""Shared hypothesis strategies."""

import math

import hypothesis.strategies as st
from hypothesis import assume

from renorm_micro import VortexConfig


def point(rmax: float = 0.9):
    return st.tuples(st.floats(0.0, rmax), st.floats(0.0, 2 * math.pi)).map(
        lambda rt: rt[0] * complex(math.cos(rt[1]), math.sin(rt[1])))


@st.composite
def configs(draw, n_max: int = 5, rmax: float = 0.9, dmax: int = 3, min_sep: float = 1e-2,
            nonzero: bool = False):
    n = draw(st.integers(1, n_max))
    pts = draw(st.lists(point(rmax), min_size=n, max_size=n))
    for i in range(n):
        for j in range(i + 1, n):
            assume(abs(pts[i] - pts[j]) > min_sep)
    lo = 1 if nonzero else 0
    degs = draw(st.lists(st.integers(lo, dmax).flatmap(
        lambda k: st.sampled_from([k, -k])), min_size=n, max_size=n))
    return VortexConfig(pts, degs)


b_values = st.floats(0.2, 0.9)
