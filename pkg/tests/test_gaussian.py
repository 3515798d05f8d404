import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from sitcalc import (
    DiscretePMF,
    GaussianBelief,
    discretize_normal,
    kalman_correct,
    kalman_predict,
)
from sitcalc.gaussian import cell_mass, normal_cdf


def test_predict_example():
    b = kalman_predict(GaussianBelief(0.0, 1.0), 2.0, 0.5)
    assert (b.mean, b.var) == (2.0, 1.5)


def test_correct_example():
    b = kalman_correct(GaussianBelief(2.0, 1.0), 3.0, 0.5)
    assert b.mean == pytest.approx(8 / 3, abs=1e-15)
    assert b.var == pytest.approx(1 / 3, abs=1e-15)


def test_correct_equal_variances_averages():
    b = kalman_correct(GaussianBelief(0.0, 2.0), 4.0, 2.0)
    assert (b.mean, b.var) == (2.0, 1.0)


def test_invalid_variances():
    with pytest.raises(ValueError):
        GaussianBelief(0.0, 0.0)
    with pytest.raises(ValueError):
        kalman_correct(GaussianBelief(0.0, 1.0), 1.0, 0.0)
    with pytest.raises(ValueError):
        kalman_predict(GaussianBelief(0.0, 1.0), 1.0, -1.0)


def test_normal_cdf_against_scipy():
    for x in (-4.0, -1.3, 0.0, 0.7, 2.5):
        assert normal_cdf(x, 1.7) == pytest.approx(stats.norm.cdf(x, scale=1.7), abs=1e-14)


def test_centre_cell_mass_by_quadrature():
    want, _ = integrate.quad(stats.norm.pdf, -0.5, 0.5)
    assert cell_mass(0, 1.0, 1.0) == pytest.approx(want, abs=1e-12)
    assert cell_mass(0, 1.0, 1.0) == pytest.approx(0.3829, abs=1e-4)


def test_far_tail_cell_keeps_relative_precision():
    got = cell_mass(12.0, 1.0, 0.1)
    want = stats.norm.sf(11.95) - stats.norm.sf(12.05)
    assert got == pytest.approx(want, rel=1e-9)


def test_discretize_defaults():
    pmf = discretize_normal(1.0)
    assert pmf.step == pytest.approx(0.05)
    assert pmf.offsets[0] == -120 and pmf.offsets[-1] == 120
    assert math.fsum(pmf.probs) == pytest.approx(1.0, abs=1e-12)


def test_discretize_symmetric_and_moments():
    pmf = discretize_normal(1.0, step=0.25)
    assert all(pmf[k] == pmf[-k] for k in pmf.offsets)
    assert abs(pmf.mean) < 1e-15
    # a grid of width h adds about h^2/12 to the variance
    assert pmf.var == pytest.approx(1.0 + 0.25**2 / 12, abs=1e-6)
    assert pmf[999] == 0.0


def test_raw_masses_do_not_renormalize():
    raw = discretize_normal(1.0, step=0.5, halfwidth=2.0, renormalize=False)
    assert math.fsum(raw.probs) == pytest.approx(stats.norm.cdf(2.25) - stats.norm.cdf(-2.25), abs=1e-14)


def test_discretize_rejects_bad_arguments():
    with pytest.raises(ValueError):
        discretize_normal(0.0)
    with pytest.raises(ValueError):
        discretize_normal(1.0, step=1.0, halfwidth=0.5)
    with pytest.raises(ValueError, match="sum to 1"):
        DiscretePMF(1.0, (0, 1), (0.5, 0.4))


def test_variance_grows_with_sigma():
    vs = [discretize_normal(s, step=0.1).var for s in (0.5, 1.0, 2.0)]
    assert vs == sorted(vs)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(-50, 50), st.floats(0.01, 20), st.floats(-50, 50), st.floats(0.01, 20),
)
def test_correct_matches_product_of_densities(m, v, z, vs):
    b = kalman_correct(GaussianBelief(m, v), z, vs)
    assert min(v, vs) >= b.var > 0
    # posterior precision is the sum of precisions
    assert 1 / b.var == pytest.approx(1 / v + 1 / vs, rel=1e-9)
    assert min(m, z) - 1e-9 <= b.mean <= max(m, z) + 1e-9
