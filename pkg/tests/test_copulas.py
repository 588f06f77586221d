import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import kendalltau

from relcov.copulas import CopulaModel, cdf, conditional_inverse, partial1, tau_to_theta
from relcov.errors import ConfigurationError

CLAYTON2 = CopulaModel("clayton", 2.0)
CLAYTON8 = CopulaModel("clayton", 8.0)
GUMBEL1 = CopulaModel("gumbel", 1.0)
GUMBEL5 = CopulaModel("gumbel", 5.0)
ALL_MODELS = [CLAYTON2, CLAYTON8, GUMBEL1, GUMBEL5]


def test_parameter_validation():
    with pytest.raises(ConfigurationError):
        CopulaModel("clayton", 0.0)
    with pytest.raises(ConfigurationError):
        CopulaModel("clayton", -1.0)
    with pytest.raises(ConfigurationError):
        CopulaModel("gumbel", 0.99)
    with pytest.raises(ConfigurationError):
        CopulaModel("frank", 2.0)
    with pytest.raises(ConfigurationError):
        CopulaModel("clayton", float("nan"))


def test_tau_maps():
    assert tau_to_theta("clayton", 0.8) == pytest.approx(8.0, rel=1e-12)
    assert tau_to_theta("gumbel", 0.8) == pytest.approx(5.0, rel=1e-12)
    assert tau_to_theta("gumbel", 0.0) == 1.0
    with pytest.raises(ConfigurationError):
        tau_to_theta("clayton", 0.0)
    with pytest.raises(ConfigurationError):
        tau_to_theta("clayton", 1.0)
    with pytest.raises(ConfigurationError):
        tau_to_theta("gumbel", 1.0)
    with pytest.raises(ConfigurationError):
        tau_to_theta("gumbel", -0.1)


@pytest.mark.parametrize("model", ALL_MODELS)
@pytest.mark.parametrize("s", [0.0, 0.17, 0.5, 0.83, 1.0])
def test_boundary_identities(model, s):
    assert cdf(model, s, 1.0) == s
    assert cdf(model, 1.0, s) == s
    assert cdf(model, s, 0.0) == 0.0
    assert cdf(model, 0.0, s) == 0.0


def test_cdf_point_values():
    assert cdf(CLAYTON8, 0.5, 1.0) == 0.5
    assert cdf(GUMBEL1, 0.3, 0.7) == pytest.approx(0.21, abs=1e-12)
    assert cdf(CLAYTON2, 0.5, 0.5) == pytest.approx(7.0**-0.5, abs=1e-14)


def test_partial1_point_values():
    # independence copula: d1(s1*s2) = s2
    for s1, s2 in [(0.2, 0.9), (0.7, 0.3), (0.5, 0.5)]:
        assert partial1(GUMBEL1, s1, s2) == pytest.approx(s2, abs=1e-12)
    assert partial1(CLAYTON2, 0.5, 0.5) == pytest.approx(8.0 * 7.0**-1.5, abs=1e-12)
    for model in ALL_MODELS:
        assert partial1(model, 0.37, 1.0) == 1.0


def test_cdf_rejects_out_of_range():
    with pytest.raises(ValueError):
        cdf(CLAYTON2, -0.1, 0.5)
    with pytest.raises(ValueError):
        cdf(CLAYTON2, 0.5, 1.2)


@pytest.mark.parametrize("model", ALL_MODELS)
def test_two_increasing(model):
    grid = np.linspace(0.025, 0.975, 20)
    c = cdf(model, grid[:, None], grid[None, :])
    rect = c[1:, 1:] - c[:-1, 1:] - c[1:, :-1] + c[:-1, :-1]
    assert rect.min() >= -1e-12


@pytest.mark.parametrize("model", ALL_MODELS)
def test_partial1_matches_finite_difference(model):
    rng = np.random.default_rng(5)
    s1 = rng.uniform(0.05, 0.95, 200)
    s2 = rng.uniform(0.05, 0.95, 200)
    h = 1e-6
    fd = (cdf(model, s1 + h, s2) - cdf(model, s1 - h, s2)) / (2 * h)
    np.testing.assert_allclose(partial1(model, s1, s2), fd, atol=1e-5)


@pytest.mark.parametrize("model", ALL_MODELS)
def test_conditional_inverse_round_trip(model):
    rng = np.random.default_rng(11)
    v2 = rng.uniform(1e-3, 1 - 1e-3, 1000)
    s1 = rng.uniform(1e-3, 1 - 1e-3, 1000)
    s2 = conditional_inverse(model, v2, s1)
    assert np.all((s2 > 0) & (s2 < 1))
    np.testing.assert_allclose(partial1(model, s1, s2), v2, atol=1e-9)


def test_conditional_inverse_independence():
    assert conditional_inverse(GUMBEL1, 0.4, 0.9) == pytest.approx(0.4, abs=1e-9)


def test_clayton_inverse_against_bisection():
    # brute-force bisection of the analytic conditional CDF
    target = conditional_inverse(CLAYTON8, 0.5, 0.5)
    lo, hi = 1e-12, 1 - 1e-12
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if partial1(CLAYTON8, 0.5, mid) < 0.5:
            lo = mid
        else:
            hi = mid
    assert target == pytest.approx(0.5 * (lo + hi), abs=1e-8)


@settings(max_examples=25, deadline=None)
@given(theta=st.floats(min_value=0.05, max_value=12.0),
       s1=st.floats(min_value=0.01, max_value=0.99),
       s2=st.floats(min_value=0.01, max_value=0.99))
def test_clayton_cdf_bounds(theta, s1, s2):
    c = cdf(CopulaModel("clayton", theta), s1, s2)
    assert max(0.0, s1 + s2 - 1.0) - 1e-12 <= c <= min(s1, s2) + 1e-12


@settings(max_examples=25, deadline=None)
@given(theta=st.floats(min_value=1.0, max_value=12.0),
       s1=st.floats(min_value=0.01, max_value=0.99),
       s2=st.floats(min_value=0.01, max_value=0.99))
def test_gumbel_cdf_bounds(theta, s1, s2):
    c = cdf(CopulaModel("gumbel", theta), s1, s2)
    assert max(0.0, s1 + s2 - 1.0) - 1e-12 <= c <= min(s1, s2) + 1e-12


@pytest.mark.slow
@pytest.mark.parametrize("family,tau", [("clayton", 0.1), ("clayton", 0.8),
                                        ("gumbel", 0.1), ("gumbel", 0.8)])
def test_sampler_kendall_and_empirical_copula(family, tau):
    model = CopulaModel.from_tau(family, tau)
    n = 100_000
    rng = np.random.default_rng(7)
    s1 = np.clip(rng.random(n), 1e-12, 1 - 1e-12)
    v2 = np.clip(rng.random(n), 1e-12, 1 - 1e-12)
    s2 = conditional_inverse(model, v2, s1)
    emp_tau = kendalltau(s1, s2).statistic
    assert abs(emp_tau - tau) <= 0.01
    # empirical copula within Kolmogorov distance 0.01 of the model CDF
    grid = np.linspace(0.05, 0.95, 19)
    worst = 0.0
    for u in grid:
        le = s1 <= u
        for v in grid:
            emp = np.mean(le & (s2 <= v))
            worst = max(worst, abs(emp - cdf(model, u, v)))
    assert worst <= 0.01
