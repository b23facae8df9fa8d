import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from alphapart.asym import c1_c2_constants, mu_sigma_sums, predict, sigma2_from_partials
from alphapart.core import AlphaParams
from alphapart.saddle import solve_saddle


def test_c1_closed_form_half():
    c1, _ = c1_c2_constants(AlphaParams.parse("1/2"))
    expected = (math.pi ** 2 / 6) * (3 * float(mpmath.zeta(3))) ** (-2 / 3)
    assert abs(c1 - expected) < 1e-9


@given(alpha=st.floats(0.2, 0.9))
def test_variance_constant_below_mean_constant(alpha):
    c1, c2 = c1_c2_constants(AlphaParams.from_float(alpha))
    assert 0 < c2 < c1


@pytest.mark.parametrize("alpha", ["1/2", "0.7", "1/3"])
@pytest.mark.parametrize("n", [100, 10 ** 4, 10 ** 6])
def test_sigma2_identity(alpha, n):
    params = AlphaParams.parse(alpha)
    eta = solve_saddle(params, n).r
    _, s2 = mu_sigma_sums(params, eta)
    assert abs(s2 / sigma2_from_partials(params, eta) - 1) < 1e-9


@pytest.mark.parametrize("alpha", ["1/2", "0.7"])
def test_leading_constants_are_limits(alpha):
    params = AlphaParams.parse(alpha)
    gaps = []
    for n in (10 ** 3, 10 ** 5, 10 ** 6):
        e = predict(params, n)
        gaps.append((abs(e.mu_n / e.mu_leading - 1), abs(e.sigma2_n / e.sigma2_leading - 1)))
    assert gaps[0][0] > gaps[1][0] > gaps[2][0]
    assert gaps[0][1] > gaps[1][1] > gaps[2][1]
    assert gaps[-1][0] < 0.01 and gaps[-1][1] < 0.01


def test_predict_fields():
    e = predict(AlphaParams.parse("1/2"), 10 ** 4)
    assert e.exponent == pytest.approx(2 / 3)
    assert e.to_dict()["n"] == 10 ** 4
