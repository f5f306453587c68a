import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genconv.families import delta_conv
from genconv.kernels import gen_char_fn, make
from genconv.measures import (ContinuousComponent, MeasureError, build, cdf, dirac, pareto, pow_law,
                              single)
from genconv.williamson import (AlphaMismatchError, CdfPair, DiscontinuityError, MAX_DEPTH,
                                g_by_quadrature, kendall_convolve, kendall_pair_of, williamson,
                                williamson_invert)


def test_williamson_of_dirac():
    assert williamson(dirac(1.0), 1.0, 0.25) == 0.75
    assert williamson(dirac(2.0), 2.0, 1.0) == 0.0
    assert williamson(dirac(2.0), 2.0, 0.0) == 1.0
    with pytest.raises(MeasureError):
        williamson(dirac(1.0), 0.0, 0.5)
    with pytest.raises(MeasureError):
        williamson(dirac(1.0), 1.0, -0.5)


@pytest.mark.parametrize("m", [pareto(2.0), pareto(0.7), pow_law(1.5), single("frechet_like", 2.0),
                               build([(0.5, 0.3)], [(0.7, ContinuousComponent("pareto", (3.0,), scale=2.0))])])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.5])
def test_williamson_is_the_kendall_characteristic_function(m, alpha):
    spec = make("kendall", alpha=alpha)
    for t in (0.1, 0.6, 1.3):
        assert williamson(m, alpha, t) == pytest.approx(gen_char_fn(spec, m, t), abs=1e-10)


@pytest.mark.parametrize("m", [pareto(2.0), pow_law(0.8), single("weibull_kernel", 1.0, 2.0)])
def test_partner_g_closed_form_agrees_with_quadrature(m):
    alpha = 1.3
    pair = kendall_pair_of(m, alpha)
    for t in (0.4, 1.0, 1.7, 6.0):
        assert pair.G(t) == pytest.approx(g_by_quadrature(m, alpha, t), abs=1e-10)
        assert pair.G(t) == pytest.approx(williamson(m, alpha, 1.0 / t), abs=1e-12)


@pytest.mark.parametrize("a", [0.5, 1.0, 3.0])
def test_round_trip_dirac(a):
    pair = kendall_pair_of(dirac(a), 1.0)
    for t in np.linspace(0.05, 6.0, 37):
        if abs(t - a) < 1e-3:
            continue
        assert pair.invert(t) == pytest.approx(float(t >= a), abs=1e-6)
        # the finite-difference route needs no analytic derivative
        assert williamson_invert(pair.G, 1.0, t) == pytest.approx(float(t >= a), abs=1e-6)


@pytest.mark.parametrize("alpha", [0.5, 2.0])
def test_round_trip_pow(alpha):
    m = pow_law(alpha)
    G = lambda t: williamson(m, alpha, 1.0 / t)  # noqa: E731
    for t in (0.1, 0.5, 0.9, 1.4):
        assert williamson_invert(G, alpha, t) == pytest.approx(cdf(m, t), abs=1e-6)


def test_invert_rejects_breakpoints_and_nonpositive_t():
    pair = kendall_pair_of(dirac(1.0), 1.0)
    with pytest.raises(DiscontinuityError):
        pair.invert(1.0)
    with pytest.raises(MeasureError):
        pair.invert(0.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_dirac_one_squared_is_pareto(alpha):
    one = kendall_pair_of(dirac(1.0), alpha)
    conv = kendall_convolve(one, one)
    ts = np.linspace(1.0, 50.0, 99)
    np.testing.assert_allclose(conv.F(ts), 1 - ts ** (-2 * alpha), atol=1e-12)
    assert conv.F(0.9) == 0.0


def test_convolution_of_diracs_matches_point_rule():
    alpha = 1.0
    pair = kendall_convolve(kendall_pair_of(dirac(0.5), alpha), kendall_pair_of(dirac(1.0), alpha))
    ref = delta_conv(make("kendall", alpha=alpha), 0.5, 1.0)
    ts = np.array([0.7, 1.0, 1.2, 3.0, 10.0])
    np.testing.assert_allclose(pair.F(ts), cdf(ref, ts), atol=1e-14)


@pytest.mark.parametrize("m1,m2", [(pareto(2.0), pow_law(2.0)), (pow_law(1.0), dirac(0.7)),
                                   (pareto(1.5), pareto(3.0))])
def test_convolved_f_is_the_inverse_of_the_product(m1, m2):
    alpha = 1.0
    p = kendall_convolve(kendall_pair_of(m1, alpha), kendall_pair_of(m2, alpha))
    for t in (0.3, 0.85, 1.6, 4.0):
        assert p.F(t) == pytest.approx(williamson_invert(p.G, alpha, t), abs=1e-6)
        assert p.F(t) == pytest.approx(p.invert(t), abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 3), st.floats(0.2, 3), st.floats(0.3, 30))
def test_convolution_is_commutative_and_monotone(b1, b2, t):
    alpha = 0.8
    p, q = kendall_pair_of(pareto(b1), alpha), kendall_pair_of(pareto(b2), alpha)
    assert kendall_convolve(p, q).F(t) == pytest.approx(kendall_convolve(q, p).F(t), abs=1e-15)
    assert kendall_convolve(p, q).F(t) <= kendall_convolve(p, q).F(t * 1.1) + 1e-12


def test_alpha_mismatch_and_depth_limit():
    with pytest.raises(AlphaMismatchError):
        kendall_convolve(kendall_pair_of(dirac(1.0), 1.0), kendall_pair_of(dirac(1.0), 2.0))
    pair = kendall_pair_of(dirac(1.0), 1.0)
    for _ in range(MAX_DEPTH):
        pair = kendall_convolve(pair, kendall_pair_of(dirac(1.0), 1.0))
    with pytest.raises(MeasureError):
        kendall_convolve(pair, pair)


def test_pair_of_rejects_bad_alpha():
    with pytest.raises(MeasureError):
        kendall_pair_of(dirac(1.0), -1.0)


def test_pair_is_a_frozen_value():
    pair = kendall_pair_of(pareto(2.0), 1.0)
    assert isinstance(pair, CdfPair)
    with pytest.raises(AttributeError):
        pair.alpha = 3.0
    assert math.isclose(pair.F(2.0), 0.75)


def test_partner_g_matches_monte_carlo_transform_of_sampled_convolution():
    from genconv.samplers import make_rng, sample_measure_conv
    alpha = 1.0
    m1, m2 = pareto(2.0), pow_law(2.0)
    pair = kendall_convolve(kendall_pair_of(m1, alpha), kendall_pair_of(m2, alpha))
    draws = sample_measure_conv(make("kendall", alpha=alpha), m1, m2, 100_000, make_rng(21))
    for t in (0.8, 1.5, 3.0, 8.0):
        # the Kendall characteristic function of the sample at 1/t
        emp = np.mean(np.clip(1 - (draws / t) ** alpha, 0, None))
        assert emp == pytest.approx(pair.G(t), abs=4 / math.sqrt(draws.size))
