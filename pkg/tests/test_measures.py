import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from genconv.measures import (Atom, ContinuousComponent, LAWS, MeasureError, MixtureMeasure,
                              QuadratureConfig, QuadratureError, UnboundedQuantileError, build,
                              cdf, cdf_left, dilate, dirac, mix, pareto, pow_law, quad_integrate,
                              quantile, single, total_mass)

GRID = np.linspace(0.0, 8.0, 161)


def comp(did, *params, scale=1.0):
    return ContinuousComponent(did, params, 1.0, scale)


# --- quadrature -------------------------------------------------------------

def test_quad_pareto_normalisation():
    assert quad_integrate(lambda t: 2 * t ** -3, 1, math.inf) == pytest.approx(1, abs=1e-10)


def test_quad_pow_normalisation_with_endpoint_singularity():
    assert quad_integrate(lambda x: 0.5 * x ** -0.5, 0, 1) == pytest.approx(1, abs=1e-10)


def test_quad_efkaen_density_normalised():
    a, k, n = 1.0, 2, 3
    f = lambda s: a * k * math.comb(n + k, n) * s ** (-a * (n + 1) - 1) * (1 - s ** -a) ** (k - 1)
    assert quad_integrate(f, 1, math.inf) == pytest.approx(1, abs=1e-10)


def test_quad_breakpoints_and_reversed_limits():
    step = lambda t: 1.0 if t < 0.3 else 2.0
    assert quad_integrate(step, 0, 1, breakpoints=[0.3]) == pytest.approx(1.7, abs=1e-12)
    assert quad_integrate(step, 1, 0, breakpoints=[0.3]) == pytest.approx(-1.7, abs=1e-12)
    assert quad_integrate(step, 2, 2) == 0.0


def test_quad_whole_half_line():
    assert quad_integrate(lambda t: math.exp(-t), 0, math.inf) == pytest.approx(1, abs=1e-10)


def test_quad_divergent_integral_raises():
    with pytest.raises(QuadratureError):
        quad_integrate(lambda t: 1.0 / t, 0.0, 1.0)


def test_quadrature_config_validation_and_env(monkeypatch):
    with pytest.raises(MeasureError):
        QuadratureConfig(abs_tol=0)
    with pytest.raises(MeasureError):
        QuadratureConfig(max_depth=0)
    monkeypatch.setenv("GENCONV_QUAD_TOL", "1e-7")
    cfg = QuadratureConfig.default()
    assert cfg.abs_tol == cfg.rel_tol == 1e-7


# --- base laws against scipy / mpmath ---------------------------------------

@pytest.mark.parametrize("beta", [0.5, 2.0, 3.7])
def test_pareto_cdf_and_quantile(beta):
    m = pareto(beta)
    ts = np.array([1.0, 1.5, 4.0, 30.0])
    np.testing.assert_allclose(cdf(m, ts), 1 - ts ** -beta, atol=1e-15)
    np.testing.assert_allclose(cdf(m, ts), sps.pareto(beta).cdf(ts), atol=1e-14)
    for u in (0.0, 0.25, 0.9):
        assert quantile(m, u) == pytest.approx((1 - u) ** (-1 / beta), rel=1e-13)
    assert cdf(m, 0.5) == 0.0


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.5])
def test_pow_cdf_and_quantile(alpha):
    m = pow_law(alpha)
    ts = np.linspace(0, 1, 11)
    np.testing.assert_allclose(cdf(m, ts), ts ** alpha, atol=1e-15)
    assert cdf(m, 3.0) == 1.0
    for u in (0.1, 0.5, 0.99):
        assert quantile(m, u) == pytest.approx(u ** (1 / alpha), rel=1e-13)


@pytest.mark.parametrize("alpha", [0.7, 2.0])
def test_frechet_like(alpha):
    c = comp("frechet_like", alpha)
    ts = np.array([0.3, 1.0, 2.5])
    np.testing.assert_allclose(c.cdf(ts), np.exp(-ts ** -alpha), rtol=1e-14)
    assert float(c.quantile(math.exp(-1))) == pytest.approx(1.0, rel=1e-13)
    np.testing.assert_allclose(c.pdf(ts), sps.invweibull(alpha).pdf(ts), rtol=1e-12)


@pytest.mark.parametrize("a,r", [(1.0, 1.0), (0.5, 1.0), (0.3, 2.0), (0.8, 0.6)])
def test_weibull_kernel_matches_generalised_gamma(a, r):
    c = comp("weibull_kernel", a, r)
    ts = np.array([0.05, 0.4, 1.0, 2.2])
    np.testing.assert_allclose(c.cdf(ts), sps.gengamma(a, r).cdf(ts), rtol=1e-12)
    np.testing.assert_allclose(c.pdf(ts), sps.gengamma(a, r).pdf(ts), rtol=1e-12)
    inv = comp("inv_weibull_kernel", a, r)
    np.testing.assert_allclose(inv.cdf(ts), sps.gengamma(a, -r).cdf(ts), rtol=1e-12)
    assert total_mass(single("inv_weibull_kernel", a, r)) == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("alpha,k,n", [(1.0, 1, 1), (1.0, 2, 3), (2.0, 3, 3), (0.6, 2, 5)])
def test_ku_orderstat_cdf_against_mpmath_integral(alpha, k, n):
    c = comp("ku_orderstat", alpha, k, n)

    def f(s):
        return alpha * k * mpmath.binomial(n + k, n) * s ** (-alpha * (n + 1) - 1) * (1 - s ** -alpha) ** (k - 1)

    for t in (1.2, 2.0, 7.5):
        assert float(c.cdf(t)) == pytest.approx(float(mpmath.quad(f, [1, t])), abs=1e-12)
    assert float(c.pdf(2.0)) == pytest.approx(float(f(mpmath.mpf(2))), rel=1e-12)


def test_ku_orderstat_k1_is_pareto():
    c = comp("ku_orderstat", 1.5, 1, 3)
    ts = np.array([1.1, 2.0, 5.0])
    np.testing.assert_allclose(c.cdf(ts), 1 - ts ** (-1.5 * 4), atol=1e-14)


def test_ku_orderstat_k0_is_max_of_paretos():
    # (1 - t^-alpha)^n: the top order statistic of n draws
    c = comp("ku_orderstat", 1.0, 2, 0)
    ts = np.array([1.5, 3.0])
    np.testing.assert_allclose(c.cdf(ts), (1 - 1 / ts) ** 2, atol=1e-14)


def test_ku_lom_density():
    c = comp("ku_lom", 1.3, 3)
    ts = np.array([0.2, 0.5, 0.9])
    np.testing.assert_allclose(c.pdf(ts), 3 * 1.3 * ts ** 0.3 * (1 - ts ** 1.3) ** 2, rtol=1e-13)
    np.testing.assert_allclose(c.cdf(ts), 1 - (1 - ts ** 1.3) ** 3, rtol=1e-13)


def test_kingman_radial_uniform_angle_case():
    # s = 1/2, x = y = 1: sqrt(2 + 2V) with V uniform, so F(r) = r^2 / 4 on [0, 2]
    c = comp("kingman_radial", 0.5, 1.0, 1.0)
    rs = np.array([0.1, 0.8, 1.5, 1.99])
    np.testing.assert_allclose(c.cdf(rs), rs ** 2 / 4, atol=1e-13)
    assert c.support == (0.0, 2.0)
    assert total_mass(single("kingman_radial", 1.7, 0.4, 1.0)) == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("a,r,x,y", [(0.5, 1.0, 1.0, 1.0), (0.3, 2.0, 0.5, 1.0), (0.8, 0.7, 1.0, 0.2)])
def test_kucharczak_density_unit_mass(a, r, x, y):
    m = single("kucharczak", a, r, x, y)
    assert total_mass(m) == pytest.approx(1, abs=1e-6)
    lo = (x ** r + y ** r) ** (1 / r)
    assert m.support()[0] == pytest.approx(lo)
    c = m.continuous[0]
    assert float(c.cdf(lo)) == 0.0
    assert float(c.cdf(1e9)) == pytest.approx(1, abs=1e-6)


def test_kucharczak_quantile_inverts_cdf():
    c = comp("kucharczak", 0.4, 1.5, 0.6, 1.0)
    us = np.array([0.01, 0.3, 0.7, 0.99])
    np.testing.assert_allclose(c.cdf(c.quantile(us)), us, atol=1e-7)


@pytest.mark.parametrize("p", [0.2, 0.5, 0.9, 1.0])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_diamond_tail_unit_mass(p, alpha):
    c = comp("diamond_tail", p, alpha)
    mass = quad_integrate(lambda s: float(c.pdf(s)), 1.0, math.inf)
    assert mass == pytest.approx(1, abs=1e-9)
    assert float(c.cdf(40.0)) == pytest.approx(quad_integrate(lambda s: float(c.pdf(s)), 1, 40),
                                               abs=1e-10)


def test_diamond_tail_half_limit_is_continuous_in_p():
    # the p -> 1/2 limit alpha (1 + 2 alpha ln s) s^(-2 alpha - 1)
    alpha = 1.5
    s = np.array([1.2, 2.0, 6.0])
    at_half = comp("diamond_tail", 0.5, alpha)
    np.testing.assert_allclose(at_half.pdf(s), alpha * (1 + 2 * alpha * np.log(s)) * s ** (-2 * alpha - 1),
                               rtol=1e-13)
    np.testing.assert_allclose(at_half.cdf(s), 1 - s ** (-2 * alpha) * (1 + alpha * np.log(s)), atol=1e-14)
    near = comp("diamond_tail", 0.5 + 1e-6, alpha)
    np.testing.assert_allclose(near.cdf(s), at_half.cdf(s), atol=1e-5)


def test_kendall_type_lom_density():
    c, alpha, p = 1 / 3, 1.0, 2.0
    law = comp("kendall_type_lom", c, alpha, p)
    xs = np.array([0.1, 0.5, 0.9])
    np.testing.assert_allclose(law.pdf(xs), alpha * (1 + c - c * p * xs ** (alpha * (p - 1))) * xs ** (alpha - 1),
                               rtol=1e-13)
    assert total_mass(single("kendall_type_lom", c, alpha, p)) == pytest.approx(1, abs=1e-10)


def test_unknown_density_and_bad_parameters():
    with pytest.raises(MeasureError):
        ContinuousComponent("lognormal", (1.0,))
    with pytest.raises(MeasureError):
        comp("pareto", -1.0)
    with pytest.raises(MeasureError):
        comp("kucharczak", 1.5, 1.0, 1.0, 1.0)


def test_every_registered_law_is_listed():
    assert {"pareto", "pow", "frechet_like", "weibull_kernel", "ku_orderstat", "kingman_radial",
            "kucharczak", "diamond_tail", "kendall_type_lom", "g_alpha", "table"} <= set(LAWS)


def test_table_law():
    m = single("table", 0.0, 1.0, 3.0, 0.0, 0.5, 1.0)
    assert cdf(m, 1.0) == pytest.approx(0.5)
    assert cdf(m, 2.0) == pytest.approx(0.75)
    assert quantile(m, 0.75) == pytest.approx(2.0, abs=1e-9)
    assert total_mass(m) == pytest.approx(1, abs=1e-12)


# --- mixtures ---------------------------------------------------------------

def test_atom_and_mixture_validation():
    with pytest.raises(MeasureError):
        Atom(-1.0, 1.0)
    with pytest.raises(MeasureError):
        MixtureMeasure((Atom(1.0, 0.4),))
    with pytest.raises(MeasureError):
        mix([(0.5, dirac(1.0)), (0.6, dirac(2.0))])


def test_dilate_examples():
    assert dilate(dirac(1.0), 0) == dirac(0.0)
    assert dilate(dirac(1.0), 3) == dirac(3.0)
    m = pareto(2.5)
    assert dilate(m, 1) is m
    d = dilate(m, 1.7)
    ts = np.array([1.7, 2.0, 9.0])
    np.testing.assert_allclose(cdf(d, ts), 1 - (ts / 1.7) ** -2.5, atol=1e-15)
    assert cdf(d, 1.6) == 0.0


def test_dilate_composes():
    m = build([(0.5, 0.3)], [(0.7, comp("pow", 2.0))])
    a = dilate(dilate(m, 1.3), 2.1)
    b = dilate(m, 1.3 * 2.1)
    np.testing.assert_allclose(cdf(a, GRID), cdf(b, GRID), atol=1e-10)


def test_mix_examples():
    assert mix([(1.0, dirac(1.0))]) == dirac(1.0)
    merged = mix([(0.5, dirac(1.0)), (0.5, dirac(1.0))])
    assert merged.atoms == (Atom(1.0, 1.0),)
    two = mix([(0.5, dirac(1.0)), (0.5, pareto(2.0))])
    assert len(two.atoms) == 1 and len(two.continuous) == 1
    assert total_mass(two) == pytest.approx(1, abs=1e-12)


def test_cdf_right_continuity_and_left_limit():
    m = build([(2.0, 0.25)], [(0.75, comp("pow", 1.0))])
    assert cdf(dirac(0.7), 0.7) == 1.0
    assert cdf(m, 2.0) == pytest.approx(1.0)
    assert cdf_left(m, 2.0) == pytest.approx(0.75)
    assert cdf(m, -1.0) == 0.0


def test_quantile_atoms_and_unbounded():
    assert quantile(dirac(0.4), 0.3) == 0.4
    assert quantile(dirac(0.4), 0.0) == 0.4
    m = build([(1.0, 0.5)], [(0.5, comp("pareto", 2.0, scale=2.0))])
    assert quantile(m, 0.5) == 1.0
    assert quantile(m, 0.75) == pytest.approx(2.0 * 0.5 ** -0.5, rel=1e-9)
    with pytest.raises(UnboundedQuantileError):
        quantile(m, 1.0)
    with pytest.raises(MeasureError):
        quantile(m, 1.5)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 10), st.floats(0.01, 1)), min_size=1, max_size=4),
       st.floats(0.2, 4), st.floats(0.01, 0.99))
def test_mixture_properties(atoms, beta, u):
    total = sum(w for _, w in atoms)
    parts = [(loc, 0.5 * w / total) for loc, w in atoms]
    m = build(parts, [(0.5, comp("pareto", beta))])
    assert total_mass(m) == pytest.approx(1, abs=1e-9)
    vals = cdf(m, GRID)
    assert np.all(np.diff(vals) >= 0)
    q = quantile(m, u)
    assert cdf(m, q) >= u - 1e-9
    # JSON round trip is lossless and key order is stable
    again = MixtureMeasure.from_json(m.to_json())
    assert again == m
    assert again.to_json() == m.to_json()


def test_json_layout():
    m = build([(1.0, 0.5)], [(0.5, comp("pareto", 2.0))])
    doc = json.loads(m.to_json())
    assert doc == {"atoms": [{"loc": 1.0, "w": 0.5}],
                   "continuous": [{"id": "pareto", "params": {"beta": 2.0, "scale": 1.0},
                                   "w": 0.5, "support": [1.0, None]}]}
    with pytest.raises(MeasureError):
        MixtureMeasure.from_dict({"atoms": [{"where": 1}]})
