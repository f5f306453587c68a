import math

import numpy as np
import pytest

from genconv.families import (UnsupportedFamilyError, convex_decomposition, delta_conv,
                              family_from_args, is_admissible_kendall_type, is_monotonic, lom_law,
                              lom_residual, max_weak_rep_mixing_law, monotonicity_witness, unit_conv)
from genconv.kernels import KernelError, kernel_eval, make
from genconv.measures import Atom, cdf, dirac, total_mass

MONO = [("classical", {}), ("stable", {"alpha": 1.5}), ("kendall", {"alpha": 1.0}), ("max", {}),
        ("kucharczak", {"a": 0.5, "r": 1.0}), ("ku", {"alpha": 1.0, "n": 2}),
        ("diamond", {"p": 0.5, "alpha": 1.0}), ("kendall_type", {"c": 1 / 3, "alpha": 1.0, "p": 2.0})]

TS = np.array([0.05, 0.3, 0.7, 0.99, 1.5, 3.0])


@pytest.mark.parametrize("c,alpha,p,case", [
    (1.0, 1.0, 2.0, 1), (1 / 3, 1.0, 2.0, 2), (0.0, 1.0, 2.0, 3), (0.5, 1.0, 2.0, 4), (0.4, 1.0, 2.0, 5),
    (0.5, 2.0, 3.0, 1), (0.125, 0.5, 3.0, 2), (-0.25, 1.0, 3.0, 3), (0.25, 1.0, 3.0, 4), (0.2, 1.0, 3.0, 5),
])
def test_admissible_kendall_type(c, alpha, p, case):
    res = is_admissible_kendall_type(c, alpha, p)
    assert res and res.case == case


@pytest.mark.parametrize("c", [0.9, 0.3, -0.1, 0.51])
def test_inadmissible_kendall_type(c):
    assert not is_admissible_kendall_type(c, 1.0, 2.0)


def test_kendall_type_parameter_errors():
    with pytest.raises(KernelError):
        is_admissible_kendall_type(0.5, 1.0, 1.5)
    with pytest.raises(KernelError):
        is_admissible_kendall_type(0.5, 0.0, 2.0)


def test_point_rules_with_exact_values():
    assert delta_conv(make("classical"), 0.5, 1.25) == dirac(1.75)
    assert delta_conv(make("max"), 0.5, 1.25) == dirac(1.25)
    assert delta_conv(make("stable", alpha=2), 3.0, 4.0) == dirac(5.0)
    sym = delta_conv(make("symmetric"), 0.5, 2.0)
    assert sym.atoms == (Atom(1.5, 0.5), Atom(2.5, 0.5))
    assert delta_conv(make("symmetric"), 1.0, 1.0).atoms == (Atom(0.0, 0.5), Atom(2.0, 0.5))


def test_kendall_point_rule():
    m = delta_conv(make("kendall", alpha=2.0), 0.5, 1.0)
    assert m.atoms == (Atom(1.0, 0.75),)
    (c,) = m.continuous
    assert (c.density_id, c.params, c.weight) == ("pareto", (4.0,), 0.25)
    scaled = delta_conv(make("kendall", alpha=2.0), 1.0, 2.0)
    assert cdf(scaled, 4.0) == pytest.approx(0.75 + 0.25 * (1 - 2.0 ** -4), abs=1e-15)


@pytest.mark.parametrize("fam,params", MONO + [("kingman", {"s": 0.5}), ("symmetric", {})])
def test_neutral_element_is_exact(fam, params):
    spec = make(fam, **params)
    assert delta_conv(spec, 0.0, 1.7) == dirac(1.7)
    assert delta_conv(spec, 1.7, 0.0) == dirac(1.7)


def test_kendall_type_point_rule_is_unsupported():
    with pytest.raises(UnsupportedFamilyError):
        delta_conv(make("kendall_type", c=1 / 3, alpha=1, p=2), 0.5, 1.0)


def test_negative_points_rejected():
    with pytest.raises(KernelError):
        delta_conv(make("max"), -1.0, 1.0)


def test_unit_conv_kucharczak_a1_is_stable_atom():
    m = unit_conv(make("kucharczak", a=1.0, r=2.0), 0.75)
    assert m == dirac(1.25)


@pytest.mark.parametrize("fam,params", [f for f in MONO if f[0] != "kendall_type"]
                         + [("kingman", {"s": 0.5}), ("symmetric", {})])
def test_delta_conv_is_a_probability_measure(fam, params):
    assert total_mass(delta_conv(make(fam, **params), 0.6, 1.1)) == pytest.approx(1, abs=1e-6)


@pytest.mark.parametrize("fam,params", [f for f in MONO if f[0] != "kendall_type"])
def test_monotone_rules_live_above_the_max(fam, params):
    m = delta_conv(make(fam, **params), 0.6, 1.1)
    assert cdf(m, 1.1 * (1 - 1e-9)) == 0.0


@pytest.mark.parametrize("fam,params", MONO)
def test_lom_law_has_survival_equal_to_kernel(fam, params):
    spec = make(fam, **params)
    law = lom_law(spec)
    np.testing.assert_allclose(cdf(law, TS), 1 - kernel_eval(spec, TS), atol=1e-12)


@pytest.mark.parametrize("fam,params", MONO)
def test_mixing_law_cdf_is_kernel_at_reciprocal(fam, params):
    spec = make(fam, **params)
    law = max_weak_rep_mixing_law(spec)
    ts = np.array([0.5, 1.0, 1.5, 4.0, 30.0])
    np.testing.assert_allclose(cdf(law, ts), kernel_eval(spec, 1 / ts), atol=1e-12)


def test_laws_unavailable_for_oscillating_kernels():
    for spec in (make("symmetric"), make("kingman", s=0.5)):
        with pytest.raises(UnsupportedFamilyError):
            lom_law(spec)
        with pytest.raises(UnsupportedFamilyError):
            max_weak_rep_mixing_law(spec)


def test_monotonic_set():
    assert is_monotonic(make("kendall", alpha=1))
    assert not is_monotonic(make("symmetric"))
    assert not is_monotonic(make("kingman", s=0.5))


@pytest.mark.parametrize("fam,params,x", [("kendall", {"alpha": 1.5}, 0.4), ("ku", {"alpha": 1.0, "n": 3}, 0.7),
                                          ("diamond", {"p": 0.3, "alpha": 2.0}, 0.9), ("max", {}, 0.2)])
def test_convex_decomposition_reproduces_unit_conv(fam, params, x):
    spec = make(fam, **params)
    dec = convex_decomposition(spec)
    w = dec.weights_at(x)
    assert dec.concrete
    assert math.fsum(w) == pytest.approx(1, abs=1e-14)
    ts = np.array([1.0, 1.3, 2.0, 7.0])
    mixed = sum(wk * cdf(ck, ts) for wk, ck in zip(w, dec.components))
    np.testing.assert_allclose(mixed, cdf(delta_conv(spec, x, 1.0), ts), atol=1e-14)


@pytest.mark.parametrize("c", [1.0, 1 / 3, 0.0, 0.5, 0.42])
def test_kendall_type_weights_sum_to_one(c):
    dec = convex_decomposition(make("kendall_type", c=c, alpha=1.0, p=2.0))
    assert not dec.concrete
    for x in np.linspace(0, 1, 41):
        w = dec.weights_at(x)
        assert abs(math.fsum(w) - 1) <= 1e-12
        assert np.all(w >= -1e-12)


def test_no_convex_decomposition_for_classical():
    with pytest.raises(UnsupportedFamilyError):
        convex_decomposition(make("classical"))


@pytest.mark.parametrize("fam,params", [f for f in MONO if f[0] != "kendall_type"])
def test_lom_residual_small(fam, params):
    assert lom_residual(make(fam, **params), 0.7, 1.5, n=20_000, seed=3) < 4 / math.sqrt(20_000)


def test_monotonicity_witness():
    assert monotonicity_witness(make("kendall", alpha=1), 0.8, 1.0, n=2000) == 0.0
    frac = monotonicity_witness(make("kingman", s=0.5), 1.0, 1.0, n=10_000, seed=11)
    assert abs(frac - 0.25) <= 3 * math.sqrt(0.25 * 0.75 / 10_000)


def test_family_from_args():
    assert family_from_args("ku", alpha=1, n=2) == make("ku", alpha=1.0, n=2.0)
