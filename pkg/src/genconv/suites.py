"""Named property suites run by the command line front end.

Each suite returns ``{"suite", "cases": [{"id", "statistic", "threshold", "pass", ...}], "pass"}``.
Case ``i`` draws its randomness from ``seed + i``.
"""
from __future__ import annotations

import math
from typing import Callable, Iterable

import numpy as np

from . import families as fam_mod
from .families import (FamilySpec, UnsupportedFamilyError, convex_decomposition, delta_conv,
                       is_admissible_kendall_type, is_monotonic, max_weak_rep_mixing_law)
from .kernels import (make, polya_check, product_formula_residual, weak_stable_density_g,
                      weak_stable_tail_mass)
from .measures import (ContinuousComponent, cdf, dilate, dirac, pareto, pow_law, quad_integrate,
                       single, total_mass)
from .samplers import (make_rng, sample_family, sample_kendall_alt, sample_kendall_conv,
                       sample_measure, sample_order_stat)
from .stats import cosine_transform, ks_one_sample, ks_two_sample
from .williamson import kendall_convolve, kendall_pair_of, williamson, williamson_invert

SUITES = ("axioms", "kendall-exact", "lom", "maxrep", "weakstable", "orderstat", "normalization")

DEFAULT_FAMILIES = (
    make("classical"), make("symmetric"), make("stable", alpha=2.0), make("kendall", alpha=1.0),
    make("max"), make("kucharczak", a=0.5, r=1.0), make("ku", alpha=1.0, n=2),
    make("diamond", p=0.5, alpha=1.0), make("kendall_type", c=1.0 / 3.0, alpha=1.0, p=2.0),
    make("kingman", s=0.5),
)


def _case(cid: str, statistic: float, threshold: float, passed: bool, **extra) -> dict:
    out = {"id": cid, "statistic": float(statistic), "threshold": float(threshold),
           "pass": bool(passed)}
    out.update(extra)
    return out


def _report(name: str, cases: list[dict], skipped: Iterable[str] = ()) -> dict:
    rep = {"suite": name, "cases": cases, "pass": all(c["pass"] for c in cases)}
    skipped = list(skipped)
    if skipped:
        rep["skipped"] = skipped
    return rep


class _Seeds:
    def __init__(self, seed: int):
        self.seed = seed
        self.i = 0

    def next(self) -> np.random.Generator:
        rng = make_rng(self.seed + self.i)
        self.i += 1
        return rng


def _ks_case(cid, report, **extra):
    return _case(cid, report.statistic, report.critical_value, report.passed, **extra)


# ---------------------------------------------------------------------------

def axioms(families, seed: int, n: int) -> dict:
    seeds = _Seeds(seed)
    cases, skipped = [], []
    grid = np.linspace(0.0, 12.0, 241)
    for fam in families:
        label = fam.label()
        neutral = delta_conv(fam, 0.7, 0.0) == dirac(0.7) == delta_conv(fam, 0.0, 0.7)
        cases.append(_case(f"{label}/neutral", 0.0 if neutral else 1.0, 0.0, neutral))
        try:
            a = delta_conv(fam, 0.4, 1.1)
        except UnsupportedFamilyError as exc:
            skipped.append(f"{label}: {exc}")
            continue
        b = delta_conv(fam, 1.1, 0.4)
        same = a.to_dict() == b.to_dict()
        cases.append(_case(f"{label}/commutativity", 0.0 if same else 1.0, 0.0, same))
        scaled = delta_conv(fam, 3.0 * 0.4, 3.0 * 1.1)
        diff = float(np.max(np.abs(cdf(scaled, grid) - cdf(dilate(a, 3.0), grid))))
        cases.append(_case(f"{label}/homogeneity", diff, 1e-9, diff <= 1e-9))
        if fam.family != "kucharczak":
            # dyadic points keep sums and differences exact, so atoms coincide bit for bit
            rng = seeds.next()
            left = sample_family(fam, sample_family(fam, 0.5, 0.75, rng, size=n), 1.0, rng)
            right = sample_family(fam, 0.5, sample_family(fam, 0.75, 1.0, rng, size=n), rng)
            cases.append(_ks_case(f"{label}/associativity", ks_two_sample(left, right)))
        frac = fam_mod.monotonicity_witness(fam, 1.0, 1.0, n=min(n, 10_000), seed=seed + 1000)
        if is_monotonic(fam):
            cases.append(_case(f"{label}/monotone", frac, 0.0, frac == 0.0, expected=True))
        else:
            cases.append(_case(f"{label}/monotone", frac, 0.0, frac > 0.0, expected=False))
    return _report("axioms", cases, skipped)


def kendall_exact(seed: int, n: int) -> dict:
    seeds = _Seeds(seed)
    cases = []
    for th1, th2, alpha in ((1.0, 1.0, 1.0), (0.5, 1.0, 1.0), (0.3, 0.7, 2.0)):
        pair = kendall_convolve(kendall_pair_of(dirac(th1), alpha), kendall_pair_of(dirac(th2), alpha))
        draws = sample_kendall_conv(th1, th2, alpha, seeds.next(), size=n)
        rep = ks_one_sample(draws, pair.F)
        cases.append(_ks_case(f"sampler-vs-exact/{th1},{th2},{alpha}", rep))
    for alpha in (0.5, 1.0, 2.0):
        pair = kendall_convolve(kendall_pair_of(dirac(1.0), alpha), kendall_pair_of(dirac(1.0), alpha))
        ts = np.linspace(1.0, 50.0, 200)
        err = float(np.max(np.abs(pair.F(ts) - (1.0 - ts ** (-2.0 * alpha)))))
        cases.append(_case(f"delta1-squared/{alpha}", err, 1e-9, err <= 1e-9))
    rng = seeds.next()
    rep = ks_two_sample(sample_kendall_conv(0.5, 1.0, 1.0, rng, size=n),
                        sample_kendall_alt(0.5, 1.0, 1.0, rng, size=n))
    cases.append(_ks_case("two-representations/0.5,1,1", rep))
    cases += round_trip_cases()
    return _report("kendall-exact", cases)


def round_trip_cases(points: int = 200) -> list[dict]:
    cases = []
    alpha = 1.5
    for a in (0.5, 1.0, 3.0):
        m = dirac(a)
        ts = np.linspace(0.05, 4.0 * a, points + 1)
        ts = ts[np.abs(ts - a) > 1e-9][:points]
        G = lambda t, m=m: williamson(m, alpha, 1.0 / t)  # noqa: E731
        err = max(abs(williamson_invert(G, alpha, float(t)) - cdf(m, t)) for t in ts)
        cases.append(_case(f"round-trip/delta_{a}", err, 1e-6, err <= 1e-6))
    for gamma in (alpha, 0.7):
        m = pow_law(gamma)
        ts = np.linspace(0.01, 3.0, points)
        G = lambda t, m=m: williamson(m, alpha, 1.0 / t)  # noqa: E731
        err = max(abs(williamson_invert(G, alpha, float(t)) - cdf(m, t)) for t in ts)
        cases.append(_case(f"round-trip/pow_{gamma}", err, 1e-6, err <= 1e-6))
    return cases


LOM_POINTS = (0.3, 0.7, 1.5)


def lom(families, seed: int, n: int) -> dict:
    cases, skipped = [], []
    thr = 4.0 / math.sqrt(n)
    i = 0
    for fam in families:
        if not is_monotonic(fam):
            skipped.append(f"{fam.label()}: no lack-of-memory law")
            continue
        if fam.family == "kendall_type":
            skipped.append(f"{fam.label()}: point-mass convolution not constructible")
            continue
        for x in LOM_POINTS:
            for y in LOM_POINTS:
                r = fam_mod.lom_residual(fam, x, y, n=n, seed=seed + i)
                i += 1
                cases.append(_case(f"{fam.label()}/{x},{y}", r, thr, r < thr))
    exact = max(abs(math.exp(-(x + y)) - math.exp(-x) * math.exp(-y))
                for x in LOM_POINTS for y in LOM_POINTS)
    cases.append(_case("classical/analytic", exact, 1e-15, exact <= 1e-15))
    return _report("lom", cases, skipped)


MAXREP_FAMILIES = {"classical", "stable", "kendall", "ku", "max", "diamond"}


def maxrep(families, seed: int, n: int) -> dict:
    seeds = _Seeds(seed)
    cases, skipped = [], []
    for fam in families:
        if fam.family not in MAXREP_FAMILIES:
            skipped.append(f"{fam.label()}: outside the max-representation check")
            continue
        rep = max_representation(fam, seeds.next(), n)
        cases.append(_ks_case(fam.label(), rep))
    return _report("maxrep", cases, skipped)


def max_representation(fam: FamilySpec, rng: np.random.Generator, n: int):
    """KS between max(theta1 X1, theta2 X2) and theta (X1 <> X2), X1 ~ pareto(3), X2 ~ pow(2)."""
    mu = max_weak_rep_mixing_law(fam)
    th = np.asarray(sample_measure(mu, rng, (3, n)))
    x1 = np.asarray(sample_measure(pareto(3.0), rng, (2, n)))
    x2 = np.asarray(sample_measure(pow_law(2.0), rng, (2, n)))
    lhs = np.maximum(th[0] * x1[0], th[1] * x2[0])
    z = np.asarray(sample_family(fam, x1[1], x2[1], rng))
    return ks_two_sample(lhs, th[2] * z)


def weakstable(seed: int, n: int) -> dict:
    cases = []
    for alpha in (0.5, 1.0):
        tail = lambda T, a=alpha: weak_stable_tail_mass(a, T)  # noqa: E731
        dens = lambda t, a=alpha: weak_stable_density_g(a, t)  # noqa: E731
        mass = cosine_transform(dens, 0.0, tail_mass=tail)
        cases.append(_case(f"g_{alpha}/mass", abs(mass - 1.0), 1e-6, abs(mass - 1.0) <= 1e-6))
        err = max(abs(cosine_transform(dens, x, tail_mass=tail) - max(0.0, 1.0 - x ** alpha))
                  for x in np.arange(0.0, 2.0001, 0.25))
        cases.append(_case(f"g_{alpha}/cosine", err, 1e-3, err <= 1e-3))
    for alpha, expected in ((0.25, True), (0.5, True), (1.0, True), (1.25, False), (2.0, False)):
        res = polya_check(make("kendall", alpha=alpha))
        cases.append(_case(f"polya/kendall_{alpha}", 0.0 if res.ok else 1.0, 0.0,
                           res.ok == expected, expected=expected))
    return _report("weakstable", cases)


ORDERSTAT_CASES = ((1.0, 1, 1), (1.0, 2, 3), (2.0, 3, 3))


def orderstat(seed: int, n: int) -> dict:
    seeds = _Seeds(seed)
    cases = []
    for alpha, k, m in ORDERSTAT_CASES:
        draws = sample_order_stat("pareto", k, m + k, seeds.next(), alpha, size=n)
        comp = ContinuousComponent("ku_orderstat", (alpha, k, m))
        oracle = _quadrature_cdf(comp)
        cases.append(_ks_case(f"Q_{k}:{m + k}/alpha={alpha}", ks_one_sample(draws, oracle)))
    return _report("orderstat", cases)


def _quadrature_cdf(comp: ContinuousComponent) -> Callable:
    """Distribution function of a component by integrating its density on a table."""
    grid = np.concatenate(([1.0], 1.0 + np.geomspace(1e-8, 1e6, 4000)))
    pieces = [quad_integrate(lambda s: float(comp.pdf(s)), lo, hi)
              for lo, hi in zip(grid[:-1], grid[1:])]
    F = np.concatenate(([0.0], np.cumsum(pieces)))

    def oracle(t):
        return np.interp(np.asarray(t, dtype=float), grid, F, left=0.0, right=1.0)
    return oracle


def normalization(families, seed: int, n: int) -> dict:
    cases = []
    for p in (0.2, 0.5, 0.9):
        for alpha in (0.5, 1.0, 2.0):
            comp = ContinuousComponent("diamond_tail", (p, alpha))
            mass = quad_integrate(lambda s: float(comp.pdf(s)), 1.0, math.inf)
            err = abs(mass - 1.0)
            cases.append(_case(f"diamond_tail/{p},{alpha}", err, 1e-9, err <= 1e-9))
    mass = total_mass(single("kucharczak", 0.5, 1.0, 1.0, 1.0))
    cases.append(_case("kucharczak/0.5,1,1,1", abs(mass - 1.0), 1e-6, abs(mass - 1.0) <= 1e-6))
    p, alpha = 2.0, 1.0
    xs = np.linspace(0.0, 1.0, 101)
    for c in (1.0 / (p - 1.0), 1.0 / (p * p - 1.0), 0.5 * (2.0 - p) / (p - 1.0), 0.5 / (p - 1.0),
              0.4):
        tag = is_admissible_kendall_type(c, alpha, p)
        dec = convex_decomposition(make("kendall_type", c=c, alpha=alpha, p=p))
        err = max(abs(math.fsum(dec.weights_at(float(x))) - 1.0) for x in xs)
        cases.append(_case(f"kendall_type/case{tag.case}/c={c:.6g}", err, 1e-12, err <= 1e-12))
    for fam in families:
        try:
            m = delta_conv(fam, 0.5, 1.0)
        except UnsupportedFamilyError:
            continue
        err = abs(total_mass(m) - 1.0)
        cases.append(_case(f"{fam.label()}/delta_conv-mass", err, 1e-6, err <= 1e-6))
        pf = product_formula_residual(fam, 0.5, 1.0)
        cases.append(_case(f"{fam.label()}/product-formula", pf.max_residual, 1e-6,
                           pf.max_residual < 1e-6))
    return _report("normalization", cases)


def run_suite(name: str, families=None, seed: int = 0, n: int = 100_000) -> dict:
    fams = tuple(families) if families else DEFAULT_FAMILIES
    if name == "axioms":
        return axioms(fams, seed, n)
    if name == "kendall-exact":
        return kendall_exact(seed, n)
    if name == "lom":
        return lom(fams, seed, n)
    if name == "maxrep":
        return maxrep(fams, seed, n)
    if name == "weakstable":
        return weakstable(seed, n)
    if name == "orderstat":
        return orderstat(seed, n)
    if name == "normalization":
        return normalization(fams, seed, n)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")


__all__ = ["DEFAULT_FAMILIES", "SUITES", "max_representation", "run_suite"]
