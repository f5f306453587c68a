"""Catalogue of generalised convolutions.

Point-mass rules, monotonicity flags, lack-of-memory laws, mixing laws for the
max-representation and convex-combination decompositions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .kernels import KernelError, KernelSpec, kernel_eval, make
from .measures import ContinuousComponent, MixtureMeasure, build, dilate, dirac, single

FamilySpec = KernelSpec

EQ_TOL = 1e-12
MONOTONIC = {"classical", "stable", "kendall", "max", "kucharczak", "ku", "diamond", "kendall_type"}


class UnsupportedFamilyError(KernelError):
    """Operation not available for this family."""


@dataclass(frozen=True)
class Admissibility:
    """Outcome of the Kendall-type parameter test; truthy when admissible."""

    ok: bool
    case: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_admissible_kendall_type(c: float, alpha: float, p: float) -> Admissibility:
    """Which of the five admissible cases (c, alpha, p) falls into, if any.

    Equalities are tested to within ``EQ_TOL``; case 5 is the open interval.
    """
    if p < 2 or alpha <= 0:
        raise KernelError("Kendall-type parameters need p >= 2 and alpha > 0")
    cases = (1.0 / (p - 1.0), 1.0 / (p * p - 1.0), 0.5 * (2.0 - p) / (p - 1.0), 0.5 / (p - 1.0))
    for idx, value in enumerate(cases, start=1):
        if abs(c - value) <= EQ_TOL:
            return Admissibility(True, idx)
    if cases[1] < c < cases[3]:
        return Admissibility(True, 5)
    return Admissibility(False)


def _split(x: float, y: float) -> tuple[float, float]:
    if x < 0 or y < 0:
        raise KernelError("point masses must sit at x, y >= 0")
    big, small = max(x, y), min(x, y)
    return big, (small / big if big > 0 else 0.0)


def unit_conv(fam: FamilySpec, rho: float) -> MixtureMeasure:
    """delta_rho <> delta_1 for rho in [0, 1]."""
    p = fam.params
    f = fam.family
    if f == "kendall":
        w = rho ** p["alpha"]
        return build([(1.0, 1.0 - w)], [(w, ContinuousComponent("pareto", (2.0 * p["alpha"],)))])
    if f == "ku":
        n = int(p["n"])
        xa = rho ** p["alpha"]
        comps = [(math.comb(n, k) * xa ** k * (1.0 - xa) ** (n - k),
                  ContinuousComponent("ku_orderstat", (p["alpha"], k, n)))
                 for k in range(1, n + 1)]
        atom_w = 1.0 - math.fsum(w for w, _ in comps)
        return build([(1.0, atom_w)], comps)
    if f == "diamond":
        w = p["p"] * rho ** p["alpha"]
        return build([(1.0, 1.0 - w)], [(w, ContinuousComponent("diamond_tail", (p["p"], p["alpha"])))])
    if f == "kingman":
        if rho == 0:
            return dirac(1.0)
        return single("kingman_radial", p["s"], rho, 1.0)
    if f == "kucharczak":
        if rho == 0:
            return dirac(1.0)
        if p["a"] == 1.0:
            return dirac((1.0 + rho ** p["r"]) ** (1.0 / p["r"]))
        return single("kucharczak", p["a"], p["r"], rho, 1.0)
    raise UnsupportedFamilyError(f"no normalised rule for {f}")


def delta_conv(fam: FamilySpec, x: float, y: float) -> MixtureMeasure:
    """The measure delta_x <> delta_y."""
    f = fam.family
    big, rho = _split(x, y)
    if rho == 0:
        # delta_0 is the neutral element
        return dirac(big)
    if f == "kendall_type":
        raise UnsupportedFamilyError(
            "the Kendall-type point-mass convolution needs component measures that are not available")
    if f == "classical":
        return dirac(x + y)
    if f == "symmetric":
        return build([(x + y, 0.5), (abs(x - y), 0.5)])
    if f == "stable":
        a = fam["alpha"]
        return dirac((x ** a + y ** a) ** (1.0 / a))
    if f == "max":
        return dirac(big)
    return dilate(unit_conv(fam, rho), big)


def is_monotonic(fam: FamilySpec) -> bool:
    return fam.family in MONOTONIC


def lom_law(fam: FamilySpec) -> MixtureMeasure:
    """Law with the lack-of-memory property: distribution function 1 - Omega(t)."""
    f, p = fam.family, fam.params
    if f in ("symmetric", "kingman"):
        raise UnsupportedFamilyError(f"{f} admits no lack-of-memory law")
    if f == "classical":
        return single("weibull_kernel", 1.0, 1.0)
    if f == "stable":
        return single("weibull_kernel", 1.0, p["alpha"])
    if f == "kendall":
        return single("pow", p["alpha"])
    if f == "max":
        return dirac(1.0)
    if f == "kucharczak":
        return single("weibull_kernel", p["a"], p["r"])
    if f == "ku":
        return single("ku_lom", p["alpha"], p["n"])
    if f == "diamond":
        return build([(1.0, 1.0 - p["p"])], [(p["p"], ContinuousComponent("pow", (p["alpha"],)))])
    if f == "kendall_type":
        return single("kendall_type_lom", p["c"], p["alpha"], p["p"])
    raise UnsupportedFamilyError(f)


def monotonicity_witness(fam: FamilySpec, x: float, y: float, n: int = 10_000,
                         seed: int = 0) -> float:
    """Fraction of draws from delta_x <> delta_y landing strictly below max(x, y)."""
    from .samplers import make_rng, sample_family
    draws = np.asarray(sample_family(fam, x, y, make_rng(seed), size=n))
    return float(np.mean(draws < max(x, y)))


def lom_residual(fam: FamilySpec, x: float, y: float, n: int = 100_000, seed: int = 0) -> float:
    """Monte Carlo |P{X > x<>y} - P{X > x} P{X > y}| with X from the lack-of-memory law.

    The left side is estimated from independent draws; the right side is exact.
    """
    from .measures import cdf
    from .samplers import make_rng, sample_family, sample_measure
    law = lom_law(fam)
    rng = make_rng(seed)
    xs = np.asarray(sample_measure(law, rng, n))
    zs = np.asarray(sample_family(fam, x, y, rng, size=n))
    lhs = float(np.mean(xs > zs))
    rhs = (1.0 - cdf(law, x)) * (1.0 - cdf(law, y))
    return abs(lhs - rhs)


def max_weak_rep_mixing_law(fam: FamilySpec) -> MixtureMeasure:
    """Law with distribution function Omega(1/t), the mixing variable of the max-representation."""
    f, p = fam.family, fam.params
    if f in ("symmetric", "kingman"):
        raise UnsupportedFamilyError(f"{f} has no kernel decreasing to zero")
    if f == "classical":
        return single("frechet_like", 1.0)
    if f == "stable":
        return single("frechet_like", p["alpha"])
    if f == "kendall":
        return single("pareto", p["alpha"])
    if f == "max":
        return dirac(1.0)
    if f == "kucharczak":
        return single("inv_weibull_kernel", p["a"], p["r"])
    if f == "ku":
        # max of n iid pareto(alpha): the top order statistic of n draws
        return single("ku_orderstat", p["alpha"], p["n"], 0)
    if f == "diamond":
        return build([(1.0, 1.0 - p["p"])], [(p["p"], ContinuousComponent("pareto", (p["alpha"],)))])
    if f == "kendall_type":
        return single("kendall_type_maxrep", p["c"], p["alpha"], p["p"])
    raise UnsupportedFamilyError(f)


@dataclass(frozen=True)
class ConvexDecomposition:
    """delta_x <> delta_1 = sum_k weights[k](x) components[k].

    A component is ``None`` when only its weight is known.
    """

    weights: tuple[Callable[[float], float], ...]
    components: tuple[MixtureMeasure | None, ...]

    @property
    def n(self) -> int:
        return len(self.weights)

    def weights_at(self, x: float) -> np.ndarray:
        return np.array([w(x) for w in self.weights])

    @property
    def concrete(self) -> bool:
        return all(c is not None for c in self.components)


def convex_decomposition(fam: FamilySpec) -> ConvexDecomposition:
    f, p = fam.family, fam.params
    if f == "kendall":
        a = p["alpha"]
        return ConvexDecomposition((lambda x: 1.0 - x ** a, lambda x: x ** a),
                                   (dirac(1.0), single("pareto", 2.0 * a)))
    if f == "max":
        return ConvexDecomposition((lambda x: 1.0,), (dirac(1.0),))
    if f == "ku":
        a, n = p["alpha"], int(p["n"])
        weights = [lambda x, k=k: math.comb(n, k) * x ** (a * k) * (1.0 - x ** a) ** (n - k)
                   for k in range(n + 1)]
        comps = [dirac(1.0)] + [single("ku_orderstat", a, k, n) for k in range(1, n + 1)]
        return ConvexDecomposition(tuple(weights), tuple(comps))
    if f == "diamond":
        q, a = p["p"], p["alpha"]
        return ConvexDecomposition((lambda x: 1.0 - q * x ** a, lambda x: q * x ** a),
                                   (dirac(1.0), single("diamond_tail", q, a)))
    if f == "kendall_type":
        c, a, pp = p["c"], p["alpha"], p["p"]
        return ConvexDecomposition(
            (lambda x: float(kernel_eval(fam, x)),
             lambda x: x ** (a * pp),
             lambda x: (c + 1.0) * (x ** a - x ** (a * pp))),
            (dirac(1.0), None, None))
    raise UnsupportedFamilyError(f"{f} lacks the convex linear combination property")


def family_from_args(family: str, **params) -> FamilySpec:
    return make(family, **params)


__all__ = [
    "Admissibility", "ConvexDecomposition", "FamilySpec", "UnsupportedFamilyError", "convex_decomposition",
    "delta_conv", "family_from_args", "is_admissible_kendall_type", "is_monotonic", "lom_law",
    "lom_residual", "max_weak_rep_mixing_law", "monotonicity_witness", "unit_conv",
]
