"""Empirical distribution functions, Kolmogorov-Smirnov checks and cosine transforms."""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

from .measures import (MixtureMeasure, QuadratureConfig, QuadratureError, cdf, cdf_left,
                       quad_integrate)
from .samplers import SampleBatch

KS_CONSTANTS = {0.05: 1.36, 0.01: 1.63}


def _values(batch) -> np.ndarray:
    vals = batch.values if isinstance(batch, SampleBatch) else np.asarray(batch, dtype=float)
    vals = np.asarray(vals, dtype=float).ravel()
    if vals.size == 0:
        raise ValueError("empty batch")
    return vals


def ecdf(batch, t):
    """Fraction of the batch at or below ``t`` (right-continuous)."""
    vals = np.sort(_values(batch))
    t_arr = np.asarray(t, dtype=float)
    out = np.searchsorted(vals, t_arr, side="right") / vals.size
    return float(out) if out.ndim == 0 else out


def ks_constant(significance: float) -> float:
    """Asymptotic Kolmogorov quantile; the tabulated 1.36 and 1.63 where they apply."""
    if not 0 < significance < 1:
        raise ValueError("significance must lie in (0, 1)")
    for sig, c in KS_CONSTANTS.items():
        if math.isclose(significance, sig):
            return c
    return math.sqrt(-0.5 * math.log(significance / 2.0))


def critical_value(significance: float, n: int, m: int = 0) -> float:
    c = ks_constant(significance)
    if m == 0:
        return c / math.sqrt(n)
    return c * math.sqrt((n + m) / (n * m))


@dataclass(frozen=True)
class KsReport:
    statistic: float
    n: int
    m: int
    critical_value: float
    significance: float

    @property
    def passed(self) -> bool:
        return self.statistic < self.critical_value

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "n": self.n, "m": self.m,
                "critical_value": self.critical_value, "significance": self.significance,
                "pass": self.passed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def ks_one_sample(batch, F: Callable | MixtureMeasure, significance: float = 0.01,
                  F_left: Callable | None = None) -> KsReport:
    """Sup distance between the sample's ECDF and ``F``, aware of atoms in either.

    At every distinct sample value v both ``|ECDF(v) - F(v)|`` and
    ``|ECDF(v-) - F(v-)|`` are checked.  ``F(v-)`` comes from ``F_left`` when
    given, from the left limit when ``F`` is a measure, and otherwise from F at
    the next float below v.
    """
    vals = np.sort(_values(batch))
    n = vals.size
    uniq, counts = np.unique(vals, return_counts=True)
    upper = np.cumsum(counts) / n
    lower = upper - counts / n
    if isinstance(F, MixtureMeasure):
        m = F
        F, F_left = (lambda t: cdf(m, t)), (lambda t: cdf_left(m, t))
    right = np.asarray(F(uniq), dtype=float)
    if F_left is None:
        left = np.asarray(F(np.nextafter(uniq, -np.inf)), dtype=float)
    else:
        left = np.asarray(F_left(uniq), dtype=float)
    stat = float(max(np.max(np.abs(upper - right)), np.max(np.abs(lower - left))))
    return KsReport(stat, n, 0, critical_value(significance, n), significance)


def ks_two_sample(a, b, significance: float = 0.01) -> KsReport:
    va, vb = np.sort(_values(a)), np.sort(_values(b))
    grid = np.union1d(va, vb)
    fa = np.searchsorted(va, grid, side="right") / va.size
    fb = np.searchsorted(vb, grid, side="right") / vb.size
    stat = float(np.max(np.abs(fa - fb)))
    return KsReport(stat, va.size, vb.size, critical_value(significance, va.size, vb.size),
                    significance)


@dataclass(frozen=True)
class BinomialCheck:
    count: int
    n: int
    p: float
    z: float
    sigmas: float

    @property
    def passed(self) -> bool:
        return abs(self.z) <= self.sigmas

    def __bool__(self) -> bool:
        return self.passed


def binomial_check(count: int, n: int, p: float, sigmas: float = 3.0) -> BinomialCheck:
    """Is ``count`` successes out of ``n`` within ``sigmas`` standard deviations of n p?"""
    sd = math.sqrt(n * p * (1.0 - p))
    if sd == 0:
        z = 0.0 if count == n * p else math.inf
    else:
        z = (count - n * p) / sd
    return BinomialCheck(int(count), int(n), float(p), float(z), float(sigmas))


# ---------------------------------------------------------------------------
# cosine transform

def _qawf(f, lo: float, x: float, cfg: QuadratureConfig) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(f, lo, np.inf, weight="cos", wvar=x, epsabs=cfg.abs_tol,
                             limlst=200, limit=4 * cfg.max_depth, full_output=1)
    val, err = out[0], out[1]
    if not math.isfinite(val) or (len(out) > 3 and err > 1e4 * max(cfg.abs_tol, abs(val) * cfg.rel_tol)):
        raise QuadratureError(f"oscillatory tail failed at x = {x}: {val:.6g} +- {err:.2g}")
    return val


def cosine_transform(density: Callable[[float], float] | None, x: float,
                     cfg: QuadratureConfig | None = None, atoms: Iterable[tuple[float, float]] = (),
                     breakpoints: Sequence[float] = (), periods: int = 40,
                     zero_cutoff: float = 2000 * math.pi,
                     tail_mass: Callable[[float], float] | None = None) -> float:
    """``int_R g(t) cos(x t) dt`` for an even density g, plus ``sum w cos(x loc)`` over atoms.

    The half line is cut at multiples of pi/x for ``periods`` half-periods and
    the rest is handed to an oscillatory-weight rule.  At x = 0 the range up
    to ``zero_cutoff`` is split at multiples of pi and the remainder is mapped
    through t = 1/u, unless ``tail_mass(T)`` supplies the mass beyond T.
    """
    cfg = cfg or QuadratureConfig.default()
    x = abs(float(x))
    total = math.fsum(w * math.cos(x * loc) for loc, w in atoms)
    if density is None:
        return total
    if x == 0.0:
        edges = list(np.arange(0.0, zero_cutoff, math.pi)) + list(breakpoints)
        body = quad_integrate(density, 0.0, zero_cutoff, cfg, breakpoints=edges)
        if tail_mass is not None:
            tail = tail_mass(zero_cutoff)
        else:
            tail = quad_integrate(density, zero_cutoff, math.inf, cfg)
        return total + 2.0 * (body + tail)
    step = math.pi / x
    f = lambda t: density(t) * math.cos(x * t)  # noqa: E731
    body, lo = 0.0, 0.0
    for attempt in range(4):
        # a density oscillating near frequency x defeats the tail rule; move the cut outward
        cut = periods * step * 8 ** attempt
        edges = np.arange(lo + step, cut, step).tolist()
        edges += [b for b in breakpoints if lo < b < cut]
        body += quad_integrate(f, lo, cut, cfg, breakpoints=edges)
        lo = cut
        try:
            return total + 2.0 * (body + _qawf(density, cut, x, cfg))
        except QuadratureError:
            if attempt == 3:
                raise


__all__ = [
    "BinomialCheck", "KsReport", "binomial_check", "cosine_transform", "critical_value",
    "ecdf", "ks_constant", "ks_one_sample", "ks_two_sample",
]
