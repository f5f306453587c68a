"""Williamson transform and the (F, G) pair algebra of Kendall convolutions.

For a measure with distribution function F the pair partner is
``G(t) = W(1/t)`` where ``W(t) = E(1 - t^alpha X^alpha)_+``.  The two are linked
by ``t^alpha G(t) = alpha * int_0^t x^(alpha-1) F(x) dx``, so that
``F = G + t G' / alpha`` at continuity points, and Kendall convolution
multiplies the G's.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .measures import (ContinuousComponent, MeasureError, MixtureMeasure,
                       QuadratureConfig, cdf, quad_integrate)

MAX_DEPTH = 64
BREAKPOINT_TOL = 1e-12

Evaluator = Callable[[float], float]


class AlphaMismatchError(MeasureError):
    """The two pairs belong to different Kendall convolutions."""


class DiscontinuityError(MeasureError):
    """Inversion requested at a jump of F."""


def _vectorised(f: Callable[[float], float]) -> Callable:
    def wrapped(t):
        arr = np.asarray(t, dtype=float)
        if arr.ndim == 0:
            return float(f(float(arr)))
        return np.array([f(float(v)) for v in arr.ravel()]).reshape(arr.shape)
    return wrapped


# ---------------------------------------------------------------------------
# transform

def _pareto_w(tau: float, beta: float, alpha: float) -> float:
    if tau >= 1.0:
        return 0.0
    if tau == 0.0:
        return 1.0
    if abs(alpha - beta) <= 1e-12 * max(alpha, beta):
        return 1.0 - tau ** alpha * (1.0 - alpha * math.log(tau))
    return 1.0 - tau ** beta - beta * (tau ** beta - tau ** alpha) / (alpha - beta)


def _pareto_dw(tau: float, beta: float, alpha: float) -> float:
    if tau >= 1.0 or tau == 0.0:
        return 0.0
    if abs(alpha - beta) <= 1e-12 * max(alpha, beta):
        return alpha * alpha * tau ** (alpha - 1.0) * math.log(tau)
    return (-beta * tau ** (beta - 1.0)
            - beta * (beta * tau ** (beta - 1.0) - alpha * tau ** (alpha - 1.0)) / (alpha - beta))


def _pow_w(tau: float, gamma: float, alpha: float) -> float:
    if tau <= 1.0:
        return 1.0 - tau ** alpha * gamma / (alpha + gamma)
    return tau ** (-gamma) * alpha / (alpha + gamma)


def _pow_dw(tau: float, gamma: float, alpha: float) -> float:
    if tau <= 1.0:
        return -alpha * gamma * tau ** (alpha - 1.0) / (alpha + gamma)
    return -alpha * gamma * tau ** (-gamma - 1.0) / (alpha + gamma)


CLOSED_FORMS = {"pareto": (_pareto_w, _pareto_dw), "pow": (_pow_w, _pow_dw)}


def _component_w(c: ContinuousComponent, alpha: float, t: float,
                 cfg: QuadratureConfig | None) -> float:
    if c.density_id in CLOSED_FORMS:
        return CLOSED_FORMS[c.density_id][0](t * c.scale, c.params[0], alpha)
    return c.expect(lambda s: 1.0 - (t * s) ** alpha, upper=1.0 / t, cfg=cfg)


def williamson(m: MixtureMeasure, alpha: float, t: float,
               cfg: QuadratureConfig | None = None) -> float:
    """``int (1 - t^alpha s^alpha)_+ m(ds)``."""
    if alpha <= 0:
        raise MeasureError("alpha must be positive")
    if t < 0:
        raise MeasureError("t must be >= 0")
    if t == 0:
        return 1.0
    parts = [a.weight * max(0.0, 1.0 - (t * a.location) ** alpha) for a in m.atoms]
    parts += [c.weight * _component_w(c, alpha, t, cfg) for c in m.continuous]
    return min(1.0, max(0.0, math.fsum(parts)))


# ---------------------------------------------------------------------------
# pairs

@dataclass(frozen=True)
class CdfPair:
    """Distribution function F together with its Williamson partner G."""

    alpha: float
    F: Callable
    G: Callable
    F_breakpoints: tuple[float, ...] = ()
    dG: Optional[Callable] = None
    depth: int = field(default=0, compare=False)

    def invert(self, t: float, h: float | None = None) -> float:
        return williamson_invert(self.G, self.alpha, t, h, derivative=self.dG,
                                 breakpoints=self.F_breakpoints)


def _is_breakpoint(t: float, breakpoints) -> bool:
    return any(abs(t - b) <= BREAKPOINT_TOL * max(1.0, abs(b)) for b in breakpoints)


def williamson_invert(G: Evaluator, alpha: float, t: float, h: float | None = None, *,
                      derivative: Evaluator | None = None, breakpoints=()) -> float:
    """Recover ``F(t) = G(t) + t G'(t) / alpha`` at a continuity point ``t > 0``."""
    if t <= 0:
        raise MeasureError("inversion needs t > 0")
    if _is_breakpoint(t, breakpoints):
        raise DiscontinuityError(f"F jumps at t = {t}; use one-sided limits")
    if derivative is not None:
        slope = float(derivative(t))
    else:
        step = max(1e-6, 1e-6 * t) if h is None else h
        step = min(step, 0.5 * t)
        slope = (float(G(t + step)) - float(G(t - step))) / (2.0 * step)
    value = float(G(t)) + t * slope / alpha
    return min(1.0, max(0.0, value))


def _g_quadrature(c: ContinuousComponent, alpha: float, t: float,
                  cfg: QuadratureConfig | None) -> float:
    lo = c.support[0]
    if t <= lo:
        return 0.0
    pts = [p for p in c.breakpoints() if lo < p < t]
    integral = quad_integrate(lambda x: x ** (alpha - 1.0) * float(c.cdf(x)), lo, t, cfg,
                              breakpoints=pts)
    return min(1.0, max(0.0, alpha * t ** (-alpha) * integral))


def g_by_quadrature(m: MixtureMeasure, alpha: float, t: float,
                    cfg: QuadratureConfig | None = None) -> float:
    """``alpha t^-alpha int_0^t x^(alpha-1) F(x) dx`` evaluated numerically."""
    if t <= 0:
        return float(cdf(m, 0.0))
    parts = [a.weight * max(0.0, 1.0 - (a.location / t) ** alpha) for a in m.atoms]
    parts += [c.weight * _g_quadrature(c, alpha, t, cfg) for c in m.continuous]
    return math.fsum(parts)


def kendall_pair_of(m: MixtureMeasure, alpha: float,
                    cfg: QuadratureConfig | None = None) -> CdfPair:
    if alpha <= 0:
        raise MeasureError("alpha must be positive")
    atoms = [(a.location, a.weight) for a in m.atoms]
    comps = list(m.continuous)
    closed = all(c.density_id in CLOSED_FORMS for c in comps)

    def g_scalar(t: float) -> float:
        if t <= 0:
            return float(cdf(m, 0.0))
        parts = [w * max(0.0, 1.0 - (loc / t) ** alpha) for loc, w in atoms]
        for c in comps:
            if c.density_id in CLOSED_FORMS:
                parts.append(c.weight * CLOSED_FORMS[c.density_id][0](c.scale / t, c.params[0], alpha))
            else:
                parts.append(c.weight * _g_quadrature(c, alpha, t, cfg))
        return min(1.0, max(0.0, math.fsum(parts)))

    def dg_scalar(t: float) -> float:
        if t <= 0:
            return 0.0
        parts = [w * alpha * loc ** alpha * t ** (-alpha - 1.0) for loc, w in atoms if t > loc]
        for c in comps:
            dw = CLOSED_FORMS[c.density_id][1](c.scale / t, c.params[0], alpha)
            parts.append(c.weight * dw * (-c.scale / (t * t)))
        return math.fsum(parts)

    return CdfPair(alpha, lambda t: cdf(m, t), _vectorised(g_scalar),
                   tuple(a.location for a in m.atoms),
                   _vectorised(dg_scalar) if closed else None)


def kendall_convolve(p1: CdfPair, p2: CdfPair) -> CdfPair:
    """Pair of the Kendall convolution: G = G1 G2, F = G1 F2 + G2 F1 - G1 G2."""
    if p1.alpha != p2.alpha:
        raise AlphaMismatchError(f"alpha {p1.alpha} vs {p2.alpha}")
    depth = max(p1.depth, p2.depth) + 1
    if depth > MAX_DEPTH:
        raise MeasureError(f"pair composition deeper than {MAX_DEPTH}")
    F1, G1, F2, G2 = p1.F, p1.G, p2.F, p2.G

    def F(t):
        g1, g2 = G1(t), G2(t)
        return np.clip(g1 * F2(t) + g2 * F1(t) - g1 * g2, 0.0, 1.0)

    def G(t):
        return G1(t) * G2(t)

    dG = None
    if p1.dG is not None and p2.dG is not None:
        d1, d2 = p1.dG, p2.dG
        dG = lambda t: d1(t) * G2(t) + G1(t) * d2(t)  # noqa: E731

    bps = tuple(sorted(set(p1.F_breakpoints) | set(p2.F_breakpoints)))
    return CdfPair(p1.alpha, _scalarise(F), _scalarise(G), bps,
                   _scalarise(dG) if dG else None, depth)


def _scalarise(f: Callable) -> Callable:
    def wrapped(t):
        out = f(t)
        arr = np.asarray(out, dtype=float)
        return float(arr) if arr.ndim == 0 else arr
    return wrapped


__all__ = [
    "AlphaMismatchError", "CdfPair", "DiscontinuityError", "g_by_quadrature",
    "kendall_convolve", "kendall_pair_of", "williamson", "williamson_invert",
]
