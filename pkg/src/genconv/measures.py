"""Probability measures on [0, inf) as finite mixtures of atoms and tagged densities.

Every measure the library manipulates is a :class:`MixtureMeasure`: a list of
point masses plus a list of :class:`ContinuousComponent` objects, each naming a
density from the registry below together with its parameters, a mixture weight
and a scale (the dilation applied to the base law).
"""
from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate, special
from scipy.interpolate import PchipInterpolator

INF = math.inf
MASS_TOL = 1e-12


class MeasureError(ValueError):
    """Invalid measure construction or evaluation request."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class UnboundedQuantileError(MeasureError):
    """quantile(m, 1) requested for a measure with unbounded support."""


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_depth: int = 60
    infinite_tail_cutoff_mass: float = 1e-12

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise MeasureError("quadrature tolerances must be positive")
        if self.max_depth < 1:
            raise MeasureError("max_depth must be >= 1")

    @classmethod
    def default(cls) -> "QuadratureConfig":
        env = os.environ.get("GENCONV_QUAD_TOL")
        if env:
            tol = float(env)
            return cls(abs_tol=tol, rel_tol=tol)
        return cls()


def _quad_piece(f, lo, hi, cfg, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(f, lo, hi, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
                             limit=4 * cfg.max_depth, full_output=1, **kw)
    val, err = out[0], out[1]
    ier = 0 if len(out) == 3 else out[3]
    if not math.isfinite(val):
        raise QuadratureError(f"non-finite integral on [{lo}, {hi}]")
    # scipy's error estimate is pessimistic; only give up when it is far off target
    if ier != 0 and err > 1e4 * max(cfg.abs_tol, cfg.rel_tol * abs(val)):
        raise QuadratureError(
            f"quadrature failed on [{lo}, {hi}]: estimate {val:.6g} +- {err:.2g}")
    return val


def quad_integrate(f: Callable[[float], float], a: float, b: float,
                   cfg: QuadratureConfig | None = None,
                   breakpoints: Iterable[float] = ()) -> float:
    """Integrate ``f`` over ``[a, b]``; ``b`` may be ``inf``.

    The interval is split at ``breakpoints``. An infinite last piece
    ``[c, inf)`` with ``c > 0`` is mapped to ``(0, 1/c]`` through ``u = 1/t``.
    """
    cfg = cfg or QuadratureConfig.default()
    if b < a:
        return -quad_integrate(f, b, a, cfg, breakpoints)
    if a == b:
        return 0.0
    cuts = sorted({float(p) for p in breakpoints if a < p < b})
    edges = [a, *cuts, b]
    if math.isinf(b) and edges[-2] <= 0:
        edges.insert(-1, max(1.0, edges[-2] + 1.0))
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if math.isinf(hi):
            def g(u, lo=lo):
                if u <= 0:
                    return 0.0
                return f(1.0 / u) / (u * u)
            total += _quad_piece(g, 0.0, 1.0 / lo, cfg)
        else:
            total += _quad_piece(f, lo, hi, cfg)
    return total


# ---------------------------------------------------------------------------
# density registry

def _as_array(t):
    return np.asarray(t, dtype=float)


def _bisect_quantile(cdf, u, lo, hi, iters=200):
    """Vectorised generalised inverse of a continuous ``cdf`` on ``[lo, hi]``."""
    u = np.atleast_1d(_as_array(u))
    lo_arr = np.full(u.shape, float(lo))
    if math.isinf(hi):
        hi_arr = np.full(u.shape, max(2.0 * lo, lo + 1.0, 1.0))
        for _ in range(2000):
            short = cdf(hi_arr) < u
            if not short.any():
                break
            hi_arr = np.where(short, hi_arr * 2.0, hi_arr)
    else:
        hi_arr = np.full(u.shape, float(hi))
    for _ in range(iters):
        mid = 0.5 * (lo_arr + hi_arr)
        done = (mid <= lo_arr) | (mid >= hi_arr)
        if done.all():
            break
        up = cdf(mid) >= u
        hi_arr = np.where(up & ~done, mid, hi_arr)
        lo_arr = np.where(~up & ~done, mid, lo_arr)
    return hi_arr


@dataclass(frozen=True)
class Law:
    """Base density on ``[lower, upper]`` with vectorised pdf/cdf/quantile."""

    name: str
    param_names: tuple[str, ...]
    support: Callable[..., tuple[float, float]]
    pdf: Callable
    cdf: Callable
    quantile: Callable | None = None
    breakpoints: Callable[..., tuple[float, ...]] = lambda *p: ()
    expect: Callable | None = None
    validate: Callable[..., None] = lambda *p: None

    def ppf(self, u, params):
        if self.quantile is not None:
            return self.quantile(u, *params)
        lo, hi = self.support(*params)
        return _bisect_quantile(lambda t: self.cdf(t, *params), u, lo, hi)


LAWS: dict[str, Law] = {}


def _register(law: Law) -> Law:
    LAWS[law.name] = law
    return law


def _need(cond, msg):
    if not cond:
        raise MeasureError(msg)


# pareto(beta): density beta t^(-beta-1) on [1, inf)
def _pareto_pdf(t, beta):
    t = _as_array(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(t >= 1.0, beta * np.power(np.maximum(t, 1.0), -beta - 1.0), 0.0)


def _pareto_cdf(t, beta):
    t = _as_array(t)
    return np.where(t >= 1.0, -np.expm1(-beta * np.log(np.maximum(t, 1.0))), 0.0)


_register(Law(
    "pareto", ("beta",), lambda b: (1.0, INF), _pareto_pdf, _pareto_cdf,
    quantile=lambda u, b: np.power(1.0 - _as_array(u), -1.0 / b),
    validate=lambda b: _need(b > 0, "pareto needs beta > 0"),
))


# pow(alpha): density alpha x^(alpha-1) on [0, 1]
def _pow_pdf(t, a):
    t = _as_array(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where((t > 0) & (t <= 1.0), a * np.power(np.clip(t, 1e-300, 1.0), a - 1.0), 0.0)


_register(Law(
    "pow", ("alpha",), lambda a: (0.0, 1.0), _pow_pdf,
    lambda t, a: np.power(np.clip(_as_array(t), 0.0, 1.0), a),
    quantile=lambda u, a: np.power(_as_array(u), 1.0 / a),
    validate=lambda a: _need(a > 0, "pow needs alpha > 0"),
))


# frechet_like(alpha): cdf exp(-t^-alpha)
def _frechet_cdf(t, a):
    t = _as_array(t)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(t > 0, np.exp(-np.power(np.maximum(t, 1e-300), -a)), 0.0)


def _frechet_pdf(t, a):
    t = _as_array(t)
    tt = np.maximum(t, 1e-300)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        v = a * np.power(tt, -a - 1.0) * np.exp(-np.power(tt, -a))
    return np.where(t > 0, np.nan_to_num(v), 0.0)


def _frechet_q(u, a):
    u = _as_array(u)
    with np.errstate(divide="ignore"):
        return np.where(u > 0, np.power(-np.log(np.maximum(u, 1e-300)), -1.0 / a), 0.0)


_register(Law(
    "frechet_like", ("alpha",), lambda a: (0.0, INF), _frechet_pdf, _frechet_cdf,
    quantile=_frechet_q,
    validate=lambda a: _need(a > 0, "frechet_like needs alpha > 0"),
))


# weibull_kernel(a, r): density r/Gamma(a) t^(ar-1) exp(-t^r); law of G^(1/r), G ~ gamma(a)
def _wk_pdf(t, a, r):
    t = _as_array(t)
    tt = np.maximum(t, 1e-300)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        logv = math.log(r) - math.lgamma(a) + (a * r - 1.0) * np.log(tt) - np.power(tt, r)
        v = np.exp(logv)
    return np.where(t > 0, v, 0.0)


_register(Law(
    "weibull_kernel", ("a", "r"), lambda a, r: (0.0, INF), _wk_pdf,
    lambda t, a, r: special.gammainc(a, np.power(np.maximum(_as_array(t), 0.0), r)),
    quantile=lambda u, a, r: np.power(special.gammaincinv(a, _as_array(u)), 1.0 / r),
    validate=lambda a, r: _need(a > 0 and r > 0, "weibull_kernel needs a, r > 0"),
))


# inv_weibull_kernel(a, r): law of 1/W, W ~ weibull_kernel(a, r)
def _iwk_pdf(t, a, r):
    t = _as_array(t)
    tt = np.maximum(t, 1e-300)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        logv = math.log(r) - math.lgamma(a) + (-a * r - 1.0) * np.log(tt) - np.power(tt, -r)
        v = np.exp(logv)
    return np.where(t > 0, np.nan_to_num(v), 0.0)


def _iwk_cdf(t, a, r):
    t = _as_array(t)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(t > 0, special.gammaincc(a, np.power(np.maximum(t, 1e-300), -r)), 0.0)


_register(Law(
    "inv_weibull_kernel", ("a", "r"), lambda a, r: (0.0, INF), _iwk_pdf, _iwk_cdf,
    quantile=lambda u, a, r: np.power(special.gammainccinv(a, _as_array(u)), -1.0 / r),
    validate=lambda a, r: _need(a > 0 and r > 0, "inv_weibull_kernel needs a, r > 0"),
))


# ku_orderstat(alpha, k, n): law of Q_{k:n+k}, Q ~ pareto(alpha)
def _kuo_pdf(s, a, k, n):
    s = _as_array(s)
    k, n = int(k), int(n)
    ss = np.maximum(s, 1.0)
    coef = a * k * math.comb(n + k, n)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = coef * np.power(ss, -a * (n + 1) - 1.0) * np.power(-np.expm1(-a * np.log(ss)), k - 1)
    return np.where(s > 1.0, v, 0.0)


def _kuo_cdf(s, a, k, n):
    s = _as_array(s)
    k, n = int(k), int(n)
    base = np.where(s > 1.0, -np.expm1(-a * np.log(np.maximum(s, 1.0))), 0.0)
    return special.betainc(k, n + 1, base)


def _kuo_q(u, a, k, n):
    v = special.betaincinv(int(k), int(n) + 1, _as_array(u))
    with np.errstate(divide="ignore"):
        return np.power(1.0 - v, -1.0 / a)


def _kuo_validate(a, k, n):
    _need(a > 0, "ku_orderstat needs alpha > 0")
    _need(float(k).is_integer() and float(n).is_integer() and k >= 1 and n >= 0,
          "ku_orderstat needs integers k >= 1, n >= 0")


_register(Law(
    "ku_orderstat", ("alpha", "k", "n"), lambda a, k, n: (1.0, INF), _kuo_pdf, _kuo_cdf,
    quantile=_kuo_q, validate=_kuo_validate,
))


# ku_lom(alpha, n): density n alpha t^(alpha-1) (1 - t^alpha)^(n-1) on [0, 1]
def _kul_pdf(t, a, n):
    t = _as_array(t)
    tt = np.clip(t, 1e-300, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = n * a * np.power(tt, a - 1.0) * np.power(1.0 - np.power(tt, a), n - 1.0)
    return np.where((t > 0) & (t <= 1.0), v, 0.0)


_register(Law(
    "ku_lom", ("alpha", "n"), lambda a, n: (0.0, 1.0), _kul_pdf,
    lambda t, a, n: 1.0 - np.power(1.0 - np.power(np.clip(_as_array(t), 0.0, 1.0), a), n),
    quantile=lambda u, a, n: np.power(1.0 - np.power(1.0 - _as_array(u), 1.0 / n), 1.0 / a),
    validate=lambda a, n: _need(a > 0 and n >= 1, "ku_lom needs alpha > 0, n >= 1"),
))


# kingman_radial(s, x, y): law of sqrt(x^2 + y^2 + 2 x y V), V with density ~ (1 - v^2)^(s - 1/2)
def _kr_support(s, x, y):
    return (abs(x - y), x + y)


def _kr_const(s):
    return math.exp(math.lgamma(s + 1.0) - 0.5 * math.log(math.pi) - math.lgamma(s + 0.5))


def _kr_pdf(r, s, x, y):
    r = _as_array(r)
    lo, hi = _kr_support(s, x, y)
    inside = (r > lo) & (r < hi)
    rr = np.where(inside, r, 0.5 * (lo + hi))
    prod = (rr * rr - (x - y) ** 2) * ((x + y) ** 2 - rr * rr)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        v = (_kr_const(s) * 2.0 ** (1.0 - 2.0 * s) * (x * y) ** (-2.0 * s)
             * rr * np.power(np.maximum(prod, 0.0), s - 0.5))
    return np.where(inside, v, 0.0)


def _kr_angle(r, x, y):
    return np.clip((_as_array(r) ** 2 - x * x - y * y) / (2.0 * x * y), -1.0, 1.0)


def _kr_cdf(r, s, x, y):
    v = _kr_angle(r, x, y)
    return special.betainc(s + 0.5, s + 0.5, 0.5 * (1.0 + v))


def _kr_q(u, s, x, y):
    v = 2.0 * special.betaincinv(s + 0.5, s + 0.5, _as_array(u)) - 1.0
    return np.sqrt(np.maximum(x * x + y * y + 2.0 * x * y * v, 0.0))


def _kr_expect(func, params, upper, cfg):
    s, x, y = params
    # integrate over the angle variable with the algebraic weight done by QAWS
    c = _kr_const(s)
    vmax = 1.0
    if upper < x + y:
        if upper <= abs(x - y):
            return 0.0
        vmax = float(_kr_angle(upper, x, y))

    def g(v):
        return func(math.sqrt(max(x * x + y * y + 2.0 * x * y * v, 0.0)))

    if vmax >= 1.0:
        return c * _quad_piece(g, -1.0, 1.0, cfg, weight="alg", wvar=(s - 0.5, s - 0.5))
    return c * _quad_piece(lambda v: g(v) * (1.0 - v) ** (s - 0.5), -1.0, vmax, cfg,
                           weight="alg", wvar=(s - 0.5, 0.0))


_register(Law(
    "kingman_radial", ("s", "x", "y"), _kr_support, _kr_pdf, _kr_cdf, quantile=_kr_q,
    expect=_kr_expect,
    validate=lambda s, x, y: _need(s > -0.5 and x > 0 and y > 0,
                                   "kingman_radial needs s > -1/2 and x, y > 0"),
))


# kucharczak(a, r, x, y): density of delta_x o_1 delta_y, support [(x^r + y^r)^(1/r), inf).
# In u = t^r the density is
#   (XY)^a / (Gamma(a) Gamma(1-a)) u^-a (u - X - Y)^-a (1/(u - X) + 1/(u - Y)),  X = x^r, Y = y^r.
def _ku_support(a, r, x, y):
    return ((x ** r + y ** r) ** (1.0 / r), INF)


def _kuch_u_density(u, a, X, Y):
    logc = a * (math.log(X) + math.log(Y)) - math.lgamma(a) - math.lgamma(1.0 - a)
    S = X + Y
    with np.errstate(divide="ignore", invalid="ignore"):
        return (np.exp(logc - a * np.log(u) - a * np.log(u - S))
                * (1.0 / (u - X) + 1.0 / (u - Y)))


def _kuch_pdf(t, a, r, x, y):
    t = _as_array(t)
    X, Y = x ** r, y ** r
    lo = (X + Y) ** (1.0 / r)
    inside = t > lo
    tt = np.where(inside, t, 2.0 * lo)
    u = np.power(tt, r)
    v = _kuch_u_density(u, a, X, Y) * r * np.power(tt, r - 1.0)
    return np.where(inside, v, 0.0)


def _kuch_w_integrand(w, a, X, Y):
    # u - S = w^(1/(1-a)); the (u - S)^-a singularity cancels against du/dw
    S = X + Y
    u = S + w ** (1.0 / (1.0 - a))
    logc = a * (math.log(X) + math.log(Y)) - math.lgamma(a) - math.lgamma(1.0 - a)
    return math.exp(logc - a * math.log(u)) * (1.0 / (u - X) + 1.0 / (u - Y)) / (1.0 - a)


def _kuch_w_of_t(t, a, r, x, y):
    S = x ** r + y ** r
    if t <= S ** (1.0 / r):
        return 0.0
    d = t ** r - S
    return d ** (1.0 - a) if d > 0 else 0.0


def _kuch_expect(func, params, upper, cfg):
    a, r, x, y = params
    X, Y = x ** r, y ** r
    S = X + Y
    wmax = _kuch_w_of_t(upper, a, r, x, y) if math.isfinite(upper) else INF

    def g(w):
        u = S + w ** (1.0 / (1.0 - a))
        return func(u ** (1.0 / r)) * _kuch_w_integrand(w, a, X, Y)

    if wmax == 0.0:
        return 0.0
    if math.isinf(wmax):
        return quad_integrate(g, 0.0, INF, cfg, breakpoints=(1.0,))
    return quad_integrate(g, 0.0, wmax, cfg)


def _kuch_cdf_scalar(t, a, r, x, y, cfg=None):
    wmax = _kuch_w_of_t(t, a, r, x, y)
    if wmax <= 0:
        return 0.0
    X, Y = x ** r, y ** r
    g = lambda w: _kuch_w_integrand(w, a, X, Y)  # noqa: E731
    if wmax > (X + Y) ** (1.0 - a):
        # the mass sits near w = 0; integrate the thin tail instead
        v = 1.0 - quad_integrate(g, wmax, INF, cfg)
    else:
        v = quad_integrate(g, 0.0, wmax, cfg)
    return min(max(v, 0.0), 1.0)


@lru_cache(maxsize=64)
def _kuch_table(a, r, x, y):
    """CDF table on a log-spaced grid in w, for fast vectorised quantiles."""
    X, Y = x ** r, y ** r
    scale = (X + Y) ** (1.0 - a)
    ws = np.concatenate(([0.0], scale * np.logspace(-10, 10, 1601)))
    cfg = QuadratureConfig(abs_tol=1e-13, rel_tol=1e-11)
    pieces = [quad_integrate(lambda w: _kuch_w_integrand(w, a, X, Y), lo, hi, cfg)
              for lo, hi in zip(ws[:-1], ws[1:])]
    F = np.concatenate(([0.0], np.cumsum(pieces)))
    F = np.minimum(F, 1.0)
    keep = np.concatenate(([True], np.diff(F) > 0))
    return ws[keep], F[keep]


def _kuch_cdf(t, a, r, x, y):
    t = _as_array(t)
    flat = np.array([_kuch_cdf_scalar(float(v), a, r, x, y) for v in t.ravel()])
    return flat.reshape(t.shape)


def _kuch_q(u, a, r, x, y):
    ws, F = _kuch_table(a, r, x, y)
    u = _as_array(u)
    # interpolate w as a function of F in log-survival coordinates for the tail
    logS = -np.log(np.maximum(1.0 - F, 1e-300))
    interp = PchipInterpolator(logS, ws, extrapolate=True)
    target = -np.log(np.maximum(1.0 - u, 1e-300))
    w = np.maximum(interp(np.minimum(target, logS[-1])), 0.0)
    S = x ** r + y ** r
    return np.power(S + np.power(w, 1.0 / (1.0 - a)), 1.0 / r)


def _kuch_validate(a, r, x, y):
    _need(0 < a < 1, "kucharczak density needs a in (0, 1); a = 1 is the point mass")
    _need(r > 0 and x > 0 and y > 0, "kucharczak density needs r, x, y > 0")


_register(Law(
    "kucharczak", ("a", "r", "x", "y"), _ku_support, _kuch_pdf, _kuch_cdf, quantile=_kuch_q,
    expect=_kuch_expect, validate=_kuch_validate,
))


# diamond_tail(p, alpha): (alpha/(2p-1)) (2p - s^q) s^(-2 alpha - 1), q = alpha(1-2p)/(1-p), s >= 1
HALF_TOL = 1e-9


def _dt_pdf(s, p, a):
    s = _as_array(s)
    ss = np.maximum(s, 1.0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if abs(p - 0.5) < HALF_TOL:
            v = a * (1.0 + 2.0 * a * np.log(ss)) * np.power(ss, -2.0 * a - 1.0)
        elif p == 1.0:
            v = 2.0 * a * np.power(ss, -2.0 * a - 1.0)
        else:
            q = a * (1.0 - 2.0 * p) / (1.0 - p)
            v = a / (2.0 * p - 1.0) * (2.0 * p - np.power(ss, q)) * np.power(ss, -2.0 * a - 1.0)
    return np.where(s >= 1.0, v, 0.0)


def _dt_cdf(s, p, a):
    s = _as_array(s)
    ls = np.log(np.maximum(s, 1.0))
    if abs(p - 0.5) < HALF_TOL:
        v = 1.0 - np.exp(-2.0 * a * ls) * (1.0 + a * ls)
    elif p == 1.0:
        v = -np.expm1(-2.0 * a * ls)
    else:
        v = (p * -np.expm1(-2.0 * a * ls)
             - (1.0 - p) * -np.expm1(-a / (1.0 - p) * ls)) / (2.0 * p - 1.0)
    return np.where(s >= 1.0, np.clip(v, 0.0, 1.0), 0.0)


_register(Law(
    "diamond_tail", ("p", "alpha"), lambda p, a: (1.0, INF), _dt_pdf, _dt_cdf,
    validate=lambda p, a: _need(0 <= p <= 1 and a > 0, "diamond_tail needs p in [0,1], alpha > 0"),
))


# kendall_type_lom(c, alpha, p): cdf (1+c) x^alpha - c x^(alpha p) on [0, 1]
def _ktl_pdf(x, c, a, p):
    x = _as_array(x)
    xx = np.clip(x, 1e-300, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = a * (1.0 + c - c * p * np.power(xx, a * (p - 1.0))) * np.power(xx, a - 1.0)
    return np.where((x > 0) & (x < 1.0), v, 0.0)


def _ktl_cdf(x, c, a, p):
    xx = np.clip(_as_array(x), 0.0, 1.0)
    return np.clip((1.0 + c) * np.power(xx, a) - c * np.power(xx, a * p), 0.0, 1.0)


_register(Law(
    "kendall_type_lom", ("c", "alpha", "p"), lambda c, a, p: (0.0, 1.0), _ktl_pdf, _ktl_cdf,
    validate=lambda c, a, p: _need(a > 0 and p >= 2, "kendall_type_lom needs alpha > 0, p >= 2"),
))


# kendall_type_maxrep(c, alpha, p): law of 1/X, X ~ kendall_type_lom
def _ktm_pdf(t, c, a, p):
    t = _as_array(t)
    tt = np.maximum(t, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = (1.0 + c) * a * np.power(tt, -a - 1.0) - c * a * p * np.power(tt, -a * p - 1.0)
    return np.where(t > 1.0, v, 0.0)


def _ktm_cdf(t, c, a, p):
    t = _as_array(t)
    with np.errstate(divide="ignore"):
        inv = np.where(t > 0, 1.0 / np.maximum(t, 1e-300), INF)
    return np.where(t >= 1.0, 1.0 - _ktl_cdf(inv, c, a, p), 0.0)


def _ktm_q(u, c, a, p):
    lom = LAWS["kendall_type_lom"]
    x = lom.ppf(1.0 - _as_array(u), (c, a, p))
    with np.errstate(divide="ignore"):
        return 1.0 / x


_register(Law(
    "kendall_type_maxrep", ("c", "alpha", "p"), lambda c, a, p: (1.0, INF), _ktm_pdf, _ktm_cdf,
    quantile=_ktm_q,
    validate=lambda c, a, p: _need(a > 0 and p >= 2, "kendall_type_maxrep needs alpha > 0, p >= 2"),
))


# g_alpha(alpha): law of |T| where T has the symmetric weakly stable density g_alpha
def _ga_pdf(t, a):
    from .kernels import weak_stable_density_g
    t = _as_array(t)
    flat = [2.0 * weak_stable_density_g(a, float(v)) if v > 0 else 0.0 for v in t.ravel()]
    return np.asarray(flat).reshape(t.shape)


def _ga_cdf(t, a):
    t = _as_array(t)
    out = []
    for v in t.ravel():
        if v <= 0:
            out.append(0.0)
            continue
        pts = np.arange(1, int(v / math.pi) + 1) * math.pi
        out.append(min(1.0, quad_integrate(lambda s: float(_ga_pdf(s, a)), 0.0, float(v),
                                           breakpoints=pts)))
    return np.asarray(out).reshape(t.shape)


_register(Law(
    "g_alpha", ("alpha",), lambda a: (0.0, INF), _ga_pdf, _ga_cdf,
    breakpoints=lambda a: tuple(np.arange(1, 64) * math.pi),
    validate=lambda a: _need(0 < a <= 1, "g_alpha needs alpha in (0, 1]"),
))


# table(grid..., cdf...): piecewise linear CDF, used for numerically inverted laws
def _split_table(params):
    k = len(params) // 2
    return np.asarray(params[:k]), np.asarray(params[k:])


def _tab_support(*params):
    g, _ = _split_table(params)
    return (float(g[0]), float(g[-1]))


def _tab_cdf(t, *params):
    g, F = _split_table(params)
    return np.interp(_as_array(t), g, F, left=0.0, right=1.0)


def _tab_pdf(t, *params):
    g, F = _split_table(params)
    t = _as_array(t)
    dens = np.diff(F) / np.diff(g)
    idx = np.clip(np.searchsorted(g, t, side="right") - 1, 0, len(dens) - 1)
    return np.where((t >= g[0]) & (t < g[-1]), dens[idx], 0.0)


def _tab_q(u, *params):
    g, F = _split_table(params)
    keep = np.concatenate(([True], np.diff(F) > 0))
    return np.interp(_as_array(u), F[keep], g[keep])


def _tab_validate(*params):
    _need(len(params) >= 4 and len(params) % 2 == 0, "table needs matching grid and cdf lists")
    g, F = _split_table(params)
    _need(np.all(np.diff(g) > 0) and g[0] >= 0, "table grid must be increasing and >= 0")
    _need(np.all(np.diff(F) >= 0) and abs(F[0]) < 1e-12 and abs(F[-1] - 1) < 1e-9,
          "table cdf must rise monotonically from 0 to 1")


_register(Law(
    "table", (), _tab_support, _tab_pdf, _tab_cdf, quantile=_tab_q,
    breakpoints=lambda *p: tuple(_split_table(p)[0]), validate=_tab_validate,
))


# ---------------------------------------------------------------------------
# measure types

@dataclass(frozen=True)
class Atom:
    location: float
    weight: float

    def __post_init__(self):
        if not (self.location >= 0 and math.isfinite(self.location)):
            raise MeasureError(f"atom location must be finite and >= 0, got {self.location}")
        if not (-MASS_TOL <= self.weight <= 1 + MASS_TOL):
            raise MeasureError(f"atom weight must lie in [0, 1], got {self.weight}")


@dataclass(frozen=True)
class ContinuousComponent:
    density_id: str
    params: tuple[float, ...]
    weight: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.density_id not in LAWS:
            raise MeasureError(f"unknown density id {self.density_id!r}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        law = self.law
        if law.param_names and len(self.params) != len(law.param_names):
            raise MeasureError(f"{self.density_id} expects parameters {law.param_names}")
        law.validate(*self.params)
        if not (-MASS_TOL <= self.weight <= 1 + MASS_TOL):
            raise MeasureError(f"component weight must lie in [0, 1], got {self.weight}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise MeasureError("component scale must be positive")

    @property
    def law(self) -> Law:
        return LAWS[self.density_id]

    @property
    def support(self) -> tuple[float, float]:
        lo, hi = self.law.support(*self.params)
        return (lo * self.scale, hi * self.scale)

    def pdf(self, t):
        return self.law.pdf(_as_array(t) / self.scale, *self.params) / self.scale

    def cdf(self, t):
        return self.law.cdf(_as_array(t) / self.scale, *self.params)

    def quantile(self, u):
        return self.scale * self.law.ppf(u, self.params)

    def breakpoints(self) -> tuple[float, ...]:
        lo, hi = self.law.support(*self.params)
        pts = [lo, *self.law.breakpoints(*self.params)]
        if math.isfinite(hi):
            pts.append(hi)
        return tuple(p * self.scale for p in pts)

    def expect(self, func: Callable[[float], float], upper: float = INF,
               cfg: QuadratureConfig | None = None) -> float:
        """Integral of ``func`` against this (unit-mass) component, restricted to t <= upper."""
        cfg = cfg or QuadratureConfig.default()
        c = self.scale
        law = self.law
        base_upper = upper / c
        if law.expect is not None:
            return law.expect(lambda v: func(c * v), self.params, base_upper, cfg)
        lo, hi = law.support(*self.params)
        hi = min(hi, base_upper)
        if hi <= lo:
            return 0.0
        pts = [p for p in law.breakpoints(*self.params) if lo < p < hi]
        return quad_integrate(lambda v: func(c * v) * float(law.pdf(v, *self.params)),
                              lo, hi, cfg, breakpoints=pts)

    def dilated(self, a: float) -> "ContinuousComponent":
        return replace(self, scale=self.scale * a)


@dataclass(frozen=True)
class MixtureMeasure:
    atoms: tuple[Atom, ...] = ()
    continuous: tuple[ContinuousComponent, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "continuous", tuple(self.continuous))
        total = self.total_weight()
        if abs(total - 1.0) > MASS_TOL:
            raise MeasureError(f"mixture weights sum to {total!r}, expected 1")

    def total_weight(self) -> float:
        return math.fsum([a.weight for a in self.atoms] + [c.weight for c in self.continuous])

    @property
    def is_atomic(self) -> bool:
        return not self.continuous

    def support(self) -> tuple[float, float]:
        los = [a.location for a in self.atoms] + [c.support[0] for c in self.continuous]
        his = [a.location for a in self.atoms] + [c.support[1] for c in self.continuous]
        return (min(los), max(his))

    def breakpoints(self) -> tuple[float, ...]:
        pts = {a.location for a in self.atoms}
        for c in self.continuous:
            pts.update(c.breakpoints())
        return tuple(sorted(pts))

    def cdf(self, t):
        return cdf(self, t)

    def to_dict(self) -> dict:
        return {
            "atoms": [{"loc": a.location, "w": a.weight} for a in self.atoms],
            "continuous": [_component_to_dict(c) for c in self.continuous],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "MixtureMeasure":
        try:
            atoms = [Atom(float(a["loc"]), float(a["w"])) for a in data.get("atoms", [])]
            comps = [_component_from_dict(c) for c in data.get("continuous", [])]
        except (KeyError, TypeError) as exc:
            raise MeasureError(f"malformed measure document: {exc}") from exc
        return cls(tuple(atoms), tuple(comps))

    @classmethod
    def from_json(cls, text: str) -> "MixtureMeasure":
        return cls.from_dict(json.loads(text))


def _component_to_dict(c: ContinuousComponent) -> dict:
    law = c.law
    if c.density_id == "table":
        g, F = _split_table(c.params)
        params = {"grid": [float(v) for v in g], "cdf": [float(v) for v in F]}
    else:
        params = dict(zip(law.param_names, c.params))
    params["scale"] = c.scale
    lo, hi = c.support
    return {"id": c.density_id, "params": params, "w": c.weight,
            "support": [lo, hi if math.isfinite(hi) else None]}


def _component_from_dict(d: dict) -> ContinuousComponent:
    did = d["id"]
    if did not in LAWS:
        raise MeasureError(f"unknown density id {did!r}")
    params = dict(d.get("params", {}))
    scale = float(params.pop("scale", 1.0))
    if did == "table":
        values = tuple(params["grid"]) + tuple(params["cdf"])
    else:
        values = tuple(params[name] for name in LAWS[did].param_names)
    return ContinuousComponent(did, values, float(d["w"]), scale)


def dirac(location: float) -> MixtureMeasure:
    return MixtureMeasure((Atom(float(location), 1.0),))


def single(density_id: str, *params: float, scale: float = 1.0) -> MixtureMeasure:
    return MixtureMeasure((), (ContinuousComponent(density_id, params, 1.0, scale),))


def pareto(beta: float) -> MixtureMeasure:
    return single("pareto", beta)


def pow_law(alpha: float) -> MixtureMeasure:
    return single("pow", alpha)


def build(atoms: Sequence[tuple[float, float]] = (),
          continuous: Sequence[tuple[float, ContinuousComponent]] = ()) -> MixtureMeasure:
    """Assemble a mixture from (location, weight) and (weight, component) pairs.

    Zero-weight pieces are dropped and coincident atoms are merged.
    """
    merged: dict[float, float] = {}
    for loc, w in atoms:
        if w > 0:
            merged[float(loc)] = merged.get(float(loc), 0.0) + w
    comps: dict[tuple, float] = {}
    for w, c in continuous:
        if w > 0:
            key = (c.density_id, c.params, c.scale)
            comps[key] = comps.get(key, 0.0) + w
    return MixtureMeasure(
        tuple(Atom(loc, w) for loc, w in sorted(merged.items())),
        tuple(ContinuousComponent(k[0], k[1], w, k[2]) for k, w in comps.items()),
    )


# ---------------------------------------------------------------------------
# operations

def dilate(m: MixtureMeasure, a: float) -> MixtureMeasure:
    """Law of ``aX`` for ``X ~ m``; ``a = 0`` gives the point mass at 0."""
    if a < 0:
        raise MeasureError("dilation factor must be >= 0")
    if a == 0:
        return dirac(0.0)
    if a == 1:
        return m
    return MixtureMeasure(
        tuple(Atom(x.location * a, x.weight) for x in m.atoms),
        tuple(c.dilated(a) for c in m.continuous),
    )


def mix(components: Sequence[tuple[float, MixtureMeasure]]) -> MixtureMeasure:
    weights = [w for w, _ in components]
    if any(w < 0 for w in weights):
        raise MeasureError("mixture weights must be non-negative")
    if abs(math.fsum(weights) - 1.0) > MASS_TOL:
        raise MeasureError(f"mixture weights sum to {math.fsum(weights)!r}, expected 1")
    atoms, conts = [], []
    for w, m in components:
        atoms += [(a.location, w * a.weight) for a in m.atoms]
        conts += [(w * c.weight, c) for c in m.continuous]
    return build(atoms, conts)


def cdf(m: MixtureMeasure, t):
    """Right-continuous distribution function; accepts scalars or arrays."""
    t_arr = _as_array(t)
    out = np.zeros(t_arr.shape)
    for a in m.atoms:
        out = out + np.where(t_arr >= a.location, a.weight, 0.0)
    for c in m.continuous:
        out = out + c.weight * c.cdf(t_arr)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def cdf_left(m: MixtureMeasure, t):
    """Left limit F(t-)."""
    t_arr = _as_array(t)
    out = np.zeros(t_arr.shape)
    for a in m.atoms:
        out = out + np.where(t_arr > a.location, a.weight, 0.0)
    for c in m.continuous:
        out = out + c.weight * c.cdf(t_arr)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def quantile(m: MixtureMeasure, u: float) -> float:
    """Generalised inverse ``inf{t : cdf(m, t) >= u}``."""
    if not 0.0 <= u <= 1.0:
        raise MeasureError("quantile level must lie in [0, 1]")
    lo, hi = m.support()
    if u == 0.0:
        return lo
    if u == 1.0:
        if math.isinf(hi):
            raise UnboundedQuantileError("quantile(1) of a measure with unbounded support")
        return hi
    if not m.atoms and len(m.continuous) == 1:
        return float(m.continuous[0].quantile(u))
    for a in sorted(m.atoms, key=lambda a: a.location):
        if cdf_left(m, a.location) < u <= cdf(m, a.location):
            return a.location
    upper = hi
    if math.isinf(upper):
        upper = max(1.0, 2.0 * lo)
        while cdf(m, upper) < u:
            upper *= 2.0
    left = lo
    for _ in range(300):
        mid = 0.5 * (left + upper)
        if mid <= left or mid >= upper:
            break
        if cdf(m, mid) >= u:
            upper = mid
        else:
            left = mid
    return upper


def total_mass(m: MixtureMeasure, cfg: QuadratureConfig | None = None) -> float:
    """Mass of ``m`` with every continuous part integrated numerically."""
    parts = [a.weight for a in m.atoms]
    for c in m.continuous:
        parts.append(c.weight * c.expect(lambda t: 1.0, cfg=cfg))
    return math.fsum(parts)
