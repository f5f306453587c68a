"""Seeded random variates for base laws and for convolutions of point masses.

Every sampler takes the pair (theta1, theta2), scalars or broadcastable arrays,
and an optional ``size``.  With ``size=None`` and scalar inputs a float is
returned, otherwise an array.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .families import (FamilySpec, UnsupportedFamilyError, convex_decomposition,
                       unit_conv)
from .kernels import KernelError
from .measures import MixtureMeasure, single

GENERATOR = "philox4x64"


def make_rng(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Counter-based Philox generator keyed by ``(seed, stream_id)``."""
    if seed < 0 or stream_id < 0:
        raise ValueError("seed and stream_id must be non-negative")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream_id])))


@dataclass(frozen=True)
class SampleBatch:
    values: np.ndarray
    seed: int | None = None
    law_descriptor: dict = field(default_factory=dict)
    tag: str = "radial"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).ravel()
        object.__setattr__(self, "values", vals)
        if self.tag == "radial" and vals.size and vals.min() < 0:
            raise ValueError("radial batches hold non-negative values only")

    def __len__(self) -> int:
        return self.values.size

    def descriptor_json(self) -> str:
        return json.dumps({"seed": self.seed, "tag": self.tag, **self.law_descriptor},
                          sort_keys=True, separators=(",", ":"))


def _uniform(rng, shape):
    """Uniform draws on the open-closed interval (0, 1]."""
    return 1.0 - rng.random(shape)


def _out(values, scalar: bool):
    return float(values) if scalar else values


def _shape(size, *args):
    shape = np.broadcast_shapes(*(np.shape(a) for a in args))
    if size is None:
        return shape
    size = (size,) if isinstance(size, (int, np.integer)) else tuple(size)
    return np.broadcast_shapes(shape, size)


# ---------------------------------------------------------------------------
# base laws

def _draw_component(c, shape, rng) -> np.ndarray:
    p = c.params
    if c.density_id == "weibull_kernel":
        base = rng.gamma(p[0], 1.0, shape) ** (1.0 / p[1])
    elif c.density_id == "inv_weibull_kernel":
        base = rng.gamma(p[0], 1.0, shape) ** (-1.0 / p[1])
    else:
        u = rng.random(shape)
        base = np.asarray(c.quantile(u) / c.scale, dtype=float).reshape(shape)
    return c.scale * base


def sample_measure(m: MixtureMeasure, rng: np.random.Generator, size=None):
    """Draws from an arbitrary mixture: pick a piece by weight, then draw from it."""
    shape = () if size is None else ((size,) if np.isscalar(size) else tuple(size))
    pieces = [("atom", a.location, a.weight) for a in m.atoms]
    pieces += [("cont", c, c.weight) for c in m.continuous]
    if len(pieces) == 1:
        kind, obj, _ = pieces[0]
        out = np.full(shape, obj) if kind == "atom" else _draw_component(obj, shape, rng)
        return _out(out, size is None)
    weights = np.array([w for *_, w in pieces])
    idx = rng.choice(len(pieces), size=shape, p=weights / weights.sum())
    out = np.empty(shape)
    for i, (kind, obj, _) in enumerate(pieces):
        sel = idx == i
        count = int(np.count_nonzero(sel))
        if count == 0:
            continue
        out[sel] = obj if kind == "atom" else _draw_component(obj, (count,), rng)
    return _out(out, size is None)


def sample_base(law: str | MixtureMeasure, n: int, rng: np.random.Generator,
                *params: float, seed: int | None = None) -> SampleBatch:
    """``n`` draws from a named law (or from a mixture)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(law, MixtureMeasure):
        m, desc = law, {"measure": law.to_dict()}
    else:
        try:
            m = single(law, *params)
        except Exception as exc:
            raise KernelError(f"unsupported law {law!r}: {exc}") from exc
        desc = {"law": law, "params": [float(v) for v in params]}
    return SampleBatch(np.atleast_1d(sample_measure(m, rng, n)), seed, desc)


def sample_order_stat(law: str | MixtureMeasure, k: int, n: int, rng: np.random.Generator,
                      *params: float, size=None):
    """k-th smallest of n i.i.d. draws from ``law``."""
    if not 1 <= k <= n:
        raise ValueError(f"order statistic index k={k} outside 1..{n}")
    m = law if isinstance(law, MixtureMeasure) else single(law, *params)
    count = 1 if size is None else int(size)
    draws = np.asarray(sample_measure(m, rng, (count, n))).reshape(count, n)
    out = np.partition(draws, k - 1, axis=1)[:, k - 1]
    return _out(out[0], True) if size is None else out


# ---------------------------------------------------------------------------
# convolutions of point masses

def _max_ratio(theta1, theta2):
    t1, t2 = np.asarray(theta1, dtype=float), np.asarray(theta2, dtype=float)
    if np.any(t1 < 0) or np.any(t2 < 0):
        raise ValueError("theta values must be >= 0")
    big = np.maximum(t1, t2)
    small = np.minimum(t1, t2)
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.where(big > 0, small / np.where(big > 0, big, 1.0), 0.0)
    return big, rho


def _scalar(size, *thetas) -> bool:
    return size is None and all(np.ndim(t) == 0 for t in thetas)


def sample_kendall_conv(theta1, theta2, alpha: float, rng: np.random.Generator, size=None):
    """M Pi_{2 alpha} with probability rho^alpha, else M."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    big, rho = _max_ratio(theta1, theta2)
    shape = _shape(size, big)
    u = rng.random(shape)
    pi = _uniform(rng, shape) ** (-1.0 / (2.0 * alpha))
    out = np.where(u <= rho ** alpha, big * pi, big) * np.ones(shape)
    return _out(out, _scalar(size, theta1, theta2))


def sample_kendall_alt(theta1, theta2, alpha: float, rng: np.random.Generator, size=None):
    """max{max(theta1, theta2), min(theta1/Z1, theta2/Z2)} with Z_i ~ pow(alpha)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    t1, t2 = np.asarray(theta1, dtype=float), np.asarray(theta2, dtype=float)
    big, _ = _max_ratio(t1, t2)
    shape = _shape(size, big)
    z1 = _uniform(rng, shape) ** (1.0 / alpha)
    z2 = _uniform(rng, shape) ** (1.0 / alpha)
    out = np.maximum(big, np.minimum(t1 / z1, t2 / z2))
    return _out(out, _scalar(size, theta1, theta2))


def _convex_pick(fam: FamilySpec, rho, shape, rng, reciprocal=False):
    dec = convex_decomposition(fam)
    if not dec.concrete:
        raise UnsupportedFamilyError(f"{fam.family}: decomposition components are unavailable")
    weights = np.stack([np.broadcast_to(np.asarray(w(rho), dtype=float), shape)
                        for w in dec.weights])
    cum = np.cumsum(weights, axis=0)
    cum[-1] = 1.0
    u = rng.random(shape)
    # branch k is the interval (s_{k-1}, s_k]
    branch = np.sum(cum < u, axis=0)
    draws = np.empty(shape)
    for k, comp in enumerate(dec.components):
        sel = branch == k
        count = int(np.count_nonzero(sel))
        if count:
            draws[sel] = np.asarray(sample_measure(comp, rng, count))
    return (1.0 / draws if reciprocal else draws), branch


def sample_convex_comb(fam: FamilySpec, theta1, theta2, rng: np.random.Generator, size=None,
                       return_branch: bool = False):
    """M X_k with k selected by the cumulative weights at rho."""
    big, rho = _max_ratio(theta1, theta2)
    shape = _shape(size, big)
    draws, branch = _convex_pick(fam, rho, shape, rng)
    out = big * draws
    scalar = _scalar(size, theta1, theta2)
    if return_branch:
        return (_out(out, scalar), int(branch) if scalar else branch)
    return _out(out, scalar)


def sample_reciprocal_conv(fam: FamilySpec, theta1, theta2, rng: np.random.Generator,
                           size=None):
    """Law of 1/(theta1 <> theta2) through min(1/theta1, 1/theta2) / X_k."""
    t1, t2 = np.asarray(theta1, dtype=float), np.asarray(theta2, dtype=float)
    if np.any(t1 <= 0) or np.any(t2 <= 0):
        raise ValueError("reciprocal representation needs theta1, theta2 > 0")
    r1, r2 = 1.0 / t1, 1.0 / t2
    small_r = np.minimum(r1, r2)
    rho_r = small_r / np.maximum(r1, r2)
    _, rho = _max_ratio(t1, t2)
    # the ratio is invariant under reciprocals; allow for rounding of the two divisions
    if not np.allclose(rho_r, rho, rtol=8 * np.finfo(float).eps, atol=0.0):
        raise AssertionError("rho changed under reciprocals")
    shape = _shape(size, small_r)
    inv, _ = _convex_pick(fam, rho, shape, rng, reciprocal=True)
    return _out(small_r * inv, _scalar(size, theta1, theta2))


def sample_ku_conv(theta1, theta2, alpha: float, n: int, rng: np.random.Generator,
                   size=None, return_branch: bool = False):
    """Order-statistic representation: M Q_{k:n+k} when W_{k:n} < rho <= W_{k+1:n}."""
    if alpha <= 0 or n < 1:
        raise ValueError("need alpha > 0 and n >= 1")
    big, rho = _max_ratio(theta1, theta2)
    shape = _shape(size, big)
    flat = int(np.prod(shape)) if shape else 1
    rho_f = np.broadcast_to(rho, shape).ravel() if shape else np.atleast_1d(rho)
    w = _uniform(rng, (flat, n)) ** (1.0 / alpha)
    q = _uniform(rng, (flat, 2 * n)) ** (-1.0 / alpha)
    k = np.sum(w < rho_f[:, None], axis=1)
    pick = np.ones(flat)
    for kk in range(1, n + 1):
        rows = k == kk
        if rows.any():
            pick[rows] = np.partition(q[rows, : n + kk], kk - 1, axis=1)[:, kk - 1]
    out = (np.broadcast_to(big, shape).ravel() if shape else np.atleast_1d(big)) * pick
    out = out.reshape(shape)
    scalar = _scalar(size, theta1, theta2)
    if return_branch:
        return (_out(out, scalar), int(k[0]) if scalar else k.reshape(shape))
    return _out(out, scalar)


def kingman_angle(s: float, rng: np.random.Generator, shape) -> np.ndarray:
    """V on [-1, 1] with density proportional to (1 - v^2)^(s - 1/2)."""
    if s <= -0.5:
        raise ValueError("Kingman parameter needs s > -1/2")
    g1 = rng.gamma(s + 0.5, 1.0, shape)
    g2 = rng.gamma(s + 0.5, 1.0, shape)
    tot = g1 + g2
    coin = rng.random(shape) < 0.5
    with np.errstate(invalid="ignore", divide="ignore"):
        b = np.where(tot > 0, g1 / np.where(tot > 0, tot, 1.0), coin.astype(float))
    return 2.0 * b - 1.0


def sample_kingman_conv(theta1, theta2, s: float, rng: np.random.Generator, size=None):
    t1, t2 = np.asarray(theta1, dtype=float), np.asarray(theta2, dtype=float)
    shape = _shape(size, t1, t2)
    v = kingman_angle(s, rng, shape)
    out = np.sqrt(np.maximum(t1 * t1 + t2 * t2 + 2.0 * t1 * t2 * v, 0.0))
    return _out(out, _scalar(size, theta1, theta2))


def _sample_by_quantile(fam: FamilySpec, theta1, theta2, rng, size):
    big, rho = _max_ratio(theta1, theta2)
    shape = _shape(size, big)
    big_b = np.broadcast_to(big, shape)
    rho_b = np.broadcast_to(rho, shape)
    out = np.empty(shape)
    for r in np.unique(rho_b):
        sel = rho_b == r
        out[sel] = np.asarray(sample_measure(unit_conv(fam, float(r)), rng,
                                             int(np.count_nonzero(sel))))
    return _out(big_b * out, _scalar(size, theta1, theta2))


def sample_family(fam: FamilySpec, theta1, theta2, rng: np.random.Generator, size=None):
    """A draw from delta_theta1 <> delta_theta2 by the family's representation."""
    f, p = fam.family, fam.params
    t1, t2 = np.asarray(theta1, dtype=float), np.asarray(theta2, dtype=float)
    scalar = _scalar(size, theta1, theta2)
    shape = _shape(size, t1, t2)
    if f == "classical":
        return _out(np.broadcast_to(t1 + t2, shape).copy(), scalar)
    if f == "symmetric":
        coin = rng.random(shape) < 0.5
        return _out(np.where(coin, t1 + t2, np.abs(t1 - t2)) * np.ones(shape), scalar)
    if f == "stable":
        a = p["alpha"]
        return _out(np.broadcast_to((t1 ** a + t2 ** a) ** (1.0 / a), shape).copy(), scalar)
    if f == "max":
        return _out(np.broadcast_to(np.maximum(t1, t2), shape).copy(), scalar)
    if f == "kendall":
        return sample_kendall_conv(theta1, theta2, p["alpha"], rng, size)
    if f == "ku":
        return sample_ku_conv(theta1, theta2, p["alpha"], int(p["n"]), rng, size)
    if f == "diamond":
        return sample_convex_comb(fam, theta1, theta2, rng, size)
    if f == "kingman":
        return sample_kingman_conv(theta1, theta2, p["s"], rng, size)
    if f == "kucharczak":
        return _sample_by_quantile(fam, theta1, theta2, rng, size)
    raise UnsupportedFamilyError(f"no sampler for the {f} convolution")


def sample_measure_conv(fam: FamilySpec, m1: MixtureMeasure, m2: MixtureMeasure,
                        n: int, rng: np.random.Generator) -> np.ndarray:
    """Draws from m1 <> m2: theta_i ~ m_i, then the point-mass convolution."""
    th1 = np.asarray(sample_measure(m1, rng, n))
    th2 = np.asarray(sample_measure(m2, rng, n))
    return np.asarray(sample_family(fam, th1, th2, rng))


__all__ = [
    "GENERATOR", "SampleBatch", "kingman_angle", "make_rng", "sample_base",
    "sample_convex_comb", "sample_family", "sample_kendall_alt", "sample_kendall_conv",
    "sample_kingman_conv", "sample_ku_conv", "sample_measure", "sample_measure_conv",
    "sample_order_stat", "sample_reciprocal_conv",
]
