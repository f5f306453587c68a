"""Probability kernels, generalised characteristic functions and weak stability checks."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import special

from .measures import INF, MixtureMeasure, QuadratureConfig, quad_integrate, _quad_piece

FAMILY_PARAMS: dict[str, tuple[str, ...]] = {
    "classical": (),
    "symmetric": (),
    "stable": ("alpha",),
    "kendall": ("alpha",),
    "max": (),
    "kucharczak": ("a", "r"),
    "ku": ("alpha", "n"),
    "diamond": ("p", "alpha"),
    "kendall_type": ("c", "alpha", "p"),
    "kingman": ("s",),
}

# kernels vanishing for t > 1
COMPACT_KERNELS = {"kendall", "max", "ku", "diamond", "kendall_type"}


class KernelError(ValueError):
    """Unknown family or parameters outside the admissible range."""


@dataclass(frozen=True)
class KernelSpec:
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILY_PARAMS:
            raise KernelError(f"unknown family {self.family!r}")
        names = FAMILY_PARAMS[self.family]
        missing = [n for n in names if n not in self.params]
        extra = [n for n in self.params if n not in names]
        if missing or extra:
            raise KernelError(f"{self.family} expects parameters {names}, got {sorted(self.params)}")
        object.__setattr__(self, "params", {n: float(self.params[n]) for n in names})
        self._validate()

    def __getitem__(self, name: str) -> float:
        return self.params[name]

    def _validate(self):
        p = self.params
        fam = self.family
        if "alpha" in p and not p["alpha"] > 0:
            raise KernelError("alpha must be > 0")
        if fam == "kingman" and not p["s"] > -0.5:
            raise KernelError("kingman needs s > -1/2")
        if fam == "kucharczak" and not (0 < p["a"] <= 1 and p["r"] > 0):
            raise KernelError("kucharczak needs a in (0, 1] and r > 0")
        if fam == "ku" and not (p["n"] >= 1 and p["n"].is_integer()):
            raise KernelError("ku needs an integer n >= 1")
        if fam == "diamond" and not 0 <= p["p"] <= 1:
            raise KernelError("diamond needs p in [0, 1]")
        if fam == "kendall_type":
            from .families import is_admissible_kendall_type
            if not is_admissible_kendall_type(p["c"], p["alpha"], p["p"]):
                raise KernelError(f"(c, alpha, p) = {tuple(p.values())} is not an admissible Kendall-type triple")

    def label(self) -> str:
        if not self.params:
            return self.family
        inner = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.family}({inner})"

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params)}


def make(family: str, **params) -> KernelSpec:
    return KernelSpec(family, params)


# ---------------------------------------------------------------------------
# special functions

def gammaincc_reg(a: float, z: float) -> float:
    """Regularised upper incomplete gamma Gamma(a, z) / Gamma(a)."""
    if z <= 0.0:
        return 1.0
    log_pref = -z + a * math.log(z) - math.lgamma(a)
    if z < a + 1.0:
        term = total = 1.0 / a
        n = 0
        while abs(term) > 1e-17 * abs(total):
            n += 1
            term *= z / (a + n)
            total += term
            if n > 10000:
                break
        return max(0.0, 1.0 - total * math.exp(log_pref))
    # modified Lentz continued fraction
    tiny = 1e-300
    b = z + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(log_pref) * h


BESSEL_SERIES_MAX_T = 8.0


def kingman_kernel(s: float, t: float) -> float:
    """Gamma(s+1) (t/2)^(-s) J_s(t), the characteristic function of the Kingman angle law."""
    t = abs(t)
    if t > BESSEL_SERIES_MAX_T:
        return math.exp(math.lgamma(s + 1.0) - s * math.log(t / 2.0)) * float(special.jv(s, t))
    q = -(t / 2.0) ** 2
    term = 1.0
    terms = [term]
    m = 0
    while True:
        m += 1
        term *= q / (m * (m + s))
        terms.append(term)
        if m * (m + s) > -q and abs(term) < 1e-17:
            break
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# kernels

def _kernel_scalar(spec: KernelSpec, t: float) -> float:
    fam, p = spec.family, spec.params
    if t < 0:
        raise KernelError("kernels are evaluated at t >= 0")
    if fam == "classical":
        return math.exp(-t)
    if fam == "symmetric":
        return math.cos(t)
    if fam == "stable":
        return math.exp(-t ** p["alpha"])
    if fam == "max":
        return 1.0 if t <= 1.0 else 0.0
    if fam == "kucharczak":
        return gammaincc_reg(p["a"], t ** p["r"])
    if fam == "kingman":
        return kingman_kernel(p["s"], t)
    if t > 1.0:
        return 0.0
    ta = t ** p["alpha"]
    if fam == "kendall":
        return 1.0 - ta
    if fam == "ku":
        return (1.0 - ta) ** int(p["n"])
    if fam == "diamond":
        return 1.0 - p["p"] * ta
    if fam == "kendall_type":
        c = p["c"]
        return 1.0 - (1.0 + c) * ta + c * t ** (p["alpha"] * p["p"])
    raise KernelError(fam)


def kernel_eval(spec: KernelSpec, t):
    """Probability kernel of the family; scalar in, scalar out, arrays elementwise."""
    arr = np.asarray(t, dtype=float)
    if arr.ndim == 0:
        return _kernel_scalar(spec, float(arr))
    return np.array([_kernel_scalar(spec, float(v)) for v in arr.ravel()]).reshape(arr.shape)


def gen_char_fn(spec: KernelSpec, m: MixtureMeasure, t: float,
                cfg: QuadratureConfig | None = None) -> float:
    """Generalised characteristic function: the integral of Omega(s t) against m(ds)."""
    if t < 0:
        raise KernelError("t must be >= 0")
    if t == 0:
        return math.fsum([a.weight for a in m.atoms] + [c.weight for c in m.continuous])
    parts = [a.weight * _kernel_scalar(spec, a.location * t) for a in m.atoms]
    upper = 1.0 / t if spec.family in COMPACT_KERNELS else INF
    for c in m.continuous:
        parts.append(c.weight * c.expect(lambda s: _kernel_scalar(spec, s * t), upper, cfg))
    return math.fsum(parts)


@dataclass(frozen=True)
class ProductFormulaReport:
    x: float
    y: float
    grid: tuple[float, ...]
    per_point: tuple[float, ...]
    max_residual: float
    family: str = ""

    def to_dict(self) -> dict:
        return {"family": self.family, "x": self.x, "y": self.y, "grid": list(self.grid),
                "max_residual": self.max_residual, "per_point": list(self.per_point)}


def default_grid(x: float, y: float, points: int = 50) -> np.ndarray:
    return np.linspace(0.0, 3.0 / max(x, y, 1.0), points)


def product_formula_residual(spec: KernelSpec, x: float, y: float,
                             grid: Sequence[float] | None = None,
                             cfg: QuadratureConfig | None = None) -> ProductFormulaReport:
    from .families import delta_conv
    grid = default_grid(x, y) if grid is None else np.asarray(grid, dtype=float)
    mu = delta_conv(spec, x, y)
    res = []
    for t in grid:
        lhs = _kernel_scalar(spec, x * t) * _kernel_scalar(spec, y * t)
        res.append(abs(lhs - gen_char_fn(spec, mu, float(t), cfg)))
    return ProductFormulaReport(float(x), float(y), tuple(float(t) for t in grid),
                                tuple(res), max(res), spec.label())


# ---------------------------------------------------------------------------
# Polya criterion

CONVEXITY_SLACK = 1e-12


@dataclass(frozen=True)
class PolyaResult:
    ok: bool
    reason: str | None = None
    witness: tuple[float, ...] | None = None

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {"pass": self.ok, "reason": self.reason,
                "witness": list(self.witness) if self.witness else None}


def polya_grid(spec: KernelSpec, points: int = 4001) -> np.ndarray:
    """Grid from 0 far enough out that the kernel has (nearly) died."""
    if spec.family in COMPACT_KERNELS:
        return np.linspace(0.0, 2.0, points)
    end = 1.0
    while end < 1e8 and abs(_kernel_scalar(spec, end)) >= 1e-7:
        end *= 2.0
    return np.linspace(0.0, end, points)


def polya_check(spec: KernelSpec, grid: Sequence[float] | None = None) -> PolyaResult:
    """Grid surrogate of the Polya criterion: Omega(0)=1, non-increasing, convex, vanishing."""
    grid = polya_grid(spec) if grid is None else np.asarray(grid, dtype=float)
    if grid[0] != 0 or np.any(np.diff(grid) <= 0):
        raise KernelError("grid must start at 0 and increase strictly")
    vals = np.asarray(kernel_eval(spec, grid))
    if vals[0] != 1.0:
        return PolyaResult(False, "kernel(0) != 1", (0.0, float(vals[0])))
    rises = np.nonzero(np.diff(vals) > CONVEXITY_SLACK)[0]
    if rises.size:
        i = int(rises[0])
        return PolyaResult(False, "not non-increasing", (grid[i], grid[i + 1], vals[i], vals[i + 1]))
    h = np.diff(grid)
    slopes = np.diff(vals) / h
    second = np.diff(slopes) * 0.5 * (h[:-1] + h[1:])
    bad = np.nonzero(second < -CONVEXITY_SLACK)[0]
    if bad.size:
        i = int(bad[0])
        return PolyaResult(False, "not convex",
                           (float(grid[i]), float(grid[i + 1]), float(grid[i + 2])))
    if abs(vals[-1]) >= 1e-6:
        return PolyaResult(False, "does not vanish at the end of the grid",
                           (float(grid[-1]), float(vals[-1])))
    return PolyaResult(True)


# ---------------------------------------------------------------------------
# symmetric weakly stable density for the Kendall kernel

SINE_SWITCH = 25.0


def _tail_exp_integral(gamma: float, t: float) -> complex:
    """Asymptotic value of the integral of x^gamma e^(ix) over [t, inf), gamma < 1, t large."""
    total = 0j
    coef = 1 + 0j
    prev = INF
    for k in range(200):
        term = coef * t ** (gamma - k)
        if abs(term) > prev:
            break
        total += term
        prev = abs(term)
        if prev < 1e-18 * max(1.0, abs(total)):
            break
        coef *= 1j * (gamma - k)
    return 1j * cmath.exp(1j * t) * total


def _sine_tail(alpha: float, t: float) -> float:
    """Integral of x^(alpha-1) sin x over [t, inf) (Abel sense when alpha = 1)."""
    return _tail_exp_integral(alpha - 1.0, t).imag


@lru_cache(maxsize=None)
def _sine_limit(alpha: float) -> float:
    return _sine_moment_direct(alpha, SINE_SWITCH) + _sine_tail(alpha, SINE_SWITCH)


def _sine_moment_direct(alpha: float, t: float) -> float:
    if alpha == 1.0:
        return 1.0 - math.cos(t)
    cuts = np.arange(1, int(t / math.pi) + 1) * math.pi
    cfg = QuadratureConfig(abs_tol=1e-14, rel_tol=1e-12)
    return quad_integrate(lambda x: x ** (alpha - 1.0) * math.sin(x), 0.0, t, cfg, breakpoints=cuts)


def sine_moment(alpha: float, t: float) -> float:
    """Integral of x^(alpha-1) sin x over [0, t]."""
    if t <= SINE_SWITCH:
        return _sine_moment_direct(alpha, t)
    if alpha == 1.0:
        return 1.0 - math.cos(t)
    return _sine_limit(alpha) - _sine_tail(alpha, t)


def _unnormalised_g(alpha: float, t: float) -> float:
    t = abs(t)
    if t == 0:
        return 1.0 / (alpha + 1.0)
    if t < 1e-4:
        # series of t^(-alpha-1) * integral of x^alpha (1 - x^2/6) dx
        return 1.0 / (alpha + 1.0) - t * t / (6.0 * (alpha + 3.0))
    return t ** (-alpha - 1.0) * sine_moment(alpha, t)


@lru_cache(maxsize=None)
def weak_stable_constant(alpha: float) -> float:
    """Normalising constant making the symmetric density integrate to one."""
    if not 0 < alpha <= 1:
        raise KernelError("weakly stable density needs alpha in (0, 1]")
    cfg = QuadratureConfig(abs_tol=1e-14, rel_tol=1e-13)
    end_cycles = 40
    T = end_cycles * math.pi
    body = math.fsum(
        _quad_piece(lambda t: _unnormalised_g(alpha, t), k * math.pi, (k + 1) * math.pi, cfg)
        for k in range(end_cycles))
    # beyond T the integrand is t^(-alpha-1) (I_inf - R(t)); both pieces integrate in closed form
    i_inf = _sine_limit(alpha) if alpha != 1.0 else 1.0
    beta = alpha - 1.0
    osc = 0j
    coef = 1 + 0j
    for k in range(60):
        if abs(coef) * T ** (-k) < 1e-20:
            break
        osc += coef * _tail_exp_integral(-2.0 - k, T)
        coef *= 1j * (beta - k)
    tail = i_inf * T ** (-alpha) / alpha - (1j * osc).imag
    return 1.0 / (2.0 * (body + tail))


def weak_stable_density_g(alpha: float, t: float) -> float:
    """Symmetric density whose characteristic function is (1 - |x|^alpha)_+."""
    if not 0 < alpha <= 1:
        raise KernelError("weakly stable density needs alpha in (0, 1]")
    return weak_stable_constant(alpha) * _unnormalised_g(alpha, t)


def weak_stable_tail_mass(alpha: float, T: float) -> float:
    """Mass of the symmetric density on [T, inf), T > 0.

    Integrating t^(-alpha-1) S(t) by parts, with S' = t^(alpha-1) sin t,
    leaves T^(-alpha) S(T) / alpha plus the sine-integral remainder.
    """
    if T <= 0:
        raise KernelError("tail mass needs T > 0")
    si, _ = special.sici(T)
    inner = T ** (-alpha) * sine_moment(alpha, T) / alpha + (0.5 * math.pi - si) / alpha
    return weak_stable_constant(alpha) * inner
