"""Generalised convolutions of probability measures on the half line."""
__version__ = "0.1.0"

from .families import (convex_decomposition, delta_conv, is_admissible_kendall_type,
                       is_monotonic, lom_law, lom_residual, max_weak_rep_mixing_law,
                       monotonicity_witness)
from .kernels import (KernelSpec, gen_char_fn, kernel_eval, make, polya_check,
                      product_formula_residual, weak_stable_density_g)
from .measures import (MixtureMeasure, QuadratureConfig, cdf, dilate, dirac, mix, pareto,
                       pow_law, quad_integrate, quantile)
from .samplers import make_rng, sample_family
from .stats import cosine_transform, ecdf, ks_one_sample, ks_two_sample
from .williamson import kendall_convolve, kendall_pair_of, williamson, williamson_invert

__all__ = [
    "KernelSpec", "MixtureMeasure", "QuadratureConfig", "cdf", "convex_decomposition",
    "cosine_transform", "delta_conv", "dilate", "dirac", "ecdf", "gen_char_fn",
    "is_admissible_kendall_type", "is_monotonic", "kendall_convolve", "kendall_pair_of",
    "kernel_eval", "ks_one_sample", "ks_two_sample", "lom_law", "lom_residual", "make",
    "make_rng", "max_weak_rep_mixing_law", "mix", "monotonicity_witness", "pareto",
    "polya_check", "pow_law", "product_formula_residual", "quad_integrate", "quantile",
    "sample_family", "weak_stable_density_g", "williamson", "williamson_invert",
]
