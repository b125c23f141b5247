"""Discrete workbench for weighted mean-oscillation analysis on finite grids.

Computes endpoint and averaged Muckenhoupt constants, four flavors of
oscillation norm, Hardy-Littlewood / weighted / sharp maximal operators,
truncated bilinear singular integrals with their symbol commutators, and
the experiment layer that measures norm equivalences, exponential level
decay, pointwise majorants, operator-norm lower bounds, and the
commutator-based oscillation reconstruction.
"""

from ._kernels import get_backend, set_backend
from .czo import (
    BilinearKernel,
    CommutatorSpec,
    commutator,
    eval_bilinear,
    fractional_kernel,
    kernel_from_preset,
    odd_kernel_1d,
    riesz_kernel_2d,
    verify_kernel,
)
from .grids import (
    Cube,
    CubeFamily,
    FamilySpec,
    Grid,
    GridFunction,
    average,
    dyadic_family,
    enumerate_cubes,
    load_csv,
    save_csv,
    sliding_family,
    weighted_measure,
)
from .maximal import MaximalKind, fefferman_stein_ratio, maximal
from .norms import (
    BmoVariant,
    NormReport,
    bmo_norm,
    layer_cake_lp_power,
    lp_norm,
    minimizing_center,
    morrey_norm,
    weak_lp_norm,
)
from .weights import (
    Weight,
    a1_constant,
    ap_constant,
    make_const_weight,
    make_power_weight,
    make_two_valued_weight,
    weight_from_preset,
)

__version__ = "0.1.0"

__all__ = [
    "BilinearKernel",
    "BmoVariant",
    "CommutatorSpec",
    "Cube",
    "CubeFamily",
    "FamilySpec",
    "Grid",
    "GridFunction",
    "MaximalKind",
    "NormReport",
    "Weight",
    "a1_constant",
    "ap_constant",
    "average",
    "bmo_norm",
    "commutator",
    "dyadic_family",
    "enumerate_cubes",
    "eval_bilinear",
    "fefferman_stein_ratio",
    "fractional_kernel",
    "get_backend",
    "kernel_from_preset",
    "layer_cake_lp_power",
    "load_csv",
    "lp_norm",
    "make_const_weight",
    "make_power_weight",
    "make_two_valued_weight",
    "maximal",
    "minimizing_center",
    "morrey_norm",
    "odd_kernel_1d",
    "riesz_kernel_2d",
    "save_csv",
    "set_backend",
    "sliding_family",
    "verify_kernel",
    "weak_lp_norm",
    "weight_from_preset",
    "weighted_measure",
]
