"""Polynomial chaos expansion of ODE systems with random parameters and initial conditions."""

__version__ = "0.1.0"

from .pcebasis import BasisSet, CoeffTensor, MomentTensor, basis_size, enumerate_indices, galerkin_tensor, moment_tensor
from .compose import ExpandedSystem, compose, eval_expanded_rhs, update
from .distributions import Beta, Beta4, Dirac, Gaussian, Uniform, from_spec, make_rng
from .integrate import SimOptions, Trajectory, integrate
from .modelir import SystemDef, load_system, parse_expression, piecewise
from .orthopoly import PolyFamily1D, eval_poly, family_for, gauss_rule, hermite, inner_product, jacobi, legendre
from .postprocess import Beta4Fit, MomentSeries, bhattacharyya, calc_moments, fit_beta4, outer_bounds, sample_pce
from .simulate import (
    MCResult,
    PCEResult,
    sample_basis,
    sample_variables,
    sim_collocation,
    sim_galerkin,
    sim_montecarlo,
)

__all__ = [name for name in dir() if not name.startswith("_")]
