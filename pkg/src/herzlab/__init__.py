"""Spectral toolkit for Herz-type Triebel-Lizorkin norms, heat flow and semilinear mild solutions."""
from .errors import (
    CapabilityError,
    CompositionError,
    HerzlabError,
    InputDomainError,
    ParameterError,
    ResolutionError,
    StateError,
)
from .field import GridSpec, SampledField, apply_multiplier, load_field, resample, save_field, to_physical, to_spectrum
from .heat import (
    ExistenceBound,
    MildSolverConfig,
    Trajectory,
    duhamel_term,
    estimate_contraction_constant,
    existence_bound,
    heat_propagate,
    march_exponential,
    measure_blowup_time,
    solve_mild,
)
from .herz import HerzParams, TLParams, herz_norm, ktl_norm, ktl_norm_peetre, ktl_norms, norm_breakdown
from .lpdecomp import DyadicSystem, PeetreParams, build_dyadic_system, lp_block, lp_blocks, peetre_maximal
from .nonlinear import (
    LipFunction,
    Paraproduct,
    compose,
    lip_norm,
    modulus_integral,
    nonlinearity_by_name,
    paraproduct_split,
    power_nonlinearity,
)

__all__ = [
    "CapabilityError",
    "CompositionError",
    "HerzlabError",
    "InputDomainError",
    "ParameterError",
    "ResolutionError",
    "StateError",
    "GridSpec",
    "SampledField",
    "apply_multiplier",
    "load_field",
    "resample",
    "save_field",
    "to_physical",
    "to_spectrum",
    "ExistenceBound",
    "MildSolverConfig",
    "Trajectory",
    "duhamel_term",
    "estimate_contraction_constant",
    "existence_bound",
    "heat_propagate",
    "march_exponential",
    "measure_blowup_time",
    "solve_mild",
    "HerzParams",
    "TLParams",
    "herz_norm",
    "ktl_norm",
    "ktl_norm_peetre",
    "ktl_norms",
    "norm_breakdown",
    "DyadicSystem",
    "PeetreParams",
    "build_dyadic_system",
    "lp_block",
    "lp_blocks",
    "peetre_maximal",
    "LipFunction",
    "Paraproduct",
    "compose",
    "lip_norm",
    "modulus_integral",
    "nonlinearity_by_name",
    "paraproduct_split",
    "power_nonlinearity",
]

__version__ = "0.1.0"
