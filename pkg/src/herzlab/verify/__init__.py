"""Verification harness: test-function families, checks and reports."""
from .checks import (
    CHECKS,
    check_blowup_scaling,
    check_composition,
    check_embedding_interpolation,
    check_hardy_sequences,
    check_heat_smoothing,
    check_herz_smoothing,
    check_optimality_probe,
    check_product,
    check_regularity_gain,
    hardy_constant,
    interpolated_params,
)
from .families import FunctionFamily, dilated_bump, power_cusp, radial_cusp, random_band_weighted
from .report import Band, CheckReport, SlopeFit, slope_fit

__all__ = [
    "CHECKS",
    "check_blowup_scaling",
    "check_composition",
    "check_embedding_interpolation",
    "check_hardy_sequences",
    "check_heat_smoothing",
    "check_herz_smoothing",
    "check_optimality_probe",
    "check_product",
    "check_regularity_gain",
    "hardy_constant",
    "interpolated_params",
    "FunctionFamily",
    "dilated_bump",
    "power_cusp",
    "radial_cusp",
    "random_band_weighted",
    "Band",
    "CheckReport",
    "SlopeFit",
    "slope_fit",
]
