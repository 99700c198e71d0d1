"""Inference for monotone trends under short- and long-range dependent noise."""

from .errors import (DegenerateConstraint, InvalidInput, InvalidNuisance,
                     MonotrendError, NumericalFailure, OutOfRange, Unsupported)
from .estimators import (cv_bandwidth, estimate_derivative, estimate_hurst,
                         estimate_sigma2, estimate_tau2, oversmooth_bandwidth)
from .gcm import ConvexMinorant, PointSequence, gcm, gcm_restricted, left_slopes
from .inference import (ConfidenceBand, ConfidenceInterval, Method, band,
                        ci_ln_lrd, ci_ln_srd, ci_psi, ci_tn_srd)
from .isotonic import (ConstrainedFit, IsotonicFit, Series, fit_constrained,
                       fit_isotonic)
from .limits import (HurstMode, QuantileTable, Statistic, load_default_tables,
                     lookup, simulate_m1, simulate_m2)
from .noise import DependenceSpec, NoiseKind, generate
from .stats import StatProfile, StatValue, discrepancy, profile

__version__ = "0.1.0"

__all__ = [
    "MonotrendError", "InvalidInput", "OutOfRange", "DegenerateConstraint",
    "NumericalFailure", "InvalidNuisance", "Unsupported",
    "PointSequence", "ConvexMinorant", "gcm", "gcm_restricted", "left_slopes",
    "Series", "IsotonicFit", "ConstrainedFit", "fit_isotonic", "fit_constrained",
    "StatValue", "StatProfile", "discrepancy", "profile",
    "NoiseKind", "DependenceSpec", "generate",
    "estimate_tau2", "estimate_hurst", "estimate_sigma2", "estimate_derivative",
    "oversmooth_bandwidth", "cv_bandwidth",
    "Statistic", "HurstMode", "QuantileTable", "load_default_tables", "lookup",
    "simulate_m1", "simulate_m2",
    "Method", "ConfidenceInterval", "ConfidenceBand", "ci_ln_srd", "ci_tn_srd",
    "ci_ln_lrd", "ci_psi", "band",
]
