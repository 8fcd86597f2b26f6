"""Optimal closed 3-point quadrature, its error inequalities and composite form."""

from .analysis import SamplingConfig, build_info
from .bounds import DerivativeInfo, ErrorBound, Functional, Provenance, Tag, best_bounds, tightest
from .composite import (
    CompositeConfig,
    composite_correction,
    composite_estimate,
    composite_report,
    composite_simpson,
    convergence_study,
    omega_n,
    reference_integral,
    sigma_n,
)
from .errors import (
    ConsistencyError,
    DomainError,
    EvaluationError,
    IntegrationError,
    NoApplicableBoundError,
    NondifferentiableError,
    OptiquadError,
    ParseError,
    UnknownIdentifierError,
)
from .expr import eval_jet, parse, to_source
from .kernels import KernelId, KernelParams, evaluate
from .optimizer import compare_simpson, g_closed_form, g_numeric, minimize_g
from .rules import Interval, correction_p, corrected_estimate, optimal_rule_estimate, simpson_estimate

__version__ = "0.1.0"
