"""Single-interval rules: the optimal closed 3-point rule, its derivative
correction, Simpson's rule, and the Peano-kernel residual used as a check."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import constants as C
from . import kernels
from .errors import DomainError, EvaluationError, IntegrationError
from .quadrature import integrate, vectorize


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError("interval endpoints must be finite")
        if not self.a < self.b:
            raise DomainError(f"need a < b, got [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def mid(self) -> float:
        return 0.5 * (self.a + self.b)


def as_interval(iv) -> Interval:
    if isinstance(iv, Interval):
        return iv
    a, b = iv
    return Interval(float(a), float(b))


@dataclass(frozen=True)
class RuleWeights:
    w_left: float
    w_mid: float
    w_right: float


OPTIMAL_WEIGHTS = RuleWeights(C.W_END, C.W_MID, C.W_END)
SIMPSON_WEIGHTS = RuleWeights(1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0)


def _node_value(f, x: float) -> float:
    y = float(f(x))
    if not math.isfinite(y):
        raise EvaluationError(f"integrand is not finite at t={x!r} (got {y})", point=x)
    return y


def apply_rule(weights: RuleWeights, f, iv) -> float:
    iv = as_interval(iv)
    fa = _node_value(f, iv.a)
    fm = _node_value(f, iv.mid)
    fb = _node_value(f, iv.b)
    return (weights.w_left * fa + weights.w_mid * fm + weights.w_right * fb) * iv.length


def optimal_rule_estimate(f, iv) -> float:
    """``[sqrt2/8 f(a) + (1 - sqrt2/4) f((a+b)/2) + sqrt2/8 f(b)] (b - a)``.

    The rule error ``Q(f; a, b)`` is the exact integral minus this value.

    Raises
    ------
    EvaluationError
        If ``f`` is not finite at one of the three nodes; ``.point`` names it.
    """
    return apply_rule(OPTIMAL_WEIGHTS, f, iv)


def simpson_estimate(f, iv) -> float:
    return apply_rule(SIMPSON_WEIGHTS, f, iv)


def correction_p(fprime_a: float, fprime_b: float, iv) -> float:
    """First-derivative correction ``(b-a)^2/96 (4 - 3 sqrt2) (f'(b) - f'(a))``.

    Subtracting it from the rule error makes the corrected rule exact on cubics.
    """
    iv = as_interval(iv)
    return C.CORRECTION_FACTOR * iv.length**2 * (fprime_b - fprime_a)


def corrected_estimate(f, fprime_a: float, fprime_b: float, iv) -> float:
    return optimal_rule_estimate(f, iv) + correction_p(fprime_a, fprime_b, iv)


def residual_via_kernel(fpp, iv, tol: float = 1e-10) -> float:
    """Rule error from its Peano representation, ``h^3 int_0^1 K2(s) f''(a + h s) ds``.

    Integrated separately on each kernel branch so the quadrature sees smooth
    integrands.

    Raises
    ------
    IntegrationError
        If either branch fails to converge to ``tol``.
    """
    iv = as_interval(iv)
    h = iv.length
    g = vectorize(fpp)

    def integrand(s):
        return kernels.eval_k2(kernels.OPTIMAL, np.clip(s, 0.0, 1.0)) * g(iv.a + h * s)

    total = 0.0
    for lo, hi in ((0.0, kernels.BREAK), (kernels.BREAK, 1.0)):
        res = integrate(integrand, lo, hi, rtol=tol)
        if not res.converged:
            raise IntegrationError(f"kernel residual did not converge on [{lo}, {hi}]")
        total += res.value
    return total * h**3
