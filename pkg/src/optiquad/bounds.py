"""Error inequalities for the optimal rule and its corrected form.

Each inequality is its own function; :func:`best_bounds` collects the ones whose
inputs are present in a :class:`DerivativeInfo`.  Bounds on the plain rule
error ``Q`` and on the corrected error ``Q - P`` are kept in separate classes
and never mixed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from . import constants as C
from .errors import DomainError, NoApplicableBoundError
from .rules import as_interval

# rounding allowance when checking orderings such as gamma <= S
_ORDER_SLACK = 1e-12


class Tag(enum.Enum):
    SECOND_SUP = "SecondSup"
    FIRST_RANGE = "FirstRange"
    FIRST_LOWER = "FirstLower"
    FIRST_UPPER = "FirstUpper"
    GRUSS_FIRST = "GrussFirst"
    SECOND_RANGE = "SecondRange"
    SECOND_LOWER = "SecondLower"
    SECOND_UPPER = "SecondUpper"
    GRUSS_SECOND = "GrussSecond"


class Functional(enum.Enum):
    Q = "Q"
    Q_MINUS_P = "QMinusP"


CORRECTED_TAGS = frozenset({Tag.SECOND_RANGE, Tag.SECOND_LOWER, Tag.SECOND_UPPER, Tag.GRUSS_SECOND})


class Provenance(enum.Enum):
    USER_SUPPLIED = "user_supplied"
    SAMPLED = "sampled"
    EXACT = "exact"  # closed two-point formulas such as the secants


RIGOROUS_SOURCES = frozenset({Provenance.USER_SUPPLIED, Provenance.EXACT})


@dataclass(frozen=True)
class ErrorBound:
    theorem_tag: Tag
    value: float
    applies_to: Functional
    rigorous: bool
    n: int = 1
    variant: Optional[str] = None  # "omega" for the weaker composite Gruss form

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 0.0):
            raise DomainError(f"bound value must be finite and >= 0, got {self.value}")
        expected = Functional.Q_MINUS_P if self.theorem_tag in CORRECTED_TAGS else Functional.Q
        if self.applies_to is not expected:
            raise DomainError(f"{self.theorem_tag.value} bounds {expected.value}")


INFO_FIELDS = (
    "gamma1",
    "Gamma1",
    "gamma2",
    "Gamma2",
    "S",
    "S1",
    "l2_fprime",
    "l2_fsecond",
    "sigma_fprime",
    "sigma_fsecond",
    "sup_fsecond",
)


@dataclass
class DerivativeInfo:
    """Derivative data the inequalities consume; absent entries are ``None``.

    ``provenance`` maps a field name to where its value came from.  Fields not
    listed count as sampled.
    """

    gamma1: Optional[float] = None
    Gamma1: Optional[float] = None
    gamma2: Optional[float] = None
    Gamma2: Optional[float] = None
    S: Optional[float] = None
    S1: Optional[float] = None
    l2_fprime: Optional[float] = None
    l2_fsecond: Optional[float] = None
    sigma_fprime: Optional[float] = None
    sigma_fsecond: Optional[float] = None
    sup_fsecond: Optional[float] = None
    provenance: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def source(self, name: str) -> Provenance:
        return self.provenance.get(name, Provenance.SAMPLED)

    def rigorous(self, *names: str) -> bool:
        return all(self.source(n) in RIGOROUS_SOURCES for n in names)

    def has(self, *names: str) -> bool:
        return all(getattr(self, n) is not None for n in names)

    def check(self) -> list[str]:
        """Mean-value and sign consistency; returns (and records) warnings."""
        out = []
        for lo, mid, hi in (("gamma1", "S", "Gamma1"), ("gamma2", "S1", "Gamma2")):
            vals = {k: getattr(self, k) for k in (lo, mid, hi)}
            if vals[lo] is not None and vals[mid] is not None and vals[lo] > vals[mid] + _slack(vals[lo], vals[mid]):
                out.append(f"{lo}={vals[lo]!r} exceeds secant {mid}={vals[mid]!r}")
            if vals[hi] is not None and vals[mid] is not None and vals[mid] > vals[hi] + _slack(vals[hi], vals[mid]):
                out.append(f"secant {mid}={vals[mid]!r} exceeds {hi}={vals[hi]!r}")
            if vals[lo] is not None and vals[hi] is not None and vals[lo] > vals[hi]:
                out.append(f"{lo} > {hi}")
        for name in ("sigma_fprime", "sigma_fsecond", "l2_fprime", "l2_fsecond", "sup_fsecond"):
            v = getattr(self, name)
            if v is not None and v < 0:
                out.append(f"{name} is negative")
        for w in out:
            if w not in self.warnings:
                self.warnings.append(w)
        return out


def _slack(x: float, y: float) -> float:
    return _ORDER_SLACK * max(1.0, abs(x), abs(y))


def _gap(hi: float, lo: float, what: str) -> float:
    d = hi - lo
    if d < -_slack(hi, lo):
        raise DomainError(what)
    return max(d, 0.0)


def _nonneg(x: float, what: str) -> float:
    if x < 0 or math.isnan(x):
        raise DomainError(f"{what} must be >= 0, got {x}")
    return x


# -- single interval ----------------------------------------------------------


def bound_second_sup(M2: float, iv, rigorous: bool = True) -> ErrorBound:
    """``(2 - sqrt2)/48 * sup|f''| * (b-a)^3`` on ``|Q|``."""
    h = as_interval(iv).length
    M2 = _nonneg(M2, "sup|f''|")
    return ErrorBound(Tag.SECOND_SUP, C.C_SECOND_SUP * M2 * h**3, Functional.Q, rigorous)


def bound_first_range(gamma1: float, Gamma1: float, iv, rigorous: bool = True) -> ErrorBound:
    h = as_interval(iv).length
    width = _gap(Gamma1, gamma1, "inverted f' range: gamma1 > Gamma1")
    return ErrorBound(Tag.FIRST_RANGE, C.C_FIRST_RANGE * width * h**2, Functional.Q, rigorous)


def bound_first_lower(S: float, gamma1: float, iv, rigorous: bool = True) -> ErrorBound:
    h = as_interval(iv).length
    d = _gap(S, gamma1, "secant S below gamma1 violates the mean value theorem")
    return ErrorBound(Tag.FIRST_LOWER, C.C_FIRST_ONE_SIDED * d * h**2, Functional.Q, rigorous)


def bound_first_upper(Gamma1: float, S: float, iv, rigorous: bool = True) -> ErrorBound:
    h = as_interval(iv).length
    d = _gap(Gamma1, S, "secant S above Gamma1 violates the mean value theorem")
    return ErrorBound(Tag.FIRST_UPPER, C.C_FIRST_ONE_SIDED * d * h**2, Functional.Q, rigorous)


def bound_gruss_first(sigma_fprime: float, iv, rigorous: bool = True) -> ErrorBound:
    """Sharp bound ``sqrt(11/96 - sqrt2/16) * sigma(f') * (b-a)^(3/2)``."""
    h = as_interval(iv).length
    s = _nonneg(sigma_fprime, "sigma(f')")
    return ErrorBound(Tag.GRUSS_FIRST, C.C_GRUSS_FIRST * s * h**1.5, Functional.Q, rigorous)


def bound_second_range(gamma2: float, Gamma2: float, iv, rigorous: bool = True) -> ErrorBound:
    h = as_interval(iv).length
    width = _gap(Gamma2, gamma2, "inverted f'' range: gamma2 > Gamma2")
    return ErrorBound(Tag.SECOND_RANGE, C.C_SECOND_RANGE * width * h**3, Functional.Q_MINUS_P, rigorous)


def bound_second_lower(S1: float, gamma2: float, iv, rigorous: bool = True) -> ErrorBound:
    h = as_interval(iv).length
    d = _gap(S1, gamma2, "derivative secant S1 below gamma2")
    return ErrorBound(Tag.SECOND_LOWER, C.C_SECOND_ONE_SIDED * d * h**3, Functional.Q_MINUS_P, rigorous)


def bound_second_upper(Gamma2: float, S1: float, iv, rigorous: bool = True) -> ErrorBound:
    h = as_interval(iv).length
    d = _gap(Gamma2, S1, "derivative secant S1 above Gamma2")
    return ErrorBound(Tag.SECOND_UPPER, C.C_SECOND_ONE_SIDED * d * h**3, Functional.Q_MINUS_P, rigorous)


def bound_gruss_second(sigma_fsecond: float, iv, rigorous: bool = True) -> ErrorBound:
    """Sharp bound ``sqrt(47/23040 - sqrt2/768) * sigma(f'') * (b-a)^(5/2)`` on ``|Q - P|``."""
    h = as_interval(iv).length
    s = _nonneg(sigma_fsecond, "sigma(f'')")
    return ErrorBound(Tag.GRUSS_SECOND, C.C_GRUSS_SECOND * s * h**2.5, Functional.Q_MINUS_P, rigorous)


# (tag, builder, info fields consumed) in catalog order
_CATALOG = (
    (Tag.SECOND_SUP, bound_second_sup, ("sup_fsecond",)),
    (Tag.FIRST_RANGE, bound_first_range, ("gamma1", "Gamma1")),
    (Tag.FIRST_LOWER, bound_first_lower, ("S", "gamma1")),
    (Tag.FIRST_UPPER, bound_first_upper, ("Gamma1", "S")),
    (Tag.GRUSS_FIRST, bound_gruss_first, ("sigma_fprime",)),
    (Tag.SECOND_RANGE, bound_second_range, ("gamma2", "Gamma2")),
    (Tag.SECOND_LOWER, bound_second_lower, ("S1", "gamma2")),
    (Tag.SECOND_UPPER, bound_second_upper, ("Gamma2", "S1")),
    (Tag.GRUSS_SECOND, bound_gruss_second, ("sigma_fsecond",)),
)


def catalog_inputs(tag: Tag) -> tuple[str, ...]:
    return next(fields for t, _, fields in _CATALOG if t is tag)


def best_bounds(info: DerivativeInfo, iv) -> list[ErrorBound]:
    """Every bound computable from ``info``, in catalog order.

    Inputs that contradict each other (a secant outside its derivative range)
    make the affected one-sided bound inapplicable and add a warning to
    ``info``.  Callers pick the minimum within each ``applies_to`` class,
    e.g. with :func:`tightest`.

    Raises
    ------
    NoApplicableBoundError
        When no bound has all of its inputs.
    """
    iv = as_interval(iv)
    out = []
    for tag, build, names in _CATALOG:
        if not info.has(*names):
            continue
        args = [getattr(info, n) for n in names]
        try:
            out.append(build(*args, iv, rigorous=info.rigorous(*names)))
        except DomainError as exc:
            info.warnings.append(f"{tag.value} skipped: {exc}")
    if not out:
        raise NoApplicableBoundError("no error bound has its derivative inputs available")
    return out


def tightest(bounds: list[ErrorBound]) -> dict[Functional, ErrorBound]:
    """Smallest bound in each functional class."""
    best: dict[Functional, ErrorBound] = {}
    for b in bounds:
        cur = best.get(b.applies_to)
        if cur is None or b.value < cur.value:
            best[b.applies_to] = b
    return best
