"""Derivative information for the error inequalities.

Ranges of f' and f'' are sampled on a uniform grid and are therefore not
guaranteed bounds; L2 norms and dispersions come from panel quadrature.  User
overrides replace the estimated values and are what make a bound rigorous.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bounds import INFO_FIELDS, DerivativeInfo, Provenance
from .errors import ConsistencyError, DomainError
from .expr import ExprNode, as_expr, component, jets
from .quadrature import integrate
from .rules import as_interval

DEFAULT_POINTS_PER_UNIT = 10001
MIN_POINTS = 1001
L2_RTOL = 1e-10
RADICAND_SLACK = 1e-12


def _env_grid() -> int:
    raw = os.environ.get("OPTIQUAD_GRID")
    if raw is None or raw.strip() == "":
        return DEFAULT_POINTS_PER_UNIT
    value = int(raw)
    if value < 1:
        raise DomainError("OPTIQUAD_GRID must be a positive integer")
    return value


@dataclass(frozen=True)
class SamplingConfig:
    points_per_unit: int = DEFAULT_POINTS_PER_UNIT
    singularity_margin: float = 1e-9
    # derivative magnitudes above this count as unbounded
    unbounded_cutoff: float = 1e12

    def __post_init__(self):
        if self.points_per_unit < 1:
            raise DomainError("points_per_unit must be positive")
        if not self.singularity_margin > 0:
            raise DomainError("singularity_margin must be positive")

    @classmethod
    def from_env(cls, **kw) -> "SamplingConfig":
        return cls(points_per_unit=_env_grid(), **kw)

    def grid(self, a: float, b: float) -> np.ndarray:
        count = max(MIN_POINTS, int(math.ceil(self.points_per_unit * (b - a))))
        return np.linspace(a, b, count)


def secants(ast: ExprNode, iv) -> tuple[float, Optional[float]]:
    """``S = (f(b)-f(a))/(b-a)`` and ``S1 = (f'(b)-f'(a))/(b-a)``.

    ``S1`` is ``None`` when f' is not finite at an endpoint.

    Raises
    ------
    DomainError
        If f itself is not finite at an endpoint.
    """
    iv = as_interval(iv)
    j = jets(as_expr(ast), np.array([iv.a, iv.b]))
    if not np.all(np.isfinite(j.v)):
        raise DomainError(f"integrand not finite at an endpoint of [{iv.a}, {iv.b}]")
    S = float((j.v[1] - j.v[0]) / iv.length)
    S1 = None
    if np.all(np.isfinite(j.d1)):
        S1 = float((j.d1[1] - j.d1[0]) / iv.length)
    return S, S1


def sample_range(ast: ExprNode, derivative_order: int, iv, cfg: SamplingConfig | None = None):
    """Sampled ``(min, max)`` of f' or f'' on the grid, or ``None`` if unbounded.

    Any non-finite sample, endpoints included, or any magnitude above the
    cutoff makes the range absent: a finite sample next to a singularity is
    not a bound.  Present ranges are never rigorous.
    """
    if derivative_order not in (1, 2):
        raise DomainError("derivative order must be 1 or 2")
    cfg = cfg or SamplingConfig.from_env()
    iv = as_interval(iv)
    vals = component(as_expr(ast), derivative_order)(cfg.grid(iv.a, iv.b))
    if not np.all(np.isfinite(vals)) or np.max(np.abs(vals)) > cfg.unbounded_cutoff:
        return None
    return float(np.min(vals)), float(np.max(vals))


def _integral(g, lo: float, hi: float) -> Optional[float]:
    res = integrate(g, lo, hi, rtol=L2_RTOL, transform=True)
    return res.value if res.converged else None


def integral(ast: ExprNode, derivative_order: int, iv) -> Optional[float]:
    """Integral of the requested derivative component, ``None`` if it does not settle."""
    iv = as_interval(iv)
    return _integral(component(as_expr(ast), derivative_order), iv.a, iv.b)


def l2_norm(ast: ExprNode, derivative_order: int, iv) -> Optional[float]:
    """``sqrt(int g^2)`` for g = f' or f''; ``None`` for a divergent norm."""
    iv = as_interval(iv)
    g = component(as_expr(ast), derivative_order)
    sq = _integral(lambda t: g(t) ** 2, iv.a, iv.b)
    return None if sq is None else math.sqrt(sq)


def centered_l2sq(g, lo: float, hi: float, center: float) -> Optional[float]:
    """``int (g - center)^2`` over [lo, hi]."""
    return _integral(lambda t: (g(t) - center) ** 2, lo, hi)


def sigma(ast: ExprNode, derivative_order: int, iv) -> Optional[float]:
    """Dispersion ``sqrt((b-a) T(g, g))`` of g = f' or f''.

    Evaluated as the L2 norm of g minus its mean, which equals
    ``||g||^2 - (int g)^2/(b-a)`` without the cancellation.  The literal
    difference is still formed and checked for a negative radicand.
    """
    iv = as_interval(iv)
    g = component(as_expr(ast), derivative_order)
    total = _integral(g, iv.a, iv.b)
    if total is None:
        return None
    mean = total / iv.length
    sq = centered_l2sq(g, iv.a, iv.b, mean)
    norm_sq = _integral(lambda t: g(t) ** 2, iv.a, iv.b)
    if sq is None or norm_sq is None:
        return None
    radicand = norm_sq - total * total / iv.length
    if radicand < -RADICAND_SLACK * max(1.0, norm_sq):
        raise ConsistencyError(f"negative dispersion radicand {radicand}")
    return math.sqrt(max(sq, 0.0))


def _sigma_from_l2(l2: float, secant: float, length: float) -> float:
    # integral of f' over [a, b] is S (b - a) exactly, likewise f'' and S1
    total = secant * length
    radicand = l2 * l2 - total * total / length
    if radicand < -RADICAND_SLACK * max(1.0, l2 * l2):
        raise DomainError("supplied L2 norm is smaller than the secant allows")
    return math.sqrt(max(radicand, 0.0))


def build_info(
    ast: ExprNode,
    iv,
    overrides: dict | None = None,
    cfg: SamplingConfig | None = None,
) -> DerivativeInfo:
    """Assemble :class:`DerivativeInfo` from sampling, quadrature and overrides.

    Overrides may name any :data:`~optiquad.bounds.INFO_FIELDS` entry; they
    replace the estimate and are marked user-supplied.  An L2 override also
    fixes the matching dispersion, since the integral of f' (f'') over the
    interval is known exactly from the secant.  Inconsistent overrides are
    accepted and recorded in ``info.warnings``.
    """
    ast = as_expr(ast)
    iv = as_interval(iv)
    cfg = cfg or SamplingConfig.from_env()
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    unknown = set(overrides) - set(INFO_FIELDS)
    if unknown:
        raise DomainError(f"unknown override(s): {sorted(unknown)}")

    info = DerivativeInfo()
    prov = info.provenance

    def put(name, value, source):
        setattr(info, name, value)
        if value is not None:
            prov[name] = source

    S, S1 = secants(ast, iv)
    put("S", S, Provenance.EXACT)
    put("S1", S1, Provenance.EXACT)

    for order, lo_name, hi_name in ((1, "gamma1", "Gamma1"), (2, "gamma2", "Gamma2")):
        rng = sample_range(ast, order, iv, cfg)
        if rng is not None:
            put(lo_name, rng[0], Provenance.SAMPLED)
            put(hi_name, rng[1], Provenance.SAMPLED)

    put("l2_fprime", l2_norm(ast, 1, iv), Provenance.SAMPLED)
    put("l2_fsecond", l2_norm(ast, 2, iv), Provenance.SAMPLED)
    if info.l2_fprime is not None:
        put("sigma_fprime", sigma(ast, 1, iv), Provenance.SAMPLED)
    if info.l2_fsecond is not None:
        put("sigma_fsecond", sigma(ast, 2, iv), Provenance.SAMPLED)

    for name, value in overrides.items():
        put(name, float(value), Provenance.USER_SUPPLIED)

    for l2_name, sec_name, sig_name in (("l2_fprime", "S", "sigma_fprime"), ("l2_fsecond", "S1", "sigma_fsecond")):
        if l2_name in overrides and sig_name not in overrides and getattr(info, sec_name) is not None:
            src = Provenance.USER_SUPPLIED if info.rigorous(sec_name) else Provenance.SAMPLED
            put(sig_name, _sigma_from_l2(overrides[l2_name], getattr(info, sec_name), iv.length), src)

    if "sup_fsecond" not in overrides and info.has("gamma2", "Gamma2"):
        src = Provenance.USER_SUPPLIED if info.rigorous("gamma2", "Gamma2") else Provenance.SAMPLED
        put("sup_fsecond", max(abs(info.gamma2), abs(info.Gamma2)), src)

    info.check()
    return info
