import math
import random

import numpy as np
import pytest

from optiquad import analysis as A
from optiquad.bounds import INFO_FIELDS, Provenance, Tag, best_bounds
from optiquad.errors import DomainError
from optiquad.expr import parse

UNIT = (0.0, 1.0)


def test_secants():
    assert A.secants(parse("t^2"), UNIT) == pytest.approx((1.0, 2.0))
    S, S1 = A.secants(parse("sqrt(t)"), UNIT)
    assert S == 1.0 and S1 is None
    with pytest.raises(DomainError):
        A.secants(parse("log(t)"), UNIT)


def test_sample_range():
    assert A.sample_range(parse("t^2"), 1, UNIT) == pytest.approx((0.0, 2.0), abs=1e-15)
    assert A.sample_range(parse("sqrt(t)"), 1, UNIT) is None
    lo, hi = A.sample_range(parse("sin(t)"), 2, (0.0, math.pi))
    assert lo == pytest.approx(-1.0, abs=1e-7)
    assert hi == pytest.approx(0.0, abs=1e-7)
    with pytest.raises(DomainError):
        A.sample_range(parse("t"), 3, UNIT)


def test_unbounded_cutoff():
    cfg = A.SamplingConfig(unbounded_cutoff=10.0)
    assert A.sample_range(parse("t^4"), 1, (0.0, 2.0), cfg) is None
    assert A.sample_range(parse("t^4"), 1, (0.0, 1.0), cfg) == pytest.approx((0.0, 4.0))


def test_l2_norms():
    assert A.l2_norm(parse("t^2"), 1, UNIT) == pytest.approx(math.sqrt(4 / 3), abs=1e-12)
    assert A.l2_norm(parse("cbrt(t^5)"), 2, UNIT) == pytest.approx(math.sqrt(100 / 27), rel=1e-9)
    e1 = A.l2_norm(parse("cbrt(sin(t^2))"), 1, UNIT)
    assert e1 is not None and e1 <= 4 / 3
    # f' = 1/(2 sqrt t) is not square integrable
    assert A.l2_norm(parse("sqrt(t)"), 1, UNIT) is None


def test_sigma():
    assert A.sigma(parse("t^2"), 1, UNIT) == pytest.approx(math.sqrt(1 / 3), abs=1e-12)
    assert A.sigma(parse("3*t + 1"), 1, UNIT) == pytest.approx(0.0, abs=1e-12)


def test_sigma_pythagorean_identity_and_shift_invariance():
    rng = random.Random(4)
    for src in ("exp(t)", "sin(3*t)", "t^3 - t", "log(2 + t)"):
        a = rng.uniform(-1, 0)
        iv = (a, a + rng.uniform(0.5, 2))
        for order in (1, 2):
            s = A.sigma(parse(src), order, iv)
            l2 = A.l2_norm(parse(src), order, iv)
            mean = A.integral(parse(src), order, iv) / (iv[1] - iv[0])
            assert s**2 + mean**2 * (iv[1] - iv[0]) == pytest.approx(l2**2, rel=1e-10, abs=1e-12)
        shifted = A.sigma(parse(f"{src} + 7*t^2"), 2, iv)
        plain = A.sigma(parse(src), 2, iv)
        # adding 7t^2 adds the constant 14 to f''
        assert shifted == pytest.approx(plain, abs=1e-10)


def _poly_cases():
    rng = random.Random(12)
    out = []
    for _ in range(10):
        co = [rng.uniform(-2, 2) for _ in range(5)]
        out.append(np.polynomial.Polynomial(co))
    return out


@pytest.mark.parametrize("p", _poly_cases())
def test_polynomial_ranges_and_norms(p):
    src = " + ".join(f"({float(c)!r})*t^{k}" for k, c in enumerate(p.coef))
    ast = parse(src)
    for order in (1, 2):
        d = p.deriv(order)
        crit = [r.real for r in d.deriv().roots() if abs(r.imag) < 1e-12 and 0 < r.real < 1] if d.degree() > 0 else []
        vals = [d(x) for x in (0.0, 1.0, *crit)]
        lo, hi = A.sample_range(ast, order, UNIT)
        assert lo == pytest.approx(min(vals), abs=1e-6)
        assert hi == pytest.approx(max(vals), abs=1e-6)
        sq = (d * d).integ()
        assert A.l2_norm(ast, order, UNIT) == pytest.approx(math.sqrt(sq(1.0) - sq(0.0)), rel=1e-9)


def test_build_info_t_squared():
    info = A.build_info(parse("t^2"), UNIT)
    assert all(getattr(info, f) is not None for f in INFO_FIELDS)
    assert info.source("S") is Provenance.EXACT
    assert info.source("S1") is Provenance.EXACT
    assert all(info.source(f) is Provenance.SAMPLED for f in INFO_FIELDS if f not in ("S", "S1"))
    assert info.sup_fsecond == pytest.approx(2.0)


def test_build_info_sqrt_override():
    info = A.build_info(parse("sqrt(t)"), UNIT)
    assert info.gamma1 is None and info.Gamma1 is None and info.l2_fprime is None
    info = A.build_info(parse("sqrt(t)"), UNIT, {"gamma1": 0.5})
    assert info.gamma1 == 0.5 and info.source("gamma1") is Provenance.USER_SUPPLIED
    assert [b.theorem_tag for b in best_bounds(info, UNIT)] == [Tag.FIRST_LOWER]


def test_inconsistent_override_warns():
    info = A.build_info(parse("t^2"), UNIT, {"gamma1": 1.5})
    assert info.gamma1 == 1.5
    assert any("gamma1" in w and "secant" in w for w in info.warnings)


def test_l2_override_sets_sigma():
    info = A.build_info(parse("t^2"), UNIT, {"l2_fprime": math.sqrt(4 / 3)})
    assert info.sigma_fprime == pytest.approx(math.sqrt(1 / 3), abs=1e-12)
    assert info.rigorous("sigma_fprime")
    with pytest.raises(DomainError):
        A.build_info(parse("t^2"), UNIT, {"l2_fprime": 0.5})


def test_unknown_override_rejected():
    with pytest.raises(DomainError):
        A.build_info(parse("t"), UNIT, {"gamma3": 1.0})


def test_absence_propagates_to_bounds():
    info = A.build_info(parse("t^1.5"), UNIT)
    # f'' = 3/(4 sqrt t) is unbounded: no f'' range bounds
    assert info.gamma2 is None
    tags = {b.theorem_tag for b in best_bounds(info, UNIT)}
    assert not tags & {Tag.SECOND_RANGE, Tag.SECOND_LOWER, Tag.SECOND_UPPER, Tag.SECOND_SUP}
    assert Tag.FIRST_RANGE in tags


def test_grid_from_environment(monkeypatch):
    monkeypatch.setenv("OPTIQUAD_GRID", "2000")
    cfg = A.SamplingConfig.from_env()
    assert cfg.points_per_unit == 2000
    assert len(cfg.grid(0.0, 1.0)) == 2000
    monkeypatch.setenv("OPTIQUAD_GRID", "0")
    with pytest.raises(DomainError):
        A.SamplingConfig.from_env()
    monkeypatch.delenv("OPTIQUAD_GRID")
    assert A.SamplingConfig.from_env().points_per_unit == A.DEFAULT_POINTS_PER_UNIT


def test_one_sided_second_derivative_bound_with_user_gamma2():
    # f = t^(3/2): f'' = 3/(4 sqrt t) >= 3/4 on [0, 1], S1 = 3/2
    info = A.build_info(parse("t^1.5"), UNIT, {"gamma2": 0.75})
    assert info.S1 == pytest.approx(1.5)
    out = {b.theorem_tag: b for b in best_bounds(info, UNIT)}
    assert out[Tag.SECOND_LOWER].value == pytest.approx((1 / 12 - math.sqrt(2) / 32) * 0.75, abs=1e-15)
    assert out[Tag.SECOND_LOWER].rigorous


def test_product_with_singular_factor_is_reported_absent():
    # t*sqrt(t) at 0 is 0*inf in forward mode; the conservative outcome is absence
    assert A.sample_range(parse("t*sqrt(t)"), 1, UNIT) is None
