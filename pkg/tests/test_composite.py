import math
import random

import numpy as np
import pytest

import corpus
from optiquad import composite as M
from optiquad.bounds import Functional, Tag
from optiquad.composite import CompositeConfig
from optiquad.errors import DomainError, EvaluationError
from optiquad.expr import parse
from optiquad.rules import correction_p

R2 = math.sqrt(2)
UNIT = (0.0, 1.0)
C_T1 = math.sqrt(11 / 96 - R2 / 16)


def test_config():
    cfg = CompositeConfig(UNIT, 4)
    assert cfg.h == 0.25
    assert cfg.nodes().tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
    for bad in (0, -1, 1.5):
        with pytest.raises(DomainError):
            CompositeConfig(UNIT, bad)


def test_estimate_pinned():
    assert M.composite_estimate(lambda t: np.ones_like(t), CompositeConfig((2.0, 5.0), 7)) == pytest.approx(3.0, abs=1e-14)
    assert M.composite_estimate("t", CompositeConfig(UNIT, 4)) == pytest.approx(0.5, abs=1e-15)
    est = M.composite_estimate("exp(t)", CompositeConfig(UNIT, 1))
    closed = R2 / 8 * (1 + math.e) + (1 - R2 / 4) * math.exp(0.5)
    assert est == pytest.approx(closed, abs=1e-15)
    assert est == pytest.approx(1.72311584911737, abs=1e-14)
    assert math.e - 1 - est == pytest.approx(-0.00483402065832834, abs=1e-15)


def test_grouped_equals_panelwise():
    rng = random.Random(1)
    for src in ("exp(t)", "sin(5*t)", "t^4 - 2*t"):
        for n in (1, 3, 8, 33):
            a = rng.uniform(-1, 0)
            cfg = CompositeConfig((a, a + rng.uniform(0.5, 2)), n)
            assert M.composite_estimate(src, cfg) == pytest.approx(M.composite_estimate_panelwise(src, cfg), abs=1e-13)


def test_correction_pinned():
    cfg = CompositeConfig(UNIT, 2)
    assert M.composite_correction("t^2", cfg) == pytest.approx((4 - 3 * R2) / 192, abs=1e-16)
    assert M.composite_correction((1.0, 1.0), cfg) == 0.0
    c4 = M.composite_correction("t^3", CompositeConfig(UNIT, 4))
    c8 = M.composite_correction("t^3", CompositeConfig(UNIT, 8))
    assert c8 == pytest.approx(c4 / 4, rel=1e-15)


def test_correction_telescopes():
    rng = random.Random(2)
    for _ in range(20):
        n = rng.randint(1, 12)
        a = rng.uniform(-1, 1)
        cfg = CompositeConfig((a, a + rng.uniform(0.1, 2)), n)
        slopes = [rng.uniform(-5, 5) for _ in range(n + 1)]
        x = cfg.nodes()
        panel_sum = math.fsum(correction_p(slopes[i], slopes[i + 1], (x[i], x[i + 1])) for i in range(n))
        assert M.composite_correction((slopes[0], slopes[-1]), cfg) == pytest.approx(panel_sum, abs=1e-15)


def test_sigma_omega_pinned():
    assert M.sigma_n("3*t + 1", CompositeConfig(UNIT, 4)) == pytest.approx(0.0, abs=1e-12)
    assert M.omega_n("3*t + 1", CompositeConfig(UNIT, 1)) == pytest.approx(0.0, abs=1e-12)
    assert M.sigma_n("t^2", CompositeConfig(UNIT, 1)) == pytest.approx(math.sqrt(1 / 3), abs=1e-12)
    assert M.sigma_n("t^2", CompositeConfig(UNIT, 2)) == pytest.approx(2 / math.sqrt(48), abs=1e-12)
    assert M.omega_n("t^2", CompositeConfig(UNIT, 1)) == pytest.approx(math.sqrt(1 / 3), abs=1e-12)
    assert M.omega_n("t^2", CompositeConfig(UNIT, 2)) == pytest.approx(math.sqrt(5 / 6), abs=1e-12)
    assert M.omega_n("t^2", CompositeConfig(UNIT, 2), l2=math.sqrt(4 / 3)) == pytest.approx(math.sqrt(5 / 6), abs=1e-15)


def test_omega_for_linear_uses_formula():
    # omega_n keeps the global (b-a)||g'||^2 - (g(b)-g(a))^2/n, which is 0 only for n = 1
    assert M.omega_n("3*t + 1", CompositeConfig(UNIT, 4)) == pytest.approx(math.sqrt(9 - 9 / 4), abs=1e-12)


def test_sigma_order_checked():
    with pytest.raises(DomainError):
        M.sigma_n("t", CompositeConfig(UNIT, 2), order=2)


def test_composite_bound_values():
    assert M.cb_second_sup(1.0, CompositeConfig(UNIT, 10)).value == pytest.approx((2 - R2) / 4800, abs=1e-18)
    first = {b.theorem_tag: b.value for b in M.cb_first(0.0, 2.0, 1.0, CompositeConfig(UNIT, 4))}
    assert first[Tag.FIRST_RANGE] == pytest.approx((5 - 2 * R2) / 64, abs=1e-16)
    lower = M.cb_first(0.3, None, 0.3, CompositeConfig(UNIT, 4))
    assert [(b.theorem_tag, b.value) for b in lower] == [(Tag.FIRST_LOWER, 0.0)]
    assert M.cb_gruss_first(math.sqrt(1 / 3), CompositeConfig(UNIT, 1)).value == pytest.approx(C_T1 / math.sqrt(3), abs=1e-15)
    assert M.cb_gruss_first(0.0, CompositeConfig(UNIT, 3)).value == 0.0
    assert M.cb_gruss_first(2 / math.sqrt(48), CompositeConfig(UNIT, 2)).value == pytest.approx(C_T1 / 2 * 2 / math.sqrt(48), abs=1e-15)
    second = {b.theorem_tag: b.value for b in M.cb_second(0.0, 6.0, 3.0, CompositeConfig(UNIT, 2))}
    c = 5 * math.sqrt(6) / 96 - 29 * math.sqrt(3) / 432
    assert second[Tag.SECOND_RANGE] == pytest.approx(6 / 4 * c, abs=1e-15)
    assert M.cb_gruss_second(0.0, CompositeConfig(UNIT, 2)).value == 0.0


def test_report_t_cubed():
    rep = M.composite_report("t^3", CompositeConfig(UNIT, 2))
    assert abs(0.25 - rep.corrected) <= 1e-15
    rng = rep.bound(Tag.SECOND_RANGE)
    assert rng.value == pytest.approx(1.5 * (5 * math.sqrt(6) / 96 - 29 * math.sqrt(3) / 432), abs=1e-12)
    assert rep.bound(Tag.GRUSS_FIRST, "omega") is not None


def test_report_q_and_corrected_classes_kept_apart():
    rep = M.composite_report("exp(t)", CompositeConfig(UNIT, 4))
    corrected = {Tag.SECOND_RANGE, Tag.SECOND_LOWER, Tag.SECOND_UPPER, Tag.GRUSS_SECOND}
    for b in rep.bounds:
        assert b.applies_to is (Functional.Q_MINUS_P if b.theorem_tag in corrected else Functional.Q)
        assert b.n == 4


def test_user_l2_makes_omega_bound_rigorous():
    rep = M.composite_report("t^2", CompositeConfig(UNIT, 2), overrides={"l2_fprime": math.sqrt(4 / 3)})
    assert rep.bound(Tag.GRUSS_FIRST, "omega").rigorous
    assert not rep.bound(Tag.GRUSS_FIRST).rigorous


def test_refinement_consistency():
    e = math.e
    for n in (1, 2, 4, 8, 16):
        s_n = M.composite_estimate("exp(t)", CompositeConfig(UNIT, n))
        s_2n = M.composite_estimate("exp(t)", CompositeConfig(UNIT, 2 * n))
        limit = M.cb_second_sup(e, CompositeConfig(UNIT, n)).value + M.cb_second_sup(e, CompositeConfig(UNIT, 2 * n)).value
        assert abs(s_n - s_2n) < limit


def test_singular_node_aborts():
    with pytest.raises(EvaluationError) as exc:
        M.composite_estimate("1/t", CompositeConfig((-1.0, 1.0), 2))
    assert exc.value.point == 0.0


def test_study_exp():
    res = M.convergence_study("exp(t)", UNIT, [1, 2, 4, 8, 16, 32], math.e - 1)
    assert res.slope_error == pytest.approx(-2.0, abs=0.1)
    assert res.slope_corrected == pytest.approx(-4.0, abs=0.2)
    for row in res.rows:
        assert row["abs_error"] <= row["bound_T4ab"]
        assert row["abs_corrected_error"] <= row["bound_T4p_sigma"]


def test_study_linear_all_zero():
    res = M.convergence_study("2*t - 1", UNIT, [1, 2, 4], 0.0)
    assert all(r["abs_error"] <= 1e-16 and r["abs_corrected_error"] <= 1e-16 for r in res.rows)
    assert res.slope_error is None


def test_loglog_slope():
    assert M.loglog_slope([1, 2, 4, 8], [1, 0.25, 0.0625, 0.015625]) == pytest.approx(-2.0)
    assert M.loglog_slope([1, 2], [0.0, 0.0]) is None


def test_reference_integral():
    assert M.reference_integral("exp(t)", UNIT) == pytest.approx(math.e - 1, abs=1e-14)
    assert M.reference_integral("sqrt(t)", UNIT) == pytest.approx(2 / 3, abs=1e-8)


def _sweep_items():
    rng = random.Random(31)
    items = []
    for _ in range(20):
        src, coeffs = corpus.random_polynomial(rng)
        a, b = corpus.random_interval(rng)
        items.append((src, (a, b), corpus.poly_integral(coeffs, a, b)))
    for src in corpus.TRANSCENDENTAL[8:]:
        a, b = corpus.random_interval(rng)
        items.append((src, (a, b), corpus.mp_integral(src, a, b)))
    return items


@pytest.mark.parametrize("src, iv, exact", _sweep_items())
def test_composite_validity_and_cauchy_step(src, iv, exact):
    ast = parse(src)
    info = M.build_info(ast, iv)
    for n in (1, 2, 4, 8):
        rep = M.composite_report(ast, CompositeConfig(iv, n), info=info)
        e = exact - rep.estimate
        for b in rep.bounds:
            err = abs(e) if b.applies_to is Functional.Q else abs(e - rep.correction)
            assert b.value - err >= -1e-12, (n, b, err)
        for s, w in ((rep.sigma_n_fprime, rep.omega_n_fprime), (rep.sigma_n_fsecond, rep.omega_n_fsecond)):
            assert s <= math.sqrt(n) * w + 1e-12
