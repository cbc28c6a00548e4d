import math

import numpy as np
import pytest

from osc_lab.classes import (a2_char_classic, a2_char_inf, a2_report, bmo_norm_classic,
                             bmo_norm_inf, norm_report, verify_rearrangement)
from osc_lab.functionals import big_w
from osc_lab.records import FAIL, PASS
from osc_lab.steps import UNIT, StepFunction
from osc_lab.transforms import phi_from_weight, rearrange_decreasing, weight_from_phi
from osc_lab.weights import cosh_weight, exp_weight, power

from conftest import random_phi

E = math.e
TWO_VALUE_W = StepFunction(UNIT, [0.5, 0.5], [E, 1.0])


def test_bmo_examples(chi_half):
    const = StepFunction.constant(2.0)
    assert bmo_norm_inf(const, 1.5) == 0.0 and bmo_norm_classic(const, 3) == 0.0
    assert bmo_norm_inf(chi_half, 2) == pytest.approx(0.5, abs=1e-12)
    assert bmo_norm_classic(chi_half, 1) == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(ValueError):
        bmo_norm_inf(chi_half, 0.5)
    with pytest.raises(ValueError):
        bmo_norm_classic(chi_half, 0.9)


def test_bmo2_equality_and_sandwich(rng):
    for _ in range(15):
        phi = random_phi(rng)
        rep2 = norm_report(phi, 2)
        assert abs(rep2.norm_inf_variant - rep2.norm_classic_variant) <= 1e-8
        for p in (1, 1.5, 3):
            assert norm_report(phi, p).sandwich_ok(1e-6)


def test_a2_examples():
    assert a2_char_inf(StepFunction.constant(3.5)) == 1.0
    assert a2_char_classic(StepFunction.constant(3.5)) == pytest.approx(1.0, abs=1e-15)
    assert a2_char_inf(TWO_VALUE_W) == pytest.approx(math.sqrt(E), abs=1e-10)
    assert a2_char_classic(TWO_VALUE_W) == pytest.approx((E + 1) ** 2 / (4 * E), abs=1e-10)
    rep = a2_report(TWO_VALUE_W)
    assert rep.sandwich_ok()
    assert math.sqrt(rep.char_classic) == pytest.approx(1.12763, abs=1e-5)
    # the quoted 2.543082 doubles an already rounded value
    assert 2 * rep.char_classic == pytest.approx(2.543082, abs=2e-6)
    with pytest.raises(ValueError):
        a2_char_inf(StepFunction(UNIT, [0.5, 0.5], [1.0, -1.0]))
    with pytest.raises(ValueError):
        a2_char_classic(StepFunction(UNIT, [0.5, 0.5], [1.0, 0.0]))


def test_a2_scale_invariance(rng):
    for _ in range(5):
        w = weight_from_phi(random_phi(rng))
        tau = float(rng.uniform(0.1, 10))
        assert a2_char_inf(tau * w) == pytest.approx(a2_char_inf(w), rel=1e-9)
        assert a2_char_classic(tau * w) == pytest.approx(a2_char_classic(w), rel=1e-9)


def test_a2_rearrangement_bridge(rng):
    for _ in range(5):
        phi = random_phi(rng)
        w_star = rearrange_decreasing(weight_from_phi(phi))
        direct = a2_char_inf(w_star)
        via_log = big_w(rearrange_decreasing(phi), UNIT, exp_weight()).value
        assert direct == pytest.approx(via_log, rel=1e-12)


def test_classic_a2_at_least_one(rng):
    for _ in range(5):
        assert a2_char_classic(weight_from_phi(random_phi(rng))) >= 1.0


def test_verify_monotone_is_fixed_point():
    phi = StepFunction(UNIT, [0.3, 0.3, 0.4], [2.0, 0.5, -1.0])
    for Q in (power(1), power(2), exp_weight(), cosh_weight()):
        rec = verify_rearrangement(phi, Q)
        assert abs(rec.slack) <= 1e-9 and rec.status == PASS


def test_verify_quarters():
    phi = StepFunction(UNIT, [0.25] * 4, [0.0, 1.0, 0.0, 1.0])
    rec = verify_rearrangement(phi, power(2))
    assert rec.lhs == pytest.approx(0.25, abs=1e-12) and rec.rhs == pytest.approx(0.25, abs=1e-12)
    assert abs(rec.slack) <= 1e-12 and rec.check == "theorem1" and rec.weight == "power:2"


def test_verify_flags_and_rechecks(monkeypatch):
    """A fabricated deficit on the right-hand side triggers the 4x grid recheck."""
    import osc_lab.classes as classes

    real = classes.big_w

    def lowball(phi, J, Q, cfg):
        r = real(phi, J, Q, cfg)
        if np.all(np.diff(phi.values) <= 0):
            return r
        return type(r)(r.value - 0.5, r.witness, r.method, r.upper)

    monkeypatch.setattr(classes, "big_w", lowball)
    phi = StepFunction(UNIT, [0.25] * 4, [0.0, 1.0, 0.0, 1.0])
    rec = verify_rearrangement(phi, power(2), classes.DEFAULT_CONFIG.with_grid(32))
    assert rec.note == "oracle-recheck@128"
    assert rec.oracle_rhs == pytest.approx(0.25, abs=1e-12)
    assert rec.status == PASS


def test_record_status_rule():
    from osc_lab.records import CampaignRecord

    r = CampaignRecord(0, 0, "x", "power:2", 1.0, 1.0 - 2e-6, -2e-6, 1e-6)
    assert r.status == FAIL
    r = CampaignRecord(0, 0, "x", "power:2", 1.0, 1.0 - 5e-7, -5e-7, 1e-6)
    assert r.status == PASS
