import math

import numpy as np
import pytest

from osc_lab.functionals import big_w, minimize_c, v_c
from osc_lab.steps import UNIT, Interval, StepFunction, restrict
from osc_lab.transforms import (LipschitzPL, compose_lipschitz, concatenate, distribution,
                                phi_from_weight, rearrange_decreasing, regularized_weight,
                                restriction_pair, truncate, weight_from_phi)
from osc_lab.weights import cosh_weight, exp_weight, power

from conftest import random_phi
from oracles import breaks_of, quantile_rearrangement


def test_rearrange_sorted_input_is_fixed():
    phi = StepFunction(UNIT, [0.2, 0.3, 0.5], [3.0, 1.0, -2.0])
    star = rearrange_decreasing(phi)
    assert np.array_equal(star.values, phi.values) and np.allclose(star.lengths, phi.lengths)


def test_rearrange_quarters():
    phi = StepFunction(UNIT, [0.25] * 4, [0.0, 1.0, 0.0, 1.0])
    star = rearrange_decreasing(phi)
    assert star.lengths.tolist() == [0.5, 0.5] and star.values.tolist() == [1.0, 0.0]


def test_rearrange_matches_quantile_oracle(rng):
    for _ in range(20):
        phi = random_phi(rng, k_max=8)
        phi = StepFunction(UNIT, phi.lengths, np.round(phi.values, 0))  # force ties
        star = rearrange_decreasing(phi)
        ob, ov = quantile_rearrangement(breaks_of(phi.lengths), phi.values)
        assert np.array_equal(star.values, ov)
        assert np.allclose(star.breaks, ob, atol=1e-12)


def test_rearrange_equimeasurable_and_idempotent(rng):
    phi = random_phi(rng)
    star = rearrange_decreasing(phi)
    d1, d2 = distribution(phi), distribution(star)
    assert d1.keys() == d2.keys()
    assert all(abs(d1[k] - d2[k]) < 1e-14 for k in d1)
    assert np.all(np.diff(star.values) < 0)
    again = rearrange_decreasing(star)
    assert np.array_equal(again.values, star.values) and np.array_equal(again.lengths, star.lengths)


def test_rearrange_needs_unit_domain(chi_half):
    with pytest.raises(ValueError):
        rearrange_decreasing(restrict(chi_half, Interval(0.2, 0.9)))


def test_truncate_examples(chi_half):
    phi = StepFunction(UNIT, [0.5, 0.5], [0.3, 0.6])
    assert truncate(phi, 0.0, 1.0).values.tolist() == [0.3, 0.6]
    assert truncate(chi_half, 0.25, 0.75).values.tolist() == [0.75, 0.25]
    assert truncate(chi_half, 0.4, 0.4).values.tolist() == [0.4, 0.4]
    with pytest.raises(ValueError):
        truncate(chi_half, 1.0, 0.0)


def test_truncate_commutes_with_rearrangement(rng):
    for _ in range(20):
        phi = random_phi(rng)
        A, B = sorted(rng.uniform(-3, 3, 2))
        lhs = rearrange_decreasing(truncate(phi, A, B))
        rhs = truncate(rearrange_decreasing(phi), A, B).normalize()
        assert np.array_equal(lhs.values, rhs.values)
        assert np.allclose(lhs.lengths, rhs.lengths, atol=1e-12)


def test_concatenate_examples(chi_half):
    part = restrict(chi_half, Interval(0.25, 0.75))
    one = concatenate(part, StepFunction.constant(7.0), 1.0)
    assert one.domain == UNIT and one.lengths.tolist() == [0.5, 0.5]
    half = concatenate(StepFunction.constant(-1.0), StepFunction.constant(2.0), 0.5)
    assert half.lengths.tolist() == [0.5, 0.5] and half.values.tolist() == [-1.0, 2.0]
    zero = concatenate(part, StepFunction.constant(7.0), 0.0)
    assert zero.values.tolist() == [7.0]
    with pytest.raises(ValueError):
        concatenate(part, part, 1.5)


def test_concatenation_identity(rng):
    for Q in (power(2), exp_weight(), cosh_weight()):
        for _ in range(10):
            pm = restrict(random_phi(rng), Interval(*sorted(rng.uniform(0, 1, 2))))
            pp = restrict(random_phi(rng), Interval(*sorted(rng.uniform(0, 1, 2))))
            al, c = rng.uniform(), rng.uniform(-3, 3)
            lhs = v_c(concatenate(pm, pp, al), UNIT, c, Q)
            rhs = al * v_c(pm, pm.domain, c, Q) + (1 - al) * v_c(pp, pp.domain, c, Q)
            assert lhs == pytest.approx(rhs, rel=1e-13)


def test_lipschitz_validation():
    with pytest.raises(ValueError):
        LipschitzPL((0.0,), (1.5, 0.0), 0.0)
    with pytest.raises(ValueError):
        LipschitzPL((0.0, 1.0), (1.0, 0.0), 0.0)
    with pytest.raises(ValueError):
        LipschitzPL((1.0, 0.0), (1.0, 0.0, 1.0), 0.0)


def test_lipschitz_evaluator():
    f = LipschitzPL((0.0, 1.0), (0.5, -1.0, 1.0), 2.0)
    assert f(0.0) == 2.0 and f(1.0) == 1.0
    assert f(-2.0) == 1.0 and f(3.0) == 3.0 and f(0.5) == 1.5
    t = np.linspace(-5, 5, 1001)
    assert np.max(np.abs(np.diff(f(t))) / np.diff(t)) <= 1.0 + 1e-12


def test_lipschitz_examples(chi_half):
    assert np.array_equal(compose_lipschitz(LipschitzPL.identity(), chi_half).values,
                          chi_half.values)
    tr = compose_lipschitz(LipschitzPL.truncation(0.25, 0.75), chi_half)
    assert tr.values.tolist() == truncate(chi_half, 0.25, 0.75).values.tolist()


def test_lipschitz_does_not_increase_w(rng):
    gen = np.random.default_rng(11)
    for _ in range(15):
        phi = random_phi(rng)
        f = LipschitzPL.random(gen, 4, slopes=(-1.0, 0.5, 1.0))
        fphi = compose_lipschitz(f, phi)
        for Q in (power(2), exp_weight()):
            assert big_w(fphi, UNIT, Q).value <= big_w(phi, UNIT, Q).value + 1e-9
            assert minimize_c(fphi, UNIT, Q).value <= minimize_c(phi, UNIT, Q).value + 1e-9


def test_regularized_weight_examples():
    Q = regularized_weight(power(1), 1)
    assert float(Q(2.0)) == 6.0 and Q.strictly_convex and Q.fast_path is None


def test_weight_bridge(rng):
    assert weight_from_phi(StepFunction.constant(0.0)).values.tolist() == [1.0]
    for _ in range(10):
        phi = random_phi(rng)
        a = rearrange_decreasing(weight_from_phi(phi))
        b = weight_from_phi(rearrange_decreasing(phi))
        assert np.array_equal(a.values, b.values) and np.allclose(a.lengths, b.lengths)
        back = phi_from_weight(weight_from_phi(phi))
        assert np.max(np.abs(back.values - phi.values)) <= 1e-12
    with pytest.raises(ValueError):
        phi_from_weight(StepFunction(UNIT, [0.5, 0.5], [1.0, 0.0]))


def test_restriction_pair(chi_half):
    left, right = restriction_pair(chi_half, 0.25)
    assert left.domain == Interval(0.0, 0.25) and right.domain == Interval(0.25, 1.0)


def test_concatenate_alpha_at_rounding_of_one():
    pm = StepFunction.constant(1.0)
    pp = StepFunction(UNIT, [0.5, 0.5], [0.0, 2.0])
    out = concatenate(pm, pp, 1.0 - 2 ** -53)
    assert out.values.tolist() == [1.0] and out.breaks[-1] == 1.0
    out = concatenate(pm, pp, 2 ** -60)
    assert out.values.tolist() == [0.0, 2.0] and out.lengths.tolist() == [0.5, 0.5]
