"""Randomized structural properties of the functionals and transforms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osc_lab.functionals import big_w, minimize_c, v_c
from osc_lab.steps import UNIT, Interval, StepFunction, average_of, restrict
from osc_lab.transforms import (LipschitzPL, compose_lipschitz, concatenate, distribution,
                                rearrange_decreasing)
from osc_lab.weights import cosh_weight, exp_weight, power

from conftest import step_functions

WEIGHTS = [power(1), power(1.5), power(2), exp_weight(), cosh_weight()]
weights = st.sampled_from(WEIGHTS)
unit = st.floats(0.0, 1.0)


def reflect(phi):
    return StepFunction(UNIT, phi.lengths[::-1], phi.values[::-1])


def interval(a, b):
    a, b = sorted((a, b))
    if b - a < 1e-3:
        b = min(1.0, a + 1e-3)
        a = b - 1e-3
    return Interval(a, b)


@given(step_functions(), weights, st.floats(-2, 2))
def test_v_translation_invariant(phi, Q, tau):
    assert minimize_c(phi + tau, UNIT, Q).value == pytest.approx(
        minimize_c(phi, UNIT, Q).value, rel=1e-8, abs=1e-10)


@given(step_functions(), st.sampled_from([power(2), exp_weight()]), st.floats(-2, 2))
def test_w_translation_invariant(phi, Q, tau):
    assert big_w(phi + tau, UNIT, Q).value == pytest.approx(big_w(phi, UNIT, Q).value,
                                                           rel=1e-8, abs=1e-10)


@given(step_functions(), st.sampled_from([power(2), cosh_weight()]))
def test_w_reflection_invariant(phi, Q):
    assert big_w(reflect(phi), UNIT, Q).value == pytest.approx(big_w(phi, UNIT, Q).value,
                                                              rel=1e-8, abs=1e-10)


@given(step_functions(), step_functions(), unit, st.floats(-3, 3), weights)
def test_concatenation_identity(pm, pp, alpha, c, Q):
    lhs = v_c(concatenate(pm, pp, alpha), UNIT, c, Q)
    rhs = alpha * v_c(pm, UNIT, c, Q) + (1 - alpha) * v_c(pp, UNIT, c, Q)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-14)


@given(step_functions(), st.floats(-2, 2), st.floats(0.1, 3))
def test_average_affine(phi, b, a):
    g = lambda t: t
    assert average_of(a * phi + b, UNIT, g) == pytest.approx(a * average_of(phi, UNIT, g) + b,
                                                           rel=1e-12, abs=1e-12)


@given(step_functions(), st.floats(0.05, 0.95))
def test_average_partition_mixture(phi, m):
    g = np.cosh
    left = average_of(phi, Interval(0.0, m), g)
    right = average_of(phi, Interval(m, 1.0), g)
    assert average_of(phi, UNIT, g) == pytest.approx(m * left + (1 - m) * right, rel=1e-12)


@given(step_functions(), unit, unit, unit, unit)
def test_restrict_consistency(phi, a, b, u, v):
    J = interval(a, b)
    K = interval(J.a + u * J.length(), J.a + v * J.length())
    if not J.contains(K):
        return
    twice = restrict(restrict(phi, J), K)
    once = restrict(phi, K)
    assert np.allclose(twice.values, once.values)
    assert np.allclose(twice.lengths, once.lengths, atol=1e-12)


@given(step_functions(), weights, st.floats(-4, 4), unit, unit)
def test_minimum_below_every_constant(phi, Q, c, a, b):
    J = interval(a, b)
    assert minimize_c(phi, J, Q).value <= v_c(phi, J, c, Q) + 1e-12


@settings(max_examples=30)
@given(step_functions(k_max=5), weights, unit, unit)
def test_w_dominates_v_and_grows(phi, Q, a, b):
    J = interval(a, b)
    wj = big_w(phi, J, Q).value
    assert wj >= minimize_c(phi, J, Q).value - 1e-12
    assert wj <= big_w(phi, UNIT, Q).value + 1e-9


@given(step_functions())
def test_variance_fast_path(phi):
    mean = float(np.dot(phi.lengths, phi.values))
    var = float(np.dot(phi.lengths, (phi.values - mean) ** 2))
    r = minimize_c(phi, UNIT, power(2))
    assert r.value == pytest.approx(var, rel=1e-12, abs=1e-14)
    assert r.c_star == pytest.approx(mean, abs=1e-12)


@given(step_functions(), unit, unit, weights)
def test_rescaling_invariance(phi, a, b, Q):
    J = interval(a, b)
    piece = restrict(phi, J)
    moved = piece.rescaled(UNIT)
    assert minimize_c(moved, UNIT, Q).value == pytest.approx(minimize_c(piece, J, Q).value,
                                                            rel=1e-10, abs=1e-12)


@given(step_functions())
def test_rearrangement_properties(phi):
    star = rearrange_decreasing(phi)
    assert np.all(np.diff(star.values) < 0)
    d, ds = distribution(phi), distribution(star)
    assert set(d) == set(ds) and all(abs(d[k] - ds[k]) < 1e-12 for k in d)
    for Q in (power(2), exp_weight()):
        # V over the whole interval only sees the distribution
        assert minimize_c(star, UNIT, Q).value == pytest.approx(minimize_c(phi, UNIT, Q).value,
                                                               rel=1e-10, abs=1e-12)


@given(step_functions(), st.integers(0, 2**32 - 1), weights)
def test_lipschitz_contracts_v(phi, seed, Q):
    f = LipschitzPL.random(np.random.default_rng(seed), 3)
    assert minimize_c(compose_lipschitz(f, phi), UNIT, Q).value <= minimize_c(phi, UNIT, Q).value + 1e-10
