import math

import numpy as np
import pytest

from osc_lab.errors import EvaluationError
from osc_lab.functionals import (BREAKPOINT_ENUM, DEFAULT_CONFIG, GRID_ORACLE, REFINED_LOCAL,
                                 OptimizerConfig, big_w, grid_oracle_w, minimize_c, v_c)
from osc_lab.steps import UNIT, Interval, StepFunction, restrict
from osc_lab.weights import cosh_weight, exp_weight, power, regularized

from conftest import random_phi
from oracles import (breaks_of, brute_sup, expabs, riemann_average, sq, v_dense_c, v_scipy)

E = math.e


def test_config_validation():
    assert DEFAULT_CONFIG.c_tol == 1e-11 and DEFAULT_CONFIG.grid_resolution == 512
    assert DEFAULT_CONFIG.multistart_top == 8 and DEFAULT_CONFIG.refine_iters == 60
    with pytest.raises(ValueError):
        OptimizerConfig(c_tol=0.0)
    with pytest.raises(ValueError):
        OptimizerConfig(grid_resolution=-4)


def test_v_c_examples(chi_half):
    assert v_c(StepFunction.constant(5.0), UNIT, 5.0, power(2)) == 0.0
    assert v_c(chi_half, UNIT, 0.0, power(2)) == 0.5
    got = v_c(chi_half, UNIT, 0.0, exp_weight())
    oracle = riemann_average(breaks_of(chi_half.lengths), chi_half.values, expabs, 0.0, 1.0)
    assert got == pytest.approx((E + 1) / 2, abs=1e-15)
    assert abs(got - oracle) < 1e-6
    with pytest.raises(ValueError):
        v_c(chi_half, UNIT, math.inf, power(2))


def test_overflow_is_an_error():
    phi = StepFunction(UNIT, [0.5, 0.5], [0.0, 900.0])
    with pytest.raises(EvaluationError):
        v_c(phi, UNIT, 0.0, exp_weight())


def test_minimize_constant():
    for Q in (power(2), power(1.5), exp_weight(), cosh_weight()):
        r = minimize_c(StepFunction.constant(-1.25), UNIT, Q)
        assert r.c_star == -1.25
        assert r.value == float(Q(0.0))
    assert minimize_c(StepFunction.constant(2.0), UNIT, exp_weight()).value == 1.0


def test_minimize_power2(chi_half):
    r = minimize_c(chi_half, UNIT, power(2))
    assert (r.value, r.c_star, r.c_star_unique) == (0.25, 0.5, True)
    dense, c = v_dense_c(breaks_of(chi_half.lengths), chi_half.values, sq, 0.0, 1.0)
    assert abs(dense - 0.25) < 1e-9 and abs(c - 0.5) < 1e-4


def test_minimize_exp(chi_half):
    r = minimize_c(chi_half, UNIT, exp_weight())
    assert r.value == pytest.approx(math.sqrt(E), abs=1e-12)
    assert r.c_star == pytest.approx(0.5, abs=1e-10)
    dense, c = v_dense_c(breaks_of(chi_half.lengths), chi_half.values, expabs, 0.0, 1.0)
    assert abs(r.value - dense) < 1e-8 and abs(c - 0.5) < 1e-4


def test_minimize_power1_midpoint_convention(chi_half):
    r = minimize_c(chi_half, UNIT, power(1))
    assert (r.value, r.c_star, r.c_star_unique) == (0.5, 0.5, False)
    # any c in [0, 1] attains 0.5
    for c in (0.0, 0.3, 1.0):
        assert v_c(chi_half, UNIT, c, power(1)) == 0.5


def test_minimize_against_scipy(rng):
    for Q, g in ((power(1.5), lambda t: np.abs(t) ** 1.5), (exp_weight(), expabs),
                 (cosh_weight(), np.cosh), (regularized(power(1), 3), lambda t: np.abs(t) + t * t / 3)):
        for _ in range(10):
            phi = random_phi(rng)
            J = Interval(*sorted(rng.uniform(0, 1, 2)))
            r = minimize_c(phi, J, Q)
            ref, c_ref = v_scipy(breaks_of(phi.lengths), phi.values, g, J.a, J.b)
            assert r.value <= ref + 1e-12
            assert r.value == pytest.approx(ref, rel=1e-9, abs=1e-12)
            lo, hi = restrict(phi, J).values.min(), restrict(phi, J).values.max()
            assert lo - 1e-12 <= r.c_star <= hi + 1e-12


def test_big_w_constant():
    r = big_w(StepFunction.constant(3.0), UNIT, power(2))
    assert r.value == 0.0 and r.witness == UNIT


def test_big_w_chi_half(chi_half):
    r2 = big_w(chi_half, UNIT, power(2))
    re = big_w(chi_half, UNIT, exp_weight())
    assert r2.value == pytest.approx(0.25, abs=1e-12)
    assert re.value == pytest.approx(math.sqrt(E), abs=1e-12)
    # the grid oracle agrees; balanced straddles lie on the grid
    assert grid_oracle_w(chi_half, UNIT, power(2)).value == pytest.approx(0.25, abs=1e-12)
    assert grid_oracle_w(chi_half, UNIT, exp_weight()).value == pytest.approx(math.sqrt(E), abs=1e-10)


def test_witness_carries_the_value(rng):
    for Q in (power(1), power(1.5), power(2), exp_weight(), cosh_weight()):
        for _ in range(8):
            phi = random_phi(rng)
            r = big_w(phi, UNIT, Q)
            assert UNIT.contains(r.witness)
            again = minimize_c(phi, r.witness, Q).value
            assert again == pytest.approx(r.value, rel=1e-9, abs=1e-12)
            assert r.method in (BREAKPOINT_ENUM, REFINED_LOCAL)
            assert r.upper >= r.value - 1e-12
            assert r.upper - r.value <= 1e-7 * max(1.0, r.value)


def test_big_w_dominates_v_and_is_monotone(rng):
    for _ in range(20):
        phi = random_phi(rng)
        Q = exp_weight()
        a, b = sorted(rng.uniform(0, 1, 2))
        J = Interval(a, b)
        wj = big_w(phi, J, Q).value
        assert wj >= minimize_c(phi, J, Q).value - 1e-12
        assert wj <= big_w(phi, UNIT, Q).value + 1e-9


def test_degenerate_interval_inside_one_segment(chi_half):
    r = big_w(chi_half, Interval(0.1, 0.3), exp_weight())
    assert r.value == 1.0


def test_grid_oracle_against_brute_force(rng):
    """The pruned package oracle equals a plain double loop with scipy minimisation."""
    Q, g = power(1.5), (lambda t: np.abs(t) ** 1.5)
    for _ in range(3):
        phi = random_phi(rng, k_max=4)
        br = breaks_of(phi.lengths)
        brute, _ = brute_sup(br, phi.values, lambda a, b: v_scipy(br, phi.values, g, a, b)[0], 24)
        got = grid_oracle_w(phi, UNIT, Q, resolution=24)
        assert got.method == GRID_ORACLE
        assert got.value == pytest.approx(brute, rel=1e-8, abs=1e-12)


def test_optimizer_beats_grid(rng):
    for Q in (power(1), power(2), exp_weight()):
        for _ in range(5):
            phi = random_phi(rng, k_max=5)
            assert big_w(phi, UNIT, Q).value >= grid_oracle_w(phi, UNIT, Q, resolution=128).value - 1e-12


def test_deterministic_results(rng):
    phi = random_phi(rng)
    a = big_w(phi, UNIT, cosh_weight())
    b = big_w(phi, UNIT, cosh_weight())
    assert a == b
