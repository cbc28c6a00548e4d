"""Per-sample property checks run by the campaign.

Every check takes a :class:`SampleContext` and returns a list of
:class:`~osc_lab.records.CampaignRecord`.  A record states ``lhs <= rhs``
with ``slack = rhs - lhs`` unless its check documents another margin:

* ``*-equality``, ``split-diagonal``, ``local-limit-g`` and
  ``induction-sums`` record a deviation ``d`` as ``lhs = d``, ``rhs = 0``;
* ``dichotomy`` and ``two-sided-*`` store ``C`` and ``V_level`` in
  ``lhs``/``rhs`` and the dichotomy margin from
  :func:`~osc_lab.bellman.dichotomy_margin` in ``slack``;
* pass/fail checks (``local-limit``, ``induction-sizes``,
  ``two-sided-reflection``) use slack 0 or -1.

Randomness beyond the sample itself comes from named substreams of the
sample seed, so adding or reordering checks never changes other records.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..bellman import (BellmanParams, concavity_terms, concatenation_bound,
                       dichotomy_margin, corollary_parts, g_limit, local_g,
                       local_limit_check, scale_to_budget, simulate_induction,
                       split_search, verify_split)
from ..classes import (a2_classic_result, a2_inf_result, bmo_classic_result, bmo_inf_result,
                       mean_deviation_objective, verify_rearrangement)
from ..errors import PreconditionError
from ..functionals import (OptimizerConfig, big_w, grid_oracle_sup, grid_oracle_w,
                           minimize_c)
from ..records import CampaignRecord
from ..steps import UNIT, Interval, StepFunction, restrict
from ..transforms import (LipschitzPL, compose_lipschitz, concatenate, phi_from_weight,
                          rearrange_decreasing, truncate, weight_from_phi)
from ..weights import ConvexWeight, exp_weight, parse_weight, power, regularized
from .rng import make_rng, random_step

BMO_EXPONENTS = (1.0, 1.5, 2.0, 3.0)
REG_BASES = ("power:1", "exp")
REG_INDICES = (1, 10, 100)
ALPHA_GRID = tuple(np.round(np.arange(1, 10) / 10.0, 10))


@dataclass
class SampleContext:
    sample_id: int
    seed: int
    phi: StepFunction
    weights: list
    cfg: OptimizerConfig
    violation_tol: float = 1e-6
    epsilon: float = 1.0
    induction_depth: int = 8
    oracle_mode: bool = False
    value_range: tuple = (-3.0, 3.0)
    max_segments: int = 8

    def rng(self, name: str) -> np.random.Generator:
        return make_rng(self.seed, name)

    def record(self, check, weight, lhs, rhs, tol, lw=None, rw=None, slack=None,
               t0=None, **kw) -> CampaignRecord:
        slack = rhs - lhs if slack is None else slack
        rt = 0.0 if t0 is None else time.perf_counter() - t0
        return CampaignRecord(self.sample_id, self.seed, check, weight, float(lhs), float(rhs),
                              float(slack), tol, _tup(lw), _tup(rw), runtime=rt, **kw)

    def skip(self, check, weight, note) -> CampaignRecord:
        return CampaignRecord.skipped(self.sample_id, self.seed, check, weight, note)

    @property
    def strict_weights(self):
        return [Q for Q in self.weights if Q.strictly_convex]


def _tup(L):
    if L is None:
        return None
    return L.as_tuple() if isinstance(L, Interval) else tuple(L)


def _q(Q, t):
    return float(Q(np.array(t)))


def _for_strict(ctx, check, body):
    """Run ``body(Q)`` for every weight; non-strict weights give skipped records."""
    out = []
    for Q in ctx.weights:
        if not Q.strictly_convex:
            out.append(ctx.skip(check, Q.descriptor, "needs strictly convex Q"))
            continue
        try:
            out.extend(body(Q))
        except PreconditionError as exc:
            out.append(ctx.skip(check, Q.descriptor, str(exc)))
    return out


def _random_subinterval(rng, min_len=0.05) -> Interval:
    while True:
        a, b = np.sort(rng.uniform(0.0, 1.0, 2))
        if b - a >= min_len:
            return Interval(float(a), float(b))


def _w_pair(ctx: SampleContext, check: str, Q: ConvexWeight, phi_l: StepFunction,
            phi_r: StepFunction, J: Interval = UNIT,
            post: Optional[Callable[[float], float]] = None, label: Optional[str] = None):
    """Record ``W(phi_l, J) <= W(phi_r, J)`` (after ``post``).

    In oracle mode a failing record is recomputed with the grid oracle at
    four times the configured resolution; each side keeps its larger estimate.
    """
    t0 = time.perf_counter()
    f = post or (lambda x: x)
    lres, rres = big_w(phi_l, J, Q, ctx.cfg), big_w(phi_r, J, Q, ctx.cfg)
    lv, rv, lw, rw = lres.value, rres.value, lres.witness, rres.witness
    o_l = o_r = math.nan
    note = ""
    if ctx.oracle_mode and f(rv) - f(lv) < -ctx.violation_tol:
        res = 4 * ctx.cfg.grid_resolution
        ol = grid_oracle_w(phi_l, J, Q, ctx.cfg, resolution=res)
        orr = grid_oracle_w(phi_r, J, Q, ctx.cfg, resolution=res)
        o_l, o_r = f(ol.value), f(orr.value)
        if ol.value > lv:
            lv, lw = ol.value, ol.witness
        if orr.value > rv:
            rv, rw = orr.value, orr.witness
        note = f"oracle-recheck@{res}"
    return ctx.record(check, label or Q.descriptor, f(lv), f(rv), ctx.violation_tol, lw, rw,
                      t0=t0, oracle_lhs=o_l, oracle_rhs=o_r, note=note)


# ---------------------------------------------------------------- rearrangement


def check_theorem1(ctx: SampleContext):
    return [verify_rearrangement(ctx.phi, Q, ctx.cfg, ctx.violation_tol, ctx.sample_id, ctx.seed)
            for Q in ctx.weights]


def check_bmo(ctx: SampleContext):
    star = rearrange_decreasing(ctx.phi)
    return [_w_pair(ctx, "bmo-rearrangement", power(p), star, ctx.phi,
                    post=lambda x, p=p: x ** (1.0 / p)) for p in BMO_EXPONENTS]


def check_a2(ctx: SampleContext):
    t0 = time.perf_counter()
    w = weight_from_phi(ctx.phi)
    w_star = rearrange_decreasing(w)
    lhs = a2_inf_result(w_star, ctx.cfg)
    rhs = a2_inf_result(w, ctx.cfg)
    o_l = o_r = math.nan
    lv, rv, lw, rw = lhs.value, rhs.value, lhs.witness, rhs.witness
    note = ""
    if ctx.oracle_mode and rv - lv < -ctx.violation_tol:
        res = 4 * ctx.cfg.grid_resolution
        Q = exp_weight()
        o_l = grid_oracle_w(phi_from_weight(w_star), UNIT, Q, ctx.cfg, res).value
        o_r = grid_oracle_w(phi_from_weight(w), UNIT, Q, ctx.cfg, res).value
        lv, rv = max(lv, o_l), max(rv, o_r)
        note = f"oracle-recheck@{res}"
    out = [ctx.record("a2-rearrangement", "exp", lv, rv, ctx.violation_tol, lw, rw, t0=t0,
                      oracle_lhs=o_l, oracle_rhs=o_r, note=note)]
    # w* = exp((log w)*): the characteristic of w* equals W of the rearranged logarithm
    t1 = time.perf_counter()
    bridge = big_w(rearrange_decreasing(ctx.phi), UNIT, exp_weight(), ctx.cfg).value
    out.append(ctx.record("a2-bridge-equality", "exp", abs(lhs.value - bridge), 0.0, 1e-9, t0=t1))
    return out


def check_classic_p1(ctx: SampleContext):
    t0 = time.perf_counter()
    star = rearrange_decreasing(ctx.phi)
    lres = bmo_classic_result(star, 1.0, ctx.cfg)
    rres = bmo_classic_result(ctx.phi, 1.0, ctx.cfg)
    lv, rv = lres.value, rres.value
    o_l = o_r = math.nan
    note = ""
    if ctx.oracle_mode and rv - lv < -ctx.violation_tol:
        res = 4 * ctx.cfg.grid_resolution
        obj = mean_deviation_objective(1.0)
        o_l = grid_oracle_sup(star, UNIT, obj, res).value
        o_r = grid_oracle_sup(ctx.phi, UNIT, obj, res).value
        lv, rv = max(lv, o_l), max(rv, o_r)
        note = f"oracle-recheck@{res}"
    return [ctx.record("classic-p1", "power:1", lv, rv, ctx.violation_tol, lres.witness, rres.witness,
                       t0=t0, oracle_lhs=o_l, oracle_rhs=o_r, note=note)]


def check_sandwich(ctx: SampleContext):
    out = []
    tol = ctx.violation_tol
    for p in BMO_EXPONENTS:
        t0 = time.perf_counter()
        inf_res = bmo_inf_result(ctx.phi, p, ctx.cfg)
        cls_res = bmo_classic_result(ctx.phi, p, ctx.cfg, seeds=(inf_res.witness,))
        lo, hi = inf_res.value ** (1.0 / p), cls_res.value ** (1.0 / p)
        d = f"power:{p:g}"
        out.append(ctx.record("bmo-sandwich-lower", d, lo, hi, tol, inf_res.witness,
                              cls_res.witness, t0=t0))
        out.append(ctx.record("bmo-sandwich-upper", d, hi, 2.0 * lo, tol, cls_res.witness,
                              inf_res.witness, t0=t0))
        if p == 2.0:
            out.append(ctx.record("bmo2-equality", d, abs(hi - lo), 0.0, 1e-8, t0=t0))
    t0 = time.perf_counter()
    w = weight_from_phi(ctx.phi)
    inf_res = a2_inf_result(w, ctx.cfg)
    cls_res = a2_classic_result(w, ctx.cfg)
    out.append(ctx.record("a2-sandwich-lower", "exp", math.sqrt(cls_res.value), inf_res.value, tol,
                          cls_res.witness, inf_res.witness, t0=t0))
    out.append(ctx.record("a2-sandwich-upper", "exp", inf_res.value, 2.0 * cls_res.value, tol,
                          inf_res.witness, cls_res.witness, t0=t0))
    out.append(ctx.record("a2-classic-floor", "exp", 1.0, cls_res.value, 1e-12, t0=t0))
    return out


# ---------------------------------------------------------------- Lipschitz maps


def check_lipschitz(ctx: SampleContext):
    rng = ctx.rng("lipschitz")
    if rng.random() < 0.5:
        f = LipschitzPL.random(rng, int(rng.integers(1, 6)), ctx.value_range,
                               slopes=(-1.0, 0.5, 1.0))
    else:
        f = LipschitzPL.random(rng, int(rng.integers(1, 6)), ctx.value_range)
    fphi = compose_lipschitz(f, ctx.phi)
    J = _random_subinterval(rng)
    out = []
    for Q in ctx.weights:
        out.append(_w_pair(ctx, "lipschitz-w", Q, fphi, ctx.phi))
        t0 = time.perf_counter()
        lv = minimize_c(fphi, J, Q, ctx.cfg).value
        rv = minimize_c(ctx.phi, J, Q, ctx.cfg).value
        out.append(ctx.record("lipschitz-v", Q.descriptor, lv, rv, ctx.violation_tol, J, J, t0=t0))
    return out


def check_truncation(ctx: SampleContext):
    rng = ctx.rng("truncation")
    A, B = np.sort(rng.uniform(*ctx.value_range, 2))
    tr = truncate(ctx.phi, float(A), float(B))
    out = [_w_pair(ctx, "truncation", Q, tr, ctx.phi) for Q in ctx.weights]
    t0 = time.perf_counter()
    lhs = rearrange_decreasing(tr)
    rhs = truncate(rearrange_decreasing(ctx.phi), float(A), float(B)).normalize()
    same = (lhs.values.shape == rhs.values.shape and np.array_equal(lhs.values, rhs.values)
            and np.allclose(lhs.lengths, rhs.lengths, rtol=0, atol=1e-12))
    out.append(ctx.record("truncation-commutes", "", 0.0, 0.0, 0.0, slack=0.0 if same else -1.0,
                          t0=t0))
    return out


# ---------------------------------------------------------------- Bellman machinery


def _budget_target(Q, level, theta):
    q0 = _q(Q, 0.0)
    return q0, q0 + theta * (_q(Q, level) - q0)


def _scaled_into_class(phi, J, Q, cfg, target, q0):
    s = scale_to_budget(lambda s: big_w(phi * s, J, Q, cfg).value, target, q0)
    return phi * s


def check_split(ctx: SampleContext):
    eps = ctx.epsilon

    def body(Q):
        t0 = time.perf_counter()
        rng = ctx.rng("split:" + Q.descriptor)
        m = int(rng.integers(1, 4))
        et = eps * (1.0 - 2.0 ** -m)
        params = BellmanParams.choose(Q, eps, et)
        J = _random_subinterval(rng) if rng.random() < 0.5 else UNIT
        q0, target = _budget_target(Q, et, 1.0)
        psi = _scaled_into_class(ctx.phi, J, Q, ctx.cfg, target, q0)
        sp = split_search(psi, J, params, Q, ctx.cfg)
        p0, p1, ptt = verify_split(psi, J, sp, Q)
        v = minimize_c(psi, J, Q, ctx.cfg).value
        q_eps = _q(Q, eps)
        d = Q.descriptor
        note = f"t={sp.t:.17g};delta={params.delta:.17g}"
        out = [
            ctx.record("split-certificate", d, max(p0, p1), q_eps, 1e-9, sp.J_minus, sp.J_plus,
                       t0=t0, note=note),
            ctx.record("split-range", d, abs(sp.t - 0.5), 0.5 - params.delta, 1e-15, t0=t0,
                       note=note),
            ctx.record("split-diagonal", d, abs(ptt - v), 0.0, 1e-10, t0=t0, note=note),
        ]
        # the certificate bounds V of every concatenation of the two pieces
        phm, php = restrict(psi, sp.J_minus), restrict(psi, sp.J_plus)
        worst = max(minimize_c(concatenate(phm, php, al), UNIT, Q, ctx.cfg).value
                    for al in np.linspace(0.0, 1.0, 11))
        out.append(ctx.record("split-conclusion", d, worst, q_eps, 1e-9, t0=t0, note=note))
        return out

    return _for_strict(ctx, "split", body)


def check_concavity(ctx: SampleContext):
    eps = ctx.epsilon

    def body(Q):
        t0 = time.perf_counter()
        rng = ctx.rng("concavity:" + Q.descriptor)
        pm = restrict(ctx.phi, _random_subinterval(rng))
        pp = restrict(random_step(rng, ctx.max_segments, ctx.value_range), _random_subinterval(rng))
        q0, target = _budget_target(Q, eps, float(rng.uniform(0.3, 1.0)))
        s = scale_to_budget(lambda s: concatenation_bound(pm * s, pp * s, Q, ctx.cfg), target, q0)
        tau = float(rng.uniform(-2.0 * eps, eps))
        pm, pp = pm * s + tau, pp * s + tau
        g_a, combo = concavity_terms(pm, pp, eps, Q, ALPHA_GRID, ctx.cfg)
        i = int(np.argmin(g_a - combo))
        return [ctx.record("concavity", Q.descriptor, combo[i], g_a[i], 1e-8, pm.domain, pp.domain,
                           t0=t0, note=f"alpha={ALPHA_GRID[i]:g}")]

    return _for_strict(ctx, "concavity", body)


def _nonneg_in_class(ctx, Q, rng, theta_range, level=None):
    phi = ctx.phi + (-float(ctx.phi.values.min()))
    level = ctx.epsilon if level is None else level
    q0, target = _budget_target(Q, level, float(rng.uniform(*theta_range)))
    return _scaled_into_class(phi, UNIT, Q, ctx.cfg, target, q0)


def check_dichotomy(ctx: SampleContext):
    eps = ctx.epsilon

    def body(Q):
        t0 = time.perf_counter()
        rng = ctx.rng("dichotomy:" + Q.descriptor)
        phi = _nonneg_in_class(ctx, Q, rng, (0.3, 0.99))
        w = big_w(phi, UNIT, Q, ctx.cfg).value
        if not w < _q(Q, eps):
            raise PreconditionError(f"W={w!r} not below Q(epsilon)")
        margin, c_star, v_eps = dichotomy_margin(phi, UNIT, eps, eps, Q, ctx.cfg)
        return [ctx.record("dichotomy", Q.descriptor, c_star, v_eps, 1e-9, slack=margin, t0=t0)]

    return _for_strict(ctx, "dichotomy", body)


def check_two_sided(ctx: SampleContext):
    eps = ctx.epsilon

    def body(Q):
        t0 = time.perf_counter()
        rng = ctx.rng("two-sided:" + Q.descriptor)
        q0, target = _budget_target(Q, eps, float(rng.uniform(0.3, 0.99)))
        phi = _scaled_into_class(ctx.phi, UNIT, Q, ctx.cfg, target, q0)
        A = float(phi.values.min() - rng.uniform(0.0, eps))
        B = float(phi.values.max() + rng.uniform(0.0, eps))
        d = Q.descriptor
        lo_m, c1, v1 = dichotomy_margin(phi, UNIT, A + eps, eps, Q, ctx.cfg, sign=1)
        hi_m, c2, v2 = dichotomy_margin(phi, UNIT, B - eps, eps, Q, ctx.cfg, sign=-1)
        note = f"A={A:.17g};B={B:.17g}"
        out = [ctx.record("two-sided-lower", d, c1, v1, 1e-9, slack=lo_m, t0=t0, note=note),
               ctx.record("two-sided-upper", d, c2, v2, 1e-9, slack=hi_m, t0=t0, note=note)]
        direct = corollary_parts(phi, UNIT, A, B, eps, Q, ctx.cfg)
        mirror = corollary_parts(phi * -1.0 + (A + B), UNIT, A, B, eps, Q, ctx.cfg)
        same = direct == mirror[::-1]
        out.append(ctx.record("two-sided-reflection", d, 0.0, 0.0, 0.0,
                              slack=0.0 if same else -1.0, t0=t0, note=note))
        return out

    return _for_strict(ctx, "two-sided", body)


def check_induction(ctx: SampleContext):
    eps = ctx.epsilon

    def body(Q):
        t0 = time.perf_counter()
        rng = ctx.rng("induction:" + Q.descriptor)
        # eps~ = eps/2 keeps delta away from 0, so delta**8 stays above the
        # smallest piece the recursion accepts
        params = BellmanParams.choose(Q, eps, 0.5 * eps)
        phi = _nonneg_in_class(ctx, Q, rng, (0.3, 0.9), level=params.epsilon_tilde)
        res = simulate_induction(phi, UNIT, eps, Q, ctx.cfg, depth=ctx.induction_depth,
                                 params=params)
        d = Q.descriptor
        s = np.array(res.sums)
        note = f"depth={res.depth_reached};early={int(res.stopped_early)};delta={res.params.delta:.17g}"
        rise = float(np.max(np.diff(s))) if s.size > 1 else 0.0
        return [
            ctx.record("induction-sums", d, float(np.max(np.abs(s))), 0.0, 1e-8, t0=t0, note=note),
            ctx.record("induction-chain", d, rise, 0.0, 1e-8, t0=t0, note=note),
            ctx.record("induction-sizes", d, 0.0, 0.0, 0.0,
                       slack=0.0 if res.size_bounds_ok else -1.0, t0=t0, note=note),
        ]

    return _for_strict(ctx, "induction", body)


def check_local_limit(ctx: SampleContext):
    eps = ctx.epsilon

    def body(Q):
        t0 = time.perf_counter()
        rng = ctx.rng("local_limit:" + Q.descriptor)
        phi = ctx.phi
        k = int(rng.integers(0, len(phi)))
        s = float(phi.breaks[k] + rng.uniform(0.25, 0.75) * phi.lengths[k])
        ok = local_limit_check(phi, s, Q, ctx.cfg)
        g = local_g(phi, s, eps, Q, ctx.cfg)
        lim = g_limit(float(phi(s)), eps, Q)
        note = f"s={s:.17g}"
        return [
            ctx.record("local-limit", Q.descriptor, 0.0, 0.0, 0.0, slack=0.0 if ok else -1.0,
                       t0=t0, note=note),
            ctx.record("local-limit-g", Q.descriptor, abs(g - lim), 0.0,
                       1e-12 * max(1.0, abs(lim)), t0=t0, note=note),
        ]

    return _for_strict(ctx, "local_limit", body)


# ---------------------------------------------------------------- regularisation and oracle


def check_regularization(ctx: SampleContext):
    phi = ctx.phi
    osc = float(phi.values.max() - phi.values.min())
    out = []
    for base_name in REG_BASES:
        t0 = time.perf_counter()
        base = parse_weight(base_name)
        w0 = big_w(phi, UNIT, base, ctx.cfg).value
        gaps = []
        for n in REG_INDICES:
            Qn = regularized(base, n)
            gap = abs(big_w(phi, UNIT, Qn, ctx.cfg).value - w0)
            gaps.append(gap)
            out.append(ctx.record("regularization-bound", Qn.descriptor, gap, osc * osc / n, 1e-9,
                                  t0=t0))
        for n1, n2, g1, g2 in zip(REG_INDICES, REG_INDICES[1:], gaps, gaps[1:]):
            out.append(ctx.record("regularization-monotone", f"reg:{base.descriptor}:{n2}",
                                  g2, g1, 1e-9, t0=t0, note=f"vs n={n1}"))
    return out


def check_oracle(ctx: SampleContext):
    """Optimizer against the grid oracle for one weight per sample (rotating)."""
    Q = ctx.weights[ctx.sample_id % len(ctx.weights)]
    t0 = time.perf_counter()
    w = big_w(ctx.phi, UNIT, Q, ctx.cfg)
    lo = grid_oracle_w(ctx.phi, UNIT, Q, ctx.cfg, resolution=512)
    hi = grid_oracle_w(ctx.phi, UNIT, Q, ctx.cfg, resolution=2048)
    return [
        ctx.record("oracle-lower", Q.descriptor, lo.value, w.value, 1e-3 * max(1.0, lo.value),
                   lo.witness, w.witness, t0=t0, oracle_lhs=lo.value),
        ctx.record("oracle-upper", Q.descriptor, w.value, hi.value, 1e-6, w.witness, hi.witness,
                   t0=t0, oracle_rhs=hi.value),
    ]


CHECKS = {
    "theorem1": check_theorem1,
    "bmo": check_bmo,
    "a2": check_a2,
    "classic-p1": check_classic_p1,
    "sandwich": check_sandwich,
    "lipschitz": check_lipschitz,
    "truncation": check_truncation,
    "split": check_split,
    "concavity": check_concavity,
    "dichotomy": check_dichotomy,
    "two-sided": check_two_sided,
    "induction": check_induction,
    "local_limit": check_local_limit,
    "regularization": check_regularization,
    "oracle": check_oracle,
}


def expand_checks(names) -> list:
    out = []
    for name in names:
        if name == "all":
            out.extend(CHECKS)
        elif name in CHECKS:
            out.append(name)
        else:
            raise ValueError(f"unknown check {name!r}; choose from {', '.join(CHECKS)} or all")
    return list(dict.fromkeys(out))
