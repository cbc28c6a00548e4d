"""Bellman-function tools: the penalty ``G``, the splitting search, the
local concavity and dichotomy checks, and a simulation of the splitting
induction.

Everything here assumes a strictly convex ``Q`` so that the optimal
constant ``C(phi, J)`` is unique.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import PreconditionError
from .functionals import (DEFAULT_CONFIG, OptimizerConfig, batch_v_c, big_w, golden_min,
                          minimize_c, q_eval, v_c)
from .steps import UNIT, Interval, StepFunction, range_on, restrict
from .transforms import concatenate
from .weights import ConvexWeight

BISECT_TOL = 1e-10
MIN_PIECE = 1e-9
MAX_DEPTH = 12


def _q(Q: ConvexWeight, t: float) -> float:
    return float(q_eval(Q, np.array(t)))


def _require_strict(Q: ConvexWeight):
    if not Q.strictly_convex:
        raise ValueError(f"{Q.descriptor} is not strictly convex; the optimal constant is not unique")


@dataclass(frozen=True)
class BellmanParams:
    """``epsilon``, ``epsilon_tilde`` and the splitting margin ``delta``.

    The bound ``delta < 1 - Q(epsilon_tilde)/Q(epsilon)`` depends on ``Q`` and
    is checked by :meth:`validate_for`.
    """

    epsilon: float
    epsilon_tilde: float
    delta: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.epsilon_tilde < self.epsilon:
            raise ValueError("epsilon_tilde must lie in (0, epsilon)")
        if not 0 < self.delta < 0.5:
            raise ValueError("delta must lie in (0, 1/2)")

    def delta_bound(self, Q: ConvexWeight) -> float:
        return min(0.5, 1.0 - _q(Q, self.epsilon_tilde) / _q(Q, self.epsilon))

    def validate_for(self, Q: ConvexWeight) -> "BellmanParams":
        if not _q(Q, self.epsilon) > _q(Q, self.epsilon_tilde):
            raise ValueError("Q(epsilon) must exceed Q(epsilon_tilde)")
        if not self.delta < self.delta_bound(Q):
            raise ValueError(f"delta={self.delta} violates delta < {self.delta_bound(Q)}")
        return self

    @classmethod
    def choose(cls, Q: ConvexWeight, epsilon: float, epsilon_tilde: float,
               fraction: float = 0.5) -> "BellmanParams":
        """Take ``delta`` as ``fraction`` of its admissible upper bound."""
        bound = min(0.5, 1.0 - _q(Q, epsilon_tilde) / _q(Q, epsilon))
        return cls(epsilon, epsilon_tilde, fraction * bound).validate_for(Q)


@dataclass(frozen=True)
class SplitResult:
    """Cut point ``t`` of ``J`` with its certificate.

    ``psi_left = Psi(t, 0)`` and ``psi_right = Psi(t, 1)``; ``Psi`` is linear
    in ``alpha`` so the two values bound every concatenation.
    """

    t: float
    c_used: float
    psi_left: float
    psi_right: float
    J_minus: Interval
    J_plus: Interval
    iterations: int = 0

    def certificate(self) -> float:
        return max(self.psi_left, self.psi_right)


# ---------------------------------------------------------------- G


def g_parts(phi: StepFunction, J: Interval, epsilon: float, Q: ConvexWeight,
            cfg: OptimizerConfig = DEFAULT_CONFIG):
    """``(G, C(phi, J), V_epsilon(phi, J))``."""
    _require_strict(Q)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    c_star = minimize_c(phi, J, Q, cfg).c_star
    v_eps = v_c(phi, J, epsilon, Q)
    q_eps = _q(Q, epsilon)
    if q_eps >= v_eps or c_star >= epsilon:
        return 0.0, c_star, v_eps
    return q_eps - v_eps, c_star, v_eps


def g_value(phi: StepFunction, J: Interval, epsilon: float, Q: ConvexWeight,
            cfg: OptimizerConfig = DEFAULT_CONFIG) -> float:
    """The penalty ``G``: ``Q(eps) - V_eps`` when ``C < eps`` and ``V_eps > Q(eps)``, else 0."""
    return g_parts(phi, J, epsilon, Q, cfg)[0]


def g_limit(value: float, epsilon: float, Q: ConvexWeight) -> float:
    """Limit of ``G`` over shrinking intervals around a point where ``phi = value``."""
    if value >= 0:
        return 0.0
    return _q(Q, epsilon) - _q(Q, value - epsilon)


# ---------------------------------------------------------------- splitting


def psi(phi: StepFunction, J: Interval, c: float, t: float, alpha: float,
        Q: ConvexWeight) -> float:
    """``V_c`` of the ``alpha``-concatenation of the two pieces of ``J`` cut at ``t``."""
    a, b = J.a, J.b
    m = (1.0 - t) * a + t * b
    phi_m = restrict(phi, Interval(a, m))
    phi_p = restrict(phi, Interval(m, b))
    return v_c(concatenate(phi_m, phi_p, alpha), UNIT, c, Q)


def epsilon_tilde(phi: StepFunction, J: Interval, epsilon: float, Q: ConvexWeight,
                  cfg: OptimizerConfig = DEFAULT_CONFIG, max_level: int = 40,
                  w_value: Optional[float] = None) -> Optional[float]:
    """Smallest ``eps * (1 - 2**-m)``, ``m >= 1``, with ``W(phi, J) <= Q(.)``, or None."""
    w = big_w(phi, J, Q, cfg).value if w_value is None else w_value
    for m in range(1, max_level + 1):
        et = epsilon * (1.0 - 2.0 ** -m)
        if et >= epsilon:
            break
        if w <= _q(Q, et):
            return et
    return None


def split_search(phi: StepFunction, J: Interval, params: BellmanParams, Q: ConvexWeight,
                 cfg: OptimizerConfig = DEFAULT_CONFIG, *,
                 check_precondition: bool = True) -> SplitResult:
    """Find ``t in [delta, 1 - delta]`` whose two pieces keep every concatenation
    within ``Q(epsilon)`` at the parent's optimal constant.

    Tries ``t = delta`` first, then bisects ``Psi(t, 1) = Q(epsilon)``.
    With ``check_precondition=False`` the caller vouches for
    ``W(phi, J) <= Q(epsilon_tilde)`` (e.g. a subinterval of a checked one).
    """
    _require_strict(Q)
    params.validate_for(Q)
    q_eps = _q(Q, params.epsilon)
    if check_precondition:
        w = big_w(phi, J, Q, cfg).value
        q_t = _q(Q, params.epsilon_tilde)
        if w > q_t:
            raise PreconditionError(
                f"splitting needs W(phi, J) <= Q(epsilon_tilde); got W={w!r}, Q(epsilon_tilde)={q_t!r}")
    r = restrict(phi, J)
    c = minimize_c(r, J, Q, cfg).c_star
    a, b = J.a, J.b
    delta = params.delta

    def cut(t):
        return (1.0 - t) * a + t * b

    def psi_pair(t):
        m = cut(t)
        return v_c(r, Interval(m, b), c, Q), v_c(r, Interval(a, m), c, Q)

    def result(t, its):
        p0, p1 = psi_pair(t)
        m = cut(t)
        return SplitResult(t, c, p0, p1, Interval(a, m), Interval(m, b), its)

    p0, p1 = psi_pair(delta)
    if p1 <= q_eps and p0 <= q_eps:
        return result(delta, 0)

    lo, hi = delta, 1.0 - delta
    f_lo, f_hi = p1 - q_eps, psi_pair(hi)[1] - q_eps
    its = 0
    if f_hi > 0:
        # cannot happen when the precondition holds; report the better end
        return result(hi, its)
    while hi - lo >= BISECT_TOL:
        mid = 0.5 * (lo + hi)
        f_mid = psi_pair(mid)[1] - q_eps
        its += 1
        if abs(f_mid) < BISECT_TOL:
            lo = hi = mid
            f_lo = f_hi = f_mid
            break
        if f_mid > 0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    t = lo if f_lo <= f_hi else hi
    return result(t, its)


def verify_split(phi: StepFunction, J: Interval, split: SplitResult, Q: ConvexWeight):
    """Recompute ``Psi(t, 0)``, ``Psi(t, 1)`` and ``Psi(t, t)`` through actual concatenations."""
    t, c = split.t, split.c_used
    return (psi(phi, J, c, t, 0.0, Q), psi(phi, J, c, t, 1.0, Q), psi(phi, J, c, t, t, Q))


# ---------------------------------------------------------------- local concavity


def _domain_averages(phi: StepFunction):
    return phi.lengths / phi.domain.length(), phi.values


def concatenation_bound(phi_minus: StepFunction, phi_plus: StepFunction, Q: ConvexWeight,
                        cfg: OptimizerConfig = DEFAULT_CONFIG) -> float:
    """``sup_alpha V(phi_alpha, I)``, computed as ``min_c max(V_c(phi_-), V_c(phi_+))``.

    ``V_c(phi_alpha)`` is linear in ``alpha`` and convex in ``c``, so the
    minimax theorem turns the supremum over ``alpha`` into this convex problem.
    """
    wm, vm = _domain_averages(phi_minus)
    wp, vp = _domain_averages(phi_plus)
    lo = min(vm.min(), vp.min())
    hi = max(vm.max(), vp.max())

    def f(c):
        cm = np.asarray(c)
        return np.maximum(batch_v_c(np.broadcast_to(wm, (cm.size, wm.size)), vm, cm, Q),
                          batch_v_c(np.broadcast_to(wp, (cm.size, wp.size)), vp, cm, Q))

    c, _ = golden_min(f, lo, hi, cfg.c_tol)
    return float(f(c)[0])


def concavity_terms(phi_minus: StepFunction, phi_plus: StepFunction, epsilon: float,
                    Q: ConvexWeight, alphas: Sequence[float],
                    cfg: OptimizerConfig = DEFAULT_CONFIG, grid_points: int = 21):
    """``(G(phi_alpha), alpha G(phi_-) + (1 - alpha) G(phi_+))`` for each alpha.

    Raises :class:`PreconditionError` unless every concatenation satisfies
    ``V(phi_alpha, I) <= Q(epsilon)``: the exact minimax bound is checked,
    and ``V`` itself on an ``alpha`` grid as a second line of defence.
    """
    _require_strict(Q)
    q_eps = _q(Q, epsilon)
    slack = 1e-12 * max(1.0, q_eps)
    bound = concatenation_bound(phi_minus, phi_plus, Q, cfg)
    if bound > q_eps + slack:
        raise PreconditionError(f"sup_alpha V(phi_alpha) = {bound!r} exceeds Q(epsilon) = {q_eps!r}")
    for al in np.linspace(0.0, 1.0, grid_points):
        v = minimize_c(concatenate(phi_minus, phi_plus, al), UNIT, Q, cfg).value
        if v > q_eps + slack:
            raise PreconditionError(f"V(phi_alpha) = {v!r} exceeds Q(epsilon) at alpha = {al}")
    g_m = g_value(phi_minus, phi_minus.domain, epsilon, Q, cfg)
    g_p = g_value(phi_plus, phi_plus.domain, epsilon, Q, cfg)
    alphas = np.asarray(alphas, dtype=np.float64)
    g_a = np.array([g_value(concatenate(phi_minus, phi_plus, al), UNIT, epsilon, Q, cfg)
                    for al in alphas])
    return g_a, alphas * g_m + (1.0 - alphas) * g_p


def concavity_margins(phi_minus: StepFunction, phi_plus: StepFunction, epsilon: float,
                      Q: ConvexWeight, alphas: Sequence[float],
                      cfg: OptimizerConfig = DEFAULT_CONFIG) -> np.ndarray:
    """``G(phi_alpha) - alpha G(phi_-) - (1 - alpha) G(phi_+)`` for each alpha."""
    g_a, combo = concavity_terms(phi_minus, phi_plus, epsilon, Q, alphas, cfg)
    return g_a - combo


def concavity_check(phi_minus: StepFunction, phi_plus: StepFunction, epsilon: float,
                    Q: ConvexWeight, alphas: Sequence[float],
                    cfg: OptimizerConfig = DEFAULT_CONFIG, tol: float = 1e-8) -> bool:
    return bool(np.all(concavity_margins(phi_minus, phi_plus, epsilon, Q, alphas, cfg) >= -tol))


# ---------------------------------------------------------------- dichotomies


def _check_budget(phi, J, epsilon, Q, cfg):
    w = big_w(phi, J, Q, cfg).value
    q_eps = _q(Q, epsilon)
    if not w < q_eps:
        raise PreconditionError(f"needs W(phi, J) < Q(epsilon); got W={w!r}, Q(epsilon)={q_eps!r}")
    return w


def _value_tol(Q, epsilon, tol):
    return tol * max(1.0, _q(Q, epsilon))


def dichotomy_margin(phi: StepFunction, J: Interval, level: float, epsilon: float,
                     Q: ConvexWeight, cfg: OptimizerConfig = DEFAULT_CONFIG, sign: int = 1):
    """How far ``phi`` is from violating ``C >= level`` or ``V_level <= Q(eps)``.

    With ``sign=-1`` the first branch reads ``C <= level``.  Returns
    ``(margin, C, V_level)`` where ``margin = max(sign (C - level),
    (Q(eps) - V_level) / max(1, Q(eps)))``; the dichotomy holds iff
    ``margin >= 0``.
    """
    c_star = minimize_c(phi, J, Q, cfg).c_star
    v_lvl = v_c(phi, J, level, Q)
    q_eps = _q(Q, epsilon)
    margin = max(sign * (c_star - level), (q_eps - v_lvl) / max(1.0, q_eps))
    return margin, c_star, v_lvl


def dichotomy_check(phi: StepFunction, J: Interval, epsilon: float, Q: ConvexWeight,
                    cfg: OptimizerConfig = DEFAULT_CONFIG, tol: float = 1e-9, *,
                    check_precondition: bool = True) -> bool:
    """For non-negative ``phi`` with ``W(phi, J) < Q(eps)``: ``C >= eps`` or ``V_eps <= Q(eps)``."""
    _require_strict(Q)
    if check_precondition:
        if range_on(phi, J)[0] < 0:
            raise PreconditionError("dichotomy needs phi >= 0 on J")
        _check_budget(phi, J, epsilon, Q, cfg)
    c_star = minimize_c(phi, J, Q, cfg).c_star
    if c_star >= epsilon - tol:
        return True
    return v_c(phi, J, epsilon, Q) <= _q(Q, epsilon) + _value_tol(Q, epsilon, tol)


def corollary_parts(phi: StepFunction, J: Interval, A: float, B: float, epsilon: float,
                    Q: ConvexWeight, cfg: OptimizerConfig = DEFAULT_CONFIG,
                    tol: float = 1e-9, *, check_precondition: bool = True) -> tuple[bool, bool]:
    """The lower (``A + eps``) and upper (``B - eps``) dichotomies separately."""
    _require_strict(Q)
    if A > B:
        raise ValueError("needs A <= B")
    if check_precondition:
        lo, hi = range_on(phi, J)
        if lo < A or hi > B:
            raise PreconditionError(f"phi ranges over [{lo}, {hi}], outside [{A}, {B}]")
        _check_budget(phi, J, epsilon, Q, cfg)
    c_star = minimize_c(phi, J, Q, cfg).c_star
    q_eps = _q(Q, epsilon)
    vt = _value_tol(Q, epsilon, tol)
    lower = c_star >= A + epsilon - tol or v_c(phi, J, A + epsilon, Q) <= q_eps + vt
    upper = c_star <= B - epsilon + tol or v_c(phi, J, B - epsilon, Q) <= q_eps + vt
    return bool(lower), bool(upper)


def corollary_check(phi: StepFunction, J: Interval, A: float, B: float, epsilon: float,
                    Q: ConvexWeight, cfg: OptimizerConfig = DEFAULT_CONFIG,
                    tol: float = 1e-9, *, check_precondition: bool = True) -> bool:
    return all(corollary_parts(phi, J, A, B, epsilon, Q, cfg, tol,
                               check_precondition=check_precondition))


# ---------------------------------------------------------------- local limits


def local_limit_check(phi: StepFunction, s: float, Q: ConvexWeight,
                      cfg: OptimizerConfig = DEFAULT_CONFIG, n_max: int = 50,
                      constants: Sequence[float] = (-1.0, 0.0, 0.5, 2.0)) -> bool:
    """Shrink ``J_n = [s - 2**-n, s + 2**-n]`` and compare ``V_c`` and ``C`` with
    their pointwise limits once ``J_n`` sits inside the segment of ``s``."""
    _require_strict(Q)
    dom = phi.domain
    if not dom.a < s < dom.b:
        raise ValueError("s must be interior to the domain")
    br = phi.breaks
    if np.any(np.isclose(br, s, rtol=0.0, atol=1e-15)):
        raise ValueError(f"s = {s} is a breakpoint of phi")
    k = int(np.searchsorted(br, s, side="right")) - 1
    left, right = br[k], br[k + 1]
    value = float(phi.values[k])
    ok = True
    for n in range(1, n_max + 1):
        h = 2.0 ** -n
        lo, hi = max(dom.a, s - h), min(dom.b, s + h)
        if lo < left or hi > right:
            continue
        Jn = Interval(lo, hi)
        for c in constants:
            target = _q(Q, -c)
            ok &= abs(v_c(phi, Jn, value + c, Q) - target) <= 1e-12 * max(1.0, target)
        ok &= abs(minimize_c(phi, Jn, Q, cfg).c_star - value) <= max(cfg.c_tol, 1e-12 * abs(value))
    return bool(ok)


def local_g(phi: StepFunction, s: float, epsilon: float, Q: ConvexWeight,
            cfg: OptimizerConfig = DEFAULT_CONFIG, n: int = 40) -> float:
    """``G`` of ``phi`` restricted to ``[s - 2**-n, s + 2**-n]`` (clipped to the domain)."""
    dom = phi.domain
    h = 2.0 ** -n
    Jn = Interval(max(dom.a, s - h), min(dom.b, s + h))
    return g_value(restrict(phi, Jn), Jn, epsilon, Q, cfg)


# ---------------------------------------------------------------- induction


TRACE_COLUMNS = ("depth", "node_index", "a", "b", "t", "g_value", "psi_left", "psi_right")


@dataclass
class InductionResult:
    params: BellmanParams
    depth_reached: int
    sums: list = field(default_factory=list)          # S_0 = |J| G(phi), S_1, ...
    trace: list = field(default_factory=list)         # rows matching TRACE_COLUMNS
    size_bounds_ok: bool = True
    stopped_early: bool = False

    def chain_ok(self, tol: float = 1e-8) -> bool:
        s = self.sums
        return all(s[i] >= s[i + 1] - tol for i in range(len(s) - 1))

    def sums_vanish(self, tol: float = 1e-8) -> bool:
        return all(abs(x) <= tol for x in self.sums)

    def write_trace(self, stream) -> None:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for row in self.trace:
            w.writerow(["" if (isinstance(x, float) and math.isnan(x)) else
                        (f"{x:.17g}" if isinstance(x, float) else x) for x in row])


def simulate_induction(phi: StepFunction, J: Interval, epsilon: float, Q: ConvexWeight,
                       cfg: OptimizerConfig = DEFAULT_CONFIG, depth: int = 8,
                       params: Optional[BellmanParams] = None) -> InductionResult:
    """Split ``J`` recursively ``depth`` times and record ``S_N = sum |J_k| G(phi|J_k)``.

    The budget ``W(phi, J) <= Q(epsilon_tilde)`` is checked once at the root;
    it passes to every subinterval because ``W`` is monotone in the interval.
    Relative piece sizes are checked against ``[delta**N, (1 - delta)**N]``.
    """
    _require_strict(Q)
    if not 1 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must lie in [1, {MAX_DEPTH}]")
    w = big_w(phi, J, Q, cfg).value
    if params is None:
        et = epsilon_tilde(phi, J, epsilon, Q, cfg, w_value=w)
        if et is None:
            raise PreconditionError(f"no epsilon_tilde below epsilon with W={w!r} <= Q(epsilon_tilde)")
        params = BellmanParams.choose(Q, epsilon, et)
    else:
        params.validate_for(Q)
        if w > _q(Q, params.epsilon_tilde):
            raise PreconditionError(f"W(phi, J) = {w!r} exceeds Q(epsilon_tilde)")
    delta = params.delta
    out = InductionResult(params, 0)
    level = [J]
    total = J.length()
    for d in range(depth + 1):
        s_d = 0.0
        nxt = []
        lo_b, hi_b = delta ** d, (1.0 - delta) ** d
        for idx, K in enumerate(level):
            g = g_value(phi, K, epsilon, Q, cfg)
            s_d += K.length() * g
            frac = K.length() / total
            if not (lo_b * (1 - 1e-9) <= frac <= hi_b * (1 + 1e-9)):
                out.size_bounds_ok = False
            t = p0 = p1 = math.nan
            if d < depth:
                sp = split_search(phi, K, params, Q, cfg, check_precondition=False)
                t, p0, p1 = sp.t, sp.psi_left, sp.psi_right
                nxt.extend((sp.J_minus, sp.J_plus))
            out.trace.append((d, idx, K.a, K.b, t, g, p0, p1))
        out.sums.append(s_d)
        out.depth_reached = d
        if d < depth and min(K.length() for K in nxt) < MIN_PIECE:
            out.stopped_early = True
            break
        level = nxt
    return out


# ---------------------------------------------------------------- sample preparation


def scale_to_budget(measure, target: float, q0: float, *, low_frac: float = 0.9,
                    iters: int = 40) -> float:
    """Largest-ish factor ``s`` in ``[0, 1]`` with ``measure(s) <= target``.

    ``measure`` must be non-decreasing in ``s`` with ``measure(0) = q0 < target``
    (``W`` or the concatenation bound of ``s * phi``, which only grow with
    the spread of the values).  Bisection stops once the measure lands in
    ``[q0 + low_frac (target - q0), target]``.
    """
    if not q0 < target:
        raise ValueError("target must exceed the value at zero scale")
    if measure(1.0) <= target:
        return 1.0
    floor = q0 + low_frac * (target - q0)
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        m = measure(mid)
        if m <= target:
            lo = mid
            if m >= floor:
                break
        else:
            hi = mid
    return lo
