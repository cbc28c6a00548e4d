"""The averaging functionals ``V_c``, ``V`` and ``W`` on step functions.

``V_c(phi, J) = <Q(phi - c)>_J``, ``V = inf_c V_c`` and ``W(phi, J)`` is the
supremum of ``V(phi, L)`` over subintervals ``L`` of ``J``.

Computing ``W`` for a step function reduces to finitely many convex
problems.  Fix the segments ``i <= j`` that contain the endpoints of ``L``
(a *cell*).  Inside a cell the segment masses of ``L`` are affine in the
endpoints, so for fixed ``c`` the average ``V_c(phi, L)`` is a
linear-fractional function of ``(a, b)`` and attains its maximum over the
cell at a corner, i.e. at an interval whose endpoints are breakpoints.  The
map is convex in ``c``, so the minimax theorem gives

    sup_{L in cell} V(phi, L) = min_c max_{corners L} V_c(phi, L),

a one-dimensional convex minimisation.  :func:`big_w` solves it for every
cell, then rebuilds a maximising interval as a mixture of two active
corners and reports ``V`` on that interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import EvaluationError
from .steps import Interval, StepFunction, masses_on, restrict
from .weights import MEAN, MEDIAN, ConvexWeight

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

BREAKPOINT_ENUM = "BreakpointEnum"
REFINED_LOCAL = "RefinedLocal"
GRID_ORACLE = "GridOracle"


@dataclass(frozen=True)
class OptimizerConfig:
    c_tol: float = 1e-11
    w_rel_tol: float = 1e-9
    grid_resolution: int = 512
    multistart_top: int = 8
    refine_iters: int = 60

    def __post_init__(self):
        for name in ("c_tol", "w_rel_tol", "grid_resolution", "multistart_top", "refine_iters"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def with_grid(self, resolution: int) -> "OptimizerConfig":
        return OptimizerConfig(self.c_tol, self.w_rel_tol, int(resolution),
                               self.multistart_top, self.refine_iters)


DEFAULT_CONFIG = OptimizerConfig()


@dataclass(frozen=True)
class FunctionalResult:
    value: float
    c_star: float
    c_star_unique: bool
    iterations: int


@dataclass(frozen=True)
class SupremumResult:
    """Lower estimate ``value`` of a supremum, attained at ``witness``.

    ``upper`` is a certified upper bound when the method provides one
    (cell minimax), otherwise ``nan``.
    """

    value: float
    witness: Interval
    method: str
    upper: float = math.nan


# ---------------------------------------------------------------- helpers


def q_eval(Q: ConvexWeight, t: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        out = Q(t)
    if not np.all(np.isfinite(out)):
        bad = np.broadcast_to(t, out.shape)[~np.isfinite(out)]
        raise EvaluationError(f"{Q.descriptor} overflows at argument {float(bad.flat[0])!r}",
                              value=float(bad.flat[0]))
    return out


def golden_min(f: Callable[[np.ndarray], np.ndarray], lo, hi, tol: float):
    """Vectorised golden-section search for convex ``f`` on ``[lo, hi]``.

    ``f`` maps an array of abscissae (one per problem) to values.  Returns the
    bracket midpoints and the iteration count.
    """
    lo = np.array(lo, dtype=np.float64, ndmin=1)
    hi = np.array(hi, dtype=np.float64, ndmin=1)
    width = float(np.max(hi - lo)) if lo.size else 0.0
    if width <= tol:
        return 0.5 * (lo + hi), 0
    n = int(math.ceil(math.log(tol / width) / math.log(INV_PHI)))
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(n):
        left = fc < fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        x = np.where(left, hi - INV_PHI * (hi - lo), lo + INV_PHI * (hi - lo))
        fx = f(x)
        d, fd, c, fc = (np.where(left, c, x), np.where(left, fc, fx),
                        np.where(left, x, d), np.where(left, fx, fd))
    return 0.5 * (lo + hi), n


def _row_brackets(Wn: np.ndarray, v: np.ndarray):
    pos = Wn > 0
    lo = np.where(pos, v, np.inf).min(axis=-1)
    hi = np.where(pos, v, -np.inf).max(axis=-1)
    return lo, hi


def _weighted_median(Wn: np.ndarray, v: np.ndarray, rel: float = 1e-12) -> np.ndarray:
    """Midpoint of the weighted median set, row by row."""
    order = np.argsort(v, kind="stable")
    vs = v[order]
    w = Wn[:, order]
    cum = np.cumsum(w, axis=1)
    total = cum[:, -1:]
    half = 0.5 * total
    lo_idx = np.argmax(cum >= half * (1.0 - rel), axis=1)
    cond = (w > 0) & (cum - w <= half * (1.0 + rel))
    hi_idx = w.shape[1] - 1 - np.argmax(cond[:, ::-1], axis=1)
    return 0.5 * (vs[lo_idx] + vs[hi_idx])


def batch_v_c(Wn: np.ndarray, v: np.ndarray, c: np.ndarray, Q: ConvexWeight) -> np.ndarray:
    """``V_c`` for each row of normalised masses ``Wn`` at its own constant ``c``."""
    return np.einsum("nk,nk->n", Wn, q_eval(Q, v[None, :] - np.asarray(c)[:, None]))


def batch_minimize(Wn: np.ndarray, v: np.ndarray, Q: ConvexWeight, c_tol: float):
    """Minimise ``c -> V_c`` for every row of normalised masses ``Wn``.

    Mean and median fast paths where ``Q`` has one, otherwise golden-section
    search on the range of values the row actually charges.
    Returns ``(values, c, iterations)``.
    """
    Wn = np.atleast_2d(Wn)
    fp = Q.fast_path
    if fp == MEAN:
        c = Wn @ v
        return batch_v_c(Wn, v, c, Q), c, 0
    if fp == MEDIAN:
        c = _weighted_median(Wn, v)
        return batch_v_c(Wn, v, c, Q), c, 0
    lo, hi = _row_brackets(Wn, v)
    if Q.kind == "custom":
        c, its = golden_min(lambda cc: batch_v_c(Wn, v, cc, Q), lo, hi, c_tol)
    else:
        c, its = _slope_bisect(Wn, v, Q, lo, hi, c_tol)
    return batch_v_c(Wn, v, c, Q), c, its


def _slope_bisect(Wn, v, Q, lo, hi, tol):
    """Bisection on the sign of the right derivative of ``c -> V_c``.

    The right derivative is non-decreasing and changes sign at the
    minimiser, so this locates ``c`` to ``tol`` even where ``V_c`` is too flat
    for value comparisons to resolve it.
    """
    width = float(np.max(hi - lo)) if lo.size else 0.0
    if width <= tol:
        return 0.5 * (lo + hi), 0
    n = int(math.ceil(math.log2(width / tol)))
    for _ in range(n):
        mid = 0.5 * (lo + hi)
        up = _slope(Wn, v, mid, Q, +1) >= 0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    c = 0.5 * (lo + hi)
    # a minimiser at a kink of Q(v - c) is a value of phi; snap to it when the
    # one-sided slopes there certify optimality
    inside = (v[None, :] >= lo[:, None]) & (v[None, :] <= hi[:, None])
    has = inside.any(axis=1)
    if has.any():
        cand = np.where(has, v[np.argmax(inside, axis=1)], c)
        ok = has & (_slope(Wn, v, cand, Q, +1) >= 0) & (_slope(Wn, v, cand, Q, -1) <= 0)
        c = np.where(ok, cand, c)
    return c, n


def _slope(Wn, v, c, Q, side):
    """One-sided derivative of ``c -> V_c`` (``side=+1`` from the right)."""
    return -np.einsum("nk,nk->n", Wn, Q.derivative(v[None, :] - c[:, None], -side))


def _normalized(masses: np.ndarray) -> np.ndarray:
    return masses / masses.sum(axis=-1, keepdims=True)


# ---------------------------------------------------------------- V_c and V


def v_c(phi: StepFunction, J: Interval, c: float, Q: ConvexWeight) -> float:
    """``<Q(phi - c)>_J`` as an exact segment sum."""
    if not math.isfinite(c):
        raise ValueError("c must be finite")
    r = restrict(phi, J)
    return float(np.dot(r.lengths, q_eval(Q, r.values - c)) / J.length())


def minimize_c(phi: StepFunction, J: Interval, Q: ConvexWeight,
               cfg: OptimizerConfig = DEFAULT_CONFIG) -> FunctionalResult:
    """``V(phi, J)`` together with the minimising constant.

    For ``Q = |t|`` the minimisers form the weighted median set and the
    midpoint of that set is returned with ``c_star_unique=False``.
    """
    r = restrict(phi, J)
    Wn = (r.lengths / r.lengths.sum())[None, :]
    vals, cs, its = batch_minimize(Wn, r.values, Q, cfg.c_tol)
    return FunctionalResult(float(vals[0]), float(cs[0]), Q.strictly_convex, int(its))


def optimal_constant(phi: StepFunction, J: Interval, Q: ConvexWeight,
                     cfg: OptimizerConfig = DEFAULT_CONFIG) -> float:
    return minimize_c(phi, J, Q, cfg).c_star


def big_v(phi: StepFunction, J: Interval, Q: ConvexWeight,
          cfg: OptimizerConfig = DEFAULT_CONFIG) -> float:
    return minimize_c(phi, J, Q, cfg).value


# ---------------------------------------------------------------- candidates


def _pair_candidates(x: np.ndarray):
    i, j = np.triu_indices(x.size, k=1)
    return x[i], x[j]


def _straddle_candidates(x: np.ndarray):
    if x.size < 3:
        return np.empty(0), np.empty(0)
    mid = x[1:-1]
    gap = np.minimum(mid - x[:-2], x[2:] - mid)
    a = np.concatenate([mid - 0.5 * gap, mid - gap, x[:-2]])
    b = np.concatenate([mid + 0.5 * gap, mid + gap, x[2:]])
    return a, b


def _best_index(values: np.ndarray, a: np.ndarray, b: np.ndarray) -> int:
    """Argmax with ties broken lexicographically on ``(a, b)``."""
    top = values.max()
    idx = np.flatnonzero(values == top)
    if idx.size == 1:
        return int(idx[0])
    order = np.lexsort((b[idx], a[idx]))
    return int(idx[order[0]])


def _ensure_interval(a: float, b: float, J: Interval) -> Interval:
    a = min(max(a, J.a), J.b)
    b = min(max(b, J.a), J.b)
    return Interval(a, b)


# ---------------------------------------------------------------- W


def _cell_corners(x: np.ndarray):
    """Corner intervals for every cell ``i < j``; shape ``(ncell, 4)`` for ``a`` and ``b``."""
    k = x.size - 1
    ii, jj = np.triu_indices(k, k=1)
    a = np.stack([x[ii], x[ii + 1], x[ii], x[ii + 1]], axis=1)
    b = np.stack([x[jj + 1], x[jj + 1], x[jj], x[jj]], axis=1)
    degenerate = (jj == ii + 1)
    a[degenerate, 3] = a[degenerate, 0]
    b[degenerate, 3] = b[degenerate, 0]
    return ii, jj, a, b


def _cell_minimax(r: StepFunction, Q: ConvexWeight, c_tol: float):
    x, v = r.breaks, r.values
    ii, jj, ca, cb = _cell_corners(x)
    Wc = _normalized(masses_on(r, ca, cb))                  # (ncell, 4, k)
    seg = np.arange(v.size)
    in_cell = (seg[None, :] >= ii[:, None]) & (seg[None, :] <= jj[:, None])
    lo = np.where(in_cell, v, np.inf).min(axis=1)
    hi = np.where(in_cell, v, -np.inf).max(axis=1)

    def F(c):
        qv = q_eval(Q, v[None, :] - c[:, None])
        return np.einsum("rqk,rk->rq", Wc, qv).max(axis=1)

    c_star, _ = golden_min(F, lo, hi, c_tol)
    return ii, jj, ca, cb, Wc, c_star, F(c_star)


def _witness_candidates(x, v, Q, ca, cb, Wc, c, upper):
    """Mixtures of active corners whose optimal constant is ``c``."""
    scale = max(1.0, abs(c))
    near = np.abs(v - c) <= 1e-9 * scale
    if np.any(near):
        c = float(v[np.flatnonzero(near)[0]])
    cc = np.array([c])
    fvals = np.einsum("qk,k->q", Wc, q_eval(Q, v - c))
    act = np.flatnonzero(fvals >= upper - 1e-6 * max(1.0, upper))
    right = np.array([_slope(Wc[q][None], v, cc, Q, +1)[0] for q in range(4)])
    left = np.array([_slope(Wc[q][None], v, cc, Q, -1)[0] for q in range(4)])
    slack = 1e-9 * (1.0 + np.abs(right).max() + np.abs(left).max())
    out_a, out_b = [], []
    for q1 in act:
        for q2 in act:
            if q2 < q1:
                continue
            # mixture weight mu on q2: (1-mu)*f_q1 + mu*f_q2 has 0 in its subdifferential
            lo_mu, hi_mu = 0.0, 1.0
            for s1, s2, sign in ((right[q1], right[q2], 1.0), (left[q1], left[q2], -1.0)):
                # need sign * ((1-mu) s1 + mu s2) >= -slack
                g0, g1 = sign * s1, sign * (s2 - s1)
                if abs(g1) < 1e-300:
                    if g0 < -slack:
                        lo_mu, hi_mu = 1.0, 0.0
                elif g1 > 0:
                    lo_mu = max(lo_mu, (-slack - g0) / g1)
                else:
                    hi_mu = min(hi_mu, (-slack - g0) / g1)
            if lo_mu > hi_mu:
                continue
            mu = 0.5 * (lo_mu + hi_mu)
            d1 = cb[q1] - ca[q1]
            d2 = cb[q2] - ca[q2]
            s = mu * d1 / (mu * d1 + (1.0 - mu) * d2)
            out_a.append((1.0 - s) * ca[q1] + s * ca[q2])
            out_b.append((1.0 - s) * cb[q1] + s * cb[q2])
    return out_a, out_b, act


def _zoom_pair(r, Q, c_tol, a1, b1, a2, b2, points=33, rounds=8):
    """Maximise ``V`` along the segment joining two corner intervals.

    ``V`` is concave in the mixture weight, so shrinking a uniform grid
    around its best point converges to the maximiser.
    """
    lo, hi = 0.0, 1.0
    best_s, best_val = 0.0, -np.inf
    for _ in range(rounds):
        s = np.linspace(lo, hi, points)
        a = (1.0 - s) * a1 + s * a2
        b = (1.0 - s) * b1 + s * b2
        vals, _, _ = batch_minimize(_normalized(masses_on(r, a, b)), r.values, Q, c_tol)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_s = float(vals[i]), float(s[i])
        step = (hi - lo) / (points - 1)
        lo, hi = max(0.0, s[i] - step), min(1.0, s[i] + step)
    return (1.0 - best_s) * a1 + best_s * a2, (1.0 - best_s) * b1 + best_s * b2


def big_w(phi: StepFunction, J: Interval, Q: ConvexWeight,
          cfg: OptimizerConfig = DEFAULT_CONFIG) -> SupremumResult:
    """Supremum of ``V(phi, L)`` over subintervals ``L`` of ``J``.

    The candidate set holds every pair of breakpoints of ``phi`` inside
    ``J`` and balanced straddles of each interior jump.  Each cell is then
    solved exactly by its minimax problem; the cells whose bound beats the
    best candidate (at most ``cfg.multistart_top`` of them) get a witness
    interval built from their active corners.
    """
    r = restrict(phi, J)
    x, v = r.breaks, r.values
    q0 = float(q_eval(Q, np.zeros(1))[0])
    if v.size == 1:
        return SupremumResult(q0, J, BREAKPOINT_ENUM, q0)

    pa, pb = _pair_candidates(x)
    sa, sb = _straddle_candidates(x)
    cand_a = np.concatenate([pa, sa])
    cand_b = np.concatenate([pb, sb])
    is_pair = np.zeros(cand_a.size, dtype=bool)
    is_pair[:pa.size] = True
    vals, _, _ = batch_minimize(_normalized(masses_on(r, cand_a, cand_b)), v, Q, cfg.c_tol)

    ii, jj, ca, cb, Wc, c_star, upper = _cell_minimax(r, Q, cfg.c_tol)
    best = float(vals.max())
    tol = cfg.w_rel_tol * max(1.0, best)
    extra_a, extra_b = [], []
    order = np.argsort(-upper, kind="stable")
    for cell in order[:cfg.multistart_top]:
        if upper[cell] <= best + tol:
            break
        wa, wb, act = _witness_candidates(x, v, Q, ca[cell], cb[cell], Wc[cell],
                                          float(c_star[cell]), float(upper[cell]))
        if wa:
            wv, _, _ = batch_minimize(_normalized(masses_on(r, np.array(wa), np.array(wb))),
                                      v, Q, cfg.c_tol)
            got = float(wv.max())
        else:
            got = -np.inf
        if got < upper[cell] - cfg.w_rel_tol * max(1.0, upper[cell]):
            # fall back to a direct search along each pair of active corners
            for q1 in act:
                for q2 in act:
                    if q2 > q1:
                        za, zb = _zoom_pair(r, Q, cfg.c_tol, ca[cell, q1], cb[cell, q1],
                                            ca[cell, q2], cb[cell, q2])
                        wa.append(za)
                        wb.append(zb)
        extra_a.extend(wa)
        extra_b.extend(wb)
        best = max(best, got)

    if extra_a:
        ea, eb = np.array(extra_a), np.array(extra_b)
        ev, _, _ = batch_minimize(_normalized(masses_on(r, ea, eb)), v, Q, cfg.c_tol)
        cand_a = np.concatenate([cand_a, ea])
        cand_b = np.concatenate([cand_b, eb])
        vals = np.concatenate([vals, ev])
        is_pair = np.concatenate([is_pair, np.zeros(ea.size, dtype=bool)])

    i = _best_index(vals, cand_a, cand_b)
    value = float(vals[i])
    cert = max(q0, float(upper.max()))
    method = BREAKPOINT_ENUM if is_pair[i] else REFINED_LOCAL
    return SupremumResult(value, _ensure_interval(cand_a[i], cand_b[i], J), method,
                          max(cert, value))


# ---------------------------------------------------------------- grid oracle


def grid_oracle_w(phi: StepFunction, J: Interval, Q: ConvexWeight,
                  cfg: OptimizerConfig = DEFAULT_CONFIG,
                  resolution: Optional[int] = None) -> SupremumResult:
    """Brute-force ``W`` over all intervals with endpoints on a uniform grid."""
    def objective(Wn, v, floor):
        # V_c at the mean bounds V from above; rows that cannot beat the floor are skipped
        out = np.full(Wn.shape[0], -np.inf)
        keep = batch_v_c(Wn, v, Wn @ v, Q) > floor
        if np.any(keep):
            out[keep] = batch_minimize(Wn[keep], v, Q, cfg.c_tol)[0]
        return out

    return grid_oracle_sup(phi, J, objective, resolution or cfg.grid_resolution, prunable=True)


def grid_oracle_sup(phi: StepFunction, J: Interval, objective, resolution: int,
                    chunk: int = 200_000, prunable: bool = False) -> SupremumResult:
    """Brute-force supremum of ``objective`` over intervals with endpoints on a grid.

    ``objective(Wn, v)`` takes normalised masses (one row per interval) and
    segment values.  With ``prunable=True`` it is called as
    ``objective(Wn, v, floor)`` and may return ``-inf`` for rows it can prove
    do not exceed ``floor``; the floor always comes from grid intervals
    already evaluated, so the result is the exact grid maximum.
    """
    r = restrict(phi, J)
    resolution = int(resolution)
    g = np.linspace(J.a, J.b, resolution + 1)
    g[0], g[-1] = J.a, J.b
    ia, ib = np.triu_indices(g.size, k=1)
    # coarse on-grid pass first so later chunks have a useful floor
    stride = max(1, resolution // 32)
    coarse = (ia % stride == 0) & (ib % stride == 0)
    order = np.concatenate([np.flatnonzero(coarse), np.flatnonzero(~coarse)])
    best_val, best_i = -np.inf, -1
    for start in range(0, order.size, chunk):
        rows = order[start:start + chunk]
        Wn = _normalized(masses_on(r, g[ia[rows]], g[ib[rows]]))
        vals = objective(Wn, r.values, best_val) if prunable else objective(Wn, r.values)
        i = int(np.argmax(vals))
        if vals[i] > best_val or (vals[i] == best_val and rows[i] < best_i):
            best_val, best_i = float(vals[i]), int(rows[i])
    return SupremumResult(best_val, Interval(g[ia[best_i]], g[ib[best_i]]), GRID_ORACLE)


# ---------------------------------------------------------------- generic endpoint search


def sup_objective(phi: StepFunction, J: Interval,
                  objective: Callable[[np.ndarray, np.ndarray], np.ndarray],
                  cfg: OptimizerConfig = DEFAULT_CONFIG,
                  extra: Iterable[Interval] = (),
                  max_rounds: int = 16) -> SupremumResult:
    """Multistart search for ``sup_L objective(L)`` over subintervals of ``J``.

    Candidates are breakpoint pairs, jump straddles and any ``extra``
    intervals.  The best ``cfg.multistart_top`` of them are polished by
    coordinate-wise golden-section ascent on ``(a, b)``, each endpoint kept in
    the segment (or pair of segments, at a breakpoint) where it started.
    """
    r = restrict(phi, J)
    x, v = r.breaks, r.values
    if v.size == 1:
        val = float(objective(np.ones((1, 1)), v)[0])
        return SupremumResult(val, J, BREAKPOINT_ENUM)

    def evaluate(a, b):
        return objective(_normalized(masses_on(r, a, b)), v)

    pa, pb = _pair_candidates(x)
    sa, sb = _straddle_candidates(x)
    ex = [_ensure_interval(L.a, L.b, J) for L in extra]
    ea = np.array([L.a for L in ex])
    eb = np.array([L.b for L in ex])
    ca = np.concatenate([pa, sa, ea])
    cb = np.concatenate([pb, sb, eb])
    is_pair = np.zeros(ca.size, dtype=bool)
    is_pair[:pa.size] = True
    vals = evaluate(ca, cb)

    order = np.lexsort((cb, ca, -vals))[:cfg.multistart_top]
    a0, b0 = ca[order].copy(), cb[order].copy()
    f0 = vals[order].copy()
    a_lo, a_hi = _endpoint_range(x, a0)
    b_lo, b_hi = _endpoint_range(x, b0)
    min_len = 1e-12 * J.length()

    for _ in range(max_rounds):
        before = f0.copy()
        for moving in ("a", "b"):
            if moving == "a":
                lo, hi = a_lo, np.minimum(a_hi, b0 - min_len)
                f = lambda t: -evaluate(t, b0)
            else:
                lo, hi = np.maximum(b_lo, a0 + min_len), b_hi
                f = lambda t: -evaluate(a0, t)
            ok = hi > lo
            lo = np.where(ok, lo, a0 if moving == "a" else b0)
            hi = np.where(ok, hi, lo)
            t, _ = golden_min(f, lo, hi, _golden_tol(cfg, J))
            ft = -f(t)
            better = ft > f0
            if moving == "a":
                a0 = np.where(better, t, a0)
            else:
                b0 = np.where(better, t, b0)
            f0 = np.where(better, ft, f0)
        if np.all(f0 - before <= cfg.w_rel_tol * np.maximum(1.0, np.abs(before))):
            break

    all_a = np.concatenate([ca, a0])
    all_b = np.concatenate([cb, b0])
    all_v = np.concatenate([vals, f0])
    all_pair = np.concatenate([is_pair, np.zeros(a0.size, dtype=bool)])
    i = _best_index(all_v, all_a, all_b)
    method = BREAKPOINT_ENUM if all_pair[i] else REFINED_LOCAL
    return SupremumResult(float(all_v[i]), _ensure_interval(all_a[i], all_b[i], J), method)


def _golden_tol(cfg: OptimizerConfig, J: Interval) -> float:
    return max(J.length() * INV_PHI ** cfg.refine_iters, 1e-14)


def _endpoint_range(x: np.ndarray, e: np.ndarray):
    """Segment containing each endpoint; both neighbours when it sits on a breakpoint."""
    k = x.size - 1
    idx = np.clip(np.searchsorted(x, e, side="right") - 1, 0, k - 1)
    on_break = np.isclose(e, x[idx], rtol=0, atol=1e-15)
    lo = np.where(on_break & (idx > 0), x[np.maximum(idx - 1, 0)], x[idx])
    at_end = np.isclose(e, x[-1], rtol=0, atol=1e-15)
    hi = np.where(at_end, x[-1], x[np.minimum(idx + 1, k)])
    return lo, hi
