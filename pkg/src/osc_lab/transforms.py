"""Operators on step functions: rearrangement, truncation, concatenation,
1-Lipschitz composition, the exponential bridge to weights, and the
quadratic regularisation of a convex weight."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .steps import UNIT, Interval, StepFunction, restrict
from .weights import ConvexWeight, regularized

_MIN_CELL = 4 * np.finfo(np.float64).eps


def rearrange_decreasing(phi: StepFunction) -> StepFunction:
    """Non-increasing function on ``[0, 1]`` equimeasurable with ``phi``.

    Segments are sorted by value; equal values keep their original order.
    """
    if phi.domain != UNIT:
        raise ValueError("rearrangement is defined for functions on [0, 1]")
    order = np.argsort(-phi.values, kind="stable")
    return StepFunction(UNIT, phi.lengths[order], phi.values[order]).normalize()


def distribution(phi: StepFunction) -> dict[float, float]:
    """Total mass carried by each distinct value."""
    out: dict[float, float] = {}
    for length, value in zip(phi.lengths, phi.values):
        out[float(value)] = out.get(float(value), 0.0) + float(length)
    return out


def truncate(phi: StepFunction, A: float, B: float) -> StepFunction:
    """Two-sided truncation ``min(B, max(A, phi))``."""
    if A > B:
        raise ValueError(f"truncation needs A <= B, got A={A}, B={B}")
    return phi.map_values(lambda v: np.clip(v, A, B))


def concatenate(phi_minus: StepFunction, phi_plus: StepFunction, alpha: float) -> StepFunction:
    """Rescaled copy of ``phi_minus`` on ``[0, alpha)`` followed by ``phi_plus`` on ``[alpha, 1]``."""
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    starts, vals = [], []
    if alpha > 0.0:
        d = phi_minus.domain
        starts.append(alpha * (phi_minus.breaks[:-1] - d.a) / d.length())
        vals.append(phi_minus.values)
    if alpha < 1.0:
        d = phi_plus.domain
        starts.append(alpha + (1.0 - alpha) * (phi_plus.breaks[:-1] - d.a) / d.length())
        vals.append(phi_plus.values)
    starts = np.concatenate(starts)
    values = np.concatenate(vals)
    # cells narrower than a few ulps (alpha within rounding of 0 or 1) are
    # absorbed by their left neighbour, or by the right one at the start
    widths = np.diff(np.append(starts, 1.0))
    keep = widths > _MIN_CELL
    if not keep.any():
        keep[np.argmax(widths)] = True
    starts, values = starts[keep], values[keep]
    starts[0] = 0.0
    return StepFunction(UNIT, np.diff(np.append(starts, 1.0)), values, tol=1e-10)


@dataclass(frozen=True)
class LipschitzPL:
    """Continuous piecewise-linear map with slopes in ``[-1, 1]``.

    ``slopes[0]`` applies left of ``breakpoints[0]``, ``slopes[i]`` between
    ``breakpoints[i-1]`` and ``breakpoints[i]`` and ``slopes[-1]`` to the
    right of the last breakpoint, so ``len(slopes) == len(breakpoints) + 1``.
    ``anchor`` is the value at ``breakpoints[0]``.
    """

    breakpoints: tuple
    slopes: tuple
    anchor: float

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        sl = tuple(float(s) for s in self.slopes)
        if len(bp) == 0 or len(sl) != len(bp) + 1:
            raise ValueError("need at least one breakpoint and len(slopes) == len(breakpoints) + 1")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(abs(s) > 1.0 for s in sl):
            raise ValueError("every slope must have absolute value <= 1")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "slopes", sl)

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        bp = np.array(self.breakpoints)
        sl = np.array(self.slopes)
        # values at the breakpoints
        knots = self.anchor + np.concatenate(([0.0], np.cumsum(sl[1:-1] * np.diff(bp))))
        idx = np.searchsorted(bp, t, side="right")          # 0 .. len(bp)
        base_idx = np.clip(idx - 1, 0, bp.size - 1)
        return knots[base_idx] + sl[idx] * (t - bp[base_idx])

    @classmethod
    def identity(cls) -> "LipschitzPL":
        return cls((0.0,), (1.0, 1.0), 0.0)

    @classmethod
    def truncation(cls, A: float, B: float) -> "LipschitzPL":
        """``Tr_{A,B}``: slopes ``(0, 1, 0)``; for ``A == B`` the constant ``A``."""
        if A > B:
            raise ValueError("truncation needs A <= B")
        if A == B:
            return cls((A,), (0.0, 0.0), A)
        return cls((A, B), (0.0, 1.0, 0.0), A)

    @classmethod
    def random(cls, rng: np.random.Generator, n_breaks: int = 4, span=(-3.0, 3.0),
               slopes: Sequence[float] | None = None) -> "LipschitzPL":
        bp = np.sort(rng.uniform(span[0], span[1], n_breaks))
        bp = np.unique(bp)
        if slopes is None:
            sl = rng.uniform(-1.0, 1.0, bp.size + 1)
        else:
            sl = rng.choice(np.asarray(slopes, dtype=float), bp.size + 1)
        return cls(tuple(bp), tuple(sl), float(rng.uniform(span[0], span[1])))


def compose_lipschitz(f: LipschitzPL, phi: StepFunction) -> StepFunction:
    return phi.map_values(f)


def regularized_weight(Q: ConvexWeight, n: int) -> ConvexWeight:
    return regularized(Q, n)


def weight_from_phi(phi: StepFunction) -> StepFunction:
    return phi.map_values(np.exp)


def phi_from_weight(w: StepFunction) -> StepFunction:
    if np.any(w.values <= 0):
        raise ValueError("weights must be strictly positive")
    return w.map_values(np.log)


def restriction_pair(phi: StepFunction, t: float):
    """Restrictions of ``phi`` to ``[a, (1-t)a + tb]`` and ``[(1-t)a + tb, b]``."""
    a, b = phi.domain.a, phi.domain.b
    m = (1.0 - t) * a + t * b
    return restrict(phi, Interval(a, m)), restrict(phi, Interval(m, b))
