"""Piecewise-constant functions on subintervals of [0, 1].

A :class:`StepFunction` stores segment lengths and values as read-only
float64 arrays.  Breakpoints are accumulated once at construction and the
last one is pinned to the right end of the domain, so every operation that
cuts the function reuses the same cut points.

The value at an internal breakpoint is the value of the segment to its
right.  This only matters for :meth:`StepFunction.__call__`; averages do
not see it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, EvaluationError

SUM_TOL = 1e-12
INGEST_TOL = 1e-9
CONTAIN_TOL = 1e-12


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[a, b]`` inside ``[0, 1]`` with ``a < b``."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError(f"interval endpoints must be finite, got [{a}, {b}]")
        if a < -CONTAIN_TOL or b > 1.0 + CONTAIN_TOL:
            raise ValueError(f"interval [{a}, {b}] is not inside [0, 1]")
        if not a < b:
            raise ValueError(f"interval [{a}, {b}] has non-positive length")
        object.__setattr__(self, "a", min(max(a, 0.0), 1.0))
        object.__setattr__(self, "b", min(max(b, 0.0), 1.0))

    def length(self) -> float:
        return self.b - self.a

    def contains(self, other: "Interval", tol: float = CONTAIN_TOL) -> bool:
        return other.a >= self.a - tol and other.b <= self.b + tol

    def as_tuple(self) -> tuple[float, float]:
        return (self.a, self.b)


UNIT = Interval(0.0, 1.0)


@dataclass(frozen=True)
class Segment:
    length: float
    value: float

    def __post_init__(self):
        if not (self.length > 0 and math.isfinite(self.length)):
            raise ValueError(f"segment length must be positive, got {self.length}")
        if not math.isfinite(self.value):
            raise ValueError(f"segment value must be finite, got {self.value}")


class StepFunction:
    """Immutable piecewise-constant function on an :class:`Interval`."""

    __slots__ = ("domain", "lengths", "values", "breaks")

    def __init__(self, domain: Interval, lengths, values, *, tol: float = SUM_TOL):
        lengths = np.array(lengths, dtype=np.float64).ravel()
        values = np.array(values, dtype=np.float64).ravel()
        if lengths.size == 0:
            raise ValueError("a step function needs at least one segment")
        if lengths.shape != values.shape:
            raise ValueError("lengths and values differ in size")
        if not np.all(lengths > 0) or not np.all(np.isfinite(lengths)):
            raise ValueError("segment lengths must be positive and finite")
        if not np.all(np.isfinite(values)):
            raise ValueError("segment values must be finite")
        total = math.fsum(lengths)
        if abs(total - domain.length()) > tol:
            raise ValueError(
                f"segment lengths sum to {total!r}, domain length is {domain.length()!r}"
            )
        breaks = np.empty(lengths.size + 1)
        breaks[0] = domain.a
        breaks[1:] = domain.a + np.cumsum(lengths)
        breaks[-1] = domain.b
        if np.any(np.diff(breaks) <= 0):
            raise ValueError("segments collapse to zero length after accumulation")
        for arr in (lengths, values, breaks):
            arr.flags.writeable = False
        self.domain = domain
        self.lengths = lengths
        self.values = values
        self.breaks = breaks

    @classmethod
    def from_segments(cls, segments: Iterable[Segment | tuple[float, float]],
                      domain: Interval = UNIT) -> "StepFunction":
        pairs = [(s.length, s.value) if isinstance(s, Segment) else tuple(s) for s in segments]
        return cls(domain, [p[0] for p in pairs], [p[1] for p in pairs])

    @classmethod
    def from_breaks(cls, breaks: Sequence[float], values: Sequence[float]) -> "StepFunction":
        """Build from explicit breakpoints ``x_0 < ... < x_k`` and ``k`` values."""
        breaks = np.asarray(breaks, dtype=np.float64)
        return cls(Interval(breaks[0], breaks[-1]), np.diff(breaks), values)

    @classmethod
    def constant(cls, value: float, domain: Interval = UNIT) -> "StepFunction":
        return cls(domain, [domain.length()], [value])

    @property
    def segments(self) -> list[Segment]:
        return [Segment(float(l), float(v)) for l, v in zip(self.lengths, self.values)]

    def __len__(self):
        return self.lengths.size

    def __repr__(self):
        segs = ", ".join(f"({l:.6g}, {v:.6g})" for l, v in zip(self.lengths, self.values))
        return f"StepFunction([{self.domain.a:.6g}, {self.domain.b:.6g}], [{segs}])"

    def __call__(self, s):
        s = np.asarray(s, dtype=np.float64)
        if np.any(s < self.domain.a) or np.any(s > self.domain.b):
            raise DomainError("evaluation point outside the domain")
        idx = np.searchsorted(self.breaks, s, side="right") - 1
        idx = np.clip(idx, 0, self.lengths.size - 1)
        out = self.values[idx]
        return float(out) if out.ndim == 0 else out

    def map_values(self, f: Callable[[np.ndarray], np.ndarray]) -> "StepFunction":
        return StepFunction(self.domain, self.lengths, f(np.array(self.values)))

    def __add__(self, tau: float) -> "StepFunction":
        return self.map_values(lambda v: v + tau)

    __radd__ = __add__

    def __sub__(self, tau: float) -> "StepFunction":
        return self.map_values(lambda v: v - tau)

    def __neg__(self) -> "StepFunction":
        return self.map_values(lambda v: -v)

    def __mul__(self, s: float) -> "StepFunction":
        return self.map_values(lambda v: v * s)

    __rmul__ = __mul__

    def normalize(self) -> "StepFunction":
        """Merge neighbouring segments that carry the same value."""
        keep = np.ones(self.values.size, dtype=bool)
        keep[1:] = self.values[1:] != self.values[:-1]
        if keep.all():
            return self
        starts = np.flatnonzero(keep)
        new_breaks = np.append(self.breaks[starts], self.breaks[-1])
        return StepFunction(self.domain, np.diff(new_breaks), self.values[starts])

    def rescaled(self, target: Interval) -> "StepFunction":
        """Affine transport of the function onto ``target``."""
        scale = target.length() / self.domain.length()
        return StepFunction(target, self.lengths * scale, self.values, tol=1e-10)

    def to_dict(self) -> dict:
        return {
            "domain": [self.domain.a, self.domain.b],
            "segments": [{"len": float(l), "val": float(v)}
                         for l, v in zip(self.lengths, self.values)],
        }


def restrict(phi: StepFunction, J: Interval) -> StepFunction:
    """Restriction of ``phi`` to ``J``; segments straddling an end of ``J`` are cut."""
    if not phi.domain.contains(J):
        raise DomainError(
            f"[{J.a}, {J.b}] is not contained in the domain [{phi.domain.a}, {phi.domain.b}]"
        )
    br = phi.breaks
    # segments with positive overlap with J
    lo = int(np.searchsorted(br, J.a, side="right")) - 1
    hi = int(np.searchsorted(br, J.b, side="left"))
    lo = max(lo, 0)
    hi = min(hi, phi.lengths.size)
    cuts = np.concatenate(([J.a], br[lo + 1:hi], [J.b]))
    lengths = np.diff(cuts)
    values = phi.values[lo:hi]
    keep = lengths > 0
    return StepFunction(J, lengths[keep], values[keep], tol=1e-10)


def masses_on(phi: StepFunction, a, b) -> np.ndarray:
    """Overlap lengths of ``[a, b]`` with each segment; vectorised over ``a`` and ``b``.

    Returns an array of shape ``broadcast(a, b).shape + (k,)``.
    """
    a = np.asarray(a, dtype=np.float64)[..., None]
    b = np.asarray(b, dtype=np.float64)[..., None]
    left = phi.breaks[:-1]
    right = phi.breaks[1:]
    return np.clip(np.minimum(b, right) - np.maximum(a, left), 0.0, None)


def _check_finite(g_vals: np.ndarray, values: np.ndarray, what: str = "g"):
    bad = ~np.isfinite(g_vals)
    if np.any(bad):
        v = float(np.broadcast_to(values, g_vals.shape)[bad].flat[0])
        raise EvaluationError(f"{what} is not finite at segment value {v!r}", value=v)


def average_of(phi: StepFunction, J: Interval, g: Callable[[np.ndarray], np.ndarray]) -> float:
    """Exact average of ``g(phi)`` over ``J``."""
    r = restrict(phi, J)
    with np.errstate(over="ignore", invalid="ignore"):
        gv = np.asarray(g(np.array(r.values)), dtype=np.float64)
    _check_finite(gv, r.values)
    return float(np.dot(r.lengths, gv) / J.length())


def range_on(phi: StepFunction, J: Interval) -> tuple[float, float]:
    r = restrict(phi, J)
    return float(r.values.min()), float(r.values.max())


def from_json(data: str | dict) -> StepFunction:
    """Parse the JSON step-function format.

    Lengths must add up to the domain length within ``1e-9``; they are then
    rescaled so the internal sum matches to ``1e-12``.
    """
    if isinstance(data, str):
        data = json.loads(data)
    try:
        a, b = data["domain"]
        segs = data["segments"]
        lengths = np.array([float(s["len"]) for s in segs])
        values = np.array([float(s["val"]) for s in segs])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed step-function JSON: {exc}") from exc
    domain = Interval(a, b)
    total = math.fsum(lengths)
    if abs(total - domain.length()) > INGEST_TOL:
        raise ValueError(
            f"segment lengths sum to {total!r}, expected {domain.length()!r} within {INGEST_TOL}"
        )
    lengths = lengths * (domain.length() / total)
    return StepFunction(domain, lengths, values)


def to_json(phi: StepFunction) -> str:
    return json.dumps(phi.to_dict())
