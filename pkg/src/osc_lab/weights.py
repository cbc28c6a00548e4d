"""Convex even weights ``Q`` used inside the averaging functionals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

MEAN = "mean"
MEDIAN = "median"


@dataclass(frozen=True)
class ConvexWeight:
    """A convex even function ``Q: R -> [0, inf)``.

    Build instances with :func:`power`, :func:`exp_weight`, :func:`cosh_weight`,
    :func:`regularized` or :func:`custom` rather than calling the constructor.
    """

    kind: str
    p: float = 0.0
    base: Optional["ConvexWeight"] = None
    n: int = 0
    func: Optional[Callable] = field(default=None, compare=False)
    strict: bool = False
    label: str = ""

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        k = self.kind
        if k == "power":
            if self.p == 2.0:
                return t * t
            if self.p == 1.0:
                return np.abs(t)
            return np.abs(t) ** self.p
        if k == "exp":
            return np.exp(np.abs(t))
        if k == "cosh":
            return np.cosh(t)
        if k == "reg":
            return self.base(t) + t * t / self.n
        return np.asarray(self.func(t), dtype=np.float64)

    def derivative(self, t, side: int = 1):
        """One-sided derivative ``Q'(t +- 0)``; ``side`` is +1 or -1."""
        t = np.asarray(t, dtype=np.float64)
        sgn = np.where(t > 0, 1.0, np.where(t < 0, -1.0, float(side)))
        k = self.kind
        if k == "power":
            if self.p == 1.0:
                return sgn
            return self.p * np.abs(t) ** (self.p - 1.0) * np.sign(t)
        if k == "exp":
            return sgn * np.exp(np.abs(t))
        if k == "cosh":
            return np.sinh(t)
        if k == "reg":
            return self.base.derivative(t, side) + 2.0 * t / self.n
        h = 1e-6 * np.maximum(1.0, np.abs(t))
        if side > 0:
            return (self(t + h) - self(t)) / h
        return (self(t) - self(t - h)) / h

    @property
    def strictly_convex(self) -> bool:
        return self.strict

    @property
    def fast_path(self) -> Optional[str]:
        if self.kind == "power" and self.p == 2.0:
            return MEAN
        if self.kind == "power" and self.p == 1.0:
            return MEDIAN
        return None

    @property
    def descriptor(self) -> str:
        k = self.kind
        if k == "power":
            return f"power:{self.p:g}"
        if k in ("exp", "cosh"):
            return k
        if k == "reg":
            return f"reg:{self.base.descriptor}:{self.n}"
        return f"custom:{self.label or 'anonymous'}"

    def __repr__(self):
        return f"ConvexWeight({self.descriptor})"

    def inverse(self, y: float, *, tol: float = 1e-14) -> float:
        """Smallest ``t >= 0`` with ``Q(t) >= y``; ``Q`` is increasing on ``[0, inf)``."""
        q0 = float(self(0.0))
        if y <= q0:
            return 0.0
        hi = 1.0
        while float(self(hi)) < y:
            hi *= 2.0
            if hi > 1e6:
                raise OverflowError(f"Q never reaches {y}")
        lo = 0.0
        while hi - lo > tol * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if float(self(mid)) < y:
                lo = mid
            else:
                hi = mid
        return hi


def power(p: float) -> ConvexWeight:
    p = float(p)
    if not p >= 1.0:
        raise ValueError(f"power weights need p >= 1, got {p}")
    return ConvexWeight("power", p=p, strict=p > 1.0)


def exp_weight() -> ConvexWeight:
    return ConvexWeight("exp", strict=True)


def cosh_weight() -> ConvexWeight:
    return ConvexWeight("cosh", strict=True)


def regularized(base: ConvexWeight, n: int) -> ConvexWeight:
    """``Q_n(t) = Q(t) + t**2 / n``, strictly convex for every ``n >= 1``."""
    n = int(n)
    if n < 1:
        raise ValueError(f"regularization index must be >= 1, got {n}")
    return ConvexWeight("reg", base=base, n=n, strict=True)


def custom(func: Callable, *, strictly_convex: bool, label: str = "") -> ConvexWeight:
    """Wrap a vectorised evaluator; convexity and evenness are the caller's promise."""
    return ConvexWeight("custom", func=func, strict=bool(strictly_convex), label=label)


def parse_weight(text: str) -> ConvexWeight:
    """Parse descriptors such as ``power:2``, ``power:1.5``, ``exp``, ``cosh``, ``reg:exp:10``."""
    text = text.strip().lower()
    if text == "exp":
        return exp_weight()
    if text == "cosh":
        return cosh_weight()
    head, _, rest = text.partition(":")
    if head == "power" and rest:
        return power(float(rest))
    if head == "reg" and rest:
        base_text, _, n = rest.rpartition(":")
        if not base_text:
            raise ValueError(f"bad weight descriptor {text!r}")
        return regularized(parse_weight(base_text), int(n))
    raise ValueError(f"unknown weight descriptor {text!r}")


def check_weight_axioms(Q: ConvexWeight, samples: int = 200, scale: float = 5.0,
                        seed: int = 0) -> bool:
    """Sampled evenness, nonnegativity and midpoint convexity."""
    rng = np.random.default_rng(seed)
    s = rng.uniform(-scale, scale, samples)
    t = rng.uniform(-scale, scale, samples)
    qs, qt = Q(s), Q(t)
    tol = 1e-12 * (1.0 + np.maximum(np.abs(qs), np.abs(qt)))
    even = np.all(np.abs(Q(-s) - qs) <= tol)
    nonneg = np.all(qs >= 0)
    midpoint = np.all(Q(0.5 * (s + t)) <= 0.5 * (qs + qt) + tol)
    return bool(even and nonneg and midpoint and math.isfinite(float(Q(0.0))))
