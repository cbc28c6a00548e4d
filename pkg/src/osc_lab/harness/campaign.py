"""Seeded property campaigns: configuration, execution and CSV output."""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from ..functionals import OptimizerConfig
from ..records import FAIL, PASS, SKIPPED, CampaignRecord, write_csv
from ..weights import parse_weight
from .checks import CHECKS, SampleContext, expand_checks
from .rng import gen_random_step, sample_seed

WORKERS_ENV = "OSC_LAB_WORKERS"
DEFAULT_WEIGHTS = ("power:1", "power:1.5", "power:2", "exp", "cosh")


@dataclass(frozen=True)
class CampaignConfig:
    seed: int = 0
    samples: int = 100
    max_segments: int = 8
    value_range: tuple = (-3.0, 3.0)
    weights: tuple = DEFAULT_WEIGHTS
    checks: tuple = ("theorem1",)
    optimizer: OptimizerConfig = field(default_factory=lambda: OptimizerConfig(grid_resolution=256))
    oracle_mode: bool = False
    epsilon: float = 1.0
    induction_depth: int = 8
    violation_tol: float = 1e-6
    first_sample: int = 0

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.max_segments < 1:
            raise ValueError("max_segments must be >= 1")
        lo, hi = (float(x) for x in self.value_range)
        if not lo < hi:
            raise ValueError("value_range needs lo < hi")
        if lo < -20.0 or hi > 20.0:
            raise ValueError("value_range must lie inside [-20, 20]")
        object.__setattr__(self, "value_range", (lo, hi))
        object.__setattr__(self, "weights", tuple(self.weights))
        object.__setattr__(self, "checks", tuple(expand_checks(self.checks)))
        for w in self.weights:
            parse_weight(w)

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        data = dict(data)
        opt = data.pop("optimizer", None)
        if isinstance(opt, dict):
            data["optimizer"] = OptimizerConfig(**opt)
        for key in ("value_range", "weights", "checks"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "CampaignConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["value_range"] = list(self.value_range)
        d["weights"] = list(self.weights)
        d["checks"] = list(self.checks)
        return d


@dataclass
class CampaignSummary:
    records: list
    passed: int
    failed: int
    skipped: int
    elapsed: float

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def by_check(self) -> dict:
        out: dict = {}
        for r in self.records:
            c = out.setdefault(r.check, {PASS: 0, FAIL: 0, SKIPPED: 0})
            c[r.status] += 1
        return out

    def failures(self) -> list:
        return [r for r in self.records if r.status == FAIL]

    def text(self) -> str:
        lines = [f"{len(self.records)} records: {self.passed} pass, {self.failed} fail, "
                 f"{self.skipped} skipped ({self.elapsed:.1f}s)"]
        for name, c in self.by_check().items():
            lines.append(f"  {name:<26} pass={c[PASS]:<6} fail={c[FAIL]:<6} skipped={c[SKIPPED]}")
        return "\n".join(lines)


def worker_count(default: int = 1) -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None or raw.strip() == "":
        return default
    n = int(raw)
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer")
    return n


def run_sample(config: CampaignConfig, index: int) -> list:
    seed = sample_seed(config.seed, index)
    ctx = SampleContext(
        sample_id=index, seed=seed,
        phi=gen_random_step(seed, config.max_segments, config.value_range),
        weights=[parse_weight(w) for w in config.weights],
        cfg=config.optimizer, violation_tol=config.violation_tol, epsilon=config.epsilon,
        induction_depth=config.induction_depth, oracle_mode=config.oracle_mode,
        value_range=config.value_range, max_segments=config.max_segments,
    )
    out = []
    for name in config.checks:
        out.extend(CHECKS[name](ctx))
    return out


def _run_sample_star(args):
    return run_sample(*args)


def run_campaign(config: CampaignConfig, out: Optional[str | Path] = None,
                 workers: Optional[int] = None) -> CampaignSummary:
    """Run every configured check on every sample, in sample order.

    ``workers`` defaults to ``$OSC_LAB_WORKERS`` (else 1).  Results are
    identical for any worker count.  With ``out`` the records are written as CSV.
    """
    t0 = time.perf_counter()
    workers = worker_count() if workers is None else workers
    indices = range(config.first_sample, config.first_sample + config.samples)
    records: list[CampaignRecord] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for recs in pool.map(_run_sample_star, ((config, i) for i in indices), chunksize=4):
                records.extend(recs)
    else:
        for i in indices:
            records.extend(run_sample(config, i))
    if out is not None:
        path = Path(out)
        try:
            with open(path, "w", newline="") as fh:
                write_csv(records, fh)
        except OSError as exc:
            raise OSError(f"cannot write campaign report to {path}: {exc}") from exc
    counts = {PASS: 0, FAIL: 0, SKIPPED: 0}
    for r in records:
        counts[r.status] += 1
    return CampaignSummary(records, counts[PASS], counts[FAIL], counts[SKIPPED],
                           time.perf_counter() - t0)
