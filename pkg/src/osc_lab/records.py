"""Per-sample verification records and their CSV layout."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped-precondition"

CSV_COLUMNS = (
    "sample_id", "seed", "check", "weight", "lhs", "rhs", "slack", "tol",
    "lhs_a", "lhs_b", "rhs_a", "rhs_b", "status", "oracle_lhs", "oracle_rhs", "note",
    "runtime",
)


@dataclass
class CampaignRecord:
    """One verified inequality ``lhs <= rhs`` (or a dichotomy) on one sample.

    ``slack`` is ``rhs - lhs`` for plain inequalities; checks with a different
    margin document it.  ``status`` is ``fail`` exactly when ``slack < -tol``.
    """

    sample_id: int
    seed: int
    check: str
    weight: str
    lhs: float
    rhs: float
    slack: float
    tol: float
    lhs_witness: Optional[tuple] = None
    rhs_witness: Optional[tuple] = None
    status: str = PASS
    oracle_lhs: float = math.nan
    oracle_rhs: float = math.nan
    note: str = ""
    runtime: float = 0.0

    def __post_init__(self):
        if self.status != SKIPPED:
            self.status = FAIL if self.slack < -self.tol else PASS

    @classmethod
    def skipped(cls, sample_id, seed, check, weight, note="") -> "CampaignRecord":
        return cls(sample_id, seed, check, weight, math.nan, math.nan, math.nan, 0.0,
                   status=SKIPPED, note=note)

    def row(self) -> list[str]:
        la, lb = self.lhs_witness or ("", "")
        ra, rb = self.rhs_witness or ("", "")
        return [
            str(self.sample_id), str(self.seed), self.check, self.weight,
            fmt(self.lhs), fmt(self.rhs), fmt(self.slack), fmt(self.tol),
            fmt(la), fmt(lb), fmt(ra), fmt(rb), self.status,
            fmt(self.oracle_lhs), fmt(self.oracle_rhs), self.note, f"{self.runtime:.6f}",
        ]


def fmt(x) -> str:
    if x == "" or x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return f"{x:.17g}"


def write_csv(records: Iterable[CampaignRecord], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        w.writerow(rec.row())


def to_csv_text(records: Iterable[CampaignRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def strip_runtime(csv_text: str) -> str:
    """CSV text with the runtime column blanked, for determinism comparisons."""
    rows = list(csv.reader(io.StringIO(csv_text)))
    idx = rows[0].index("runtime")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        row[idx] = ""
        w.writerow(row)
    return buf.getvalue()
