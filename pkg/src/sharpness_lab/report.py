"""Verification report records shared by all checks."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

INEQUALITIES = ("1.2", "1.2a", "2.4", "2.8", "2.9", "3.1", "3.2", "3.3", "3.7",
                "3.1n", "3.2n", "3.1n-zero")


@dataclass
class Entry:
    inequality: str
    lhs: float
    rhs: float
    ratio: float
    passed: bool
    witness: tuple = ()
    instance: str = ""
    trial: int = 0
    kind: str = "le"  # le: ratio <= 1 + allowance; eq: |ratio - 1| <= allowance
    note: str = ""

    def as_dict(self):
        return {
            "trial": self.trial,
            "instance": self.instance,
            "inequality": self.inequality,
            "kind": self.kind,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "ratio": _num(self.ratio),
            "pass": self.passed,
            "witness": [_num(w) for w in self.witness],
            "note": self.note,
        }


def _num(x):
    x = float(x)
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def ratio_of(lhs, rhs, tiny=1e-300):
    if rhs > tiny:
        return lhs / rhs
    return 0.0 if abs(lhs) <= 1e-12 else math.inf


def make_entry(inequality, lhs, rhs, allowance, witness=(), kind="le", **kw) -> Entry:
    lhs, rhs = float(lhs), float(rhs)
    r = ratio_of(lhs, rhs)
    if kind == "eq":
        ok = abs(r - 1.0) <= allowance
    else:
        ok = r <= 1.0 + allowance
    w = tuple(float(v) for v in (witness if witness is not None else ()))
    return Entry(inequality, lhs, rhs, r, bool(ok), w, kind=kind, **kw)


@dataclass
class VerificationReport:
    campaign: str = ""
    entries: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def trials(self) -> int:
        return len({e.trial for e in self.entries})

    @property
    def failures(self) -> int:
        return sum(not e.passed for e in self.entries)

    @property
    def max_ratio(self) -> float:
        finite = [e.ratio for e in self.entries if e.kind == "le"]
        return max(finite) if finite else 0.0

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def by_inequality(self, ineq):
        return [e for e in self.entries if e.inequality == ineq]

    def extend(self, other: "VerificationReport", trial=None):
        for e in other.entries:
            if trial is not None:
                e.trial = trial
            self.entries.append(e)
        return self

    def summary(self, include_timing=False):
        s = {"trials": self.trials, "entries": len(self.entries),
             "failures": self.failures, "max_ratio": _num(self.max_ratio)}
        if include_timing:
            s["wall_time"] = self.wall_time
        return s

    def as_dict(self, include_timing=False):
        return {"campaign": self.campaign, "summary": self.summary(include_timing),
                "entries": [e.as_dict() for e in self.entries]}

    def to_json(self, include_timing=False) -> str:
        return json.dumps(self.as_dict(include_timing), indent=1, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["campaign", "trial", "inequality", "lhs", "rhs", "ratio", "pass", "witness"])
        for e in self.entries:
            w.writerow([self.campaign, e.trial, e.inequality, repr(e.lhs), repr(e.rhs),
                        repr(e.ratio), int(e.passed), ";".join(repr(v) for v in e.witness)])
        return buf.getvalue()

    def table(self) -> str:
        lines = [f"campaign {self.campaign!r}: {self.trials} trials, {len(self.entries)} entries, "
                 f"{self.failures} failures, max ratio {self.max_ratio:.9g}"]
        for e in self.entries:
            lines.append(f"  [{e.trial:>4}] {e.inequality:<9} lhs={e.lhs:.9g} rhs={e.rhs:.9g} "
                         f"ratio={e.ratio:.9g} {'ok' if e.passed else 'FAIL'} {e.note}".rstrip())
        return "\n".join(lines)


def merge(reports, campaign="") -> VerificationReport:
    """Concatenate reports; entries ordered by trial id (stable)."""
    out = VerificationReport(campaign)
    for r in reports:
        out.entries.extend(r.entries)
        out.wall_time += r.wall_time
    out.entries.sort(key=lambda e: e.trial)
    return out
