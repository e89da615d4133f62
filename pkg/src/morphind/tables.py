"""Per-class error tables and side-by-side comparison rendering."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence


@dataclass
class ErrorTable:
    """Misclassification counts per true class."""

    name: str
    errors: dict[str, int]
    totals: dict[str, int]
    confusion: Counter = field(default_factory=Counter)  # (true, predicted) -> count

    @classmethod
    def from_pairs(cls, name: str, pairs) -> "ErrorTable":
        """Build from an iterable of (true, predicted) labels."""
        confusion = Counter(pairs)
        totals, errors = Counter(), Counter()
        for (t, p), c in confusion.items():
            totals[t] += c
            if t != p:
                errors[t] += c
        return cls(name, {c: errors[c] for c in totals}, dict(totals), confusion)

    @property
    def total_errors(self) -> int:
        return sum(self.errors.values())

    @property
    def n(self) -> int:
        return sum(self.totals.values())

    def percent(self, cls: str) -> float:
        tot = self.totals.get(cls, 0)
        return 100.0 * self.errors.get(cls, 0) / tot if tot else 0.0

    @property
    def accuracy(self) -> float:
        return 1.0 - self.total_errors / self.n if self.n else 0.0


def class_order(classes, preferred: Sequence[str] | None = None) -> list[str]:
    classes = set(classes)
    if preferred and classes <= set(preferred):
        return [c for c in preferred if c in classes]
    return sorted(classes)


def _align(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    out = []
    for k, r in enumerate(rows):
        cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        out.append("  ".join(cells).rstrip())
        if k == 0:
            out.append("-" * len(out[0]))
    return "\n".join(out) + "\n"


def render_errors(table: ErrorTable, order: Sequence[str] | None = None,
                  labels: Mapping[str, str] | None = None) -> str:
    labels = labels or {}
    rows = [["Class", "Errors", "%", "N"]]
    rows.append(["Total", str(table.total_errors),
                 f"{100.0 * table.total_errors / table.n:.1f}" if table.n else "0.0", str(table.n)])
    for c in class_order(table.totals, order):
        rows.append([labels.get(c, c), str(table.errors.get(c, 0)), f"{table.percent(c):.1f}",
                     str(table.totals[c])])
    return _align(rows)


@dataclass
class Comparison:
    a: ErrorTable
    b: ErrorTable
    rows: list[tuple[str, int, int]]  # class, errors a, errors b

    @property
    def deltas(self) -> dict[str, int]:
        return {c: eb - ea for c, ea, eb in self.rows}

    def render(self, labels: Mapping[str, str] | None = None) -> str:
        labels = labels or {}
        rows = [["Class", self.a.name, self.b.name, "Delta"]]
        for c, ea, eb in self.rows:
            rows.append([labels.get(c, c), str(ea), str(eb), f"{eb - ea:+d}"])
        ta, tb = self.a.total_errors, self.b.total_errors
        rows.append(["Total", str(ta), str(tb), f"{tb - ta:+d}"])
        return _align(rows)

    def csv(self) -> str:
        lines = [f"class,{self.a.name},{self.b.name},delta"]
        for c, ea, eb in self.rows:
            lines.append(f"{c},{ea},{eb},{eb - ea}")
        lines.append(f"Total,{self.a.total_errors},{self.b.total_errors},"
                     f"{self.b.total_errors - self.a.total_errors}")
        return "\n".join(lines) + "\n"


def compare(a: ErrorTable, b: ErrorTable, order: Sequence[str] | None = None) -> Comparison:
    if set(a.totals) != set(b.totals):
        raise ValueError(
            f"class domains differ: {sorted(a.totals)} vs {sorted(b.totals)}")
    if a.totals != b.totals:
        raise ValueError("tables were computed on different class counts")
    rows = [(c, a.errors.get(c, 0), b.errors.get(c, 0)) for c in class_order(a.totals, order)]
    return Comparison(a, b, rows)
