"""Instance corpora: schema, parsing, rendering and feature projection.

A corpus file holds one instance per line: whitespace separated value
tokens followed by the class token. Lines starting with ``#`` are comments.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

ROLES = ("stress", "onset", "nucleus", "coda", "other")
MISSING = "="


class CorpusError(ValueError):
    """Raised for malformed corpus text or invalid dataset operations."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Feature:
    name: str
    role: str = "other"

    def __post_init__(self):
        if not self.name or any(c.isspace() for c in self.name):
            raise CorpusError(f"invalid feature name {self.name!r}")
        if self.role not in ROLES:
            raise CorpusError(f"unknown role {self.role!r} for feature {self.name}")


@dataclass(frozen=True)
class Schema:
    features: tuple[Feature, ...]
    class_name: str = "class"

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        if not self.features:
            raise CorpusError("schema needs at least one feature")
        names = [f.name for f in self.features]
        dup = [n for n, c in Counter(names).items() if c > 1]
        if dup:
            raise CorpusError(f"duplicate feature names: {', '.join(dup)}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    def __len__(self):
        return len(self.features)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise CorpusError(
                f"unknown feature {name!r}; valid names: {', '.join(self.names)}"
            ) from None

    def role(self, name: str) -> str:
        return self.features[self.index(name)].role

    def header(self) -> str:
        """Comment line that lets a corpus file carry its own schema."""
        cols = " ".join(f"{f.name}/{f.role}" for f in self.features)
        return f"# schema: {cols} -> {self.class_name}"

    @classmethod
    def from_header(cls, line: str) -> "Schema | None":
        line = line.strip()
        if not line.startswith("# schema:"):
            return None
        body = line[len("# schema:"):]
        cols, _, cname = body.partition("->")
        feats = []
        for tok in cols.split():
            name, _, role = tok.partition("/")
            feats.append(Feature(name, role or "other"))
        return cls(tuple(feats), cname.strip() or "class")

    @classmethod
    def parse(cls, text: str) -> "Schema":
        """Parse a schema file: ``feature <name> [role]`` lines and one ``class <name>``."""
        feats, cname = [], None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] == "feature" and len(parts) in (2, 3):
                feats.append(Feature(parts[1], parts[2] if len(parts) == 3 else "other"))
            elif parts[0] == "class" and len(parts) == 2:
                if cname is not None:
                    raise CorpusError("more than one class line", lineno)
                cname = parts[1]
            else:
                raise CorpusError(f"cannot read schema line {line!r}", lineno)
        if cname is None:
            raise CorpusError("schema has no class line")
        return cls(tuple(feats), cname)

    def render(self) -> str:
        lines = [f"feature {f.name} {f.role}" for f in self.features]
        lines.append(f"class {self.class_name}")
        return "\n".join(lines) + "\n"


def _diminutive12() -> Schema:
    feats = []
    # syllable 3 is the last syllable of the word
    for syl in (1, 2, 3):
        for prefix, role in (("s", "stress"), ("o", "onset"), ("n", "nucleus"), ("c", "coda")):
            feats.append(Feature(f"{prefix}{syl}", role))
    return Schema(tuple(feats), "suffix")


DIMINUTIVE12 = _diminutive12()
PRESETS = {"diminutive12": DIMINUTIVE12}

# Named projections of the diminutive schema.
CORPORA = {
    "3-SYLL": DIMINUTIVE12.names,
    "SONC": ("s3", "o3", "n3", "c3"),
    "ONC": ("o3", "n3", "c3"),
    "NC": ("n3", "c3"),
}

SUFFIX_LABELS = {"T": "-tje", "J": "-je", "E": "-etje", "K": "-kje", "P": "-pje"}
SUFFIX_ORDER = ("T", "J", "E", "K", "P")


@dataclass(frozen=True)
class Instance:
    values: tuple[str, ...]
    label: str

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    def tokens(self) -> tuple[str, ...]:
        return self.values + (self.label,)


@dataclass(frozen=True)
class Dataset:
    schema: Schema
    instances: tuple[Instance, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        n = len(self.schema)
        for i, inst in enumerate(self.instances):
            if len(inst.values) != n:
                raise CorpusError(f"instance {i} has {len(inst.values)} values, schema has {n}")
            if any(not v for v in inst.values) or not inst.label:
                raise CorpusError(f"instance {i} has an empty token")

    def __len__(self):
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    @cached_property
    def value_domains(self) -> dict[str, frozenset[str]]:
        cols = zip(*(inst.values for inst in self.instances)) if self.instances else []
        doms = {name: frozenset() for name in self.schema.names}
        for name, col in zip(self.schema.names, cols):
            doms[name] = frozenset(col)
        return doms

    @cached_property
    def class_domain(self) -> frozenset[str]:
        return frozenset(inst.label for inst in self.instances)

    @cached_property
    def class_counts(self) -> Counter:
        return Counter(inst.label for inst in self.instances)

    @cached_property
    def classes(self) -> tuple[str, ...]:
        return tuple(sorted(self.class_domain))

    def labels(self) -> list[str]:
        return [inst.label for inst in self.instances]

    def column(self, feature: str) -> list[str]:
        i = self.schema.index(feature)
        return [inst.values[i] for inst in self.instances]

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return Dataset(self.schema, tuple(self.instances[i] for i in indices))

    def majority_class(self) -> str:
        return majority(self.class_counts)

    @cached_property
    def encoded(self) -> "Encoded":
        return Encoded.from_dataset(self)


@dataclass
class Encoded:
    """Integer-coded view of a dataset used by the learners."""

    X: np.ndarray  # (n, features) value codes
    y: np.ndarray  # (n,) class codes
    values: list[list[str]]  # per feature, code -> token (sorted)
    classes: list[str]  # code -> class token (sorted)

    @classmethod
    def from_dataset(cls, d: Dataset) -> "Encoded":
        values = [sorted(d.value_domains[name]) for name in d.schema.names]
        classes = sorted(d.class_domain)
        lookup = [{v: i for i, v in enumerate(vals)} for vals in values]
        cidx = {c: i for i, c in enumerate(classes)}
        X = np.array(
            [[lookup[j][v] for j, v in enumerate(inst.values)] for inst in d.instances],
            dtype=np.int64,
        ).reshape(len(d), len(d.schema))
        y = np.array([cidx[inst.label] for inst in d.instances], dtype=np.int64)
        return cls(X, y, values, classes)


def majority(counts) -> str:
    """Most frequent class; ties go to the lexicographically smallest token."""
    if not counts:
        raise CorpusError("no classes to take a majority over")
    return min(counts, key=lambda c: (-counts[c], c))


def parse_corpus(text: str, schema: Schema) -> Dataset:
    n = len(schema) + 1
    instances = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) != n:
            raise CorpusError(f"expected {n} tokens, found {len(toks)}", lineno)
        instances.append(Instance(tuple(toks[:-1]), toks[-1]))
    if not instances:
        raise CorpusError("empty corpus")
    return Dataset(schema, tuple(instances))


def render_corpus(d: Dataset, header: bool = False) -> str:
    lines = [d.schema.header()] if header else []
    lines.extend(" ".join(inst.tokens()) for inst in d.instances)
    return "\n".join(lines) + "\n"


def read_schema_header(text: str) -> Schema | None:
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if not line.startswith("#"):
            return None
        schema = Schema.from_header(line)
        if schema is not None:
            return schema
    return None


def project(d: Dataset, keep: Sequence[str]) -> Dataset:
    if not keep:
        raise CorpusError("projection needs at least one feature")
    wanted = set(keep)
    unknown = sorted(wanted - set(d.schema.names))
    if unknown:
        raise CorpusError(
            f"unknown feature(s) {', '.join(unknown)}; valid names: {', '.join(d.schema.names)}"
        )
    idx = [i for i, name in enumerate(d.schema.names) if name in wanted]
    schema = Schema(tuple(d.schema.features[i] for i in idx), d.schema.class_name)
    insts = tuple(Instance(tuple(inst.values[i] for i in idx), inst.label) for inst in d.instances)
    return Dataset(schema, insts)


def class_distribution(d: Dataset) -> dict[str, tuple[int, float]]:
    n = len(d)
    counts = d.class_counts
    order = sorted(counts, key=lambda c: (-counts[c], c))
    return {c: (counts[c], counts[c] / n) for c in order}
