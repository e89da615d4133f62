"""Top-down decision tree induction over categorical features.

Trees branch on *sets* of values: with grouping enabled, the values of a
feature observed at a node are greedily merged into larger sets as long as
the split criterion does not get worse.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
from scipy.stats import beta

from .dataset import Dataset, Instance, Schema, majority

EPS = 1e-10


class Criterion(str, Enum):
    GAIN = "gain"
    GAIN_RATIO = "gain_ratio"


@dataclass(frozen=True)
class InductionConfig:
    criterion: Criterion = Criterion.GAIN_RATIO
    grouping: bool = True
    min_split: int = 2
    prune: bool = False
    prune_cf: float = 0.25

    def __post_init__(self):
        object.__setattr__(self, "criterion", Criterion(self.criterion))
        if self.min_split < 1:
            raise ValueError("min_split must be >= 1")
        if not 0.0 < self.prune_cf < 1.0:
            raise ValueError("prune_cf must lie in (0, 1)")


@dataclass
class Leaf:
    label: str
    counts: dict[str, int] = field(default_factory=dict)


@dataclass
class Node:
    feature: str
    branches: list[tuple[frozenset[str], "Tree"]]
    fallback: str
    counts: dict[str, int] = field(default_factory=dict)

    def route(self, value: str) -> "Tree | None":
        for values, sub in self.branches:
            if value in values:
                return sub
        return None


Tree = Union[Leaf, Node]


@dataclass
class DecisionTree:
    root: Tree
    schema: Schema
    fallback: str

    def classify(self, inst: Instance) -> str:
        return classify(self, inst)

    def render(self) -> str:
        return render_tree(self)


class TreeError(ValueError):
    pass


# -- information measures ---------------------------------------------------

def _as_counts(counts) -> np.ndarray:
    if isinstance(counts, Mapping):
        counts = list(counts.values())
    arr = np.asarray(counts, dtype=float)
    if np.any(arr < 0):
        raise ValueError("counts must be nonnegative")
    return arr


def entropy(counts) -> float:
    """Shannon entropy in bits of a class count vector or mapping."""
    arr = _as_counts(counts)
    total = arr.sum()
    if total <= 0:
        raise ValueError("entropy of an empty count vector")
    p = arr[arr > 0] / total
    return float(max(0.0, -(p * np.log2(p)).sum()))


def _xlogx(a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a, dtype=float)
    pos = a > 0
    out[pos] = a[pos] * np.log2(a[pos])
    return out


def _weighted_entropy(rows: np.ndarray) -> np.ndarray:
    """size * H(row) for each row of class counts (last axis)."""
    sizes = rows.sum(axis=-1)
    return _xlogx(sizes) - _xlogx(rows).sum(axis=-1)


@dataclass(frozen=True)
class SplitScore:
    gain: float
    split_info: float

    @property
    def gain_ratio(self) -> float:
        return self.gain / self.split_info if self.split_info > EPS else 0.0

    def value(self, criterion: Criterion) -> float:
        return self.gain if Criterion(criterion) is Criterion.GAIN else self.gain_ratio


def score_table(table: np.ndarray) -> SplitScore:
    """Score a partition given as a (cells x classes) count matrix."""
    table = np.asarray(table, dtype=float)
    n = table.sum()
    if n <= 0:
        raise ValueError("cannot score an empty partition")
    sizes = table.sum(axis=1)
    h_all = entropy(table.sum(axis=0))
    cond = _weighted_entropy(table).sum() / n
    split_info = entropy(sizes[sizes > 0])
    return SplitScore(max(0.0, h_all - cond), split_info)


def partition_table(d: Dataset, feature: str, partition: Sequence[Iterable[str]]) -> np.ndarray:
    j = d.schema.index(feature)
    classes = d.classes
    cidx = {c: i for i, c in enumerate(classes)}
    cells = [frozenset(cell) for cell in partition]
    where = {}
    for k, cell in enumerate(cells):
        for v in cell:
            if v in where:
                raise ValueError(f"value {v!r} appears in more than one cell")
            where[v] = k
    table = np.zeros((len(cells), len(classes)))
    for inst in d.instances:
        v = inst.values[j]
        if v not in where:
            raise ValueError(f"partition does not cover observed value {v!r}")
        table[where[v], cidx[inst.label]] += 1
    return table


def split_gain(d: Dataset, feature: str, partition, criterion=Criterion.GAIN) -> float:
    return score_table(partition_table(d, feature, partition)).value(criterion)


def split_info(d: Dataset, feature: str, partition) -> float:
    return score_table(partition_table(d, feature, partition)).split_info


# -- value grouping ---------------------------------------------------------

@dataclass
class GroupingTrace:
    """Partitions and scores visited by the greedy merge, in order."""

    steps: list[tuple[tuple[tuple[str, ...], ...], float]] = field(default_factory=list)


def _group(table: np.ndarray, names: list[tuple[str, ...]], criterion: Criterion,
           trace: GroupingTrace | None = None):
    """Greedy agglomeration of partition cells. Returns (names, table)."""
    table = np.asarray(table, dtype=float)
    names = [tuple(sorted(g)) for g in names]
    n = table.sum()
    h_all = entropy(table.sum(axis=0))
    ratio = Criterion(criterion) is Criterion.GAIN_RATIO

    def cell_terms(rows):
        sizes = rows.sum(axis=-1)
        return _weighted_entropy(rows), -_xlogx(sizes / n)

    t, s = cell_terms(table)
    cur = score_table(table).value(criterion)
    if trace is not None:
        trace.steps.append((tuple(names), cur))
    while len(names) > 2:
        m = len(names)
        merged = table[:, None, :] + table[None, :, :]
        tm, sm = cell_terms(merged)
        cond = (t.sum() - t[:, None] - t[None, :] + tm) / n
        gain = np.maximum(h_all - cond, 0.0)
        if ratio:
            si = s.sum() - s[:, None] - s[None, :] + sm
            with np.errstate(divide="ignore", invalid="ignore"):
                score = np.where(si > EPS, gain / si, 0.0)
        else:
            score = gain
        iu = np.triu_indices(m, 1)
        best = score[iu].max()
        if best < cur - EPS:
            break
        sel = score[iu] >= best - EPS
        ties = zip(iu[0][sel].tolist(), iu[1][sel].tolist())
        i, j = min(ties, key=lambda p: tuple(sorted(names[p[0]] + names[p[1]])))
        new_name = tuple(sorted(names[i] + names[j]))
        keep = [k for k in range(m) if k not in (i, j)]
        names = [names[k] for k in keep] + [new_name]
        table = np.vstack([table[keep], table[i] + table[j]])
        t, s = cell_terms(table)
        cur = max(cur, float(score[i, j]))
        if trace is not None:
            trace.steps.append((tuple(names), float(score[i, j])))
    return names, table


def group_values(d: Dataset, feature: str, criterion=Criterion.GAIN_RATIO,
                 trace: GroupingTrace | None = None) -> list[frozenset[str]]:
    vals = sorted(d.value_domains[feature])
    if len(vals) < 2:
        raise ValueError(f"feature {feature} has fewer than 2 observed values")
    table = partition_table(d, feature, [[v] for v in vals])
    names, _ = _group(table, [(v,) for v in vals], criterion, trace)
    return sorted((frozenset(g) for g in names), key=lambda g: sorted(g))


# -- tree construction ------------------------------------------------------

def _counts_dict(vec: np.ndarray, classes: list[str]) -> dict[str, int]:
    return {classes[k]: int(c) for k, c in enumerate(vec) if c > 0}


def _consistent(X: np.ndarray, y: np.ndarray) -> bool:
    """True when identical feature vectors always carry the same class."""
    rows = np.unique(X, axis=0).shape[0]
    return rows == np.unique(np.column_stack([X, y]), axis=0).shape[0]


def build_tree(d: Dataset, cfg: InductionConfig | None = None) -> DecisionTree:
    cfg = cfg or InductionConfig()
    if len(d) == 0:
        raise TreeError("cannot induce a tree from zero instances")
    enc = d.encoded
    X, y = enc.X, enc.y
    nclass = len(enc.classes)
    fallback = d.majority_class()
    names = d.schema.names

    def best_split(idx: np.ndarray):
        ycls = y[idx]
        candidates, zero_gain = [], []
        for j in range(len(names)):
            col = X[idx, j]
            vals = np.unique(col)
            if len(vals) < 2:
                continue
            flat = np.bincount(col * nclass + ycls, minlength=(col.max() + 1) * nclass)
            table = flat.reshape(-1, nclass)[vals].astype(float)
            groups = [(enc.values[j][v],) for v in vals]
            singletons = groups
            if cfg.grouping and len(vals) > 2:
                groups, table = _group(table, groups, cfg.criterion)
            sc = score_table(table)
            if sc.gain > EPS:
                candidates.append((j, groups, sc))
            elif not zero_gain:
                zero_gain.append((j, singletons, sc))
        if not candidates:
            # impure but every test scores zero (XOR-like): split on the first
            # varying feature, only when the subset holds no contradictions
            if zero_gain and _consistent(X[idx], ycls):
                return zero_gain[0]
            return None
        if cfg.criterion is Criterion.GAIN_RATIO:
            # only tests with at least average gain compete on ratio
            avg = sum(c[2].gain for c in candidates) / len(candidates)
            candidates = [c for c in candidates if c[2].gain >= avg - EPS]
        best = candidates[0]
        for c in candidates[1:]:
            if c[2].value(cfg.criterion) > best[2].value(cfg.criterion) + EPS:
                best = c
        return best

    def grow(idx: np.ndarray) -> Tree:
        counts = np.bincount(y[idx], minlength=nclass)
        cdict = _counts_dict(counts, enc.classes)
        label = enc.classes[int(np.argmax(counts))]
        if np.count_nonzero(counts) == 1 or len(idx) < cfg.min_split:
            return Leaf(label, cdict)
        split = best_split(idx)
        if split is None:
            return Leaf(label, cdict)
        j, groups, _ = split
        lookup = {enc.values[j].index(v): k for k, g in enumerate(groups) for v in g}
        cell = np.array([lookup[v] for v in X[idx, j]])
        branches = []
        for k, g in enumerate(groups):
            branches.append((frozenset(g), grow(idx[cell == k])))
        branches.sort(key=lambda b: sorted(b[0]))
        return Node(names[j], branches, fallback, cdict)

    root = grow(np.arange(len(d)))
    tree = DecisionTree(root, d.schema, fallback)
    if cfg.prune:
        tree = prune(tree, cfg.prune_cf)
    return tree


def classify(tree: DecisionTree, inst: Instance) -> str:
    node = tree.root
    index = {name: i for i, name in enumerate(tree.schema.names)}
    while isinstance(node, Node):
        nxt = node.route(inst.values[index[node.feature]])
        if nxt is None:
            return node.fallback
        node = nxt
    return node.label


def training_accuracy(tree: DecisionTree, d: Dataset) -> float:
    return sum(classify(tree, i) == i.label for i in d.instances) / len(d)


def count_nodes(tree: DecisionTree | Tree) -> int:
    node = tree.root if isinstance(tree, DecisionTree) else tree
    if isinstance(node, Leaf):
        return 1
    return 1 + sum(count_nodes(sub) for _, sub in node.branches)


def iter_nodes(tree: DecisionTree | Tree, path=()):
    """Yield (path, node) pairs; path is a tuple of (feature, value_set)."""
    node = tree.root if isinstance(tree, DecisionTree) else tree
    yield path, node
    if isinstance(node, Node):
        for values, sub in node.branches:
            yield from iter_nodes(sub, path + ((node.feature, values),))


# -- pessimistic pruning ----------------------------------------------------

def pessimistic_rate(errors: float, n: float, cf: float = 0.25) -> float:
    """Upper confidence limit (level cf) of the binomial error rate."""
    if n <= 0:
        return 1.0
    if errors >= n:
        return 1.0
    if errors <= 0:
        return 1.0 - cf ** (1.0 / n)
    return float(beta.ppf(1.0 - cf, errors + 1, n - errors))


def pessimistic_errors(errors: float, n: float, cf: float = 0.25) -> float:
    return n * pessimistic_rate(errors, n, cf) if n > 0 else 0.0


def _leaf_estimate(counts: dict[str, int], cf: float) -> float:
    n = sum(counts.values())
    return pessimistic_errors(n - max(counts.values(), default=0), n, cf)


def prune(tree: DecisionTree, cf: float = 0.25) -> DecisionTree:
    """Collapse subtrees whose estimated error is no better than a leaf's."""

    def walk(node: Tree) -> tuple[Tree, float]:
        if isinstance(node, Leaf):
            return node, _leaf_estimate(node.counts, cf)
        branches, est = [], 0.0
        for values, sub in node.branches:
            new, e = walk(sub)
            branches.append((values, new))
            est += e
        as_leaf = _leaf_estimate(node.counts, cf)
        if node.counts and as_leaf <= est + EPS:
            return Leaf(majority(node.counts), dict(node.counts)), as_leaf
        return Node(node.feature, branches, node.fallback, dict(node.counts)), est

    root, _ = walk(tree.root)
    return DecisionTree(root, tree.schema, tree.fallback)


# -- text form --------------------------------------------------------------

def _test_text(feature: str, values: frozenset[str]) -> str:
    vals = sorted(values)
    if len(vals) == 1:
        return f"{feature} = {vals[0]}"
    return f"{feature} in {{{','.join(vals)}}}"


def render_tree(tree: DecisionTree, footer: bool = True) -> str:
    lines = ["Decision Tree:", ""]
    if isinstance(tree.root, Leaf):
        lines.append(tree.root.label)

    def walk(node: Node, depth: int):
        for values, sub in node.branches:
            prefix = "|   " * depth + _test_text(node.feature, values)
            if isinstance(sub, Leaf):
                lines.append(f"{prefix}: {sub.label}")
            else:
                lines.append(f"{prefix}:")
                walk(sub, depth + 1)

    if isinstance(tree.root, Node):
        walk(tree.root, 0)
    if footer:
        lines += ["", f"Default class: {tree.fallback}"]
    return "\n".join(lines) + "\n"


# greedy: "}" may itself be a member, as in {I,A,},O,E}
_BRANCH = re.compile(r"^(?P<feat>\S+)\s+(?:=\s*(?P<one>\S+)|in\s*\{(?P<many>.*)\})\s*:\s*(?P<cls>\S+)?$")


def _logical_lines(text: str):
    buf, start = "", 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not buf:
            if not raw.strip():
                continue
            start = lineno
            buf = raw.rstrip()
        else:
            buf += raw.strip()
        if buf.endswith(","):
            continue
        yield start, buf
        buf = ""
    if buf:
        raise TreeError(f"line {start}: unterminated value set")


def parse_tree(text: str, schema: Schema, default: str | None = None) -> DecisionTree:
    """Read the indented listing produced by :func:`render_tree`."""
    entries = []  # (lineno, depth, feature, values, class or None)
    root_label = None
    for lineno, line in _logical_lines(text):
        stripped = line.strip()
        if stripped == "Decision Tree:":
            continue
        if stripped.startswith("Default class:"):
            default = stripped.split(":", 1)[1].strip()
            continue
        if stripped.startswith("#"):
            continue
        depth = 0
        body = line
        while body.startswith("|"):
            body = body[1:].lstrip(" ")
            depth += 1
        body = body.strip()
        m = _BRANCH.match(body)
        if not m:
            if depth == 0 and not entries and len(body.split()) == 1:
                root_label = body
                continue
            raise TreeError(f"line {lineno}: cannot read tree line {stripped!r}")
        feat = m["feat"]
        if feat not in schema.names:
            raise TreeError(f"line {lineno}: unknown feature {feat!r}")
        if m["one"] is not None:
            values = frozenset([m["one"]])
        else:
            values = frozenset(v.strip() for v in m["many"].split(",") if v.strip())
        if not values:
            raise TreeError(f"line {lineno}: empty value set")
        entries.append((lineno, depth, feat, values, m["cls"]))

    if root_label is not None:
        if entries:
            raise TreeError("tree has both a root leaf and branches")
        return DecisionTree(Leaf(root_label), schema, default or root_label)
    if not entries:
        raise TreeError("empty tree")

    leaf_labels = Counter(e[4] for e in entries if e[4])
    fallback = default or majority(leaf_labels)
    pos = 0

    def node_at(depth: int) -> Node:
        nonlocal pos
        branches, feature = [], None
        while pos < len(entries) and entries[pos][1] == depth:
            lineno, _, feat, values, cls = entries[pos]
            if feature is None:
                feature = feat
            elif feat != feature:
                raise TreeError(f"line {lineno}: sibling branches test {feature} and {feat}")
            if any(values & v for v, _ in branches):
                raise TreeError(f"line {lineno}: overlapping value sets")
            pos += 1
            if cls is not None:
                branches.append((values, Leaf(cls)))
            else:
                if pos >= len(entries) or entries[pos][1] != depth + 1:
                    raise TreeError(f"line {lineno}: branch has neither class nor subtree")
                branches.append((values, node_at(depth + 1)))
        return Node(feature, branches, fallback)

    root = node_at(0)
    if pos != len(entries):
        raise TreeError(f"line {entries[pos][0]}: bad indentation")
    return DecisionTree(root, schema, fallback)
