"""Category discovery from value/class co-occurrence.

Each value of a feature is described by its distribution over classes; values
are compared with a value difference metric and clustered agglomeratively.
The value sets chosen by a grown tree can be read off as categories too.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import Dataset
from .induction import DecisionTree, Node, iter_nodes

METRICS = ("L1", "L2")
LINKAGES = ("single", "average", "complete")
TIE = 1e-12


@dataclass
class ContingencyTable:
    feature: str
    classes: tuple[str, ...]
    rows: dict[str, dict[str, int]]

    @property
    def row_totals(self) -> dict[str, int]:
        return {v: sum(r.values()) for v, r in self.rows.items()}

    @property
    def values(self) -> list[str]:
        return sorted(self.rows)

    def distribution(self, value: str) -> np.ndarray:
        row = self.rows.get(value)
        if row is None:
            raise KeyError(f"value {value!r} not in table for {self.feature}")
        total = sum(row.values())
        if total == 0:
            raise ValueError(f"value {value!r} has no occurrences")
        return np.array([row.get(c, 0) / total for c in self.classes])

    def render(self) -> str:
        width = max([len(v) for v in self.rows] + [len(self.feature)])
        cw = max([len(c) for c in self.classes] + [5])
        head = self.feature.ljust(width) + " " + " ".join(c.rjust(cw) for c in self.classes) + " " + "total".rjust(cw)
        lines = [head]
        for v in self.values:
            row = self.rows[v]
            cells = " ".join(str(row.get(c, 0)).rjust(cw) for c in self.classes)
            lines.append(f"{v.ljust(width)} {cells} {str(sum(row.values())).rjust(cw)}")
        return "\n".join(lines) + "\n"


def contingency(d: Dataset, feature: str) -> ContingencyTable:
    j = d.schema.index(feature)
    classes = d.classes
    rows: dict[str, dict[str, int]] = {}
    for inst in d.instances:
        row = rows.setdefault(inst.values[j], {c: 0 for c in classes})
        row[inst.label] += 1
    return ContingencyTable(feature, classes, dict(sorted(rows.items())))


def value_distance(t: ContingencyTable, v1: str, v2: str, metric: str = "L1") -> float:
    p, q = t.distribution(v1), t.distribution(v2)
    diff = np.abs(p - q)
    if metric == "L1":
        return float(diff.sum())
    if metric == "L2":
        return float(np.sqrt((diff ** 2).sum()))
    raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    height: float
    members: tuple[str, ...]


@dataclass
class Dendrogram:
    """Binary merge tree. Leaves are ids 0..n-1; merge i creates id n+i."""

    leaves: tuple[str, ...]
    merges: list[Merge] = field(default_factory=list)
    metric: str = "L1"
    linkage: str = "average"

    def members(self, node: int) -> tuple[str, ...]:
        n = len(self.leaves)
        return (self.leaves[node],) if node < n else self.merges[node - n].members

    @property
    def root(self) -> int:
        return len(self.leaves) + len(self.merges) - 1

    def csv(self) -> str:
        n = len(self.leaves)

        def name(i):
            return self.leaves[i] if i < n else f"#{i}"

        lines = ["step,id,left,right,height,members"]
        for k, m in enumerate(self.merges):
            lines.append(f"{k},#{n + k},{name(m.left)},{name(m.right)},{m.height:.6f},"
                         f"{' '.join(m.members)}")
        return "\n".join(lines) + "\n"

    def render(self, width: int = 40) -> str:
        return render_dendrogram(self, width)


def cluster_values(t: ContingencyTable, metric: str = "L1", linkage: str = "average") -> Dendrogram:
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; choose from {LINKAGES}")
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")
    totals = t.row_totals
    dropped = [v for v in t.values if totals[v] == 0]
    if dropped:
        warnings.warn(f"dropping zero-count values: {', '.join(dropped)}", stacklevel=2)
    leaves = tuple(v for v in t.values if totals[v] > 0)
    n = len(leaves)
    if n < 2:
        raise ValueError(f"need at least 2 values with occurrences to cluster, have {n}")

    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = value_distance(t, leaves[i], leaves[j], metric)

    active = {i: (leaves[i],) for i in range(n)}
    size = {i: 1 for i in range(n)}
    dist = {(i, j): D[i, j] for i in range(n) for j in range(i + 1, n)}
    dg = Dendrogram(leaves, [], metric, linkage)
    next_id = n
    while len(active) > 1:
        best = min(dist.values())
        ties = [p for p, v in dist.items() if v <= best + TIE]
        a, b = min(ties, key=lambda p: tuple(sorted(active[p[0]] + active[p[1]])))
        if active[b] < active[a]:
            a, b = b, a
        members = tuple(sorted(active[a] + active[b]))
        dg.merges.append(Merge(a, b, float(dist[(min(a, b), max(a, b))]), members))
        new = next_id
        next_id += 1
        for c in list(active):
            if c in (a, b):
                continue
            da, db = dist[(min(a, c), max(a, c))], dist[(min(b, c), max(b, c))]
            if linkage == "single":
                dnew = min(da, db)
            elif linkage == "complete":
                dnew = max(da, db)
            else:
                dnew = (size[a] * da + size[b] * db) / (size[a] + size[b])
            dist[(c, new)] = dnew
        for key in [k for k in dist if a in k or b in k]:
            del dist[key]
        active[new] = members
        size[new] = size[a] + size[b]
        del active[a], active[b], size[a], size[b]
    return dg


@dataclass
class CategoryPartition:
    feature: str
    groups: list[frozenset[str]]
    source: str
    path: tuple = ()

    def named(self) -> dict[str, frozenset[str]]:
        return {f"g{i}": g for i, g in enumerate(self.groups, 1)}

    def render(self) -> str:
        lines = [f"{name}: {{{','.join(sorted(g))}}}" for name, g in self.named().items()]
        return "\n".join(lines) + "\n"


def cut(dg: Dendrogram, k: int | None = None, height: float | None = None,
        feature: str = "") -> CategoryPartition:
    n = len(dg.leaves)
    if (k is None) == (height is None):
        raise ValueError("give exactly one of k or height")
    if k is not None:
        if not 1 <= k <= n:
            raise ValueError(f"k must lie in [1, {n}], got {k}")
        applied = dg.merges[:n - k]
        source = f"dendrogram_cut(k={k})"
    else:
        if height < 0:
            raise ValueError("height must be nonnegative")
        applied = [m for m in dg.merges if m.height <= height + TIE]
        source = f"dendrogram_cut(height={height:g})"
    parent = list(range(n + len(dg.merges)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for idx, m in enumerate(dg.merges):
        if m in applied:
            parent[find(m.left)] = n + idx
            parent[find(m.right)] = n + idx
    groups: dict[int, set[str]] = {}
    for i, leaf in enumerate(dg.leaves):
        groups.setdefault(find(i), set()).add(leaf)
    ordered = sorted((frozenset(g) for g in groups.values()), key=lambda g: sorted(g))
    return CategoryPartition(feature, ordered, source)


def categories_from_tree(tree: DecisionTree) -> list[CategoryPartition]:
    out = []
    for path, node in iter_nodes(tree):
        if isinstance(node, Node):
            out.append(CategoryPartition(node.feature, [v for v, _ in node.branches],
                                         "tree_grouping", path))
    return out


def render_dendrogram(dg: Dendrogram, width: int = 40) -> str:
    """Sideways tree: root on the left, one leaf per line on the right."""
    n = len(dg.leaves)
    if not dg.merges:
        return "".join(f"-- {leaf}\n" for leaf in dg.leaves)
    hmax = max(m.height for m in dg.merges)

    def col(node: int) -> int:
        if node < n:
            return width
        h = dg.merges[node - n].height
        if hmax <= 0:
            return 2
        return 2 + int(round((1.0 - h / hmax) * (width - 4)))

    order: list[int] = []

    def leaves_of(node: int):
        if node < n:
            order.append(node)
        else:
            m = dg.merges[node - n]
            leaves_of(m.left)
            leaves_of(m.right)

    leaves_of(dg.root)
    rows = {leaf: 2 * r for r, leaf in enumerate(order)}
    nrows = 2 * len(order) - 1
    grid = [[" "] * (width + 1) for _ in range(nrows)]

    def row(node: int) -> int:
        if node < n:
            return rows[node]
        m = dg.merges[node - n]
        return (row(m.left) + row(m.right)) // 2

    def draw(node: int):
        if node < n:
            return
        m = dg.merges[node - n]
        c = col(node)
        r1, r2 = row(m.left), row(m.right)
        for r in range(r1, r2 + 1):
            grid[r][c] = "|"
        for child, r in ((m.left, r1), (m.right, r2)):
            grid[r][c] = "+"
            for x in range(c + 1, col(child)):
                grid[r][x] = "-"
            draw(child)

    draw(dg.root)
    r0 = row(dg.root)
    for x in range(0, col(dg.root)):
        grid[r0][x] = "-"
    lines = []
    for r in range(nrows):
        line = "".join(grid[r])
        if r % 2 == 0:
            line = line[:width] + "-> " + dg.leaves[order[r // 2]]
        lines.append(line.rstrip())
    return "\n".join(lines) + "\n"
