"""Stratified k-fold cross-validation, baselines and error tables."""
from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .dataset import Dataset
from .induction import InductionConfig, build_tree, classify
from .rules import predict_rules, tree_to_rules
from .tables import Comparison, ErrorTable, compare, render_errors  # noqa: F401


@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    stratified: bool
    assignments: tuple[int, ...]

    def test_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.assignments) if f == fold]

    def train_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.assignments) if f != fold]

    def sizes(self) -> list[int]:
        c = Counter(self.assignments)
        return [c[f] for f in range(self.k)]


def make_folds(d: Dataset, k: int = 10, seed: int = 0, stratified: bool = True) -> FoldPlan:
    n = len(d)
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > n:
        raise ValueError(f"cannot make {k} folds from {n} instances")
    rng = random.Random(seed)
    if stratified:
        by_class = defaultdict(list)
        for i, inst in enumerate(d.instances):
            by_class[inst.label].append(i)
        order = []
        for c in sorted(by_class):
            members = by_class[c]
            rng.shuffle(members)
            order.extend(members)
    else:
        order = list(range(n))
        rng.shuffle(order)
    # dealing consecutive positions round-robin keeps both the overall and
    # the per-class fold sizes within one of each other
    assign = [0] * n
    for pos, i in enumerate(order):
        assign[i] = pos % k
    return FoldPlan(k, seed, stratified, tuple(assign))


@dataclass
class EvalReport:
    per_fold_accuracy: list[float]
    table: ErrorTable
    fold_sizes: list[int] = field(default_factory=list)

    @property
    def mean_accuracy(self) -> float:
        return sum(self.per_fold_accuracy) / len(self.per_fold_accuracy)

    @property
    def per_class_errors(self) -> dict[str, tuple[int, float]]:
        t = self.table
        return {c: (t.errors.get(c, 0), t.percent(c)) for c in sorted(t.totals)}

    @property
    def confusion(self) -> Counter:
        return self.table.confusion

    def render(self, order=None, labels=None) -> str:
        lines = [f"folds: {len(self.per_fold_accuracy)}",
                 "fold accuracy: " + " ".join(f"{a:.4f}" for a in self.per_fold_accuracy),
                 f"mean accuracy: {self.mean_accuracy:.4f}", ""]
        return "\n".join(lines) + "\n" + render_errors(self.table, order, labels)

    def csv(self) -> str:
        lines = ["key,value", f"mean_accuracy,{self.mean_accuracy:.6f}"]
        lines += [f"fold_{i}_accuracy,{a:.6f}" for i, a in enumerate(self.per_fold_accuracy)]
        lines.append(f"total_errors,{self.table.total_errors}")
        for c, (e, pct) in self.per_class_errors.items():
            lines.append(f"errors_{c},{e}")
            lines.append(f"percent_{c},{pct:.4f}")
        return "\n".join(lines) + "\n"


class FoldError(RuntimeError):
    def __init__(self, fold: int, cause: Exception):
        self.fold = fold
        super().__init__(f"fold {fold}: {cause}")


def _fit_predict(train: Dataset, test: Dataset, cfg: InductionConfig, learner: str) -> list[str]:
    tree = build_tree(train, cfg)
    if learner == "tree":
        return [classify(tree, inst) for inst in test.instances]
    if learner == "rules":
        return predict_rules(tree_to_rules(tree, train, cfg.prune_cf), test)
    raise ValueError(f"unknown learner {learner!r}")


def cross_validate(d: Dataset, k: int = 10, seed: int = 0, cfg: InductionConfig | None = None,
                   stratified: bool = True, learner: str = "tree",
                   name: str = "C4.5") -> EvalReport:
    cfg = cfg or InductionConfig()
    plan = make_folds(d, k, seed, stratified)
    accs, sizes, pairs = [], [], []
    for fold in range(k):
        test_idx = plan.test_indices(fold)
        test = d.subset(test_idx)
        try:
            preds = _fit_predict(d.subset(plan.train_indices(fold)), test, cfg, learner)
        except Exception as exc:
            raise FoldError(fold, exc) from exc
        truth = test.labels()
        accs.append(sum(p == t for p, t in zip(preds, truth)) / len(truth))
        sizes.append(len(truth))
        pairs.extend(zip(truth, preds))
    return EvalReport(accs, ErrorTable.from_pairs(name, pairs), sizes)


def baseline_from_counts(counts, kind: str = "prob_matching") -> float:
    counts = dict(counts)
    n = sum(counts.values())
    if n <= 0:
        raise ValueError("no instances")
    ps = [c / n for c in counts.values()]
    if kind == "majority":
        return max(ps)
    if kind == "prob_matching":
        return sum(p * p for p in ps)
    raise ValueError(f"unknown baseline {kind!r}")


def baseline_accuracy(d: Dataset, kind: str = "prob_matching") -> float:
    return baseline_from_counts(d.class_counts, kind)
