"""Ordered if-then rule sets: a small line-based DSL, an interpreter, and
conversion of induced trees into rules.

DSL, one statement per line::

    SET obstruent = { p, t, k, s }
    RULE 5: IF c3 IN @obstruent THEN J
    RULE 3: IF c3 IN { N } THEN IF n2 IN { =, @ } THEN E ELSE K
    DEFAULT T
    OVERLAP first_match          # or: OVERLAP random <seed>

Set literals may mix tokens and ``@macro`` references. A set closes at the
first free-standing ``}`` that is not followed by another item, so ``}``
itself can be a member (``{ I, A, }, O }``, ``{ } }``). Tokens cannot
contain commas or whitespace.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable

import numpy as np

from .dataset import Dataset, Instance, Schema, majority
from .induction import EPS, DecisionTree, Leaf, iter_nodes, pessimistic_rate
from .tables import ErrorTable

FIRST_MATCH = "first_match"
RANDOM = "random"


class RuleSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int = 1):
        self.line, self.col = line, col
        super().__init__(f"line {line}, col {col}: {message}")


@dataclass(frozen=True)
class Condition:
    feature: str
    values: frozenset[str] = frozenset()
    macros: tuple[str, ...] = ()

    def expand(self, macros: dict[str, "ValueSet"]) -> frozenset[str]:
        out = set(self.values)
        for name in self.macros:
            out |= macros[name].resolve(macros)
        return frozenset(out)


@dataclass(frozen=True)
class ValueSet:
    name: str
    values: frozenset[str] = frozenset()
    macros: tuple[str, ...] = ()

    def resolve(self, macros: dict[str, "ValueSet"], _seen=()) -> frozenset[str]:
        if self.name in _seen:
            raise ValueError(f"macro cycle through @{self.name}")
        out = set(self.values)
        for ref in self.macros:
            out |= macros[ref].resolve(macros, _seen + (self.name,))
        return frozenset(out)


@dataclass(frozen=True)
class Rule:
    """``IF conditions THEN label``; with ``inner`` set the rule reads
    ``IF conditions THEN (IF inner THEN inner_label ELSE label)``."""

    id: str
    conditions: tuple[Condition, ...]
    label: str
    inner: tuple[Condition, ...] = ()
    inner_label: str | None = None

    @property
    def labels(self) -> set[str]:
        return {self.label} | ({self.inner_label} if self.inner_label else set())


@dataclass
class RuleSet:
    schema: Schema
    rules: list[Rule]
    default: str
    macros: dict[str, ValueSet] = field(default_factory=dict)
    overlap: str = FIRST_MATCH
    seed: int = 0

    def __post_init__(self):
        self._compiled = None

    def _compile(self):
        if self._compiled is None:
            index = {n: i for i, n in enumerate(self.schema.names)}

            def comp(conds):
                return [(index[c.feature], c.expand(self.macros)) for c in conds]

            self._compiled = [(comp(r.conditions), comp(r.inner), r) for r in self.rules]
        return self._compiled

    def matching(self, inst: Instance) -> list[str]:
        """Decisions of every rule whose outer conditions hold, in rule order."""
        out = []
        v = inst.values
        for conds, inner, rule in self._compile():
            if all(v[j] in s for j, s in conds):
                if rule.inner_label is not None and all(v[j] in s for j, s in inner):
                    out.append(rule.inner_label)
                else:
                    out.append(rule.label)
        return out

    @property
    def classes(self) -> set[str]:
        out = {self.default}
        for r in self.rules:
            out |= r.labels
        return out


def apply_rules(rs: RuleSet, inst: Instance, rng: random.Random | None = None) -> str:
    if rs.overlap == FIRST_MATCH:
        v = inst.values
        for conds, inner, rule in rs._compile():
            if all(v[j] in s for j, s in conds):
                if rule.inner_label is not None and all(v[j] in s for j, s in inner):
                    return rule.inner_label
                return rule.label
        return rs.default
    hits = rs.matching(inst)
    if not hits:
        return rs.default
    rng = rng if rng is not None else random.Random(rs.seed)
    return hits[rng.randrange(len(hits))]


def predict_rules(rs: RuleSet, d: Dataset) -> list[str]:
    """Classify a whole dataset with one seeded generator per run."""
    rng = random.Random(rs.seed)
    return [apply_rules(rs, inst, rng) for inst in d.instances]


def evaluate_ruleset(rs: RuleSet, d: Dataset, name: str = "rules") -> ErrorTable:
    preds = predict_rules(rs, d)
    return ErrorTable.from_pairs(name, zip(d.labels(), preds))


# -- parsing ----------------------------------------------------------------

class _Scanner:
    def __init__(self, text: str, line: int):
        self.s, self.pos, self.line = text, 0, line

    def error(self, msg: str, at: int | None = None) -> RuleSyntaxError:
        return RuleSyntaxError(msg, self.line, (self.pos if at is None else at) + 1)

    def skip_ws(self):
        while self.pos < len(self.s) and self.s[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.s)

    def word(self, what: str = "word") -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.s) and not self.s[self.pos].isspace() and self.s[self.pos] not in ":=":
            self.pos += 1
        if start == self.pos:
            raise self.error(f"expected {what}")
        return self.s[start:self.pos]

    def expect(self, token: str):
        self.skip_ws()
        if self.s.startswith(token, self.pos):
            end = self.pos + len(token)
            if token.isalpha() and end < len(self.s) and not self.s[end].isspace():
                raise self.error(f"expected {token}")
            self.pos = end
            return
        raise self.error(f"expected {token!r}")

    def peek_keyword(self, kw: str) -> bool:
        self.skip_ws()
        end = self.pos + len(kw)
        return self.s.startswith(kw, self.pos) and (end == len(self.s) or self.s[end].isspace())

    def value_set(self) -> tuple[frozenset[str], tuple[str, ...], int]:
        """Either ``@macro`` or ``{ item, ... }``. Returns (tokens, macros, column)."""
        self.skip_ws()
        col = self.pos
        if self.s.startswith("@", self.pos):
            self.pos += 1
            return frozenset(), (self.word("macro name"),), col
        self.expect("{")
        items = []
        while True:
            self.skip_ws()
            if self.pos >= len(self.s):
                raise self.error("unterminated value set", col)
            rest = self.s[self.pos:]
            if _closes(rest, 0):
                self.pos += 1
                break
            comma = rest.find(",")
            close = _closing_brace(rest)
            if comma != -1 and (close == -1 or comma < close):
                item, self.pos = rest[:comma].strip(), self.pos + comma + 1
            elif close != -1:
                item, self.pos = rest[:close].strip(), self.pos + close
            else:
                raise self.error("unterminated value set", col)
            if not item:
                raise self.error("empty item in value set")
            if any(c.isspace() for c in item):
                raise self.error(f"missing comma in value set near {item!r}")
            items.append(item)
        toks = frozenset(i for i in items if not i.startswith("@") or len(i) == 1)
        macros = tuple(i[1:] for i in items if i.startswith("@") and len(i) > 1)
        if not toks and not macros:
            raise self.error("empty value set", col)
        return toks, macros, col


def _closes(rest: str, i: int) -> bool:
    # "}" closes the set unless it is glued to more text or another item
    # follows it ("{ } }" holds the single token "}")
    if rest[i] != "}" or (i + 1 < len(rest) and not rest[i + 1].isspace()):
        return False
    after = rest[i + 1:].lstrip()
    return not after or after[0] not in ",}"


def _closing_brace(rest: str) -> int:
    """Index of the set-closing brace within ``rest``, or -1."""
    for i in range(len(rest)):
        if _closes(rest, i):
            return i
    return -1


def parse_rules(text: str, schema: Schema) -> RuleSet:
    macros: dict[str, ValueSet] = {}
    macro_lines: dict[str, int] = {}
    refs: list[tuple[str, int, int]] = []  # macro name, line, col
    rules: list[Rule] = []
    default = None
    overlap, seed = FIRST_MATCH, 0

    def conditions(sc: _Scanner, rule_id: str) -> tuple[Condition, ...]:
        conds = {}
        while True:
            sc.skip_ws()
            fcol = sc.pos
            feat = sc.word("feature name")
            if feat not in schema.names:
                raise sc.error(f"unknown feature {feat!r}; valid names: {', '.join(schema.names)}", fcol)
            if feat in conds:
                raise sc.error(f"rule {rule_id} tests {feat} twice", fcol)
            sc.expect("IN")
            toks, mac, col = sc.value_set()
            refs.extend((m, sc.line, col + 1) for m in mac)
            conds[feat] = Condition(feat, toks, mac)
            if sc.peek_keyword("AND"):
                sc.expect("AND")
                continue
            return tuple(conds.values())

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        sc = _Scanner(raw, lineno)
        kw = sc.word("statement")
        if kw == "SET":
            name = sc.word("macro name")
            if name in macros:
                raise sc.error(f"macro {name} defined twice")
            sc.expect("=")
            toks, mac, col = sc.value_set()
            refs.extend((m, lineno, col + 1) for m in mac)
            macros[name] = ValueSet(name, toks, mac)
            macro_lines[name] = lineno
        elif kw == "RULE":
            rid = sc.word("rule id")
            sc.expect(":")
            sc.expect("IF")
            conds = conditions(sc, rid)
            sc.expect("THEN")
            inner, inner_label = (), None
            if sc.peek_keyword("IF"):
                sc.expect("IF")
                inner = conditions(sc, rid)
                sc.expect("THEN")
                inner_label = sc.word("class")
                sc.expect("ELSE")
            label = sc.word("class")
            rules.append(Rule(rid, conds, label, inner, inner_label))
        elif kw == "DEFAULT":
            if default is not None:
                raise sc.error("DEFAULT given twice")
            default = sc.word("class")
        elif kw == "OVERLAP":
            mode = sc.word("overlap policy")
            if mode == FIRST_MATCH:
                overlap = FIRST_MATCH
            elif mode == RANDOM:
                overlap = RANDOM
                s = sc.word("seed")
                try:
                    seed = int(s)
                except ValueError:
                    raise sc.error(f"seed must be an integer, got {s!r}") from None
            else:
                raise sc.error(f"unknown overlap policy {mode!r}")
        else:
            raise RuleSyntaxError(f"unknown statement {kw!r}", lineno, 1)
        if not sc.at_end():
            raise sc.error("unexpected trailing text")

    for name, line, col in refs:
        if name not in macros:
            raise RuleSyntaxError(f"undefined macro @{name}", line, col)
    for vs in macros.values():
        try:
            vs.resolve(macros)
        except ValueError as exc:
            raise RuleSyntaxError(str(exc), macro_lines[vs.name]) from None
    if default is None:
        raise RuleSyntaxError("missing DEFAULT statement", len(text.splitlines()) or 1)
    return RuleSet(schema, rules, default, macros, overlap, seed)


def _set_text(values: Iterable[str], macros: Iterable[str] = ()) -> str:
    macros = list(macros)
    # a "}" member must not sit last, where it would read as the closing brace
    values = sorted(values, key=lambda v: (v != "}", v))
    if len(macros) == 1 and not values:
        return f"@{macros[0]}"
    items = values + [f"@{m}" for m in macros]
    return "{ " + ", ".join(items) + " }"


def render_rules(rs: RuleSet) -> str:
    lines = []
    for vs in rs.macros.values():
        lines.append(f"SET {vs.name} = {_set_text(vs.values, vs.macros)}")
    if rs.macros:
        lines.append("")

    def conds(cs):
        return " AND ".join(f"{c.feature} IN {_set_text(c.values, c.macros)}" for c in cs)

    for r in rs.rules:
        if r.inner_label is not None:
            lines.append(f"RULE {r.id}: IF {conds(r.conditions)} THEN IF {conds(r.inner)} "
                         f"THEN {r.inner_label} ELSE {r.label}")
        else:
            lines.append(f"RULE {r.id}: IF {conds(r.conditions)} THEN {r.label}")
    lines.append(f"DEFAULT {rs.default}")
    lines.append(f"OVERLAP {rs.overlap}" + (f" {rs.seed}" if rs.overlap == RANDOM else ""))
    return "\n".join(lines) + "\n"


def bundled_text(name: str) -> str:
    return resources.files("morphind.data").joinpath(name).read_text(encoding="utf-8")


def load_bundled(name: str, schema: Schema) -> RuleSet:
    """Load one of the rule files shipped with the package."""
    return parse_rules(bundled_text(name), schema)


# -- tree to rules ----------------------------------------------------------

@dataclass
class DropStep:
    rule: int
    feature: str
    before: float
    after: float


def tree_to_rules(tree: DecisionTree, d: Dataset, cf: float = 0.25,
                  log: list[DropStep] | None = None) -> RuleSet:
    enc = d.encoded
    X, y = enc.X, enc.y
    names = d.schema.names
    index = {n: i for i, n in enumerate(names)}
    cidx = {c: i for i, c in enumerate(enc.classes)}

    def mask_for(feature: str, values: frozenset[str]) -> np.ndarray:
        j = index[feature]
        codes = [k for k, v in enumerate(enc.values[j]) if v in values]
        return np.isin(X[:, j], codes)

    candidates = []
    for path, node in iter_nodes(tree):
        if not isinstance(node, Leaf):
            continue
        conds: dict[str, frozenset[str]] = {}
        for feat, values in path:
            conds[feat] = conds[feat] & values if feat in conds else values
        candidates.append((conds, node.label))

    kept = {}
    for k, (conds, label) in enumerate(candidates):
        target = cidx.get(label, -1)
        masks = {f: mask_for(f, vs) for f, vs in conds.items()}

        def stats(feats):
            cover = np.ones(len(y), dtype=bool)
            for f in feats:
                cover &= masks[f]
            n = int(cover.sum())
            e = int((cover & (y != target)).sum())
            return pessimistic_rate(e, n, cf), n, e

        active = sorted(conds, key=index.__getitem__)
        rate, _, _ = stats(active)
        while active:
            trials = [(stats([g for g in active if g != f])[0], index[f], f) for f in active]
            best_rate, _, f = min(trials)
            if best_rate > rate + EPS:
                break
            assert best_rate <= rate + EPS
            if log is not None:
                log.append(DropStep(k, f, rate, best_rate))
            active.remove(f)
            rate = best_rate
        if not active:
            continue
        key = (tuple((f, tuple(sorted(conds[f]))) for f in active), label)
        if key not in kept:
            _, n, e = stats(active)
            kept[key] = (n, e)

    def order(item):
        (cond_key, label), (n, e) = item
        acc = (n - e) / n if n else 0.0
        return (label, -acc, -n, cond_key)

    rules, covered = [], np.zeros(len(y), dtype=bool)
    for i, ((cond_key, label), _) in enumerate(sorted(kept.items(), key=order), 1):
        conds = tuple(Condition(f, frozenset(vs)) for f, vs in cond_key)
        rules.append(Rule(str(i), conds, label))
        m = np.ones(len(y), dtype=bool)
        for f, vs in cond_key:
            m &= mask_for(f, frozenset(vs))
        covered |= m

    rest = [enc.classes[c] for c in y[~covered]]
    if rest:
        counts = {}
        for c in rest:
            counts[c] = counts.get(c, 0) + 1
        default = majority(counts)
    else:
        default = d.majority_class()
    return RuleSet(d.schema, rules, default)
