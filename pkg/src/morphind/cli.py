"""``morphind`` command line entry point.

Exit status: 0 on success, 1 on usage errors, 2 on data or parse errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dataset as ds
from .dataset import CorpusError, Dataset, Schema
from .discovery import categories_from_tree, cluster_values, contingency, cut
from .evaluation import FoldError, baseline_accuracy, cross_validate
from .induction import InductionConfig, TreeError, build_tree, classify, parse_tree, render_tree
from .rules import (RuleSyntaxError, bundled_text, evaluate_ruleset, parse_rules, predict_rules,
                    render_rules, tree_to_rules)
from .syngen import GenerationLog, GeneratorConfig, generate
from .tables import ErrorTable, compare, render_errors

PROG = "morphind"


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _formatter(prog):
    return argparse.HelpFormatter(prog, width=80, max_help_position=30)


# -- shared helpers ---------------------------------------------------------

def _read(path: str) -> str:
    if path.startswith("bundled:"):
        try:
            return bundled_text(path[len("bundled:"):])
        except FileNotFoundError:
            raise DataError(f"no bundled file {path[len('bundled:'):]!r}") from None
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _schema_arg(spec: str | None) -> Schema | None:
    if spec is None:
        return None
    if spec in ds.PRESETS:
        return ds.PRESETS[spec]
    return Schema.parse(_read(spec))


def _load_corpus(path: str, schema_spec: str | None) -> Dataset:
    text = _read(path)
    schema = _schema_arg(schema_spec) or ds.read_schema_header(text) or ds.DIMINUTIVE12
    return ds.parse_corpus(text, schema)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _induction_config(args) -> InductionConfig:
    return InductionConfig(criterion=args.criterion, grouping=not args.no_grouping,
                           min_split=args.min_split, prune=args.prune, prune_cf=args.cf)


def _is_diminutive(d: Dataset) -> bool:
    return d.class_domain <= set(ds.SUFFIX_ORDER)


def _labels(d: Dataset):
    if _is_diminutive(d):
        return ds.SUFFIX_ORDER, ds.SUFFIX_LABELS
    return None, None


# -- subcommands ------------------------------------------------------------

def cmd_gen(args):
    text = _read(args.config) if args.config else ""
    cfg = GeneratorConfig.from_text(
        text, n=args.n, seed=args.seed, noise_rate=args.noise, mono_poly_mix=args.mono,
        stress_policy=args.stress, trisyllable_rate=args.tri)
    oracle = parse_rules(_read(args.oracle), ds.DIMINUTIVE12)
    log = GenerationLog()
    d = generate(cfg, oracle, log)
    _emit(ds.render_corpus(d, header=True), args.out)
    if args.log:
        lines = [f"{c}={log.labels[c]}" for c in sorted(log.labels)]
        lines.append(f"flipped={log.flipped}")
        Path(args.log).write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_project(args):
    d = _load_corpus(args.input, args.schema)
    if args.corpus:
        keep = ds.CORPORA[args.corpus]
    else:
        keep = [k.strip() for k in args.keep.split(",") if k.strip()]
    _emit(ds.render_corpus(ds.project(d, keep), header=True), args.out)


def cmd_train(args):
    d = _load_corpus(args.input, args.schema)
    tree = build_tree(d, _induction_config(args))
    text = render_tree(tree)
    _emit(text, args.out)
    if args.out:
        sys.stdout.write(text)
    if args.categories:
        sys.stdout.write("\nCategories:\n")
        for part in categories_from_tree(tree):
            where = " & ".join(f"{f} in {{{','.join(sorted(v))}}}" for f, v in part.path) or "root"
            groups = " | ".join("{" + ",".join(sorted(g)) + "}" for g in part.groups)
            sys.stdout.write(f"{part.feature} @ {where}: {groups}\n")


def _predict_out(d: Dataset, preds, fmt: str) -> str:
    if fmt == "csv":
        lines = ["index,true,predicted"]
        lines += [f"{i},{inst.label},{p}" for i, (inst, p) in enumerate(zip(d.instances, preds))]
    else:
        lines = list(preds)
    return "\n".join(lines) + "\n"


def cmd_classify(args):
    d = _load_corpus(args.input, args.schema)
    tree = parse_tree(_read(args.tree), d.schema)
    preds = [classify(tree, inst) for inst in d.instances]
    _emit(_predict_out(d, preds, args.format), args.out)


def cmd_rules(args):
    if args.action == "derive":
        if not args.input:
            raise UsageError(f"{PROG} rules derive: --in is required")
        d = _load_corpus(args.input, args.schema)
        cfg = _induction_config(args)
        rs = tree_to_rules(build_tree(d, cfg), d, cfg.prune_cf)
        _emit(render_rules(rs), args.out)
        return
    if not args.rules:
        raise UsageError(f"{PROG} rules {args.action}: --rules is required")
    if args.action == "parse":
        schema = _schema_arg(args.schema) or ds.DIMINUTIVE12
        if args.input:
            schema = _load_corpus(args.input, args.schema).schema
        _emit(render_rules(parse_rules(_read(args.rules), schema)), args.out)
        return
    if not args.input:
        raise UsageError(f"{PROG} rules apply: --in is required")
    d = _load_corpus(args.input, args.schema)
    rs = parse_rules(_read(args.rules), d.schema)
    if args.evaluate:
        order, labels = _labels(d)
        _emit(render_errors(evaluate_ruleset(rs, d), order, labels), args.out)
    else:
        _emit(_predict_out(d, predict_rules(rs, d), args.format), args.out)


def cmd_crossval(args):
    d = _load_corpus(args.input, args.schema)
    rep = cross_validate(d, args.k, args.seed, _induction_config(args),
                         stratified=not args.no_stratify, learner=args.learner)
    if args.format == "csv":
        text = rep.csv()
        text += f"baseline_majority,{baseline_accuracy(d, 'majority'):.6f}\n"
        text += f"baseline_prob_matching,{baseline_accuracy(d, 'prob_matching'):.6f}\n"
    else:
        order, labels = _labels(d)
        text = rep.render(order, labels)
        text += (f"\nbaseline (majority): {baseline_accuracy(d, 'majority'):.4f}\n"
                 f"baseline (probability matching): {baseline_accuracy(d, 'prob_matching'):.4f}\n")
    _emit(text, args.out)


def cmd_cluster(args):
    d = _load_corpus(args.input, args.schema)
    table = contingency(d, args.feature)
    dg = cluster_values(table, args.metric, args.linkage)
    part = None
    if args.cut is not None or args.height is not None:
        part = cut(dg, k=args.cut, height=args.height, feature=args.feature)
    if args.format == "csv":
        text = dg.csv()
        if part:
            text += "\ngroup,value\n" + "".join(
                f"{name},{v}\n" for name, g in part.named().items() for v in sorted(g))
    else:
        text = table.render() + "\n" + dg.render()
        if part:
            text += f"\n{part.source}:\n" + part.render()
    _emit(text, args.out)


def _table_for(spec: str, name: str, d: Dataset, args):
    if spec == "induced":
        train = _load_corpus(args.train, args.schema) if args.train else d
        cfg = _induction_config(args)
        rs = tree_to_rules(build_tree(train, cfg), train, cfg.prune_cf)
        return evaluate_ruleset(project_rules(rs, d), d, name)
    if spec == "cv":
        return cross_validate(d, args.k, args.seed, _induction_config(args), name=name).table
    text = _read(spec)
    if spec.endswith(".tree"):
        tree = parse_tree(text, d.schema)
        return ErrorTable.from_pairs(name, ((i.label, classify(tree, i)) for i in d.instances))
    return evaluate_ruleset(parse_rules(text, d.schema), d, name)


def project_rules(rs, d: Dataset):
    """Re-home rules derived on another corpus onto ``d``'s schema."""
    if rs.schema == d.schema:
        return rs
    return parse_rules(render_rules(rs), d.schema)


def cmd_compare(args):
    d = _load_corpus(args.input, args.schema)
    names = args.names.split(",") if args.names else ["A", "B"]
    if len(names) != 2:
        raise UsageError(f"{PROG} compare: --names takes exactly two comma separated names")
    a = _table_for(args.a, names[0], d, args)
    b = _table_for(args.b, names[1], d, args)
    order, labels = _labels(d)
    cmp = compare(a, b, order)
    _emit(cmp.csv() if args.format == "csv" else cmp.render(labels), args.out)


# -- parser -----------------------------------------------------------------

def _add_io(p, needs_input=True):
    p.add_argument("--in", dest="input", required=needs_input, metavar="PATH",
                   help="corpus file ('-' for stdin, 'bundled:NAME' for shipped data)")
    p.add_argument("--schema", metavar="SPEC",
                   help="schema file or preset (diminutive12); default: corpus header, "
                        "else diminutive12")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")


def _add_learner(p):
    p.add_argument("--criterion", choices=["gain", "gain_ratio"], default="gain_ratio",
                   help="split criterion (default: gain_ratio)")
    p.add_argument("--no-grouping", action="store_true", help="one branch per value")
    p.add_argument("--min-split", type=int, default=2, metavar="N",
                   help="smallest subset that may be split (default: 2)")
    p.add_argument("--prune", action="store_true", help="pessimistic error pruning")
    p.add_argument("--cf", type=float, default=0.25,
                   help="pruning / rule confidence level (default: 0.25)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, formatter_class=_formatter,
                     description="Decision tree and rule induction for categorical "
                                 "linguistic instances.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, help_):
        return sub.add_parser(name, help=help_, description=help_, formatter_class=_formatter)

    p = add("gen", "generate a synthetic corpus labelled by a rule set")
    p.add_argument("--n", type=int, help="number of instances (default: 4000)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    p.add_argument("--noise", type=float, help="label noise rate (default: 0)")
    p.add_argument("--mono", type=float, help="share of monosyllables (default: 0.15)")
    p.add_argument("--stress", type=float, help="stress probability per syllable (default: 0.5)")
    p.add_argument("--tri", type=float, help="share of trisyllables among polysyllables "
                                             "(default: 0.5)")
    p.add_argument("--config", metavar="PATH", help="key=value generator config file")
    p.add_argument("--oracle", default="bundled:diminutive_rules.rules", metavar="PATH",
                   help="labelling rule file (default: bundled:diminutive_rules.rules)")
    p.add_argument("--out", metavar="PATH", help="write the corpus here instead of stdout")
    p.add_argument("--log", metavar="PATH", help="write per-class label counts here")
    p.set_defaults(func=cmd_gen)

    p = add("project", "keep a subset of features")
    _add_io(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--keep", metavar="F1,F2", help="comma separated feature names")
    g.add_argument("--corpus", choices=sorted(ds.CORPORA), help="named projection")
    p.set_defaults(func=cmd_project)

    p = add("train", "induce a decision tree")
    _add_io(p)
    _add_learner(p)
    p.add_argument("--categories", action="store_true",
                   help="also list the value groups used at each node")
    p.set_defaults(func=cmd_train)

    p = add("classify", "classify a corpus with a tree file")
    _add_io(p)
    p.add_argument("--tree", required=True, metavar="PATH", help="tree file")
    p.add_argument("--format", choices=["text", "csv"], default="text",
                   help="output format (default: text)")
    p.set_defaults(func=cmd_classify)

    p = add("rules", "derive, parse or apply rule sets")
    p.add_argument("action", choices=["derive", "parse", "apply"],
                   help="derive rules from a tree grown on --in, parse and re-render "
                        "--rules, or apply --rules to --in")
    _add_io(p, needs_input=False)
    _add_learner(p)
    p.add_argument("--rules", metavar="PATH", help="rule file (parse, apply)")
    p.add_argument("--evaluate", action="store_true",
                   help="apply: print a per-class error table instead of predictions")
    p.add_argument("--format", choices=["text", "csv"], default="text",
                   help="output format (default: text)")
    p.set_defaults(func=cmd_rules)

    p = add("crossval", "k-fold cross-validation of the tree learner")
    _add_io(p)
    _add_learner(p)
    p.add_argument("--k", type=int, default=10, help="number of folds (default: 10)")
    p.add_argument("--seed", type=int, default=0, help="fold seed (default: 0)")
    p.add_argument("--no-stratify", action="store_true", help="plain random folds")
    p.add_argument("--learner", choices=["tree", "rules"], default="tree",
                   help="evaluate the tree or the rules derived from it (default: tree)")
    p.add_argument("--format", choices=["text", "csv"], default="text",
                   help="output format (default: text)")
    p.set_defaults(func=cmd_crossval)

    p = add("cluster", "cluster the values of a feature by class distribution")
    _add_io(p)
    p.add_argument("--feature", required=True, help="feature to cluster")
    p.add_argument("--metric", choices=["L1", "L2"], default="L1",
                   help="distance between class distributions (default: L1)")
    p.add_argument("--linkage", choices=["single", "average", "complete"], default="average",
                   help="cluster linkage (default: average)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--cut", type=int, metavar="K", help="cut into K clusters")
    g.add_argument("--height", type=float, metavar="H", help="cut at height H")
    p.add_argument("--format", choices=["text", "csv"], default="text",
                   help="output format (default: text)")
    p.set_defaults(func=cmd_cluster)

    p = add("compare", "per-class error counts of two classifiers side by side")
    _add_io(p)
    _add_learner(p)
    p.add_argument("--a", required=True, metavar="SPEC",
                   help="rule file, tree file, 'induced' or 'cv'")
    p.add_argument("--b", required=True, metavar="SPEC", help="as --a")
    p.add_argument("--names", metavar="A,B", help="column names")
    p.add_argument("--train", metavar="PATH",
                   help="training corpus for 'induced' (default: --in)")
    p.add_argument("--k", type=int, default=10, help="folds for 'cv' (default: 10)")
    p.add_argument("--seed", type=int, default=0, help="fold seed for 'cv' (default: 0)")
    p.add_argument("--format", choices=["text", "csv"], default="text",
                   help="output format (default: text)")
    p.set_defaults(func=cmd_compare)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    except (DataError, CorpusError, RuleSyntaxError, TreeError, FoldError, ValueError,
            KeyError) as exc:
        sys.stderr.write(f"{PROG}: error: {exc}\n")
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
