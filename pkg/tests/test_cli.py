import os
from pathlib import Path

import pytest

from morphind.cli import run
from morphind.dataset import DIMINUTIVE12, parse_corpus

GOLDEN = Path(__file__).parent / "golden"
COMMANDS = ["gen", "project", "train", "classify", "rules", "crossval", "cluster", "compare"]


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def corpora(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    full, nc, tree = root / "full.corpus", root / "nc.corpus", root / "nc.tree"
    assert run(["gen", "--n", "1500", "--seed", "4", "--out", str(full)]) == 0
    assert run(["project", "--keep", "n3,c3", "--in", str(full), "--out", str(nc)]) == 0
    assert run(["train", "--in", str(nc), "--out", str(tree)]) == 0
    return {"full": str(full), "nc": str(nc), "tree": str(tree), "root": root}


@pytest.mark.parametrize("command", [None] + COMMANDS)
def test_help_matches_golden(capsys, command):
    argv = [command, "--help"] if command else ["--help"]
    code, out, _ = call(capsys, *argv)
    assert code == 0
    path = GOLDEN / f"help_{command or 'main'}.txt"
    if os.environ.get("MORPHIND_UPDATE_GOLDEN"):
        path.write_text(out)
    assert out == path.read_text()


def invocations(c):
    return [
        ["gen", "--n", "50", "--seed", "2", "--noise", "0.1"],
        ["project", "--corpus", "SONC", "--in", c["full"]],
        ["train", "--in", c["nc"], "--categories"],
        ["train", "--in", c["full"], "--prune", "--criterion", "gain"],
        ["classify", "--in", c["nc"], "--tree", c["tree"]],
        ["classify", "--in", c["nc"], "--tree", "bundled:diminutive_nc.tree", "--format", "csv"],
        ["rules", "derive", "--in", c["nc"]],
        ["rules", "parse", "--rules", "bundled:diminutive_rules.rules"],
        ["rules", "apply", "--in", c["full"], "--rules", "bundled:handcrafted_baseline.rules",
         "--evaluate"],
        ["crossval", "--in", c["nc"], "--k", "5", "--seed", "7"],
        ["crossval", "--in", c["nc"], "--k", "3", "--learner", "rules", "--format", "csv"],
        ["cluster", "--in", c["full"], "--feature", "c3", "--cut", "2"],
        ["cluster", "--in", c["nc"], "--feature", "n3", "--height", "0.3", "--format", "csv"],
        ["compare", "--in", c["full"], "--a", "bundled:handcrafted_baseline.rules",
         "--b", "induced", "--names", "handcrafted,induced"],
        ["compare", "--in", c["nc"], "--a", "bundled:diminutive_nc.tree", "--b", "cv", "--k", "3"],
    ]


def test_every_subcommand_is_deterministic(capsys, corpora):
    seen = set()
    for argv in invocations(corpora):
        first = call(capsys, *argv)
        second = call(capsys, *argv)
        assert first[0] == 0, (argv, first[2])
        assert first == second, argv
        assert first[1]
        seen.add(argv[0])
    assert seen == set(COMMANDS)


def test_generated_corpus_reloads_with_header(corpora):
    text = Path(corpora["full"]).read_text()
    assert text.startswith("# schema: ")
    assert len(parse_corpus(text, DIMINUTIVE12)) == 1500


def test_crossval_example_prints_report(capsys, corpora):
    code, out, _ = call(capsys, "crossval", "--in", corpora["nc"], "--k", "10", "--seed", "7")
    assert code == 0
    assert "mean accuracy:" in out and "Total" in out


def test_cluster_example_prints_partition(capsys, corpora):
    code, out, _ = call(capsys, "cluster", "--in", corpora["full"], "--feature", "c3", "--cut", "2")
    assert code == 0
    groups = [ln for ln in out.splitlines() if ln.startswith("g")]
    assert len(groups) == 2
    sonorant = next(g for g in groups if ",n," in g.replace("{", ",").replace("}", ","))
    for tok in ("l", "r", "m"):
        assert f",{tok}," in sonorant.replace("{", ",").replace("}", ",")


def test_out_flag_writes_file(capsys, corpora):
    target = corpora["root"] / "rules.txt"
    code, out, _ = call(capsys, "rules", "derive", "--in", corpora["nc"], "--out", str(target))
    assert code == 0 and out == ""
    assert "DEFAULT" in target.read_text()


def test_stdin_input(capsys, monkeypatch, corpora):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO(Path(corpora["nc"]).read_text()))
    code, out, _ = call(capsys, "train", "--in", "-")
    assert code == 0 and out.startswith("Decision Tree:")


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["train"],
    ["train", "--in", "x", "--bogus"],
    ["crossval", "--in", "x", "--k", "ten"],
    ["cluster", "--in", "x", "--feature", "c3", "--cut", "2", "--height", "1"],
    ["compare", "--in", "x", "--a", "cv"],
])
def test_usage_errors_exit_1(capsys, argv):
    code, out, err = call(capsys, *argv)
    assert code == 1
    assert "error" in err and out == ""


def test_data_errors_exit_2(capsys, corpora, tmp_path):
    bad = tmp_path / "bad.corpus"
    bad.write_text("a b c J\n")
    rules = tmp_path / "bad.rules"
    rules.write_text("RULE 1: IF zz IN { a } THEN T\nDEFAULT T\n")
    cases = [
        ["train", "--in", str(tmp_path / "missing.corpus")],
        ["train", "--in", str(bad), "--schema", "diminutive12"],
        ["rules", "parse", "--rules", str(rules)],
        ["cluster", "--in", corpora["nc"], "--feature", "zz"],
        ["crossval", "--in", corpora["nc"], "--k", "100000"],
        ["gen", "--oracle", "bundled:nope.rules"],
    ]
    for argv in cases:
        code, out, err = call(capsys, *argv)
        assert code == 2, (argv, err)
        assert err.startswith("morphind: error:")


def test_rule_error_reports_location(capsys, tmp_path):
    rules = tmp_path / "bad.rules"
    rules.write_text("DEFAULT T\nRULE 1: IF c3 IN @nope THEN T\n")
    code, _, err = call(capsys, "rules", "parse", "--rules", str(rules))
    assert code == 2
    assert "line 2, col 18" in err
