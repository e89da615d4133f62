import pytest
from hypothesis import given, strategies as st

from morphind.dataset import (CORPORA, DIMINUTIVE12, CorpusError, Instance, Schema,
                              class_distribution, parse_corpus, project, read_schema_header,
                              render_corpus)
from morphind.rules import bundled_text

from helpers import make_dataset, small_datasets

EXAMPLE_BLOCK = """\
- b i = - z @ = + m A nt J
= = = = = = = = + b I x  E
= = = = + b K = - b a n  T
= = = = + b K = - b @ l  T
"""


def test_parse_example_block():
    d = parse_corpus(EXAMPLE_BLOCK, DIMINUTIVE12)
    assert len(d) == 4
    assert d.instances[0] == Instance(tuple("- b i = - z @ = + m A nt".split()), "J")
    assert d.instances[1].values == ("=",) * 8 + ("+", "b", "I", "x")
    assert d.instances[1].label == "E"
    assert d.value_domains["c3"] == {"nt", "x", "n", "l"}
    assert d.class_domain == {"J", "E", "T"}


def test_bundled_example_corpus_parses():
    text = bundled_text("example_block.corpus")
    assert read_schema_header(text) == DIMINUTIVE12
    assert parse_corpus(text, DIMINUTIVE12) == parse_corpus(EXAMPLE_BLOCK, DIMINUTIVE12)


def test_comments_and_blank_lines_skipped():
    d = parse_corpus("# header\n\n" + EXAMPLE_BLOCK + "\n# tail\n", DIMINUTIVE12)
    assert len(d) == 4


def test_empty_corpus_is_an_error():
    with pytest.raises(CorpusError, match="empty corpus"):
        parse_corpus("", DIMINUTIVE12)
    with pytest.raises(CorpusError, match="empty corpus"):
        parse_corpus("# only a comment\n\n", DIMINUTIVE12)


def test_wrong_token_count_names_line():
    with pytest.raises(CorpusError, match="line 3"):
        parse_corpus("# c\n" + EXAMPLE_BLOCK.splitlines()[0] + "\n= = = J\n", DIMINUTIVE12)


def test_schema_rejects_duplicates_and_empty():
    from morphind.dataset import Feature
    with pytest.raises(CorpusError):
        Schema((Feature("a"), Feature("a")))
    with pytest.raises(CorpusError):
        Schema(())
    with pytest.raises(CorpusError):
        Feature("")


def test_schema_file_roundtrip():
    assert Schema.parse(DIMINUTIVE12.render()) == DIMINUTIVE12
    assert Schema.from_header(DIMINUTIVE12.header()) == DIMINUTIVE12


def test_projection_examples():
    d = parse_corpus(EXAMPLE_BLOCK, DIMINUTIVE12)
    assert project(d, list(DIMINUTIVE12.names)) == d
    nc = project(d, ["n3", "c3"])
    assert nc.schema.names == ("n3", "c3")
    assert nc.instances[0].values == ("A", "nt")
    assert [i.label for i in nc] == [i.label for i in d]
    # order follows the schema, not the keep list
    assert project(d, ["c3", "n3"]).schema.names == ("n3", "c3")
    assert project(d, list(CORPORA["SONC"])).schema.names == ("s3", "o3", "n3", "c3")


def test_projection_unknown_feature_lists_valid_names():
    d = parse_corpus(EXAMPLE_BLOCK, DIMINUTIVE12)
    with pytest.raises(CorpusError, match="valid names: s1, o1"):
        project(d, ["coda"])
    with pytest.raises(CorpusError):
        project(d, [])


def test_class_distribution_lexicon_counts():
    counts = {"T": 1897, "J": 1462, "E": 357, "P": 104, "K": 77}
    rows = [(("x",), c) for c, k in counts.items() for _ in range(k)]
    dist = class_distribution(make_dataset(rows))
    assert {c: v[0] for c, v in dist.items()} == counts
    assert list(dist) == ["T", "J", "E", "P", "K"]
    # published percentages (the etje cell does not follow from its count)
    for c, pct in (("T", 48.7), ("J", 37.5), ("P", 2.7), ("K", 2.0)):
        assert round(100 * dist[c][1], 1) == pct
    assert sum(f for _, f in dist.values()) == pytest.approx(1.0, abs=1e-9)


def test_class_distribution_single_instance():
    assert class_distribution(make_dataset([(("a",), "X")])) == {"X": (1, 1.0)}


def test_class_distribution_matches_generator_log(oracle):
    from morphind.syngen import GenerationLog, GeneratorConfig, generate
    log = GenerationLog()
    d = generate(GeneratorConfig(n=4000, seed=3), oracle, log)
    text = render_corpus(d)
    tally = {}
    for line in text.splitlines():  # independent one-pass recount
        lab = line.split()[-1]
        tally[lab] = tally.get(lab, 0) + 1
    dist = class_distribution(d)
    assert {c: n for c, (n, _) in dist.items()} == tally == dict(log.labels)
    for c, (n, f) in dist.items():
        assert f == pytest.approx(log.labels[c] / 4000, abs=1e-12)


@given(small_datasets())
def test_render_parse_roundtrip(d):
    assert parse_corpus(render_corpus(d), d.schema) == d
    assert parse_corpus(render_corpus(d, header=True), d.schema) == d


@given(small_datasets(max_features=4), st.data())
def test_projection_properties(d, data):
    names = list(d.schema.names)
    a = data.draw(st.lists(st.sampled_from(names), min_size=1, unique=True))
    b = data.draw(st.lists(st.sampled_from(a), min_size=1, unique=True))
    pa = project(d, a)
    assert len(pa) == len(d)
    assert project(pa, a) == pa
    assert project(pa, b) == project(d, b)
    for f in pa.schema.names:
        assert pa.value_domains[f] == d.value_domains[f]


@given(small_datasets())
def test_dataset_invariants(d):
    for j, name in enumerate(d.schema.names):
        assert d.value_domains[name] == {i.values[j] for i in d}
    assert sum(d.class_counts.values()) == len(d)
