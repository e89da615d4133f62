"""Shared builders and hypothesis strategies for the test suite."""
from hypothesis import strategies as st

from morphind.dataset import Dataset, Feature, Instance, Schema


def make_dataset(rows, names=None):
    """rows: list of (values tuple, label)."""
    width = len(rows[0][0])
    names = names or [f"f{i}" for i in range(width)]
    schema = Schema(tuple(Feature(n) for n in names), "class")
    return Dataset(schema, tuple(Instance(tuple(v), y) for v, y in rows))


@st.composite
def small_datasets(draw, max_features=3, max_values=8, max_classes=5, max_n=200, min_n=1):
    nf = draw(st.integers(1, max_features))
    nv = [draw(st.integers(1, max_values)) for _ in range(nf)]
    nc = draw(st.integers(1, max_classes))
    codes = draw(st.lists(
        st.tuples(*[st.integers(0, k - 1) for k in nv], st.integers(0, nc - 1)),
        min_size=min_n, max_size=max_n))
    rows = [(tuple(f"v{c}" for c in row[:-1]), f"C{row[-1]}") for row in codes]
    return make_dataset(rows)


def random_dataset(rng, max_features=3, max_values=8, max_classes=5, max_n=200):
    """Plain-RNG counterpart of ``small_datasets`` for fixed-size sweeps."""
    nf = rng.randint(1, max_features)
    nv = [rng.randint(1, max_values) for _ in range(nf)]
    nc = rng.randint(1, max_classes)
    rows = [(tuple(f"v{rng.randrange(k)}" for k in nv), f"C{rng.randrange(nc)}")
            for _ in range(rng.randint(1, max_n))]
    return make_dataset(rows)


# acceptance verdicts, printed in the terminal summary
ACCEPTANCE: list[str] = []
