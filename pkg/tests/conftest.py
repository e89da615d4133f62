import pytest
from hypothesis import settings

from morphind.dataset import DIMINUTIVE12, project
from morphind.rules import load_bundled
from morphind.syngen import GeneratorConfig, generate

settings.register_profile("ci", deadline=None, max_examples=60)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def oracle():
    return load_bundled("diminutive_rules.rules", DIMINUTIVE12)


@pytest.fixture(scope="session")
def oracle_corpus(oracle):
    return generate(GeneratorConfig(n=4000, seed=0), oracle)


@pytest.fixture(scope="session")
def nc_corpus(oracle_corpus):
    return project(oracle_corpus, ["n3", "c3"])



def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
