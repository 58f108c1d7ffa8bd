import numpy as np
import pytest

from mentionlink.embedding import ReferenceEncoder
from mentionlink.model import Mention, Relation
from mentionlink.synthetic import identity_fixture


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def fixture_corpus():
    return identity_fixture()


@pytest.fixture
def encoder():
    return ReferenceEncoder(384)


def mk(mid, surface, etype="Application", *rels):
    """Mention shorthand: ``mk("m1", "SPSS", "Application", ("Version", "28"))``."""
    return Mention(mid, surface, etype, None, tuple(Relation(t, s) for t, s in rels))


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def random_units(rng, n, dim):
    x = rng.standard_normal((n, dim))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


# acceptance lines collected by test_acceptance and echoed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
