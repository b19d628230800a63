import pytest

from vhreserve.core import Individual, Instance, QuotaScheme, CategoryQuota, by_merit
from vhreserve.fixtures import load_fixture


def person(ident, merit, category=None, traits=()):
    return Individual(ident, float(merit), category, frozenset(traits))


def instance(people, total, categories=(), open_hr=None, traits=None):
    if traits is None:
        traits = sorted({t for p in people for t in p.traits}
                        | set(open_hr or {}) | {t for c in categories for t in c.hr})
    quotas = QuotaScheme(total, tuple(categories), dict(open_hr or {}), tuple(traits))
    return Instance(tuple(by_merit(people)), quotas)


@pytest.fixture
def example1():
    return load_fixture("example1")


@pytest.fixture
def ex1():
    return load_fixture("ex1")


@pytest.fixture
def ex2():
    return load_fixture("ex2")


@pytest.fixture
def gujarat():
    return load_fixture("gujarat")


__all__ = ["person", "instance", "CategoryQuota"]


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    lines = test_acceptance.summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
