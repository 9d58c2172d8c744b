import pytest

from acalc.fixtures import bundled_algebras


@pytest.fixture(scope="session")
def fixtures():
    return bundled_algebras()


@pytest.fixture(scope="session")
def commutative_fixtures(fixtures):
    return {name: a for name, a in fixtures.items() if a.commutative}


def random_element(algebra, rng, scale=2.0):
    return algebra.element(rng.uniform(-scale, scale, algebra.dim))


def random_elements(algebra, rng, count, scale=2.0):
    return [random_element(algebra, rng, scale) for _ in range(count)]
