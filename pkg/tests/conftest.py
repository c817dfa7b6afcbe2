import pytest

from petri.fermat import build_ideal
from petri.group import enumerate_fermat_group
from petri.quadrics import QuadricSystem, condition_equations


@pytest.fixture(scope="session")
def ideal6():
    return build_ideal(6, 7)


@pytest.fixture(scope="session")
def system6(ideal6):
    return QuadricSystem.from_ideal(ideal6)


@pytest.fixture(scope="session")
def group6(system6):
    return enumerate_fermat_group(6, 7, system6)


@pytest.fixture(scope="session")
def equations6(system6):
    return condition_equations(system6)
