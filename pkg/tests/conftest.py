import pytest

from srbrisk import load_instance, load_multiproject, make_instance, schedule_from_starts
from srbrisk.data import fixture_names, fixture_path

SM_FIXTURES = fixture_names(".sm")
J30 = [n for n in SM_FIXTURES if n.startswith("j30")]


@pytest.fixture(scope="session")
def j30_instances():
    return {name: load_instance(fixture_path(name)) for name in J30}


@pytest.fixture(scope="session")
def mp_demo():
    return load_multiproject(fixture_path("mp_demo.txt"))


@pytest.fixture
def chain2():
    """A(mu=4) -> B(mu=3), scheduled back to back."""
    inst = make_instance([4, 3], [(1, 2)], name="chain2")
    return inst, schedule_from_starts(inst, {1: 0, 2: 4}, label="plan")
