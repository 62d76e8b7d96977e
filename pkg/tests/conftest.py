import os

import pytest

from alt_topology.field import FieldSpec
from alt_topology.schemes import build_bc2_joint_ab, build_ic2_joint_abc

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA = os.path.join(ROOT, "data")


@pytest.fixture
def gf2():
    return FieldSpec(2)


@pytest.fixture
def gf3():
    return FieldSpec(3)


@pytest.fixture
def gf5():
    return FieldSpec(5)


@pytest.fixture
def ic2_scheme(gf3):
    return build_ic2_joint_abc(gf3)


@pytest.fixture
def bc2_scheme(gf3):
    return build_bc2_joint_ab(gf3)


@pytest.fixture
def example1_path():
    return os.path.join(DATA, "ic3_example1.txt")


@pytest.fixture
def example2_path():
    return os.path.join(DATA, "ic3_example2.txt")
