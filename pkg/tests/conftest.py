import pytest

from steinweil.ffield import AdditiveCharacter, FieldDescriptor
from steinweil.spgroup import SymplecticSpace
from steinweil.steinberg import SteinbergModule


@pytest.fixture(scope="session")
def f3():
    return FieldDescriptor(3)


@pytest.fixture(scope="session")
def f4():
    return FieldDescriptor(2, 2)


@pytest.fixture(scope="session")
def f5():
    return FieldDescriptor(5)


@pytest.fixture(scope="session")
def f16():
    return FieldDescriptor(2, 4)


@pytest.fixture(scope="session")
def sp13(f3):
    return SymplecticSpace(1, f3)


@pytest.fixture(scope="session")
def sp23(f3):
    return SymplecticSpace(2, f3)


@pytest.fixture(scope="session")
def psi13(f3, f4):
    return AdditiveCharacter(f3, f4)


@pytest.fixture(scope="session")
def psi23(f3, f4):
    return AdditiveCharacter(f3, f4)


@pytest.fixture(scope="session")
def stein13(sp13, f4, psi13):
    return SteinbergModule(sp13, f4, psi13)


@pytest.fixture(scope="session")
def stein23(sp23, f4, psi23):
    return SteinbergModule(sp23, f4, psi23)
