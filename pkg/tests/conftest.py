import numpy as np
import pytest

from probecap import build_example1, build_example2, build_example3, example1_two_sided


@pytest.fixture(scope="session")
def ex1():
    return build_example1()


@pytest.fixture(scope="session")
def ex2():
    return build_example2()


@pytest.fixture(scope="session")
def ex3():
    return build_example3()


@pytest.fixture(scope="session")
def ex1_two_sided():
    return example1_two_sided()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
