import random

import pytest

from ferns.gf import LinSpace, VSpace, field_make


@pytest.fixture
def rng():
    return random.Random(0)


@pytest.fixture
def f2():
    return field_make(2)


@pytest.fixture
def f4():
    return field_make(2, 1, 2)


@pytest.fixture
def f8():
    return field_make(2, 1, 3)


@pytest.fixture
def f9():
    return field_make(3, 1, 2)


def space(n, q, m=1):
    p, e = {2: (2, 1), 3: (3, 1), 4: (2, 2), 5: (5, 1),
            8: (2, 3), 9: (3, 2)}[q]
    return LinSpace.full(VSpace(field_make(p, e, m), n))
