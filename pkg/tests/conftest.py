import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from cfregions import ExtendedComplex, excomplex_eq


def nested(bs, w=0):
    """Direct backward evaluation of 1/(b_1 + 1/(b_2 + ... + 1/(b_n + w))).

    Works with complex, float or Fraction inputs; independent of Wallis-Euler.
    """
    acc = w
    for b in reversed(bs):
        acc = 1 / (b + acc)
    return acc


def random_elements(rng, length, lo=-2.0, hi=2.0, max_arg=math.pi):
    return [cmath.rect(10.0 ** rng.uniform(lo, hi), rng.uniform(-max_arg, max_arg)) for _ in range(length)]


def random_point(rng):
    return cmath.rect(10.0 ** rng.uniform(-1, 1), rng.uniform(-math.pi, math.pi))


def same(x, y, tol=1e-9):
    return excomplex_eq(ExtendedComplex.of(x), ExtendedComplex.of(y), tol)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


__all__ = ["nested", "random_elements", "random_point", "same", "Fraction"]
