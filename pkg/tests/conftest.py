import math

import numpy as np
import pytest

from algdyn import _kernels
from algdyn.groupring import GroupRingElement, parse_element


@pytest.fixture(scope="session", autouse=True)
def warm_backend():
    # jit compilation happens here, outside any timed section
    return _kernels.warmup()


@pytest.fixture
def f_symmetric():
    return parse_element("3 - u1 - u1^-1")


@pytest.fixture
def f_geometric():
    return parse_element("u1 - 2")


@pytest.fixture
def f_harmonic():
    return parse_element("4 - u1 - u1^-1 - u2 - u2^-1")


def random_element(rng: np.random.Generator, d: int = 1, radius: int = 2, max_coef: int = 4) -> GroupRingElement:
    terms = {}
    n = rng.integers(1, 5)
    for _ in range(n):
        e = tuple(int(v) for v in rng.integers(-radius, radius + 1, size=d))
        c = int(rng.integers(-max_coef, max_coef + 1))
        if c:
            terms[e] = terms.get(e, 0) + c
    return GroupRingElement(d, {e: c for e, c in terms.items() if c})


def jensen_mahler(f: GroupRingElement) -> float:
    """Independent univariate log-Mahler oracle: log of the leading
    coefficient plus the log-moduli of the roots outside the unit circle."""
    assert f.d == 1
    lo = min(e[0] for e in f.terms)
    hi = max(e[0] for e in f.terms)
    coeffs = [f.coefficient(n) for n in range(hi, lo - 1, -1)]  # np.roots order
    roots = np.roots(coeffs)
    return math.log(abs(coeffs[0])) + float(
        sum(math.log(abs(r)) for r in roots if abs(r) > 1)
    )
