"""
Shared fixtures: exact rationals, QDE comparison, the corpus and the HTTP client
"""
from typing import Callable

import pytest
from fastapi.testclient import TestClient
from sympy.polys.domains import QQ

from qfps.data.corpus import corpus_loader
from qfps.engine.field import fraction_field
from qfps.engine.qde import QDE
from qfps.main import app


def to_rat(text: str):
    numerator, _, denominator = text.partition("/")
    return QQ(int(numerator), int(denominator or 1))


def proportional(found: QDE, expected: QDE) -> bool:
    """Same monomials and coefficient vectors proportional over Q(z, params)"""
    if {t.monomial for t in found.terms} != {t.monomial for t in expected.terms}:
        return False
    if found.params != expected.params:
        return False
    field = fraction_field(found.ring)
    ratios = [field(t.coefficient) / field(expected.coefficient(t.monomial)) for t in found.terms]
    return all(r == ratios[0] for r in ratios)


@pytest.fixture
def rat() -> Callable:
    return to_rat


@pytest.fixture
def assert_proportional() -> Callable:
    def check(found: QDE, expected: QDE) -> None:
        assert proportional(found, expected), f"{found} is not proportional to {expected}"
    return check


@pytest.fixture(scope="session")
def corpus():
    return corpus_loader


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c
