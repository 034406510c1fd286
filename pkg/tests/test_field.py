"""
Exact arithmetic: linear systems over Q(z, params), Pochhammer symbols, normalization
"""
import random

import pytest
from sympy.polys.domains import QQ

from qfps.engine.errors import DomainError, ParameterError
from qfps.engine.field import (
    fraction_field, normalize_coefficients, pochhammer, polynomial_ring, primitive_part, solve_linear,
    value_at,
)


@pytest.fixture
def field():
    return fraction_field(polynomial_ring())


def _random_ratfunc(rng: random.Random, field):
    z = field.gens[0]
    num = sum((QQ(rng.randint(-5, 5)) * z ** e for e in range(3)), field.zero)
    den = sum((QQ(rng.randint(-5, 5)) * z ** e for e in range(3)), field.zero)
    if not den:
        den = field.one
    return num / den


class TestSolveLinear:
    def test_reciprocal_log_system(self, field):
        z = field.gens[0]
        # C0*(1+z)*L + C1*(1+z) - 1 = 0, one equation per power of L
        A = [[1 + z, field.zero], [field.zero, 1 + z]]
        b = [field.zero, field.one]
        assert solve_linear(A, b, field) == [field.zero, 1 / (1 + z)]

    def test_tangent_ansatz_system(self, field):
        # C4 t^4 + (C3 + 2) t^3 + (2 C4 + C2 + C1) t^2 + (C3 + C0 + 2) t + C4 + C2 = 0
        # for t = tan(z), one equation per power of t, unknowns C0 .. C4
        rows = [
            [0, 0, 0, 0, 1],
            [0, 0, 0, 1, 0],
            [0, 1, 1, 0, 2],
            [1, 0, 0, 1, 0],
            [0, 0, 1, 0, 1],
        ]
        A = [[c * field.one for c in row] for row in rows]
        b = [field.zero, -2 * field.one, field.zero, -2 * field.one, field.zero]
        assert solve_linear(A, b, field) == [field.zero, field.zero, field.zero, -2 * field.one, field.zero]

    def test_tangent_ansatz_below_the_order_has_no_solution(self, field):
        # 1 + t^2 + C1 t^2 + C0 t = 0
        A = [[field.zero, field.one], [field.one, field.zero], [field.zero, field.zero]]
        b = [-field.one, field.zero, -field.one]
        assert solve_linear(A, b, field) is None

    def test_inconsistent_system(self, field):
        A = [[field.one], [field.one]]
        b = [field.one, 2 * field.one]
        assert solve_linear(A, b, field) is None

    def test_empty_system(self, field):
        assert solve_linear([], [], field) == []

    def test_underdetermined_system_satisfies_equations(self, field):
        z = field.gens[0]
        A = [[z, 1 + z, field.one]]
        b = [z ** 2]
        x = solve_linear(A, b, field)
        assert x is not None
        assert sum((a * v for a, v in zip(A[0], x)), field.zero) == b[0]

    def test_random_square_systems(self, field):
        rng = random.Random(7)
        for _ in range(10):
            A = [[_random_ratfunc(rng, field) for _ in range(3)] for _ in range(3)]
            b = [_random_ratfunc(rng, field) for _ in range(3)]
            x = solve_linear(A, b, field)
            if x is None:
                continue
            for row, rhs in zip(A, b):
                assert sum((a * v for a, v in zip(row, x)), field.zero) == rhs


class TestFieldAxioms:
    def test_distributivity_and_inverses(self, field):
        rng = random.Random(11)
        for _ in range(20):
            a, b, c = (_random_ratfunc(rng, field) for _ in range(3))
            assert a * (b + c) == a * b + a * c
            assert (a + b) + c == a + (b + c)
            if a:
                assert a * a ** -1 == field.one


class TestPochhammer:
    def test_recurrence_factors(self):
        ring = polynomial_ring(variable="n")
        n = ring.gens[0]
        assert pochhammer(n + 1, 2) == (n + 1) * (n + 2)
        assert pochhammer(n + 1, 3) == (n + 1) * (n + 2) * (n + 3)

    def test_empty_product(self):
        assert pochhammer(QQ(5, 3), 0) == 1

    def test_step(self):
        rng = random.Random(3)
        for _ in range(20):
            x = QQ(rng.randint(-20, 20), rng.randint(1, 9))
            k = rng.randint(0, 12)
            assert pochhammer(x, k) * (x + k) == pochhammer(x, k + 1)

    def test_negative_order(self):
        with pytest.raises(DomainError):
            pochhammer(QQ(1), -1)


class TestNormalization:
    def test_gcd_and_content_removed(self):
        ring = polynomial_ring()
        z = ring.gens[0]
        assert normalize_coefficients([-2 * z, -4 * z ** 2], 0) == [ring.one, 2 * z]

    def test_content_divided_out(self):
        ring = polynomial_ring()
        z = ring.gens[0]
        assert normalize_coefficients([QQ(1, 2) * z, QQ(-1, 3)], 0) == [3 * z, -2 * ring.one]

    def test_primitive_part(self):
        ring = polynomial_ring()
        z = ring.gens[0]
        assert primitive_part(QQ(-2, 3) * z + QQ(4, 9)) == (QQ(-2, 9), 3 * z - 2)
        assert primitive_part(ring.zero) == (QQ.one, ring.zero)


class TestValueAt:
    def test_univariate(self):
        ring = polynomial_ring(variable="n")
        n = ring.gens[0]
        assert value_at((n + 1) * (n + 2), 3) == 20
        assert value_at(n ** 2, QQ(1, 2)) == QQ(1, 4)

    def test_parameter_free_part(self):
        ring = polynomial_ring(["k"], variable="n")
        n, _ = ring.gens
        assert value_at(n ** 2 + 1, 3) == 10

    def test_parameters_rejected(self):
        ring = polynomial_ring(["k"], variable="n")
        n, k = ring.gens
        with pytest.raises(ParameterError):
            value_at(n + k, 1)
