"""
The delta_2 operator and the QDE search
"""
import random

import pytest

from qfps.engine.errors import DomainError, ExprSyntaxError, QDENotFoundError
from qfps.engine.expr import add, differentiate, mul
from qfps.engine.parser import parse
from qfps.engine.qde import (
    Delta2Index, Linear, Quadratic, delta2, delta2_index, find_qde, monomial_of_index, nu, parse_qde,
    solve_ansatz, verify_qde,
)
from qfps.engine.tower import Tower
from qfps.data.corpus import corpus_loader

GOLDEN = [e for e in corpus_loader.entries(include_slow=False) if e.published_qde]
SLOW_GOLDEN = [e for e in corpus_loader.entries() if e.published_qde and e.slow]


class TestIndexMap:
    def test_first_pairs(self):
        assert [nu(k) for k in range(1, 8)] == [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3), (4, 1)]

    def test_bijective(self):
        seen = set()
        for k in range(1, 501):
            i, j = nu(k)
            assert i >= j >= 1
            assert delta2_index(i, j) == k
            seen.add((i, j))
        assert len(seen) == 500

    def test_non_positive_index(self):
        with pytest.raises(DomainError):
            nu(0)

    def test_monomials(self):
        assert monomial_of_index(2) == Linear(0)
        assert monomial_of_index(3) == Quadratic(0, 0)
        assert monomial_of_index(7) == Linear(2)
        assert Delta2Index.from_index(5).derivative_orders == (1, 0)
        with pytest.raises(DomainError):
            monomial_of_index(1)


class TestDelta2:
    def test_constant_and_identity(self):
        f = parse("tan(z)")
        assert delta2(f, 1) == parse("1")
        assert delta2(f, 2) == f

    def test_product_of_derivatives(self):
        f = parse("sec(z)")
        assert delta2(f, 5) == mul(f, differentiate(f, 1))

    def test_not_additive(self):
        pool = ["tan(z)", "exp(z)", "log(1+z)", "sin(z)", "z^2", "1/(1+z)", "sec(z)", "arctan(z)"]
        quadratic = [k for k in range(3, 16) if nu(k)[1] >= 2]
        rng = random.Random(42)
        for _ in range(20):
            f, g = (parse(rng.choice(pool)) for _ in range(2))
            k = rng.choice(quadratic)
            a, b = Delta2Index.from_index(k).derivative_orders
            cross = add(
                mul(differentiate(f, a), differentiate(g, b)),
                mul(differentiate(g, a), differentiate(f, b)),
            )
            lhs = delta2(add(f, g), k)
            rhs = add(delta2(f, k), delta2(g, k), cross)
            tower = Tower()
            assert tower.canonicalize(lhs) == tower.canonicalize(rhs)


class TestFindQDE:
    @pytest.mark.parametrize("entry", GOLDEN, ids=lambda e: e.name)
    def test_published_equations(self, entry, assert_proportional):
        f = parse(entry.expr, entry.params)
        found = find_qde(f)
        assert_proportional(found, parse_qde(entry.published_qde, entry.params))
        assert verify_qde(f, found)

    @pytest.mark.parametrize("entry", GOLDEN, ids=lambda e: e.name)
    def test_minimality(self, entry):
        f = parse(entry.expr, entry.params)
        found = find_qde(f)
        for n in range(2, found.leading_index - 2):
            assert solve_ansatz(f, n, entry.params) is None

    @pytest.mark.slow
    @pytest.mark.parametrize("entry", SLOW_GOLDEN, ids=lambda e: e.name)
    def test_order_four(self, entry, assert_proportional):
        found = find_qde(parse(entry.expr, entry.params))
        assert found.order == 4
        assert_proportional(found, parse_qde(entry.published_qde, entry.params))

    def test_tan(self, assert_proportional):
        q = find_qde(parse("tan(z)"))
        assert_proportional(q, parse_qde("y2 - 2*y*y1 = 0"))
        assert q.order == 2
        assert q.leading_index == 7
        assert not q.is_linear

    def test_exp_is_linear(self):
        q = find_qde(parse("exp(z)"))
        assert q.is_linear
        assert q.order == 1

    def test_zero(self):
        q = find_qde(parse("0"))
        assert q.leading_index == 2

    def test_rational_function(self):
        q = find_qde(parse("1/(1+z)"))
        assert q.leading_index == 3
        assert verify_qde(parse("1/(1+z)"), q)

    def test_some_equation_of_order_at_most_three(self):
        entry = corpus_loader.get("exp_arctanh_double_angle")
        f = parse(entry.expr)
        q = find_qde(f)
        assert q.order <= entry.max_order
        assert verify_qde(f, q)

    def test_bound(self):
        with pytest.raises(QDENotFoundError) as exc:
            find_qde(parse("tan(z)"), max_index=6)
        assert exc.value.max_index == 6
        with pytest.raises(DomainError):
            find_qde(parse("tan(z)"), max_index=2)

    def test_wrong_equation_fails_verification(self):
        assert not verify_qde(parse("sec(z)"), parse_qde("y2 - 2*y*y1"))


class TestParseQDE:
    def test_text_round_trip(self, assert_proportional):
        q = find_qde(parse("sec(z)^k", {"k"}))
        assert_proportional(parse_qde(str(q), q.params), q)

    def test_rejects_cubic_terms(self):
        with pytest.raises(ExprSyntaxError):
            parse_qde("y^3 + y1")

    def test_rejects_inhomogeneous_terms(self):
        with pytest.raises(ExprSyntaxError):
            parse_qde("y1 - y^2 - 1")
