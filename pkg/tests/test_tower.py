"""
Differential towers: canonical forms, relations, multiple angles, square roots
"""
import random

import pytest

from qfps.engine.errors import TowerError, UngeneratedSubexpressionError
from qfps.engine.expr import Expr, add, apply, const, differentiate, mul, sub, z
from qfps.engine.parser import parse
from qfps.engine.series import series_of
from qfps.engine.tower import Tower, build_tower, canonicalize, collect_kernel_coefficients


def _canonical(tower: Tower, text: str):
    return tower.canonicalize(parse(text))


class TestCanonicalForms:
    def test_pythagoras(self):
        assert _canonical(Tower(), "sin(z)^2 + cos(z)^2") == 1

    def test_hyperbolic_pythagoras(self):
        assert _canonical(Tower(), "cosh(z)^2 - sinh(z)^2") == 1

    def test_double_angle(self):
        assert _canonical(Tower(), "sin(2*z) - 2*sin(z)*cos(z)").is_zero()

    def test_half_angles_share_a_pair(self):
        tower = Tower()
        form = _canonical(tower, "tan(z/2) + sec(z/2) + sin(z)")
        assert len(tower.kernels) == 2
        assert not form.is_zero()

    def test_tan_derivative(self):
        tower = Tower()
        assert _canonical(tower, "tan(z)").diff() == _canonical(tower, "1 + tan(z)^2")

    def test_log_derivative(self):
        tower = Tower()
        assert _canonical(tower, "log(1+z)").diff() == _canonical(tower, "1/(1+z)")

    def test_perfect_square_root(self):
        tower = Tower()
        assert _canonical(tower, "sqrt((1+z)^2)") == _canonical(tower, "1+z")
        assert not tower.kernels

    def test_square_root_kernel(self):
        tower = Tower()
        form = _canonical(tower, "sqrt(1+z)")
        assert len(tower.kernels) == 1
        assert form * form == _canonical(tower, "1+z")

    def test_parameters(self):
        tower = Tower(["k"])
        form = tower.canonicalize(parse("sec(z)^k", {"k"}))
        k = tower.canonicalize(parse("k", {"k"}))
        assert form.diff() == form * k * _canonical(tower, "tan(z)")

    def test_kernel_coefficients_of_rational_function(self):
        tower = Tower()
        rows = collect_kernel_coefficients(_canonical(tower, "1/(1+z)"))
        assert len(rows) == 1


class TestTowerBounds:
    def test_frozen_tower_rejects_new_kernels(self):
        tower = build_tower(parse("tan(z)"))
        with pytest.raises(UngeneratedSubexpressionError):
            canonicalize(parse("exp(z)"), tower)

    def test_depth_limit(self):
        with pytest.raises(TowerError):
            build_tower(parse("exp(exp(z))"), depth_limit=1)

    def test_log_of_zero(self):
        with pytest.raises(TowerError):
            _canonical(Tower(), "log(z - z)")


ANALYTIC = [
    lambda u: apply("sin", u),
    lambda u: apply("tan", u),
    lambda u: sub(apply("exp", u), 1),
    lambda u: apply("log", add(1, u)),
    lambda u: apply("arctan", u),
    lambda u: sub(apply("cos", u), 1),
    lambda u: apply("sinh", u),
]

# u*csc(u) and u*cot(u) are analytic at 0 although csc and cot are not
WIDER = ANALYTIC + [
    lambda u: sub(apply("sqrt", add(1, u)), 1),
    lambda u: apply("arcsin", u),
    lambda u: apply("arcsinh", u),
    lambda u: apply("arctanh", u),
    lambda u: sub(apply("sec", u), 1),
    lambda u: sub(mul(u, apply("csc", u)), 1),
    lambda u: sub(mul(u, apply("cot", u)), 1),
    lambda u: sub(apply("cosh", u), 1),
    lambda u: apply("tanh", u),
]


def _random_expr(rng: random.Random, depth: int, functions=ANALYTIC) -> Expr:
    """Random expression vanishing at z = 0, analytic there"""
    if depth == 0 or rng.random() < 0.25:
        return rng.choice([z, mul(2, z), mul(z, z), mul(const(1, 3), z)])
    u = _random_expr(rng, depth - 1, functions)
    choice = rng.randrange(len(functions) + 2)
    if choice < len(functions):
        return functions[choice](u)
    v = _random_expr(rng, depth - 1, functions)
    return add(u, v) if choice == len(functions) else mul(u, v)


def test_canonical_forms_agree_with_series_oracle():
    rng = random.Random(1234)
    for _ in range(100):
        e = _random_expr(rng, 4)
        tower = Tower()
        back = tower.to_expr(tower.canonicalize(e))
        assert series_of(back, 15) == series_of(e, 15), f"{e} -> {back}"


def test_wider_function_set_agrees_with_series_oracle():
    rng = random.Random(2718)
    for _ in range(60):
        e = _random_expr(rng, 3, WIDER)
        tower = Tower()
        back = tower.to_expr(tower.canonicalize(e))
        assert series_of(back, 12) == series_of(e, 12), f"{e} -> {back}"


def test_tower_derivative_matches_expression_derivative():
    rng = random.Random(4321)
    for _ in range(40):
        e = _random_expr(rng, 3)
        tower = Tower()
        form = tower.canonicalize(e)
        assert form.diff() == tower.canonicalize(differentiate(e)), str(e)
