"""
Differential towers of transcendental kernels and canonical rational forms

A tower is a single sympy polynomial ring over QQ with generators
``z, params..., _t0, _t1, ...``. Every ``_tK`` stands for a kernel such as
exp(u), log(u), a cos/sin pair or sqrt(w), and the derivative of every kernel
is again a rational function of the generators. Three kinds of algebraic
relation are applied so that sin, sinh and square-root generators appear with
degree at most one:

    sin(u)^2  = 1 - cos(u)^2
    sinh(u)^2 = cosh(u)^2 - 1
    sqrt(w)^2 = w

Denominators are kept free of those generators by multiplying with
conjugates; after gcd cancellation and a monic denominator the form is unique.
"""
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from math import gcd, isqrt, lcm
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
import logging

from sympy.polys.domains import QQ
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyRing

from qfps.config import settings
from qfps.engine.errors import DomainError, TowerError, UngeneratedSubexpressionError
from qfps.engine.expr import (
    Add, App, Const, Expr, HYPERBOLIC_FUNCTIONS, Mul, Param, Pow, Rat, TRIG_FUNCTIONS, Z,
    ZERO, add, div, mul, parameter_linear_form, power, z as z_expr,
)
from qfps.engine.field import MPoly, RatFunc, fraction_field, polynomial_ring, primitive_part
from qfps.engine.parser import validate_params
from qfps.engine.printer import print_expr

logger = logging.getLogger(__name__)

KernelMonomial = Tuple[int, ...]


class KernelKind(str, Enum):
    """Kinds of tower generators"""
    EXP = "exp"
    LOG = "log"
    SQRT = "sqrt"
    COS = "cos"
    SIN = "sin"
    COSH = "cosh"
    SINH = "sinh"
    ARCTAN = "arctan"
    ARCTANH = "arctanh"
    ARCSIN = "arcsin"
    ARCSINH = "arcsinh"
    POW = "pow"


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    """num/den over a tower ring; den is monic and free of algebraic generators"""
    num: MPoly
    den: MPoly
    tower: "Tower" = field(repr=False)

    def _coerce(self, other) -> "CanonicalForm":
        if isinstance(other, CanonicalForm):
            return other
        return self.tower.constant(other)

    def __add__(self, other) -> "CanonicalForm":
        return self.tower.add(self, self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "CanonicalForm":
        return self.tower.add(self, -self._coerce(other))

    def __rsub__(self, other) -> "CanonicalForm":
        return self.tower.add(self._coerce(other), -self)

    def __mul__(self, other) -> "CanonicalForm":
        return self.tower.mul(self, self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "CanonicalForm":
        return self.tower.mul(self, self.tower.inverse(self._coerce(other)))

    def __rtruediv__(self, other) -> "CanonicalForm":
        return self.tower.mul(self._coerce(other), self.tower.inverse(self))

    def __neg__(self) -> "CanonicalForm":
        return CanonicalForm(-self.num, self.den, self.tower)

    def __pow__(self, n: int) -> "CanonicalForm":
        return self.tower.power(self, n)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Rat)):
            other = self.tower.constant(other)
        if not isinstance(other, CanonicalForm):
            return NotImplemented
        lift = self.tower.lift
        return lift(self.num) == lift(other.num) and lift(self.den) == lift(other.den)

    def __ne__(self, other: object) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.num

    def is_kernel_free(self) -> bool:
        """True when only z and parameters occur"""
        return not self.tower.kernels_in(self)

    def diff(self) -> "CanonicalForm":
        return self.tower.diff(self)

    def __str__(self) -> str:
        return print_expr(self.tower.to_expr(self))


@dataclass
class Kernel:
    name: str
    kind: KernelKind
    argument: CanonicalForm
    expr: Expr
    depth: int
    value_at_zero: Optional["Rat"] = None
    exponent: Optional[MPoly] = None
    derivative: Optional[CanonicalForm] = None
    # x^2 = relation[0] / relation[1]
    relation: Optional[Tuple[MPoly, MPoly]] = None


@dataclass
class _AngleFamily:
    hyperbolic: bool
    rest: CanonicalForm
    base: "Rat"


def _rational_sqrt(q) -> Optional["Rat"]:
    if q is None or q < 0:
        return None
    n, d = int(q.numerator), int(q.denominator)
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn != n or rd * rd != d:
        return None
    return QQ(rn, rd)


def _rational_gcd(values: Sequence["Rat"]) -> "Rat":
    numerators = [abs(int(v.numerator)) for v in values]
    denominators = [int(v.denominator) for v in values]
    return QQ(reduce(gcd, numerators, 0), reduce(lcm, denominators, 1))


def _poly_sqrt(p: MPoly) -> Optional[MPoly]:
    if p.is_ground:
        root = _rational_sqrt(p.const())
        return None if root is None else p.ring.ground_new(root)
    coeff, factors = p.sqf_list()
    if any(multiplicity % 2 for _, multiplicity in factors):
        return None
    root = _rational_sqrt(coeff)
    if root is None:
        return None
    result = p.ring.ground_new(root)
    for factor, multiplicity in factors:
        result *= factor ** (multiplicity // 2)
    return result


def _poly_expr(p: MPoly, symbols: Sequence[Expr]) -> Expr:
    terms = []
    for monom, coeff in p.terms():
        factors = [power(symbols[i], e) for i, e in enumerate(monom) if e]
        terms.append(mul(Const(coeff), *factors))
    return add(*terms) if terms else ZERO


class Tower:
    """
    Growing differential tower over Q(z, params)

    Kernels are registered on demand while expressions are canonicalized.
    ``freeze()`` stops registration: afterwards any new kernel raises
    UngeneratedSubexpressionError.
    """

    def __init__(
        self,
        params: Iterable[str] = (),
        depth_limit: Optional[int] = None,
        max_angle_multiple: Optional[int] = None,
    ):
        self.params: Tuple[str, ...] = tuple(sorted(validate_params(params)))
        self.depth_limit = settings.TOWER_DEPTH_LIMIT if depth_limit is None else depth_limit
        if self.depth_limit < 1:
            raise DomainError(f"tower depth limit must be at least 1, got {self.depth_limit}")
        self.max_angle_multiple = (
            settings.MAX_ANGLE_MULTIPLE if max_angle_multiple is None else max_angle_multiple
        )
        self.base_ring: PolyRing = polynomial_ring(self.params)
        self.base_field = fraction_field(self.base_ring)
        self.ring: PolyRing = self.base_ring
        self.kernels: List[Kernel] = []
        self.frozen = False
        self._offset = 1 + len(self.params)
        self._families: List[_AngleFamily] = []
        self._cache: Dict[Expr, CanonicalForm] = {}

    def __repr__(self) -> str:
        names = ", ".join(print_expr(k.expr) for k in self.kernels)
        return f"Tower(params={list(self.params)}, kernels=[{names}])"

    def freeze(self) -> "Tower":
        self.frozen = True
        return self

    # Ring plumbing

    def lift(self, p: MPoly) -> MPoly:
        return p if p.ring is self.ring else p.set_ring(self.ring)

    def _extend(self, name: str) -> None:
        symbols = [str(s) for s in self.ring.symbols] + [name]
        self.ring = PolyRing(symbols, QQ, lex)

    @property
    def z_gen(self) -> MPoly:
        return self.ring.gens[0]

    def gen(self, index: int) -> MPoly:
        """Generator of kernel number `index`"""
        return self.ring.gens[self._offset + index]

    def _parameter(self, name: str) -> MPoly:
        if name not in self.params:
            raise TowerError(f"parameter '{name}' is not declared")
        return self.ring.gens[1 + self.params.index(name)]

    def kernels_in(self, cf: CanonicalForm) -> List[int]:
        num, den = self.lift(cf.num), self.lift(cf.den)
        return [
            i for i in range(len(self.kernels))
            if num.degree(self.gen(i)) > 0 or den.degree(self.gen(i)) > 0
        ]

    # Forms

    def constant(self, value) -> CanonicalForm:
        return CanonicalForm(self.ring.ground_new(QQ.convert(value)), self.ring.one, self)

    @property
    def zero(self) -> CanonicalForm:
        return CanonicalForm(self.ring.zero, self.ring.one, self)

    @property
    def one(self) -> CanonicalForm:
        return CanonicalForm(self.ring.one, self.ring.one, self)

    def variable(self) -> CanonicalForm:
        return CanonicalForm(self.z_gen, self.ring.one, self)

    def kernel_form(self, index: int) -> CanonicalForm:
        return CanonicalForm(self.gen(index), self.ring.one, self)

    def form(self, num: MPoly, den: Optional[MPoly] = None) -> CanonicalForm:
        """Normalized num/den"""
        return self._normalize(num, self.ring.one if den is None else den)

    def _reduce_var(self, p: MPoly, index: int) -> Tuple[MPoly, MPoly]:
        x = self.gen(index)
        degree = p.degree(x)
        if degree < 2:
            return p, self.ring.one
        rel_num, rel_den = (self.lift(q) for q in self.kernels[index].relation)
        half = degree // 2
        num_powers = [self.ring.one]
        den_powers = [self.ring.one]
        for _ in range(half):
            num_powers.append(num_powers[-1] * rel_num)
            den_powers.append(den_powers[-1] * rel_den)
        result = self.ring.zero
        for e in range(degree + 1):
            coeff = p.coeff_wrt(x, e)
            if not coeff:
                continue
            q, r = divmod(e, 2)
            term = coeff * num_powers[q] * den_powers[half - q]
            result += term * x if r else term
        return result, den_powers[half]

    def reduce(self, p: MPoly) -> Tuple[MPoly, MPoly]:
        """Apply every algebraic relation, highest kernel first.

        Returns (q, m) with p = q/m, q of degree <= 1 in each algebraic
        generator and m free of them.
        """
        p = self.lift(p)
        multiplier = self.ring.one
        for index in reversed(range(len(self.kernels))):
            if self.kernels[index].relation is not None:
                p, m = self._reduce_var(p, index)
                multiplier *= m
        return p, multiplier

    def _rationalize(self, num: MPoly, den: MPoly) -> Tuple[MPoly, MPoly]:
        algebraic = [i for i, k in enumerate(self.kernels) if k.relation is not None]
        while True:
            present = [i for i in algebraic if den.degree(self.gen(i)) > 0]
            if not present:
                return num, den
            x = self.gen(present[-1])
            conjugate = den.coeff_wrt(x, 0) - den.coeff_wrt(x, 1) * x
            num, num_mult = self.reduce(num * conjugate)
            den, den_mult = self.reduce(den * conjugate)
            num, den = num * den_mult, den * num_mult
            if not den:
                raise TowerError("denominator vanishes modulo the tower relations")

    def _normalize(self, num: MPoly, den: MPoly) -> CanonicalForm:
        num, den = self.lift(num), self.lift(den)
        if not den:
            raise TowerError("division by zero")
        num, num_mult = self.reduce(num)
        den, den_mult = self.reduce(den)
        num, den = num * den_mult, den * num_mult
        num, den = self._rationalize(num, den)
        if not num:
            return self.zero
        num, den = num.cancel(den)
        lc = den.LC
        if lc != 1:
            num, den = num.quo_ground(lc), den.quo_ground(lc)
        return CanonicalForm(num, den, self)

    # Field operations

    def add(self, a: CanonicalForm, b: CanonicalForm) -> CanonicalForm:
        return self.sum((a, b))

    def sum(self, forms: Iterable[CanonicalForm]) -> CanonicalForm:
        forms = [f for f in forms if not f.is_zero()]
        if not forms:
            return self.zero
        if len(forms) == 1:
            return forms[0]
        dens = [self.lift(f.den) for f in forms]
        common = reduce(lambda acc, d: acc.lcm(d), dens[1:], dens[0])
        num = self.ring.zero
        for f, d in zip(forms, dens):
            num += self.lift(f.num) * common.exquo(d)
        return self._normalize(num, common)

    def mul(self, a: CanonicalForm, b: CanonicalForm) -> CanonicalForm:
        if a.is_zero() or b.is_zero():
            return self.zero
        return self._normalize(self.lift(a.num) * self.lift(b.num), self.lift(a.den) * self.lift(b.den))

    def product(self, forms: Iterable[CanonicalForm]) -> CanonicalForm:
        return reduce(self.mul, forms, self.one)

    def inverse(self, a: CanonicalForm) -> CanonicalForm:
        if a.is_zero():
            raise TowerError("division by zero")
        return self._normalize(self.lift(a.den), self.lift(a.num))

    def power(self, a: CanonicalForm, n: int) -> CanonicalForm:
        if n < 0:
            return self.inverse(self.power(a, -n))
        result, base = self.one, a
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def _derivation(self, p: MPoly) -> Tuple[MPoly, MPoly]:
        """D(p) = dp/dz + sum_k dp/dx_k * x_k' as numerator and denominator"""
        p = self.lift(p)
        present = [i for i in range(len(self.kernels)) if p.degree(self.gen(i)) > 0]
        dens = [self.lift(self.kernels[i].derivative.den) for i in present]
        common = reduce(lambda acc, d: acc.lcm(d), dens, self.ring.one)
        num = p.diff(self.z_gen) * common
        for i, d in zip(present, dens):
            derivative = self.kernels[i].derivative
            if derivative.is_zero():
                continue
            num += p.diff(self.gen(i)) * self.lift(derivative.num) * common.exquo(d)
        return num, common

    def diff(self, a: CanonicalForm) -> CanonicalForm:
        """z-derivative through the kernel derivatives"""
        num, den = self.lift(a.num), self.lift(a.den)
        dnum, lnum = self._derivation(num)
        if den.is_ground:
            return self._normalize(dnum, lnum * den)
        dden, lden = self._derivation(den)
        return self._normalize(
            dnum * lden * den - num * dden * lnum,
            lnum * lden * den * den,
        )

    def value_at_zero(self, cf: CanonicalForm) -> Optional["Rat"]:
        """Rational value at z = 0, or None when it is not a known rational"""
        num, den = self.lift(cf.num), self.lift(cf.den)
        substitutions = [(self.z_gen, QQ.zero)]
        for i, kernel in enumerate(self.kernels):
            x = self.gen(i)
            if num.degree(x) > 0 or den.degree(x) > 0:
                if kernel.value_at_zero is None:
                    return None
                substitutions.append((x, kernel.value_at_zero))
        num0, den0 = num.subs(substitutions), den.subs(substitutions)
        if not (num0.is_ground and den0.is_ground) or not den0:
            return None
        return num0.const() / den0.const()

    # Kernels

    def _lookup(self, kind: KernelKind, argument: CanonicalForm,
                exponent: Optional[MPoly] = None) -> Optional[int]:
        for i, kernel in enumerate(self.kernels):
            if kernel.kind is not kind or kernel.argument != argument:
                continue
            if exponent is not None and self.lift(kernel.exponent) != self.lift(exponent):
                continue
            return i
        return None

    def _register(self, kind: KernelKind, argument: CanonicalForm, expr: Expr,
                  value: Optional["Rat"] = None, exponent: Optional[MPoly] = None) -> int:
        if self.frozen:
            raise UngeneratedSubexpressionError(f"{print_expr(expr)} is not generated by the tower")
        depth = 1 + max((self.kernels[i].depth for i in self.kernels_in(argument)), default=0)
        if depth > self.depth_limit:
            raise TowerError(
                f"tower depth limit {self.depth_limit} exceeded at {print_expr(expr)}"
            )
        name = f"_t{len(self.kernels)}"
        self._extend(name)
        self.kernels.append(Kernel(name, kind, argument, expr, depth, value, exponent))
        logger.debug(f"kernel {name} := {print_expr(expr)} (depth {depth})")
        return len(self.kernels) - 1

    def _function_kernel(self, kind: KernelKind, u: CanonicalForm) -> CanonicalForm:
        index = self._lookup(kind, u)
        if index is not None:
            return self.kernel_form(index)
        u0 = self.value_at_zero(u)
        root = None
        if kind is KernelKind.EXP:
            value = QQ.one if u0 == 0 else None
        elif kind is KernelKind.LOG:
            value = QQ.zero if u0 == 1 else None
        else:
            value = QQ.zero if u0 == 0 else None
            if kind is KernelKind.ARCSIN:
                root = self.sqrt(1 - u * u)
            elif kind is KernelKind.ARCSINH:
                root = self.sqrt(1 + u * u)
        index = self._register(kind, u, App(kind.value, self.to_expr(u)), value)
        x = self.kernel_form(index)
        du = self.diff(u)
        if kind is KernelKind.EXP:
            derivative = du * x
        elif kind is KernelKind.LOG:
            derivative = du / u
        elif kind is KernelKind.ARCTAN:
            derivative = du / (1 + u * u)
        elif kind is KernelKind.ARCTANH:
            derivative = du / (1 - u * u)
        else:
            derivative = du / root
        self.kernels[index].derivative = derivative
        return x

    def _pair(self, u: CanonicalForm, hyperbolic: bool) -> Tuple[CanonicalForm, CanonicalForm]:
        cos_kind, sin_kind = (
            (KernelKind.COSH, KernelKind.SINH) if hyperbolic else (KernelKind.COS, KernelKind.SIN)
        )
        index = self._lookup(cos_kind, u)
        if index is not None:
            return self.kernel_form(index), self.kernel_form(index + 1)
        u_expr = self.to_expr(u)
        at_origin = self.value_at_zero(u) == 0
        c_index = self._register(cos_kind, u, App(cos_kind.value, u_expr), QQ.one if at_origin else None)
        s_index = self._register(sin_kind, u, App(sin_kind.value, u_expr), QQ.zero if at_origin else None)
        c_gen = self.gen(c_index)
        if hyperbolic:
            self.kernels[s_index].relation = (c_gen ** 2 - 1, self.ring.one)
        else:
            self.kernels[s_index].relation = (1 - c_gen ** 2, self.ring.one)
        c, s = self.kernel_form(c_index), self.kernel_form(s_index)
        du = self.diff(u)
        self.kernels[c_index].derivative = du * s if hyperbolic else -(du * s)
        self.kernels[s_index].derivative = du * c
        return c, s

    def sqrt(self, w: CanonicalForm) -> CanonicalForm:
        """Principal square root; perfect squares collapse to their root"""
        if w.is_zero():
            return self.zero
        root = self._square_root(w)
        if root is not None:
            return root
        index = self._lookup(KernelKind.SQRT, w)
        if index is None:
            value = _rational_sqrt(self.value_at_zero(w))
            index = self._register(KernelKind.SQRT, w, App("sqrt", self.to_expr(w)), value)
            kernel = self.kernels[index]
            kernel.relation = (w.num, w.den)
            kernel.derivative = self.diff(w) * self.kernel_form(index) / (2 * w)
        return self.kernel_form(index)

    def _square_root(self, w: CanonicalForm) -> Optional[CanonicalForm]:
        num_root = _poly_sqrt(self.lift(w.num))
        if num_root is None:
            return None
        den_root = _poly_sqrt(self.lift(w.den))
        if den_root is None:
            return None
        root = self._normalize(num_root, den_root)
        value = self.value_at_zero(root)
        if value is None or value == 0:
            raise TowerError(f"cannot fix the branch of sqrt({print_expr(self.to_expr(w))}) at z = 0")
        return root if value > 0 else -root

    def _power_kernel(self, base: CanonicalForm, coefficients: Dict[str, "Rat"]) -> CanonicalForm:
        if base.is_zero():
            raise TowerError("zero raised to a symbolic power")
        if base == 1:
            return self.one
        names = sorted(coefficients)
        alpha = sum((self._parameter(p) * coefficients[p] for p in names), self.ring.zero)
        index = self._lookup(KernelKind.POW, base, alpha)
        if index is None:
            alpha_expr = add(*(mul(Const(coefficients[p]), Param(p)) for p in names))
            value = QQ.one if self.value_at_zero(base) == 1 else None
            index = self._register(
                KernelKind.POW, base, power(self.to_expr(base), alpha_expr), value, alpha
            )
            self.kernels[index].derivative = (
                self.form(alpha) * self.diff(base) / base * self.kernel_form(index)
            )
        return self.kernel_form(index)

    # Multiple angles

    def _split_rational(self, u: CanonicalForm) -> Tuple["Rat", CanonicalForm]:
        """u = c * rest with rest having coprime integer numerator coefficients"""
        content, scaled = primitive_part(self.lift(u.num))
        return content, CanonicalForm(scaled, self.lift(u.den), self)

    def _family(self, hyperbolic: bool, rest: CanonicalForm) -> Optional[_AngleFamily]:
        for family in self._families:
            if family.hyperbolic == hyperbolic and family.rest == rest:
                return family
        return None

    def _angle(self, u: CanonicalForm, hyperbolic: bool) -> Tuple[CanonicalForm, CanonicalForm]:
        """(cos u, sin u) or (cosh u, sinh u)"""
        if u.is_zero():
            return self.one, self.zero
        coefficient, rest = self._split_rational(u)
        family = self._family(hyperbolic, rest)
        if family is not None:
            multiple = coefficient / family.base
            if multiple.denominator == 1 and abs(multiple) <= self.max_angle_multiple:
                c, s = self._pair(rest * family.base, hyperbolic)
                return self._multiple_angle(c, s, int(multiple.numerator), hyperbolic)
        return self._pair(u, hyperbolic)

    @staticmethod
    def _multiple_angle(c: CanonicalForm, s: CanonicalForm, m: int,
                        hyperbolic: bool) -> Tuple[CanonicalForm, CanonicalForm]:
        cm, sm = c, s
        for _ in range(abs(m) - 1):
            if hyperbolic:
                cm, sm = cm * c + sm * s, sm * c + cm * s
            else:
                cm, sm = cm * c - sm * s, sm * c + cm * s
        return (cm, sm) if m > 0 else (cm, -sm)

    def _angle_levels(self, e: Expr, out: Dict[int, List[Tuple[bool, Expr]]],
                      memo: Dict[Expr, int]) -> int:
        level = memo.get(e)
        if level is not None:
            return level
        if isinstance(e, App):
            level = self._angle_levels(e.arg, out, memo)
            if e.func in TRIG_FUNCTIONS or e.func in HYPERBOLIC_FUNCTIONS:
                level += 1
                out.setdefault(level, []).append((e.func in HYPERBOLIC_FUNCTIONS, e.arg))
        elif isinstance(e, Add):
            level = max(self._angle_levels(t, out, memo) for t in e.terms)
        elif isinstance(e, Mul):
            level = max(self._angle_levels(f, out, memo) for f in e.factors)
        elif isinstance(e, Pow):
            level = max(self._angle_levels(e.base, out, memo), self._angle_levels(e.exponent, out, memo))
        else:
            level = -1
        memo[e] = level
        return level

    def prescan(self, e: Expr) -> None:
        """Group trig/hyperbolic arguments that are rational multiples of one another"""
        levels: Dict[int, List[Tuple[bool, Expr]]] = {}
        self._angle_levels(e, levels, {})
        for level in sorted(levels):
            groups: List[Tuple[bool, CanonicalForm, List["Rat"]]] = []
            for hyperbolic, arg in levels[level]:
                u = self._canonical(arg)
                if u.is_zero():
                    continue
                coefficient, rest = self._split_rational(u)
                for h, r, coefficients in groups:
                    if h == hyperbolic and r == rest:
                        coefficients.append(coefficient)
                        break
                else:
                    groups.append((hyperbolic, rest, [coefficient]))
            for hyperbolic, rest, coefficients in groups:
                if self._family(hyperbolic, rest) is not None:
                    continue
                base = _rational_gcd(coefficients)
                if max(abs(c / base) for c in coefficients) <= self.max_angle_multiple:
                    self._families.append(_AngleFamily(hyperbolic, rest, base))

    # Expressions

    def canonicalize(self, e: Expr) -> CanonicalForm:
        if not self.frozen:
            self.prescan(e)
        return self._canonical(e)

    def _canonical(self, e: Expr) -> CanonicalForm:
        cached = self._cache.get(e)
        if cached is not None:
            return cached
        if isinstance(e, Const):
            result = self.constant(e.value)
        elif isinstance(e, Z):
            result = self.variable()
        elif isinstance(e, Param):
            result = CanonicalForm(self._parameter(e.name), self.ring.one, self)
        elif isinstance(e, Add):
            result = self.sum(self._canonical(t) for t in e.terms)
        elif isinstance(e, Mul):
            result = self.product(self._canonical(f) for f in e.factors)
        elif isinstance(e, Pow):
            result = self._canonical_power(e)
        elif isinstance(e, App):
            result = self._application(e.func, self._canonical(e.arg))
        else:
            raise TypeError(f"not an expression node: {e!r}")
        self._cache[e] = result
        return result

    def _canonical_power(self, e: Pow) -> CanonicalForm:
        base = self._canonical(e.base)
        if isinstance(e.exponent, Const):
            return self.power(base, int(e.exponent.value.numerator))
        form = parameter_linear_form(e.exponent)
        if form is None:
            raise TowerError(f"unsupported exponent in {print_expr(e)}")
        coefficients, constant = form
        result = self._power_kernel(base, coefficients)
        if constant:
            result = result * self.power(base, int(constant.numerator))
        return result

    def _application(self, func: str, u: CanonicalForm) -> CanonicalForm:
        if func in TRIG_FUNCTIONS or func in HYPERBOLIC_FUNCTIONS:
            c, s = self._angle(u, func in HYPERBOLIC_FUNCTIONS)
            if func in ("sin", "sinh"):
                return s
            if func in ("cos", "cosh"):
                return c
            if func in ("tan", "tanh"):
                return s / c
            if func == "sec":
                return 1 / c
            if func == "csc":
                return 1 / s
            return c / s
        if func == "sqrt":
            return self.sqrt(u)
        if func == "exp":
            if u.is_zero():
                return self.one
            return self._function_kernel(KernelKind.EXP, u)
        if func == "log":
            if u.is_zero():
                raise TowerError("log(0) is undefined")
            if u == 1:
                return self.zero
            return self._function_kernel(KernelKind.LOG, u)
        if u.is_zero():
            return self.zero
        return self._function_kernel(KernelKind(func), u)

    def to_expr(self, cf: CanonicalForm) -> Expr:
        """Expression with kernels written out"""
        symbols = [z_expr, *(Param(p) for p in self.params), *(k.expr for k in self.kernels)]
        num = _poly_expr(self.lift(cf.num), symbols)
        den = self.lift(cf.den)
        if den == 1:
            return num
        return div(num, _poly_expr(den, symbols))

    def _split(self, p: MPoly) -> Dict[KernelMonomial, MPoly]:
        rows: Dict[KernelMonomial, Dict[tuple, object]] = {}
        for monom, coeff in self.lift(p).terms():
            rows.setdefault(monom[self._offset:], {})[monom[:self._offset]] = coeff
        return {k: self.base_ring.from_dict(v) for k, v in rows.items()}

    def kernel_coefficients(self, cf: CanonicalForm) -> List[Tuple[KernelMonomial, RatFunc]]:
        """Numerator coefficients per kernel monomial over Q(z, params).

        Coefficients are divided by the kernel-free content of the denominator,
        so a kernel-free form yields its own value as the single row.
        """
        if cf.is_zero():
            return []
        den_rows = list(self._split(cf.den).values())
        content = reduce(lambda acc, d: acc.gcd(d), den_rows[1:], den_rows[0])
        rows = self._split(cf.num)
        return [
            (exps, self.base_field(rows[exps]) / self.base_field(content))
            for exps in sorted(rows, reverse=True)
        ]

    def base_fraction(self, cf: CanonicalForm) -> Optional[RatFunc]:
        """cf as an element of Q(z, params), or None if a kernel occurs"""
        if not cf.is_kernel_free():
            return None
        num = self._split(cf.num).get(self._zero_kernel_monomial(), self.base_ring.zero)
        den = self._split(cf.den)[self._zero_kernel_monomial()]
        return self.base_field(num) / self.base_field(den)

    def _zero_kernel_monomial(self) -> KernelMonomial:
        return (0,) * len(self.kernels)

    def split_monomials(self, p: MPoly) -> Dict[KernelMonomial, MPoly]:
        """Polynomial p grouped by kernel monomial, coefficients in Q[z, params]"""
        return self._split(p)


def build_tower(e: Expr, params: Iterable[str] = (), depth_limit: Optional[int] = None) -> Tower:
    """Register every kernel of e and freeze the tower"""
    tower = Tower(set(params) | e.params, depth_limit)
    tower.canonicalize(e)
    logger.debug(f"tower for {print_expr(e)}: {tower!r}")
    return tower.freeze()


def canonicalize(e: Expr, t: Tower) -> CanonicalForm:
    return t.canonicalize(e)


def collect_kernel_coefficients(cf: CanonicalForm) -> List[Tuple[KernelMonomial, RatFunc]]:
    return cf.tower.kernel_coefficients(cf)
