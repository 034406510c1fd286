"""
Expression grammar (pyparsing)

    expr     := ['-'] term (('+' | '-') term)*
    term     := factor (('*' | '/') factor)*
    factor   := base ['^' exponent]
    base     := integer | 'z' | symbol | func '(' expr ')' | '(' expr ')'
    exponent := ['+' | '-'] integer | symbol | '(' expr ')'

Rationals come from folding integer division, e.g. ``1/12``.
"""
import re
from typing import Iterable, Optional
import logging

import pyparsing as pp

from qfps.engine.errors import (
    DomainError, ExprSyntaxError, InvalidExponentError, UnboundSymbolError,
    UnknownFunctionError,
)
from qfps.engine.expr import (
    App, Expr, FUNCTION_CATALOG, Param, RESERVED_NAMES, SERIES_VARIABLE, add, const,
    div, mul, neg, power, sub, z,
)

logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()

_PARAM_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


def validate_params(params: Iterable[str]) -> frozenset:
    """Check parameter names and return them as a frozenset"""
    names = frozenset(params)
    for name in names:
        if not _PARAM_NAME.match(name):
            raise DomainError(f"invalid parameter name '{name}'")
        if name in RESERVED_NAMES:
            raise DomainError(f"parameter name '{name}' is reserved")
    return names


class ExpressionParser:
    """Parser bound to a set of declared parameter names"""

    def __init__(self, params: Iterable[str] = ()):
        self.params = validate_params(params)
        self._grammar = self._build()

    def _symbol(self, s: str, loc: int, toks: pp.ParseResults) -> Expr:
        name = toks[0]
        if name == SERIES_VARIABLE:
            return z
        if name in self.params:
            return Param(name)
        if name in FUNCTION_CATALOG:
            raise ExprSyntaxError(f"function '{name}' needs an argument", loc)
        raise UnboundSymbolError(f"unbound symbol '{name}'", loc)

    @staticmethod
    def _call(s: str, loc: int, toks: pp.ParseResults) -> Expr:
        name, arg = toks[0], toks[1]
        if name not in FUNCTION_CATALOG:
            raise UnknownFunctionError(f"unknown function '{name}'", loc)
        return App(name, arg)

    @staticmethod
    def _factor(s: str, loc: int, toks: pp.ParseResults) -> Expr:
        if len(toks) == 1:
            return toks[0]
        try:
            return power(toks[0], toks[2])
        except InvalidExponentError as exc:
            raise InvalidExponentError(str(exc), loc) from None
        except DomainError as exc:
            raise ExprSyntaxError(str(exc), loc) from None

    @staticmethod
    def _term(s: str, loc: int, toks: pp.ParseResults) -> Expr:
        acc = toks[0]
        for i in range(1, len(toks), 2):
            try:
                acc = mul(acc, toks[i + 1]) if toks[i] == "*" else div(acc, toks[i + 1])
            except DomainError as exc:
                raise ExprSyntaxError(str(exc), loc) from None
        return acc

    @staticmethod
    def _expr(s: str, loc: int, toks: pp.ParseResults) -> Expr:
        items = list(toks)
        if isinstance(items[0], str) and items[0] == "-":
            acc = neg(items[1])
            items = items[2:]
        else:
            acc = items[0]
            items = items[1:]
        for i in range(0, len(items), 2):
            acc = add(acc, items[i + 1]) if items[i] == "+" else sub(acc, items[i + 1])
        return acc

    def _build(self) -> pp.ParserElement:
        lpar, rpar = pp.Suppress("("), pp.Suppress(")")
        identifier = pp.Word(pp.alphas + "_", pp.alphanums + "_")
        integer = pp.Word(pp.nums).set_parse_action(lambda toks: const(int(toks[0])))
        signed_integer = pp.Regex(r"[+-]?\d+").set_parse_action(lambda toks: const(int(toks[0])))

        expr = pp.Forward()
        call = (identifier + lpar + expr + rpar).set_parse_action(self._call)
        symbol = identifier.copy().set_parse_action(self._symbol)
        base = integer | call | symbol | (lpar + expr + rpar)
        exponent = signed_integer | symbol | (lpar + expr + rpar)
        factor = (base + pp.Optional(pp.Literal("^") + exponent)).set_parse_action(self._factor)
        term = (factor + pp.ZeroOrMore(pp.one_of("* /") + factor)).set_parse_action(self._term)
        expr <<= (pp.Optional(pp.Literal("-")) + term
                  + pp.ZeroOrMore(pp.one_of("+ -") + term)).set_parse_action(self._expr)
        return expr

    def parse(self, text: str) -> Expr:
        try:
            result = self._grammar.parse_string(text, parse_all=True)
        except pp.ParseBaseException as exc:
            raise ExprSyntaxError(f"syntax error: {exc.msg}", exc.loc) from None
        except RecursionError:
            raise ExprSyntaxError("expression nested too deeply") from None
        return result[0]


def parse(text: str, params: Optional[Iterable[str]] = None) -> Expr:
    """Parse `text`; every free symbol other than z must be listed in params"""
    return ExpressionParser(params or ()).parse(text)
