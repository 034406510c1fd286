"""
Text and LaTeX printers for expression trees

The text printer emits the input grammar: parse(print_expr(e)) == e for every
tree built by the smart constructors.
"""
from typing import List

from qfps.engine.expr import (
    Add, App, Const, Expr, Mul, Param, Pow, Z, format_rat, is_integer,
)


def is_negative_term(e: Expr) -> bool:
    if isinstance(e, Const):
        return e.value < 0
    return isinstance(e, Mul) and isinstance(e.factors[0], Const) and e.factors[0].value < 0


def _negated(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(-e.value)
    c = -e.factors[0].value
    rest = e.factors[1:]
    if c == 1:
        return rest[0] if len(rest) == 1 else Mul(rest)
    return Mul((Const(c),) + rest)


def _print_negated(e: Expr) -> str:
    """Text of -e, without the sign; a sum keeps its parentheses"""
    body = _negated(e)
    if isinstance(body, Add):
        return f"({print_expr(body)})"
    return _print_mul_positive(body)


def _print_base(e: Expr) -> str:
    if isinstance(e, (Add, Mul, Pow)):
        return f"({print_expr(e)})"
    if isinstance(e, Const) and (e.value < 0 or not is_integer(e.value)):
        return f"({print_expr(e)})"
    return print_expr(e)


def _print_exponent(e: Expr) -> str:
    if isinstance(e, Const) and e.value >= 0:
        return format_rat(e.value)
    if isinstance(e, Param):
        return e.name
    return f"({print_expr(e)})"


def _print_factor(e: Expr) -> str:
    if isinstance(e, Add):
        return f"({print_expr(e)})"
    return print_expr(e)


def _print_mul(e: Mul) -> str:
    factors = list(e.factors)
    if isinstance(factors[0], Const) and factors[0].value < 0:
        return "-" + _print_negated(e)
    return _print_mul_positive(e)


def _print_mul_positive(e: Expr) -> str:
    if not isinstance(e, Mul):
        return print_expr(e)
    factors = list(e.factors)
    trailing = ""
    parts: List[str] = []
    if isinstance(factors[0], Const):
        c = factors.pop(0).value
        if c.numerator == 1:
            trailing = f"/{c.denominator}"
        else:
            parts.append(format_rat(c))
    for factor in factors:
        if (isinstance(factor, Pow) and isinstance(factor.exponent, Const)
                and factor.exponent.value < 0):
            n = -factor.exponent.value
            text = _print_base(factor.base) if n == 1 else f"{_print_base(factor.base)}^{format_rat(n)}"
            if not parts:
                parts.append("1")
            parts.append("/" + text)
        else:
            if parts:
                parts.append("*")
            parts.append(_print_factor(factor))
    return "".join(parts) + trailing


def print_expr(e: Expr) -> str:
    """Render e in the expression grammar"""
    if isinstance(e, Const):
        return format_rat(e.value) if e.value >= 0 else "-" + format_rat(-e.value)
    if isinstance(e, Z):
        return "z"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, App):
        return f"{e.func}({print_expr(e.arg)})"
    if isinstance(e, Pow):
        if isinstance(e.exponent, Const) and e.exponent.value < 0:
            return _print_mul_positive(Mul((e,)))
        return f"{_print_base(e.base)}^{_print_exponent(e.exponent)}"
    if isinstance(e, Mul):
        return _print_mul(e)
    if isinstance(e, Add):
        out = []
        for i, term in enumerate(e.terms):
            if is_negative_term(term):
                body = _print_negated(term)
                out.append(("-" if i == 0 else " - ") + body)
            else:
                body = print_expr(term)
                out.append(body if i == 0 else " + " + body)
        return "".join(out)
    raise TypeError(f"not an expression node: {e!r}")


# LaTeX

_LATEX_FUNCTIONS = {
    "arcsinh": r"\operatorname{arcsinh}",
    "arctanh": r"\operatorname{arctanh}",
}


def _latex_base(e: Expr) -> str:
    if isinstance(e, (Add, Mul, Pow)) or (isinstance(e, Const) and (e.value < 0 or not is_integer(e.value))):
        return rf"\left({latex_expr(e)}\right)"
    return latex_expr(e)


def _latex_rat(value) -> str:
    if is_integer(value):
        return str(value.numerator)
    return rf"\frac{{{value.numerator}}}{{{value.denominator}}}"


def latex_expr(e: Expr) -> str:
    """Render e as LaTeX math"""
    if isinstance(e, Const):
        return _latex_rat(e.value) if e.value >= 0 else "-" + _latex_rat(-e.value)
    if isinstance(e, Z):
        return "z"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, App):
        name = _LATEX_FUNCTIONS.get(e.func, "\\" + e.func)
        return rf"{name}\left({latex_expr(e.arg)}\right)"
    if isinstance(e, Pow):
        return f"{_latex_base(e.base)}^{{{latex_expr(e.exponent)}}}"
    if isinstance(e, Mul):
        numer: List[str] = []
        denom: List[str] = []
        sign = ""
        for factor in e.factors:
            if isinstance(factor, Const):
                c = factor.value
                if c < 0:
                    sign, c = "-", -c
                if c.numerator != 1:
                    numer.append(str(c.numerator))
                if c.denominator != 1:
                    denom.append(str(c.denominator))
            elif isinstance(factor, Pow) and isinstance(factor.exponent, Const) and factor.exponent.value < 0:
                n = -factor.exponent.value
                denom.append(_latex_base(factor.base) if n == 1 else f"{_latex_base(factor.base)}^{{{format_rat(n)}}}")
            else:
                numer.append(rf"\left({latex_expr(factor)}\right)" if isinstance(factor, Add) else latex_expr(factor))
        top = r" \, ".join(numer) or "1"
        if denom:
            return rf"{sign}\frac{{{top}}}{{{' '.join(denom)}}}"
        return sign + top
    if isinstance(e, Add):
        out = []
        for i, term in enumerate(e.terms):
            if is_negative_term(term):
                body = _negated(term)
                text = latex_expr(body)
                if isinstance(body, Add):
                    text = rf"\left({text}\right)"
                out.append(("-" if i == 0 else " - ") + text)
            else:
                out.append(latex_expr(term) if i == 0 else " + " + latex_expr(term))
        return "".join(out)
    raise TypeError(f"not an expression node: {e!r}")
