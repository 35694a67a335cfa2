"""Parse the textual forms written by the formatters back into objects.

Accepted syntax: integers, variable names of the universe, ``+ - * / ^``
and parentheses.  ``**`` is accepted as a synonym of ``^``.
"""

from __future__ import annotations

import ast

from .algebra import Polynomial, RationalFunction, VarUniverse
from .weyl import WeylOperator


class ParseError(ValueError):
    pass


_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


class _Evaluator:
    def __init__(self, U: VarUniverse, mode: str | None):
        self.U = U
        self.mode = mode

    def lift(self, v):
        if isinstance(v, WeylOperator):
            return v
        return WeylOperator.scalar(self.U, self.mode, v)

    def leaf(self, name: str):
        U = self.U
        if name in U.diff_names:
            if self.mode is None:
                raise ParseError(f"differential variable {name!r} in a scalar expression")
            return WeylOperator.var(U, self.mode, name)
        if name in U.coeff_names:
            return RationalFunction.from_poly(Polynomial.var(U, name))
        raise ParseError(f"unknown variable {name!r}")

    def eval(self, node):
        if isinstance(node, ast.Expression):
            return self.eval(node.body)
        if isinstance(node, ast.Constant) and type(node.value) is int:
            return RationalFunction.const(self.U, node.value)
        if isinstance(node, ast.Name):
            return self.leaf(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = self.eval(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
            return self.binop(node)
        raise ParseError(f"unsupported syntax: {ast.dump(node)[:60]}")

    def binop(self, node):
        a = self.eval(node.left)
        if isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and type(node.right.value) is int):
                raise ParseError("exponents must be integer literals")
            k = node.right.value
            if k < 0 and isinstance(a, WeylOperator):
                raise ParseError("negative power of an operator")
            return a ** k
        b = self.eval(node.right)
        if isinstance(node.op, ast.Div):
            if isinstance(b, WeylOperator):
                raise ParseError("division by an operator")
            if isinstance(a, WeylOperator):
                return a.left_scale(RationalFunction.const(self.U, 1) / b)
            return a / b
        ops = isinstance(a, WeylOperator) or isinstance(b, WeylOperator)
        if ops:
            a, b = self.lift(a), self.lift(b)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        return a * b


def _tree(text: str):
    try:
        return ast.parse(text.replace("^", "**").strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None


def _run(U, mode, text):
    try:
        return _Evaluator(U, mode).eval(_tree(text))
    except ParseError:
        raise
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"cannot evaluate {text!r}: {exc}") from None


def parse_ratfun(U: VarUniverse, text: str) -> RationalFunction:
    return _run(U, None, text)


def parse_poly(U: VarUniverse, text: str) -> Polynomial:
    f = parse_ratfun(U, text)
    if not f.den.is_one():
        raise ParseError(f"{text!r} is not a polynomial")
    return f.numerator


def parse_operator(U: VarUniverse, mode: str, text: str) -> WeylOperator:
    """Parse an operator; products are Weyl products, read left to right."""
    v = _run(U, mode, text)
    try:
        return v if isinstance(v, WeylOperator) else WeylOperator.scalar(U, mode, v)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
