"""Exact coefficient arithmetic: variable universes, sparse polynomials over Q
and the rational-function field they generate.

Polynomials are backed by FLINT's sparse ``fmpq_mpoly`` (deglex order, which is
also the fixed order used to canonicalize rational functions).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping

import flint

MAX_EXPONENT = 2**31 - 1


class ExponentOverflow(OverflowError):
    pass


def to_fmpq(c) -> flint.fmpq:
    if isinstance(c, flint.fmpq):
        return c
    if isinstance(c, int):
        return flint.fmpq(c)
    if isinstance(c, flint.fmpz):
        return flint.fmpq(c)
    if isinstance(c, Fraction):
        return flint.fmpq(c.numerator, c.denominator)
    if isinstance(c, str):
        f = Fraction(c)
        return flint.fmpq(f.numerator, f.denominator)
    raise TypeError(f"not an exact rational: {c!r}")


def fmpq_str(c: flint.fmpq) -> str:
    return str(c)


@dataclass(frozen=True)
class VarUniverse:
    """The variables of one Weyl-algebra instance for the sphere S^n.

    Coefficient variables (commutative x_ij, y_k, r, then slack a_pq, b_i, c_i,
    d, then the homogenizer h) come first; differential variables dx_ij, dy_k,
    dr follow, each paired with one commutative variable.
    """

    n: int
    diagonal: bool = False
    slack: bool = False
    homogenized: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.n + 1 > 9:
            raise ValueError("variable naming supports n <= 8")

    @cached_property
    def m(self) -> int:
        return self.n + 1

    @cached_property
    def x_pairs(self) -> tuple[tuple[int, int], ...]:
        m = self.m
        if self.diagonal:
            return tuple((i, i) for i in range(1, m + 1))
        return tuple((i, j) for i in range(1, m + 1) for j in range(i, m + 1))

    @cached_property
    def comm_names(self) -> tuple[str, ...]:
        xs = [f"x{i}{j}" for i, j in self.x_pairs]
        ys = [f"y{k}" for k in range(1, self.m + 1)]
        return tuple(xs + ys + ["r"])

    @cached_property
    def slack_names(self) -> tuple[str, ...]:
        if not self.slack:
            return ()
        a = [f"a{p}{q}" for p, q in self.x_pairs]
        b = [f"b{i}" for i in range(1, self.m + 1)]
        c = [f"c{i}" for i in range(1, self.m + 1)]
        return tuple(a + b + c + ["d"])

    @cached_property
    def coeff_names(self) -> tuple[str, ...]:
        h = ("h",) if self.homogenized else ()
        return self.comm_names + self.slack_names + h

    @cached_property
    def diff_names(self) -> tuple[str, ...]:
        return tuple("d" + v for v in self.comm_names)

    @cached_property
    def all_names(self) -> tuple[str, ...]:
        return self.coeff_names + self.diff_names

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.all_names)}

    @cached_property
    def ncoeff(self) -> int:
        return len(self.coeff_names)

    @cached_property
    def ndiff(self) -> int:
        return len(self.diff_names)

    @cached_property
    def ctx(self):
        return flint.fmpq_mpoly_ctx.get(self.coeff_names, "deglex")

    @cached_property
    def h_index(self) -> int | None:
        return self.coeff_names.index("h") if self.homogenized else None

    @cached_property
    def slack_indices(self) -> frozenset[int]:
        return frozenset(self.coeff_names.index(v) for v in self.slack_names)

    def pair_of_diff(self, k: int) -> int:
        """Coefficient-variable index paired with differential index ``k``."""
        return k

    def diff_index(self, name: str) -> int:
        """Index of a differential variable among ``diff_names``."""
        if not name.startswith("d"):
            name = "d" + name
        return self.diff_names.index(name)

    def coeff_index(self, name: str) -> int:
        return self.coeff_names.index(name)

    def kind(self, name: str) -> str:
        if name in self.comm_names:
            return "comm"
        if name in self.slack_names:
            return "slack"
        if name == "h" and self.homogenized:
            return "h"
        if name in self.diff_names:
            return "diff"
        raise KeyError(f"unknown variable {name!r} in {self}")

    # convenient names
    def x(self, i: int, j: int) -> str:
        i, j = min(i, j), max(i, j)
        return f"x{i}{j}"

    def dx(self, i: int, j: int) -> str:
        return "d" + self.x(i, j)

    def with_flags(self, **kw) -> "VarUniverse":
        args = dict(n=self.n, diagonal=self.diagonal, slack=self.slack,
                    homogenized=self.homogenized)
        args.update(kw)
        return VarUniverse(**args)

    def describe(self) -> dict:
        return {"n": self.n, "diagonal": self.diagonal, "slack": self.slack,
                "homogenized": self.homogenized}


class Polynomial:
    """Sparse polynomial with exact rational coefficients over a universe's
    coefficient variables.  Immutable."""

    __slots__ = ("U", "p")

    def __init__(self, U: VarUniverse, p=None):
        self.U = U
        self.p = U.ctx.from_dict({}) if p is None else p

    # construction
    @classmethod
    def const(cls, U: VarUniverse, c) -> "Polynomial":
        c = to_fmpq(c)
        if c == 0:
            return cls(U)
        return cls(U, U.ctx.from_dict({(0,) * U.ncoeff: c}))

    @classmethod
    def var(cls, U: VarUniverse, name: str) -> "Polynomial":
        i = U.coeff_index(name)
        e = [0] * U.ncoeff
        e[i] = 1
        return cls(U, U.ctx.from_dict({tuple(e): 1}))

    @classmethod
    def from_terms(cls, U: VarUniverse, terms: Mapping[tuple, object]) -> "Polynomial":
        d = {}
        for e, c in terms.items():
            e = tuple(int(v) for v in e)
            if len(e) != U.ncoeff:
                raise ValueError("exponent length mismatch")
            if any(v < 0 for v in e):
                raise ValueError("negative exponent")
            if any(v > MAX_EXPONENT for v in e):
                raise ExponentOverflow(e)
            c = to_fmpq(c)
            if c != 0:
                d[e] = d.get(e, 0) + c
        d = {e: c for e, c in d.items() if c != 0}
        return cls(U, U.ctx.from_dict(d))

    @property
    def terms(self) -> dict[tuple, flint.fmpq]:
        return dict(zip(self.p.monoms(), self.p.coeffs()))

    # arithmetic
    def _wrap(self, p) -> "Polynomial":
        return Polynomial(self.U, p)

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.U is not self.U and other.U != self.U:
                raise ValueError("polynomials over different universes")
            return other.p
        if isinstance(other, (int, Fraction, flint.fmpq, flint.fmpz)):
            return to_fmpq(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.p + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.p - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(o - self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if isinstance(other, Polynomial):
            _check_overflow(self.p, o)
        return self._wrap(self.p * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.p)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        if k and self.p.total_degree() * k > MAX_EXPONENT:
            raise ExponentOverflow(k)
        return self._wrap(self.p**k)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.p == o

    def __hash__(self):
        return hash(tuple(sorted((e, str(c)) for e, c in self.terms.items())))

    def __bool__(self):
        return not self.p.is_zero()

    def is_zero(self) -> bool:
        return self.p.is_zero()

    def is_constant(self) -> bool:
        return self.p.is_constant()

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        """Exact quotient; raises ArithmeticError if ``other`` does not divide."""
        try:
            return self._wrap(self.p / other.p)
        except Exception as exc:
            raise ArithmeticError("inexact polynomial division") from exc

    def divides(self, other: "Polynomial") -> bool:
        if self.is_zero():
            return other.is_zero()
        try:
            other.p / self.p
        except Exception:
            return False
        return True

    def derivative(self, name_or_index) -> "Polynomial":
        i = name_or_index if isinstance(name_or_index, int) else self.U.coeff_index(name_or_index)
        return self._wrap(self.p.derivative(i))

    def leading_coefficient(self) -> flint.fmpq:
        return self.p.leading_coefficient() if not self.p.is_zero() else flint.fmpq(0)

    def monic(self) -> "Polynomial":
        if self.p.is_zero():
            return self
        return self._wrap(self.p / self.p.leading_coefficient())

    def subs(self, values: Mapping[str, object]) -> "Polynomial":
        return self._wrap(self.p.subs({k: to_fmpq(v) for k, v in values.items()}))

    def total_degree(self) -> int:
        return int(self.p.total_degree()) if not self.p.is_zero() else -1

    def depends_on(self, i: int) -> bool:
        return any(e[i] for e in self.p.monoms())

    def __str__(self):
        return format_poly(self.U, self.p)

    def __repr__(self):
        return f"Polynomial({self})"


def _check_overflow(p, q):
    if p.is_zero() or q.is_zero():
        return
    dp, dq = p.degrees(), q.degrees()
    if any(a + b > MAX_EXPONENT for a, b in zip(dp, dq)):
        raise ExponentOverflow("exponent overflow in product")


def poly_arith(p: Polynomial, q: Polynomial, op: str) -> Polynomial:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown op {op!r}")


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monic greatest common divisor."""
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    g = p.p.gcd(q.p)
    return Polynomial(p.U, g).monic()


def poly_partial(p: Polynomial, v: str) -> Polynomial:
    if p.U.kind(v) != "comm":
        raise ValueError(f"{v} is not a commutative variable")
    return p.derivative(v)


class RationalFunction:
    """Reduced fraction num/den with den monic (under deglex).  Immutable."""

    __slots__ = ("U", "num", "den")

    def __init__(self, U: VarUniverse, num, den=None, *, reduced: bool = False):
        self.U = U
        ctx = U.ctx
        if den is None:
            den = ctx.from_dict({(0,) * U.ncoeff: 1})
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not reduced:
            num, den = _canonical(num, den, ctx)
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, p: Polynomial) -> "RationalFunction":
        return cls(p.U, p.p, reduced=True)

    @classmethod
    def const(cls, U: VarUniverse, c) -> "RationalFunction":
        return cls(U, U.ctx.from_dict({(0,) * U.ncoeff: to_fmpq(c)} if to_fmpq(c) != 0 else {}),
                   reduced=True)

    @classmethod
    def from_polys(cls, num: Polynomial, den: Polynomial) -> "RationalFunction":
        return cls(num.U, num.p, den.p)

    @property
    def numerator(self) -> Polynomial:
        return Polynomial(self.U, self.num)

    @property
    def denominator(self) -> Polynomial:
        return Polynomial(self.U, self.den)

    def _one_den(self) -> bool:
        return self.den.is_one()

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(self.U, other.p, reduced=True)
        if isinstance(other, (int, Fraction, flint.fmpq, flint.fmpz)):
            return RationalFunction.const(self.U, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _rf_add(self, o.num, o.den)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _rf_add(self, -o.num, o.den)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _rf_add(o, -self.num, self.den)

    def __neg__(self):
        return RationalFunction(self.U, -self.num, self.den, reduced=True)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return _rf_mul(self, o.num, o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return _rf_mul(self, o.den, o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.U, self.den, self.num)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.U, self.num**k, self.den**k, reduced=True)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def cross_equal(self, other: "RationalFunction") -> bool:
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def __bool__(self):
        return not self.num.is_zero()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def derivative(self, name_or_index) -> "RationalFunction":
        i = name_or_index if isinstance(name_or_index, int) else self.U.coeff_index(name_or_index)
        dn = self.num.derivative(i)
        if self.den.is_constant():
            return RationalFunction(self.U, dn, self.den, reduced=True)
        dd = self.den.derivative(i)
        if dd.is_zero():
            return RationalFunction(self.U, dn, self.den)
        # (n' d - n d') / d^2, cancel by d where possible
        return RationalFunction(self.U, dn * self.den - self.num * dd, self.den * self.den)

    def canonical(self) -> "RationalFunction":
        return RationalFunction(self.U, self.num, self.den)

    def subs(self, values: Mapping[str, object]) -> "RationalFunction":
        vals = {k: to_fmpq(v) for k, v in values.items()}
        return RationalFunction(self.U, self.num.subs(vals), self.den.subs(vals))

    def depends_on(self, i: int) -> bool:
        return any(e[i] for e in self.num.monoms()) or any(e[i] for e in self.den.monoms())

    def __str__(self):
        return format_ratfun(self.U, self.num, self.den)

    def __repr__(self):
        return f"RationalFunction({self})"


def _canonical(num, den, ctx):
    if num.is_zero():
        return num, ctx.from_dict({(0,) * ctx.nvars(): 1})
    if not den.is_constant():
        g = num.gcd(den)
        if not g.is_one():
            num = num / g
            den = den / g
    lc = den.leading_coefficient()
    if lc != 1:
        num = num / lc
        den = den / lc
    return num, den


def _rf_add(f: RationalFunction, n2, d2) -> RationalFunction:
    U = f.U
    n1, d1 = f.num, f.den
    if n2.is_zero():
        return f
    if n1.is_zero():
        return RationalFunction(U, n2, d2, reduced=True)
    if d1 == d2:
        if d1.is_one():
            return RationalFunction(U, n1 + n2, d1, reduced=True)
        return RationalFunction(U, n1 + n2, d1)
    if d1.is_constant() and d2.is_constant():
        return RationalFunction(U, n1 * d2 + n2 * d1, d1 * d2)
    g = d1.gcd(d2)
    if g.is_one():
        return RationalFunction(U, n1 * d2 + n2 * d1, d1 * d2)
    c1 = d1 / g
    c2 = d2 / g
    return RationalFunction(U, n1 * c2 + n2 * c1, c1 * d2)


def _rf_mul(f: RationalFunction, n2, d2) -> RationalFunction:
    U = f.U
    n1, d1 = f.num, f.den
    if n1.is_zero() or n2.is_zero():
        return RationalFunction(U, U.ctx.from_dict({}), reduced=True)
    if d1.is_one() and d2.is_one():
        return RationalFunction(U, n1 * n2, d1, reduced=True)
    # cross-cancel; each pair is already coprime
    if not d2.is_constant() and not n1.is_constant():
        g = n1.gcd(d2)
        if not g.is_one():
            n1 = n1 / g
            d2 = d2 / g
    if not d1.is_constant() and not n2.is_constant():
        g = n2.gcd(d1)
        if not g.is_one():
            n2 = n2 / g
            d1 = d1 / g
    num, den = n1 * n2, d1 * d2
    lc = den.leading_coefficient()
    if lc != 1:
        num = num / lc
        den = den / lc
    return RationalFunction(U, num, den, reduced=True)


def ratfun_arith(f: RationalFunction, g: RationalFunction, op: str) -> RationalFunction:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------- text form

def _monomial_text(names, e) -> str:
    parts = []
    for v, k in zip(names, e):
        if k == 1:
            parts.append(v)
        elif k:
            parts.append(f"{v}^{k}")
    return "*".join(parts)


def format_poly(U: VarUniverse, p) -> str:
    if p.is_zero():
        return "0"
    out = []
    for e, c in zip(p.monoms(), p.coeffs()):
        mono = _monomial_text(U.coeff_names, e)
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def format_ratfun(U: VarUniverse, num, den) -> str:
    if den.is_one():
        return format_poly(U, num)
    return f"({format_poly(U, num)})/({format_poly(U, den)})"


def python_expr(U: VarUniverse, p) -> str:
    """Python source evaluating ``p`` with the coefficient names as locals."""
    if p.is_zero():
        return "0.0"
    terms = []
    for e, c in zip(p.monoms(), p.coeffs()):
        factors = [repr(float(Fraction(int(c.p), int(c.q))))]
        for v, k in zip(U.coeff_names, e):
            if k == 1:
                factors.append(v)
            elif k:
                factors.append(f"{v}**{k}")
        terms.append("*".join(factors))
    return "(" + " + ".join(terms) + ")"
