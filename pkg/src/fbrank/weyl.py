"""Normally ordered elements of the Weyl algebra D, the rational Weyl algebra R
and the homogenized Weyl algebra D^h.

An operator is a map from a differential exponent vector to a coefficient that
stands to its left.  In D and D^h mode the coefficient is a :class:`Polynomial`
(commutative, slack and h variables); in R mode it is a
:class:`RationalFunction`.  Multiplication uses the Leibniz expansion

    d^a * q = sum_g binom(a, g) (d^g q) d^(a-g)        (times h^(2|g|) in D^h)
"""

from __future__ import annotations

from math import comb
from typing import Iterator

from .algebra import Polynomial, RationalFunction, VarUniverse, format_poly

MODES = ("D", "R", "Dh")


class ModeMismatch(ValueError):
    pass


class WeylOperator:
    __slots__ = ("U", "mode", "terms", "_shift", "_lead", "_flat", "__weakref__")

    def __init__(self, U: VarUniverse, mode: str, terms=None, *, _clean: bool = False):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if mode == "Dh" and not U.homogenized:
            raise ValueError("D^h mode needs a homogenized universe")
        self.U = U
        self.mode = mode
        if terms is None:
            terms = {}
        elif not _clean:
            terms = {e: c for e, c in terms.items() if not c.is_zero()}
        self.terms: dict[tuple, object] = terms
        self._shift = {}
        self._lead = {}
        self._flat = None

    # ------------------------------------------------------------ builders
    def coeff(self, c):
        """Coerce a scalar into this operator's coefficient ring."""
        return coefficient(self.U, self.mode, c)

    @classmethod
    def zero(cls, U, mode):
        return cls(U, mode, {}, _clean=True)

    @classmethod
    def scalar(cls, U, mode, c):
        c = coefficient(U, mode, c)
        return cls(U, mode, {(0,) * U.ndiff: c})

    @classmethod
    def one(cls, U, mode):
        return cls.scalar(U, mode, 1)

    @classmethod
    def var(cls, U, mode, name: str) -> "WeylOperator":
        if name in U.diff_names:
            e = [0] * U.ndiff
            e[U.diff_names.index(name)] = 1
            return cls(U, mode, {tuple(e): coefficient(U, mode, 1)}, _clean=True)
        return cls.scalar(U, mode, Polynomial.var(U, name))

    @classmethod
    def dmono(cls, U, mode, dexp, c=1) -> "WeylOperator":
        return cls(U, mode, {tuple(dexp): coefficient(U, mode, c)})

    # ------------------------------------------------------------ basics
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, WeylOperator):
            return NotImplemented
        if self.mode != other.mode:
            return False
        if self.terms.keys() != other.terms.keys():
            return False
        return all(self.terms[e] == other.terms[e] for e in self.terms)

    def __hash__(self):
        return hash((self.mode, frozenset((e, hash(c)) for e, c in self.terms.items())))

    def _check(self, other: "WeylOperator"):
        if self.mode != other.mode:
            raise ModeMismatch(f"{self.mode} vs {other.mode}")
        if self.U is not other.U and self.U != other.U:
            raise ModeMismatch("operators over different universes")

    def _as_op(self, other):
        if isinstance(other, WeylOperator):
            self._check(other)
            return other
        return WeylOperator.scalar(self.U, self.mode, other)

    def __add__(self, other):
        other = self._as_op(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            if e in t:
                s = t[e] + c
                if s.is_zero():
                    del t[e]
                else:
                    t[e] = s
            else:
                t[e] = c
        return WeylOperator(self.U, self.mode, t, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return WeylOperator(self.U, self.mode, {e: -c for e, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        return self + (-self._as_op(other))

    def __rsub__(self, other):
        return self._as_op(other) - self

    def __mul__(self, other):
        if isinstance(other, WeylOperator):
            return weyl_mul(self, other)
        return weyl_mul(self, WeylOperator.scalar(self.U, self.mode, other))

    def __rmul__(self, other):
        return self.left_scale(other)

    def __pow__(self, k: int):
        out = WeylOperator.one(self.U, self.mode)
        for _ in range(k):
            out = out * self
        return out

    def left_scale(self, c) -> "WeylOperator":
        """c * self for a scalar c (coefficientwise, c stands on the left)."""
        c = self.coeff(c)
        if c.is_zero():
            return WeylOperator.zero(self.U, self.mode)
        return WeylOperator(self.U, self.mode, {e: c * v for e, v in self.terms.items()})

    def shift(self, dexp: tuple) -> "WeylOperator":
        """d^dexp * self, cached (operators are immutable)."""
        dexp = tuple(dexp)
        r = self._shift.get(dexp)
        if r is None:
            if not any(dexp):
                r = self
            else:
                r = weyl_mul(WeylOperator(self.U, self.mode, {dexp: self.coeff(1)}, _clean=True), self)
            self._shift[dexp] = r
        return r

    # ------------------------------------------------------------ views
    def flat_terms(self) -> Iterator[tuple[tuple, object]]:
        """(full exponent, scalar) pairs; full = coefficient exponents + dexp.

        Only meaningful in D/D^h mode, where scalars are exact rationals."""
        if self.mode == "R":
            raise ValueError("flat terms need polynomial coefficients")
        for e, c in self.terms.items():
            p = c.p
            for m, a in zip(p.monoms(), p.coeffs()):
                yield m + e, a

    def flat(self) -> dict:
        if self._flat is None:
            self._flat = dict(self.flat_terms())
        return self._flat

    @classmethod
    def from_flat(cls, U, mode, flat: dict) -> "WeylOperator":
        nc = U.ncoeff
        out: dict = {}
        for full, c in flat.items():
            if c != 0:
                out.setdefault(full[nc:], {})[full[:nc]] = c
        return cls(U, mode, {e: Polynomial(U, U.ctx.from_dict(d)) for e, d in out.items()}, _clean=True)

    def ordered_terms(self, order=None) -> list:
        if self.mode == "R":
            keys = list(self.terms)
            if order is not None:
                keys.sort(key=order.dkey, reverse=True)
            else:
                keys.sort(key=lambda e: (sum(e), e), reverse=True)
            return [(e, self.terms[e]) for e in keys]
        ft = list(self.flat_terms())
        if order is not None:
            ft.sort(key=lambda t: order.key(t[0]), reverse=True)
        else:
            ft.sort(key=lambda t: (sum(t[0]), t[0]), reverse=True)
        return ft

    def total_degrees(self) -> set[int]:
        return {sum(full) for full, _ in self.flat_terms()}

    def is_homogeneous(self) -> bool:
        return len(self.total_degrees()) <= 1

    def d_support(self) -> set[tuple]:
        return set(self.terms)

    def map_coeffs(self, f) -> "WeylOperator":
        return WeylOperator(self.U, self.mode, {e: f(c) for e, c in self.terms.items()})

    def subs(self, values) -> "WeylOperator":
        """Substitute exact values for coefficient variables (e.g. slack)."""
        return self.map_coeffs(lambda c: c.subs(values))

    def to_str(self, order=None) -> str:
        return format_operator(self, order)

    def __str__(self):
        return format_operator(self)

    def __repr__(self):
        return f"WeylOperator[{self.mode}]({self})"


def coefficient(U: VarUniverse, mode: str, c):
    if mode == "R":
        if isinstance(c, RationalFunction):
            return c
        if isinstance(c, Polynomial):
            return RationalFunction.from_poly(c)
        return RationalFunction.const(U, c)
    if isinstance(c, Polynomial):
        return c
    if isinstance(c, RationalFunction):
        if not c.den.is_one():
            raise ValueError("rational coefficient in a polynomial-coefficient mode")
        return Polynomial(U, c.num)
    return Polynomial.const(U, c)


_HPOW: dict = {}


def _hpow(U: VarUniverse, k: int) -> Polynomial:
    key = (U, k)
    r = _HPOW.get(key)
    if r is None:
        r = Polynomial.var(U, "h") ** k
        _HPOW[key] = r
    return r


def _leibniz(alpha: tuple, q, mode: str, U: VarUniverse):
    """All (gamma, binom(alpha,gamma) * d^gamma q) with nonzero derivative."""
    items = [((), 0, q, 1)]  # (gamma entries, |gamma|, derivative, binomial weight)
    for k, a in enumerate(alpha):
        if not a:
            continue
        new = []
        for gam, g, cur, w in items:
            new.append((gam + ((k, 0),), g, cur, w))
            d = cur
            for j in range(1, a + 1):
                d = d.derivative(k)
                if d.is_zero():
                    break
                new.append((gam + ((k, j),), g + j, d, w * comb(a, j)))
        items = new
    return items


def weyl_mul(P: WeylOperator, Q: WeylOperator) -> WeylOperator:
    """Normally ordered product P*Q."""
    P._check(Q)
    U, mode = P.U, P.mode
    out: dict = {}
    homog = mode == "Dh"
    for alpha, p in P.terms.items():
        for beta, q in Q.terms.items():
            if not any(alpha):
                _acc(out, beta, p * q)
                continue
            for gam, g, dq, w in _leibniz(alpha, q, mode, U):
                e = list(a + b for a, b in zip(alpha, beta))
                for k, j in gam:
                    e[k] -= j
                c = p * dq
                if w != 1:
                    c = c * w
                if homog and g:
                    c = c * _hpow(U, 2 * g)
                _acc(out, tuple(e), c)
    return WeylOperator(U, mode, out)


def _acc(out: dict, e, c):
    if e in out:
        out[e] = out[e] + c
    else:
        out[e] = c


def commutator(P: WeylOperator, Q: WeylOperator) -> WeylOperator:
    return weyl_mul(P, Q) - weyl_mul(Q, P)


def contraction_formula(U: VarUniverse, mode: str, a: tuple, b: tuple) -> WeylOperator:
    """d^a * x^b by the closed formula (only commutative x^b, paired exponents).

    ``a`` and ``b`` are exponent vectors over the differential variables; ``b``
    is read as the exponent of the paired commutative variables.  Used as an
    independent check of :func:`weyl_mul`.
    """
    from itertools import product
    from math import factorial

    out = WeylOperator.zero(U, mode)
    ranges = [range(min(ai, bi) + 1) for ai, bi in zip(a, b)]
    for beta in product(*ranges):
        c = 1
        for ai, bi, g in zip(a, b, beta):
            c *= comb(ai, g) * comb(bi, g) * factorial(g)
        cexp = [0] * U.ncoeff
        for k, (bi, g) in enumerate(zip(b, beta)):
            cexp[k] = bi - g
        if mode == "Dh":
            cexp[U.h_index] += 2 * sum(beta)
        poly = Polynomial.from_terms(U, {tuple(cexp): c})
        dexp = tuple(ai - g for ai, g in zip(a, beta))
        out = out + WeylOperator(U, mode, {dexp: coefficient(U, mode, poly)})
    return out


# ---------------------------------------------------------------- modes

def to_R(P: WeylOperator) -> WeylOperator:
    if P.mode == "R":
        return P
    if P.mode == "Dh":
        P = dehomogenize(P)
    return WeylOperator(P.U, "R", {e: RationalFunction.from_poly(c) for e, c in P.terms.items()},
                        _clean=True)


def to_D(P: WeylOperator) -> tuple[WeylOperator, Polynomial]:
    """Clear denominators: returns (q*P as a D-mode operator, q)."""
    if P.mode != "R":
        return P, Polynomial.const(P.U, 1)
    den = P.U.ctx.from_dict({(0,) * P.U.ncoeff: 1})
    for c in P.terms.values():
        g = den.gcd(c.den)
        den = den * (c.den / g)
    q = Polynomial(P.U, den)
    terms = {e: Polynomial(P.U, c.num * (den / c.den)) for e, c in P.terms.items()}
    return WeylOperator(P.U, "D", terms, _clean=True), q


def homogenize(P: WeylOperator) -> WeylOperator:
    """Multiply each term by the h power lifting it to the maximal total degree.

    Every variable (commutative, differential, slack) has degree 1."""
    if P.mode == "Dh":
        return P
    if P.mode != "D":
        raise ModeMismatch("homogenize needs a D-mode operator")
    U = P.U
    if not U.homogenized:
        raise ValueError("universe has no homogenizing variable")
    flat = list(P.flat_terms())
    if not flat:
        return WeylOperator.zero(U, "Dh")
    top = max(sum(f) for f, _ in flat)
    hi = U.h_index
    out: dict = {}
    nc = U.ncoeff
    for full, c in flat:
        m = list(full[:nc])
        m[hi] += top - sum(full)
        e = full[nc:]
        out.setdefault(e, {})[tuple(m)] = c
    terms = {e: Polynomial(U, U.ctx.from_dict(d)) for e, d in out.items()}
    return WeylOperator(U, "Dh", terms)


def dehomogenize(P: WeylOperator) -> WeylOperator:
    if P.mode == "D":
        return P
    if P.mode != "Dh":
        raise ModeMismatch("dehomogenize needs a D^h-mode operator")
    return WeylOperator(P.U, "D", {e: c.subs({"h": 1}) for e, c in P.terms.items()})


def as_mode(P: WeylOperator, mode: str) -> WeylOperator:
    """Reinterpret the coefficients of P in another mode (no renormalization)."""
    if P.mode == mode:
        return P
    if mode == "R":
        return to_R(P)
    if mode == "D":
        if P.mode == "Dh":
            return dehomogenize(P)
        return to_D(P)[0]
    return WeylOperator(P.U, mode, dict(P.terms), _clean=True)


# ---------------------------------------------------------------- weights

def initial_form_weight(P: WeylOperator, w) -> WeylOperator:
    """Sum of the terms of maximal (-w, w)-degree.  ``w`` is a WeightVector."""
    if P.mode == "R":
        raise ModeMismatch("weight initial forms are taken in D mode")
    flat = list(P.flat_terms())
    if not flat:
        return P
    nc = P.U.ncoeff
    degs = [w.degree(full, nc) for full, _ in flat]
    top = max(degs)
    out: dict = {}
    for (full, c), dg in zip(flat, degs):
        if dg == top:
            out.setdefault(full[nc:], {})[full[:nc]] = c
    U = P.U
    return WeylOperator(U, P.mode, {e: Polynomial(U, U.ctx.from_dict(d)) for e, d in out.items()})


# ---------------------------------------------------------------- text

def dmono_text(U: VarUniverse, e: tuple) -> str:
    parts = []
    for v, k in zip(U.diff_names, e):
        if k == 1:
            parts.append(v)
        elif k:
            parts.append(f"{v}^{k}")
    return "*".join(parts)


def format_operator(P: WeylOperator, order=None) -> str:
    U = P.U
    if not P.terms:
        return "0"
    out = []
    if P.mode == "R":
        for e, c in P.ordered_terms(order):
            mono = dmono_text(U, e)
            cs = str(c)
            if not mono:
                body = cs
            elif cs == "1":
                body = mono
            elif cs == "-1":
                body = "-" + mono
            elif c.den.is_one() and len(list(c.num.monoms())) == 1:
                body = f"{cs}*{mono}"
            else:
                body = f"({cs})*{mono}"
            out.append(body)
        return _join(out)
    for full, c in P.ordered_terms(order):
        nc = U.ncoeff
        cm = format_poly(U, U.ctx.from_dict({full[:nc]: 1}))
        dm = dmono_text(U, full[nc:])
        mono = "*".join(p for p in (cm if cm != "1" else "", dm) if p)
        if not mono:
            out.append(str(c))
        elif c == 1:
            out.append(mono)
        elif c == -1:
            out.append("-" + mono)
        else:
            out.append(f"{c}*{mono}")
    return _join(out)


def _join(parts: list[str]) -> str:
    s = parts[0]
    for p in parts[1:]:
        if p.startswith("-"):
            s += " - " + p[1:]
        else:
            s += " + " + p
    return s
