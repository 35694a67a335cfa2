"""Generator families of the Fisher-Bingham system and of the systems derived
from it (diagonal restriction, slack-shifted, homogenized)."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import Polynomial, RationalFunction, VarUniverse
from .weyl import WeylOperator, homogenize, to_R

SYSTEM_NAMES = {"I": "I", "It": "I~", "Ip": "I'", "Itp": "I~'", "Iph": "I'h"}


@dataclass
class SystemDescriptor:
    name: str
    n: int
    slack: str
    generators: list  # [(name, WeylOperator)]
    notes: list = field(default_factory=list)

    @property
    def ops(self) -> list:
        return [g for _, g in self.generators]

    @property
    def names(self) -> list:
        return [s for s, _ in self.generators]

    @property
    def U(self) -> VarUniverse:
        return self.generators[0][1].U

    def __getitem__(self, name: str) -> WeylOperator:
        for s, g in self.generators:
            if s == name:
                return g
        raise KeyError(name)

    def without(self, name: str) -> "SystemDescriptor":
        return SystemDescriptor(self.name, self.n, self.slack,
                                [(s, g) for s, g in self.generators if s != name], list(self.notes))

    def replace(self, name: str, op: WeylOperator) -> "SystemDescriptor":
        return SystemDescriptor(self.name, self.n, self.slack,
                                [(s, op if s == name else g) for s, g in self.generators], list(self.notes))

    def to_mode(self, mode: str) -> "SystemDescriptor":
        if mode != "R":
            raise ValueError("only conversion to R mode is supported")
        return SystemDescriptor(self.name, self.n, self.slack,
                                [(s, to_R(g)) for s, g in self.generators], list(self.notes))

    def as_dict(self, order=None) -> dict:
        return {"system": self.name, "n": self.n, "slack": self.slack,
                "universe": self.U.describe(),
                "generators": [{"name": s, "mode": g.mode, "text": g.to_str(order)}
                               for s, g in self.generators],
                "notes": self.notes}


class _Ops:
    """Small builder: named variables as operators in one universe and mode."""

    def __init__(self, U: VarUniverse, mode: str):
        self.U, self.mode = U, mode

    def v(self, name: str) -> WeylOperator:
        return WeylOperator.var(self.U, self.mode, name)

    def c(self, value) -> WeylOperator:
        return WeylOperator.scalar(self.U, self.mode, value)

    def x(self, i, j):
        return self.v(self.U.x(i, j))

    def dx(self, i, j):
        return self.v(self.U.dx(i, j))

    def y(self, k):
        return self.v(f"y{k}")

    def dy(self, k):
        return self.v(f"dy{k}")

    def bc(self, k):
        return self.v(f"b{k}") * self.v(f"c{k}")


def _B(o: _Ops) -> WeylOperator:
    U = o.U
    out = -(o.v("r") * o.v("r"))
    for i in range(1, U.m + 1):
        out = out + o.dy(i) * o.dy(i)
    return out


def _C_full(o: _Ops, i, j, shift=False, h=False) -> WeylOperator:
    """x_ij d_i^2 + 2(x_jj - x_ii) d_i d_j - x_ij d_j^2
    + sum_{s != i,j} (x_sj d_i d_s - x_is d_j d_s) + Y_j d_i - Y_i d_j,
    with Y_k = y_k (+ b_k c_k after the shift; h y_k + b_k c_k homogenized)."""
    U = o.U
    di, dj = o.dy(i), o.dy(j)
    out = o.x(i, j) * di * di + o.c(2) * (o.x(j, j) - o.x(i, i)) * di * dj - o.x(i, j) * dj * dj
    for s in range(1, U.m + 1):
        if s in (i, j):
            continue
        out = out + o.x(s, j) * di * o.dy(s) - o.x(i, s) * dj * o.dy(s)
    out = out + _Y(o, j, shift, h) * di - _Y(o, i, shift, h) * dj
    return out


def _Y(o: _Ops, k, shift, h):
    y = o.y(k)
    if h:
        y = o.v("h") * y
    if shift:
        y = y + o.bc(k)
    return y


def _E_full(o: _Ops, shift=False, h=False, diagonal_only=False) -> WeylOperator:
    U = o.U
    r_dr = o.v("r") * o.v("dr")
    if h:
        r_dr = o.v("h") * r_dr
    out = r_dr
    for i, j in U.x_pairs:
        if diagonal_only and i != j:
            continue
        out = out - o.c(2) * o.x(i, j) * o.dy(i) * o.dy(j)
    for i in range(1, U.m + 1):
        out = out - _Y(o, i, shift, h) * o.dy(i)
    const = o.c(U.n)
    if h:
        const = const * o.v("h") ** 3
    out = out - const
    if shift:
        out = out - o.v("d") ** 3
    return out


def universe(n: int, *, diagonal=False, slack=False, homogenized=False) -> VarUniverse:
    return VarUniverse(n, diagonal=diagonal, slack=slack, homogenized=homogenized)


def make_I(n: int, mode: str = "D", U: VarUniverse | None = None) -> SystemDescriptor:
    """The Fisher-Bingham system: A_pq, B, C_ij, E."""
    U = U or universe(n)
    o = _Ops(U, "D")
    gens = []
    for p, q in U.x_pairs:
        gens.append((f"A{p}{q}", o.dx(p, q) - o.dy(p) * o.dy(q)))
    gens.append(("B", _B(o)))
    for i in range(1, U.m + 1):
        for j in range(i + 1, U.m + 1):
            gens.append((f"C{i}{j}", _C_full(o, i, j)))
    gens.append(("E", _E_full(o)))
    sd = SystemDescriptor("I", n, "none", gens)
    return sd.to_mode("R") if mode == "R" else sd


def a_coeff(U: VarUniverse, i: int, j: int) -> Polynomial:
    """a_ij = 2 (x_ii - x_jj)."""
    return 2 * (Polynomial.var(U, f"x{i}{i}") - Polynomial.var(U, f"x{j}{j}"))


def make_C_tilde(o: _Ops, i: int, j: int, convention: str = "a") -> WeylOperator:
    """Diagonal C_ij.  convention 'a': a_ij d_i d_j + y_i d_j - y_j d_i;
    convention 'rotation': 2(x_jj - x_ii) d_i d_j + y_j d_i - y_i d_j
    (the diagonal restriction of the full C_ij, i.e. the negative)."""
    di, dj = o.dy(i), o.dy(j)
    aij = o.c(a_coeff(o.U, i, j))
    C = aij * di * dj + o.y(i) * dj - o.y(j) * di
    if convention == "a":
        return C
    if convention == "rotation":
        return -C
    raise ValueError(convention)


def make_I_tilde(n: int, mode: str = "D", *, diagonal: bool = True, convention: str = "a",
                 U: VarUniverse | None = None) -> SystemDescriptor:
    """Diagonal system: A_i, B, C_ij, E (and d_ij, i<j, when the universe keeps
    the off-diagonal variables)."""
    U = U or universe(n, diagonal=diagonal)
    o = _Ops(U, "D")
    gens = []
    for p, q in U.x_pairs:
        if p == q:
            gens.append((f"A{p}", o.dx(p, p) - o.dy(p) * o.dy(p)))
        else:
            gens.append((f"A{p}{q}", o.dx(p, q)))
    gens.append(("B", _B(o)))
    for i in range(1, U.m + 1):
        for j in range(i + 1, U.m + 1):
            gens.append((f"C{i}{j}", make_C_tilde(o, i, j, convention)))
    gens.append(("E", _E_full(o, diagonal_only=True)))
    sd = SystemDescriptor("I~", n, "none", gens)
    return sd.to_mode("R") if mode == "R" else sd


def make_Dk(n: int, k: int, U: VarUniverse | None = None, with_cofactors: bool = False):
    """D_k = d_k B - sum_{l<k} d_l a_lk^{-1} C_lk in R mode."""
    U = U or universe(n, diagonal=True)
    if not 1 <= k <= U.m:
        raise ValueError("k out of range")
    o = _Ops(U, "R")
    B = _B(o)
    cof = [(o.dy(k), "B")]
    out = o.dy(k) * B
    for l in range(1, k):
        C = make_C_tilde(o, l, k)
        inv = RationalFunction.from_poly(a_coeff(U, l, k)).inverse()
        M = -(o.dy(l) * o.c(inv))
        cof.append((M, f"C{l}{k}"))
        out = out + M * C
    return (out, cof) if with_cofactors else out


def prop2_basis(n: int, U: VarUniverse | None = None, drop=()) -> SystemDescriptor:
    """{A_i, B, C_ij, D_k, E} in R mode over the diagonal universe."""
    U = U or universe(n, diagonal=True)
    base = make_I_tilde(n, "R", U=U)
    gens = []
    for s, g in base.generators:
        if s == "E":
            for k in range(1, U.m + 1):
                gens.append((f"D{k}", make_Dk(n, k, U)))
        gens.append((s, g))
    gens = [(s, g) for s, g in gens if s not in drop]
    return SystemDescriptor("I~ (with D_k)", n, "none", gens)


# ---------------------------------------------------------------- slack systems

def draw_slack(U: VarUniverse, seed: int) -> dict:
    """Random rationals p/q with p, q in [10^3, 10^4] for every slack variable."""
    rng = random.Random(seed)
    return {v: Fraction(rng.randint(10**3, 10**4), rng.randint(10**3, 10**4)) for v in U.slack_names}


def zero_slack(U: VarUniverse) -> dict:
    return {v: 0 for v in U.slack_names}


def _apply_slack(sd: SystemDescriptor, slack) -> SystemDescriptor:
    if slack in (None, "sym"):
        return sd
    values = zero_slack(sd.U) if slack == "zero" else dict(slack)
    sd = SystemDescriptor(sd.name, sd.n, "numeric",
                          [(s, g.subs(values)) for s, g in sd.generators], list(sd.notes))
    return sd


def make_I_prime(n: int, slack="sym", mode: str = "D", U: VarUniverse | None = None) -> SystemDescriptor:
    """G' = {A'_pq, B, C'_ij, E'}."""
    U = U or universe(n, slack=True, homogenized=True)
    o = _Ops(U, "D")
    gens = []
    for p, q in U.x_pairs:
        a3 = o.v(f"a{p}{q}") ** 3
        gens.append((f"A'{p}{q}", o.x(p, q) * o.dx(p, q) - o.x(p, q) * o.dy(p) * o.dy(q) - a3))
    gens.append(("B", _B(o)))
    for i in range(1, U.m + 1):
        for j in range(i + 1, U.m + 1):
            gens.append((f"C'{i}{j}", _C_full(o, i, j, shift=True)))
    gens.append(("E'", _E_full(o, shift=True)))
    sd = _apply_slack(SystemDescriptor("I'", n, "symbolic", gens), slack)
    return sd.to_mode("R") if mode == "R" else sd


def make_I_tilde_prime(n: int, slack="sym", mode: str = "D", U: VarUniverse | None = None,
                       a_sign: str = "initial") -> SystemDescriptor:
    """G~' = {A~'_ii, x_ij d_ij - a_ij^3, B, C~'_ij, E~'}.

    ``a_sign='initial'`` writes A~'_ii = x_ii d_ii - x_ii d_i^2 - a_ii^3 (the
    (-w,w)-initial form of A'_ii); ``a_sign='flipped'`` writes
    x_ii d_i^2 - x_ii d_ii - a_ii^3 instead, which generates a different ideal.
    """
    U = U or universe(n, slack=True, homogenized=True)
    o = _Ops(U, "D")
    gens = []
    for p, q in U.x_pairs:
        a3 = o.v(f"a{p}{q}") ** 3
        if p == q:
            main = o.x(p, p) * o.dx(p, p) - o.x(p, p) * o.dy(p) * o.dy(p)
            if a_sign == "flipped":
                main = -main
            elif a_sign != "initial":
                raise ValueError(a_sign)
            gens.append((f"A~'{p}{q}", main - a3))
        else:
            gens.append((f"A~'{p}{q}", o.x(p, q) * o.dx(p, q) - a3))
    gens.append(("B", _B(o)))
    for i in range(1, U.m + 1):
        for j in range(i + 1, U.m + 1):
            di, dj = o.dy(i), o.dy(j)
            C = (o.c(2) * (o.x(j, j) - o.x(i, i)) * di * dj
                 + _Y(o, j, True, False) * di - _Y(o, i, True, False) * dj)
            gens.append((f"C~'{i}{j}", C))
    gens.append(("E~'", _E_full(o, shift=True, diagonal_only=True)))
    sd = _apply_slack(SystemDescriptor("I~'", n, "symbolic", gens), slack)
    return sd.to_mode("R") if mode == "R" else sd


def make_I_prime_h(n: int, U: VarUniverse | None = None) -> SystemDescriptor:
    """G'^h written out term by term (D^h mode)."""
    U = U or universe(n, slack=True, homogenized=True)
    o = _Ops(U, "Dh")
    h = o.v("h")
    gens = []
    for p, q in U.x_pairs:
        a3 = o.v(f"a{p}{q}") ** 3
        gens.append((f"A'h{p}{q}", h * o.x(p, q) * o.dx(p, q) - o.x(p, q) * o.dy(p) * o.dy(q) - a3))
    gens.append(("B", _B(o)))
    for i in range(1, U.m + 1):
        for j in range(i + 1, U.m + 1):
            gens.append((f"C'h{i}{j}", _C_full(o, i, j, shift=True, h=True)))
    gens.append(("E'h", _E_full(o, shift=True, h=True)))
    sd = SystemDescriptor("I'h", n, "symbolic", gens)
    for s, g in gens:
        if not g.is_homogeneous():
            raise AssertionError(f"{s} is not homogeneous")
    return sd


def C_prime_h(sd: SystemDescriptor, i: int, j: int) -> WeylOperator:
    """C'^h_ij with the convention C'^h_ji := -C'^h_ij."""
    if i < j:
        return sd[f"C'h{i}{j}"]
    return -sd[f"C'h{j}{i}"]


def homogenized_from_prime(n: int, U: VarUniverse | None = None) -> SystemDescriptor:
    """homogenize() applied termwise to G'."""
    sd = make_I_prime(n, U=U)
    return SystemDescriptor("I'h", n, "symbolic",
                            [(s.replace("'", "'h") if s != "B" else s, homogenize(g))
                             for s, g in sd.generators])


def make_system(name: str, n: int, slack="sym", mode: str | None = None) -> SystemDescriptor:
    """CLI vocabulary: I, It, Ip, Itp, Iph.  ``It`` keeps the off-diagonal
    variables, so its generators include the bare d_ij; ``slack`` is a
    value dict or one of the strings sym, zero, random:SEED."""
    if isinstance(slack, str) and name in ("Ip", "Itp"):
        slack = parse_slack(slack, universe(n, slack=True, homogenized=True))
    if name == "I":
        return make_I(n, mode or "D")
    if name == "It":
        return make_I_tilde(n, mode or "D", diagonal=False)
    if name == "Ip":
        return make_I_prime(n, slack, mode or "D")
    if name == "Itp":
        return make_I_tilde_prime(n, slack, mode or "D")
    if name == "Iph":
        if mode not in (None, "Dh"):
            raise ValueError("I'h lives in the homogenized algebra")
        return make_I_prime_h(n)
    raise ValueError(f"unknown system {name!r}")


def parse_slack(spec: str, U: VarUniverse):
    if spec in ("sym", None):
        return "sym"
    if spec == "zero":
        return "zero"
    if spec.startswith("random:"):
        return draw_slack(U, int(spec.split(":", 1)[1]))
    raise ValueError(f"bad slack spec {spec!r}; expected sym, zero or random:SEED")
