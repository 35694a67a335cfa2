"""Left division, S-pairs, Buchberger's algorithm, standard monomials and
holonomic rank in D, R and D^h.

Division in R mode is over the rational-function field, so every generator is
made monic (leading coefficient 1) before use; in D and D^h mode the leading
coefficient is a rational number.  All reductions count against a
:class:`Budget`; running out raises :class:`BudgetExceeded` instead of
returning a partial answer.
"""

from __future__ import annotations

import itertools
import os
import random
import time
from dataclasses import dataclass, field

from .algebra import Polynomial, to_fmpq
from .orders import TermOrder, WeightVector
from .weyl import WeylOperator, commutator, initial_form_weight

DEFAULT_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    pass


class NotCertified(ValueError):
    pass


class InfiniteRank(ValueError):
    pass


class Budget:
    def __init__(self, steps: int | None = None, seconds: float | None = None):
        if steps is None:
            steps = int(os.environ.get("FBRANK_BUDGET", DEFAULT_BUDGET))
        self.limit = steps
        self.used = 0
        self.deadline = None if seconds is None else time.monotonic() + seconds

    def tick(self, k: int = 1):
        self.used += k
        if self.used > self.limit:
            raise BudgetExceeded(f"reduction budget of {self.limit} steps exhausted")
        if self.deadline is not None and (self.used & 63) == 0 and time.monotonic() > self.deadline:
            raise BudgetExceeded("time budget exhausted")


# ---------------------------------------------------------------- leading terms

def leading_term(P: WeylOperator, order: TermOrder):
    """(monomial, coefficient) of the greatest term.  R mode monomials are
    differential exponents; D/D^h monomials are full exponents."""
    if not P.terms:
        raise ValueError("zero operator has no initial monomial")
    lt = P._lead.get(id(order))
    if lt is None:
        if P.mode == "R":
            e = max(P.terms, key=order.dkey)
            lt = (e, P.terms[e])
        else:
            flat = P.flat()
            e = max(flat, key=order.key)
            lt = (e, flat[e])
        P._lead[id(order)] = lt
    return lt


def initial_monomial(P: WeylOperator, order: TermOrder):
    return leading_term(P, order)


def _divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: tuple, b: tuple) -> tuple:
    return tuple(max(x, y) for x, y in zip(a, b))


def _diff(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def _coprime(a: tuple, b: tuple) -> bool:
    return not any(x and y for x, y in zip(a, b))


def monic(P: WeylOperator, order: TermOrder) -> WeylOperator:
    _, c = leading_term(P, order)
    if P.mode == "R":
        if c == 1:
            return P
        return P.left_scale(c.inverse())
    if c == 1:
        return P
    return P.left_scale(Polynomial.const(P.U, 1 / to_fmpq(c)))


def _multiplier(P: WeylOperator, mono: tuple, coeff) -> WeylOperator:
    """The operator coeff * mono (mono full or differential exponent)."""
    U = P.U
    if P.mode == "R":
        return WeylOperator(U, "R", {mono: coeff})
    nc = U.ncoeff
    poly = Polynomial(U, U.ctx.from_dict({mono[:nc]: coeff}))
    return WeylOperator(U, P.mode, {mono[nc:]: poly})


def _shifted(g: WeylOperator, mono: tuple) -> WeylOperator:
    """mono * g for a monomial (no coefficient)."""
    if g.mode == "R":
        return g.shift(mono)
    nc = g.U.ncoeff
    cpart, dpart = mono[:nc], mono[nc:]
    s = g.shift(dpart)
    if not any(cpart):
        return s
    key = ("c", cpart, dpart)
    r = g._shift.get(key)
    if r is None:
        r = s.left_scale(Polynomial(g.U, g.U.ctx.from_dict({cpart: 1})))
        g._shift[key] = r
    return r


# ---------------------------------------------------------------- division

@dataclass
class StandardRepresentation:
    target: WeylOperator
    cofactors: list  # [(multiplier WeylOperator, generator index)]
    remainder: WeylOperator
    chain: list = field(default_factory=list)  # generator index per step

    @property
    def steps(self) -> int:
        return len(self.chain)

    def recombine(self, G) -> WeylOperator:
        total = self.remainder
        for M, i in self.cofactors:
            total = total + M * G[i]
        return total

    def verify(self, G) -> bool:
        return self.recombine(G) == self.target

    def is_standard(self, G, order) -> bool:
        if self.target.is_zero():
            return all((M * G[i]).is_zero() for M, i in self.cofactors)
        top = _key(self.target, order)
        for M, i in self.cofactors:
            prod = M * G[i]
            if prod and _key(prod, order) > top:
                return False
        return True


def _key(P, order):
    m, _ = leading_term(P, order)
    return order.dkey(m) if P.mode == "R" else order.key(m)


class Reducer:
    """A frozen divisor list prepared for repeated normal forms."""

    def __init__(self, G, order: TermOrder):
        G = list(G)
        if not G:
            raise ValueError("empty divisor list")
        self.G = G
        self.order = order
        self.mode = G[0].mode
        self.U = G[0].U
        self.monic = []
        self.lead = []
        self.lc = []
        for g in G:
            if g.is_zero():
                raise ValueError("zero divisor")
            m, c = leading_term(g, order)
            self.lead.append(m)
            self.lc.append(c)
            self.monic.append(monic(g, order))

    def find(self, mono, rng=None):
        if rng is None:
            for i, m in enumerate(self.lead):
                if _divides(m, mono):
                    return i
            return None
        hits = [i for i, m in enumerate(self.lead) if _divides(m, mono)]
        return rng.choice(hits) if hits else None

    def normal_form(self, f: WeylOperator, *, track: bool = False, budget: Budget | None = None,
                    rng: random.Random | None = None, full: bool = True) -> StandardRepresentation:
        budget = budget or Budget()
        if self.mode == "R":
            return self._nf_R(f, track, budget, rng, full)
        return self._nf_D(f, track, budget, rng, full)

    def _nf_R(self, f, track, budget, rng, full):
        order = self.order
        dkey = order.dkey
        work = dict(f.terms)
        rem = {}
        chain = []
        cof: dict[int, dict] = {}
        while work:
            e = max(work, key=dkey)
            c = work[e]
            i = self.find(e, rng)
            if i is None:
                if not full:
                    rem.update(work)
                    break
                rem[e] = c
                del work[e]
                continue
            budget.tick()
            chain.append(i)
            shift = _diff(e, self.lead[i])
            S = self.monic[i].shift(shift)
            for se, sc in S.terms.items():
                v = work.get(se)
                nv = -(c * sc) if v is None else v - c * sc
                if nv.is_zero():
                    work.pop(se, None)
                else:
                    work[se] = nv
            if track:
                d = cof.setdefault(i, {})
                d[shift] = d[shift] + c if shift in d else c
        U = f.U
        return self._finish(f, WeylOperator(U, "R", rem), cof, chain, track)

    def _nf_D(self, f, track, budget, rng, full):
        order = self.order
        key = order.key
        work = dict(f.flat())
        rem = {}
        chain = []
        cof: dict[int, dict] = {}
        while work:
            e = max(work, key=key)
            c = work[e]
            i = self.find(e, rng)
            if i is None:
                if not full:
                    rem.update(work)
                    break
                rem[e] = c
                del work[e]
                continue
            budget.tick()
            chain.append(i)
            shift = _diff(e, self.lead[i])
            S = _shifted(self.monic[i], shift).flat()
            for se, sc in S.items():
                nv = work.get(se, 0) - c * sc
                if nv == 0:
                    work.pop(se, None)
                else:
                    work[se] = nv
            if track:
                d = cof.setdefault(i, {})
                d[shift] = d.get(shift, 0) + c
        U = f.U
        return self._finish(f, WeylOperator.from_flat(U, f.mode, rem), cof, chain, track)

    def _finish(self, f, remainder, cof, chain, track):
        cofactors = []
        if track:
            U, mode = f.U, f.mode
            for i, d in sorted(cof.items()):
                if mode == "R":
                    M = WeylOperator(U, "R", d)
                    inv = self.lc[i].inverse()
                else:
                    M = WeylOperator.from_flat(U, mode, d)
                    inv = 1 / to_fmpq(self.lc[i])
                # monic g = (1/lc) g, so M * monic = (M * (1/lc)) * g
                M = M * WeylOperator.scalar(U, mode, inv)
                if M:
                    cofactors.append((M, i))
        return StandardRepresentation(f, cofactors, remainder, chain)


def normal_form(f, G, order, track=False, budget=None, rng=None) -> StandardRepresentation:
    return Reducer(G, order).normal_form(f, track=track, budget=budget, rng=rng)


# ---------------------------------------------------------------- S-pairs

def s_pair(f: WeylOperator, g: WeylOperator, order: TermOrder, *, normalize: bool = True) -> WeylOperator:
    """lcm/in(f) * (f/lc) - lcm/in(g) * (g/lc).

    With ``normalize=False`` the leading coefficients are not divided out,
    which is the form used when S-pairs are written by hand."""
    f._check(g)
    mf, _ = leading_term(f, order)
    mg, _ = leading_term(g, order)
    L = _lcm(mf, mg)
    if normalize:
        f, g = monic(f, order), monic(g, order)
    return _shifted(f, _diff(L, mf)) - _shifted(g, _diff(L, mg))


def initials_coprime(f, g, order) -> bool:
    return _coprime(leading_term(f, order)[0], leading_term(g, order)[0])


@dataclass
class PairRecord:
    i: int
    j: int
    coprime: bool
    steps: int
    zero: bool
    chain: list
    remainder: str = ""

    def as_dict(self):
        d = {"pair": [self.i, self.j], "coprime": self.coprime, "steps": self.steps,
             "reduces_to_zero": self.zero, "chain": self.chain}
        if not self.zero:
            d["remainder"] = self.remainder
        return d


@dataclass
class GBReport:
    ok: bool
    pairs: list

    def failures(self):
        return [p for p in self.pairs if not p.zero]

    def as_dict(self, names=None):
        out = {"is_groebner": self.ok, "pairs": []}
        for p in self.pairs:
            d = p.as_dict()
            if names:
                d["pair"] = [names[p.i], names[p.j]]
                d["chain"] = [names[k] for k in p.chain]
            out["pairs"].append(d)
        return out


def is_groebner(G, order: TermOrder, budget: Budget | None = None, stop_on_failure=False) -> GBReport:
    """Buchberger's criterion: every S-pair reduces to zero."""
    G = list(G)
    budget = budget or Budget()
    red = Reducer(G, order)
    records = []
    ok = True
    for i, j in itertools.combinations(range(len(G)), 2):
        S = s_pair(G[i], G[j], order)
        cop = _coprime(red.lead[i], red.lead[j])
        if S.is_zero():
            records.append(PairRecord(i, j, cop, 0, True, []))
            continue
        sr = red.normal_form(S, budget=budget)
        zero = sr.remainder.is_zero()
        records.append(PairRecord(i, j, cop, sr.steps, zero, sr.chain,
                                  "" if zero else sr.remainder.to_str(order)))
        if not zero:
            ok = False
            if stop_on_failure:
                break
    return GBReport(ok, records)


# ---------------------------------------------------------------- Buchberger

@dataclass
class GroebnerBasis:
    generators: list
    order: TermOrder
    mode: str
    certified: bool = False
    stats: dict = field(default_factory=dict)

    def initial_monomials(self):
        return [leading_term(g, self.order)[0] for g in self.generators]

    def reducer(self) -> Reducer:
        return Reducer(self.generators, self.order)

    def contains(self, f, budget=None) -> bool:
        return self.reducer().normal_form(f, budget=budget).remainder.is_zero()


def buchberger(G, order: TermOrder, *, budget: Budget | None = None, criterion: bool = True,
               certify: bool = False, reduce_tails: bool = False, max_rounds: int | None = None) -> GroebnerBasis:
    """Round-based Buchberger: each round reduces all pending pairs against a
    frozen snapshot of the basis, then admits the nonzero remainders."""
    budget = budget or Budget()
    basis = [monic(g, order) for g in G if not g.is_zero()]
    if not basis:
        raise ValueError("no nonzero generators")
    mode = basis[0].mode
    pairs = list(itertools.combinations(range(len(basis)), 2))
    rounds = 0
    skipped = 0
    reduced_pairs = 0
    added = 0
    while pairs:
        rounds += 1
        if max_rounds is not None and rounds > max_rounds:
            raise BudgetExceeded("round limit reached")
        red = Reducer(basis, order)
        if mode == "Dh":
            pairs.sort(key=lambda p: order.key(_lcm(red.lead[p[0]], red.lead[p[1]])))
        new = []
        for i, j in pairs:
            f, g = basis[i], basis[j]
            if criterion and _coprime(red.lead[i], red.lead[j]):
                C = commutator(f, g)
                if C.is_zero() or red.normal_form(C, budget=budget).remainder.is_zero():
                    skipped += 1
                    continue
            S = s_pair(f, g, order)
            if S.is_zero():
                continue
            reduced_pairs += 1
            r = red.normal_form(S, budget=budget).remainder
            if r:
                new.append(r)
        pairs = []
        for r in new:
            # reduce against what has been admitted so far in this round
            r = Reducer(basis, order).normal_form(r, budget=budget).remainder
            if r.is_zero():
                continue
            r = monic(r, order)
            k = len(basis)
            basis.append(r)
            added += 1
            pairs.extend((i, k) for i in range(k))
    basis = _minimalize(basis, order)
    if reduce_tails:
        basis = _interreduce(basis, order, budget)
    gb = GroebnerBasis(basis, order, mode, certified=not criterion,
                       stats={"rounds": rounds, "pairs_reduced": reduced_pairs, "added": added,
                              "pairs_skipped_by_criterion": skipped, "steps": budget.used})
    if certify and not gb.certified:
        gb.certified = is_groebner(basis, order, budget=budget).ok
        if not gb.certified:
            raise RuntimeError("Buchberger output failed certification")
    return gb


def _minimalize(basis, order):
    leads = [leading_term(g, order)[0] for g in basis]
    keep = []
    for i, m in enumerate(leads):
        dominated = False
        for j, m2 in enumerate(leads):
            if i == j:
                continue
            if _divides(m2, m) and (m2 != m or j < i):
                dominated = True
                break
        if not dominated:
            keep.append(basis[i])
    return keep


def _interreduce(basis, order, budget):
    out = []
    for i, g in enumerate(basis):
        others = basis[:i] + basis[i + 1:]
        if not others:
            out.append(g)
            continue
        lead_m, lead_c = leading_term(g, order)
        tail = g - _lead_op(g, lead_m, lead_c)
        r = Reducer(others, order).normal_form(tail, budget=budget).remainder if tail else tail
        out.append(_lead_op(g, lead_m, lead_c) + r)
    return out


def _lead_op(g, m, c):
    return _multiplier(g, m, c if g.mode != "R" else c)


# ---------------------------------------------------------------- staircase

def _std_monomials_from_leads(leads, nd):
    bounds = []
    for k in range(nd):
        pure = [m[k] for m in leads if m[k] and all(v == 0 for t, v in enumerate(m) if t != k)]
        if not pure:
            raise InfiniteRank(f"no pure power of differential variable {k} among initials")
        bounds.append(min(pure))
    out = []
    for e in itertools.product(*(range(b) for b in bounds)):
        if not any(_divides(m, e) for m in leads):
            out.append(e)
    return out


def standard_monomials(G, order: TermOrder):
    """Differential monomials outside the initial ideal (R mode), ascending."""
    if isinstance(G, GroebnerBasis):
        if not G.certified and not G.stats:
            raise NotCertified("basis not certified")
        gens = G.generators
    else:
        gens = list(G)
    if gens[0].mode != "R":
        raise ValueError("standard monomials are computed in R mode")
    leads = [leading_term(g, order)[0] for g in gens]
    out = _std_monomials_from_leads(leads, gens[0].U.ndiff)
    out.sort(key=order.dkey)
    return out


def holonomic_rank(generators, order: TermOrder | None = None, budget: Budget | None = None,
                   criterion: bool = True):
    """Number of standard monomials of a Groebner basis of R*J; returns
    (rank, GroebnerBasis).  Raises InfiniteRank when the staircase is infinite."""
    from .orders import make_rank_order

    generators = list(generators)
    if order is None:
        order = make_rank_order(generators[0].U)
    gb = buchberger(generators, order, budget=budget, criterion=criterion)
    return len(standard_monomials(gb, order)), gb


def initial_ideal_weight(G: GroebnerBasis, w: WeightVector):
    if not G.certified:
        raise NotCertified("initial ideal needs a certified basis")
    return [initial_form_weight(g, w) for g in G.generators]


def ideal_contains_all(gb: GroebnerBasis, F, budget=None) -> list:
    """Indices of F not in the ideal of gb (empty list = all members)."""
    red = gb.reducer()
    return [i for i, f in enumerate(F) if not red.normal_form(f, budget=budget).remainder.is_zero()]


def ideals_equal(F1, F2, order, budget=None):
    """Mutual membership after a Buchberger run on each side."""
    g1 = buchberger(F1, order, budget=budget)
    g2 = buchberger(F2, order, budget=budget)
    miss12 = ideal_contains_all(g1, F2, budget)
    miss21 = ideal_contains_all(g2, F1, budget)
    return (not miss12 and not miss21), {"missing_from_first": miss12, "missing_from_second": miss21,
                                         "gb_sizes": [len(g1.generators), len(g2.generators)]}
