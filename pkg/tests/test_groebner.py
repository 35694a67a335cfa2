import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbrank.groebner import (Budget, BudgetExceeded, InfiniteRank, Reducer, buchberger, holonomic_rank,
                             ideals_equal, is_groebner, leading_term, s_pair, standard_monomials)
from fbrank.orders import d_exponent, make_h_order, make_prop2_order
from fbrank.systems import (draw_slack, make_I, make_I_prime_h, make_I_tilde, make_I_tilde_prime,
                            prop2_basis, universe)
from fbrank.text import parse_operator
from fbrank.weyl import WeylOperator


def dmonos(U, *specs):
    return sorted((d_exponent(U, s) for s in specs), key=make_prop2_order(U).dkey)


@pytest.fixture(scope="module")
def basis2():
    sd = prop2_basis(2)
    return sd, make_prop2_order(sd.U)


def test_generators_reduce_to_zero(basis2):
    sd, o = basis2
    red = Reducer(sd.ops, o)
    for g in sd.ops:
        assert red.normal_form(g).remainder.is_zero()


def test_single_division_by_B():
    sd = prop2_basis(1)
    U = sd.U
    nf = Reducer(sd.ops, make_prop2_order(U)).normal_form(parse_operator(U, "R", "dy1^2"))
    assert nf.remainder == parse_operator(U, "R", "-dy2^2 + r^2")


def test_S_B_C13_reduces_through_C23_and_D3(basis2):
    sd, o = basis2
    S = s_pair(sd["B"], sd["C13"], o)
    rep = Reducer([sd["C23"], sd["D3"]], o).normal_form(S, track=True)
    assert rep.remainder.is_zero()
    assert rep.verify([sd["C23"], sd["D3"]])


def test_S_C12_D1_with_D2_applied_first(basis2):
    sd, o = basis2
    S = s_pair(sd["C12"], sd["D1"], o)
    names = ["D2"] + [s for s in sd.names if s != "D2"]
    ops = [sd[s] for s in names]
    rep = Reducer(ops, o).normal_form(S, track=True)
    assert rep.remainder.is_zero()
    assert names[rep.chain[0]] == "D2"
    assert rep.verify(ops)


def test_S_D1_B_vanishes_before_reduction(basis2):
    sd, o = basis2
    assert s_pair(sd["D1"], sd["B"], o).is_zero()
    assert s_pair(sd["D1"], sd["B"], o, normalize=False).is_zero()


def test_prop2_basis_is_groebner(basis2):
    sd, o = basis2
    rep = is_groebner(sd.ops, o)
    assert rep.ok and not rep.failures()
    assert len(rep.pairs) == len(sd.ops) * (len(sd.ops) - 1) // 2


def test_dropping_D2_breaks_the_criterion():
    sd = prop2_basis(2, drop=("D2",))
    rep = is_groebner(sd.ops, make_prop2_order(sd.U))
    assert not rep.ok
    assert rep.failures()[0].remainder


def test_single_element_is_groebner():
    B = make_I_tilde(1, "R")["B"]
    assert is_groebner([B], make_prop2_order(B.U)).ok


def test_homogenized_system_is_groebner_without_new_elements():
    sd = make_I_prime_h(1)
    o = make_h_order(sd.U)
    assert is_groebner(sd.ops, o).ok
    assert buchberger(sd.ops, o).stats["added"] == 0


def test_buchberger_on_the_diagonal_generators_n1():
    sd = make_I_tilde(1, "R")
    o = make_prop2_order(sd.U)
    gb = buchberger(sd.ops, o)
    U = sd.U
    want = [{"dx11": 1}, {"dx22": 1}, {"dy1": 2}, {"dy1": 1, "dy2": 1}, {"dy2": 3}, {"dr": 1}]
    got = {leading_term(g, o)[0] for g in gb.generators}
    minimal = {m for m in got if not any(n != m and all(a <= b for a, b in zip(n, m)) for n in got)}
    assert minimal == set(dmonos(U, *want))


def test_buchberger_of_a_variable():
    U = universe(1, diagonal=True)
    d1 = WeylOperator.var(U, "R", "dy1")
    gb = buchberger([d1], make_prop2_order(U))
    assert gb.generators == [d1]


def test_standard_monomials_n1():
    sd = prop2_basis(1)
    U = sd.U
    std = standard_monomials(sd.ops, make_prop2_order(U))
    assert std == dmonos(U, {}, {"dy1": 1}, {"dy2": 1}, {"dy2": 2})


@pytest.mark.parametrize("n", [2, 3])
def test_standard_monomials_general_n(n):
    sd = prop2_basis(n)
    U = sd.U
    want = [{}, {"dy1": 1}] + [s for k in range(2, n + 2) for s in ({f"dy{k}": 1}, {f"dy{k}": 2})]
    assert standard_monomials(sd.ops, make_prop2_order(U)) == dmonos(U, *want)


def test_all_derivatives_leave_only_one():
    U = universe(1, diagonal=True)
    G = [WeylOperator.var(U, "R", v) for v in U.diff_names]
    assert holonomic_rank(G)[0] == 1


def test_infinite_staircase_is_reported():
    U = universe(1, diagonal=True)
    with pytest.raises(InfiniteRank):
        holonomic_rank([WeylOperator.var(U, "R", "dy1")])


@pytest.mark.parametrize("n,rank", [(1, 4), (3, 8)])
def test_diagonal_rank(n, rank):
    assert holonomic_rank(make_I_tilde(n, "R").ops)[0] == rank


def test_full_system_rank_n1():
    assert holonomic_rank(make_I(1, "R").ops)[0] == 4


@pytest.mark.parametrize("n", [1, 2, 3])
def test_hand_basis_and_scratch_run_agree(n):
    hand = prop2_basis(n)
    o = make_prop2_order(hand.U)
    scratch = buchberger(make_I_tilde(n, "R").ops, o)
    assert standard_monomials(scratch, o) == standard_monomials(hand.ops, o)


@pytest.mark.parametrize("seed", [0, 1])
def test_numeric_slack_preserves_rank(seed):
    U = make_I_tilde_prime(1).U
    sl = make_I_tilde_prime(1, slack=draw_slack(U, seed), mode="R")
    assert holonomic_rank(sl.ops, make_prop2_order(U))[0] == 4


def test_buchberger_output_generates_the_input_ideal():
    sd = make_I_tilde(1, "R")
    o = make_prop2_order(sd.U)
    ok, info = ideals_equal(sd.ops, buchberger(sd.ops, o).generators, o)
    assert ok, info


def test_budget_exhaustion_raises():
    sd = make_I_tilde(2, "R")
    with pytest.raises(BudgetExceeded):
        buchberger(sd.ops, make_prop2_order(sd.U), budget=Budget(3))


def _targets(sd, o):
    # products of basis elements with small differential monomials, plus noise
    U = sd.U
    mons = [parse_operator(U, "R", t) for t in ("dy1", "dy2^2", "dr*dy1", "y1*dy3", "1/(x11 - x22)*dx11")]
    return mons + [m * g for m in mons[:3] for g in sd.ops[:4]]


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_normal_form_strategy_invariance(seed):
    sd = prop2_basis(2)
    o = make_prop2_order(sd.U)
    red = Reducer(sd.ops, o)
    rng = random.Random(seed)
    for f in _targets(sd, o)[:8]:
        plain = red.normal_form(f)
        other = red.normal_form(f, rng=rng, track=True)
        assert plain.remainder == other.remainder
        assert other.verify(sd.ops)


def test_standard_representation_identity_and_degree_bound(basis2):
    sd, o = basis2
    red = Reducer(sd.ops, o)
    for f in _targets(sd, o):
        rep = red.normal_form(f, track=True)
        assert rep.verify(sd.ops)
        assert rep.is_standard(sd.ops, o)


def test_homogenized_representations_are_exact():
    sd = make_I_prime_h(1)
    o = make_h_order(sd.U)
    red = Reducer(sd.ops, o)
    P = parse_operator(sd.U, "Dh", "dy1*dy2")
    Q = parse_operator(sd.U, "Dh", "x12*h - b1")
    for g, g2 in zip(sd.ops, sd.ops[1:]):
        rep = red.normal_form(P * g + Q * g2, track=True)
        assert rep.remainder.is_zero() and rep.verify(sd.ops)
