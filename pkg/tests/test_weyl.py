import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbrank.algebra import RationalFunction
from fbrank.orders import WeightVector, make_weight
from fbrank.systems import make_I_prime, make_I_tilde
from fbrank.text import parse_operator, parse_ratfun
from fbrank.weyl import (ModeMismatch, WeylOperator, commutator, dehomogenize, homogenize,
                         initial_form_weight, to_R, weyl_mul)

from conftest import U1, U1H, operators


def D(text, U=U1):
    return parse_operator(U, "D", text)


def test_canonical_commutation():
    assert weyl_mul(D("dy1"), D("x11")) == D("x11*dy1")
    assert weyl_mul(D("dy1"), D("y1")) == D("y1*dy1 + 1")
    Dh = lambda t: parse_operator(U1H, "Dh", t)  # noqa: E731
    assert weyl_mul(Dh("dy1"), Dh("y1")) == Dh("y1*dy1 + h^2")


def test_leibniz_on_powers():
    assert weyl_mul(D("dy1^2"), D("y1^2")) == D("y1^2*dy1^2 + 4*y1*dy1 + 2")


def test_rational_mode_differentiates_coefficients():
    R = parse_operator(U1, "R", "dy1") * parse_operator(U1, "R", "1/y1")
    assert R == parse_operator(U1, "R", "1/y1*dy1 - 1/y1^2")


@pytest.mark.parametrize("u,v", [("dy1", "y1"), ("dx12", "x12"), ("dr", "r")])
def test_pairing_table(u, v):
    for name in U1.coeff_names:
        expected = 1 if name == v else 0
        assert commutator(D(u), D(name)) == WeylOperator.scalar(U1, "D", expected)
    for name in U1.diff_names:
        assert commutator(D(u), D(name)).is_zero()


def test_B_commutes_with_dk():
    B = make_I_tilde(2)["B"]
    for k in (1, 2, 3):
        assert commutator(B.__class__.var(B.U, "D", f"dy{k}"), B).is_zero()


def test_diagonal_B_E_commutator():
    sd = make_I_tilde(2)
    assert commutator(sd["B"], sd["E"]) == -2 * sd["B"]


def test_C_commutator_closes():
    sd = make_I_tilde(2)
    assert commutator(sd["C12"], sd["C23"]) == sd["C13"]


@given(operators())
def test_self_commutator_vanishes(P):
    assert commutator(P, P).is_zero()


@settings(max_examples=60)
@given(operators(), operators(), operators())
def test_associativity_D(P, Q, S):
    assert (P * Q) * S == P * (Q * S)


@settings(max_examples=40)
@given(operators(U1H, "Dh"), operators(U1H, "Dh"), operators(U1H, "Dh"))
def test_associativity_Dh(P, Q, S):
    assert (P * Q) * S == P * (Q * S)


@settings(max_examples=40)
@given(operators(), operators(), operators())
def test_associativity_R(P, Q, S):
    c = parse_ratfun(U1, "1/(x11 - y1 + 2)")
    P, Q, S = to_R(P).left_scale(c), to_R(Q), to_R(S).left_scale(c)
    assert (P * Q) * S == P * (Q * S)


@settings(max_examples=40)
@given(operators(), operators(), operators())
def test_jacobi_identity(P, Q, S):
    total = (commutator(P, commutator(Q, S)) + commutator(Q, commutator(S, P))
             + commutator(S, commutator(P, Q)))
    assert total.is_zero()


# ---------------------------------------------------------------- homogenization

def test_homogenize_A12():
    A = make_I_prime(1)["A'12"]
    assert homogenize(A) == parse_operator(U1H, "Dh", "h*x12*dx12 - x12*dy1*dy2 - a12^3")
    assert dehomogenize(homogenize(A)) == A


def test_homogenize_E_prime():
    Eh = homogenize(make_I_prime(1)["E'"])
    text = Eh.to_str()
    for piece in ("r*h*dr", "h^3", "y1*h*dy1", "y2*h*dy2", "d^3"):
        assert piece in text
    assert Eh.is_homogeneous()


def test_h_cubed_dehomogenizes_to_one():
    h3 = parse_operator(U1H, "Dh", "h^3")
    assert dehomogenize(h3) == WeylOperator.one(U1H, "D")


@given(operators(U1H))
def test_homogenize_round_trip_and_idempotence(P):
    H = homogenize(P)
    assert H.is_homogeneous()
    assert dehomogenize(H) == P
    assert homogenize(H) is H


def test_homogeneous_input_gains_no_h():
    P = make_I_prime(1)["B"]
    assert P.is_homogeneous()
    assert homogenize(P).to_str() == P.to_str()


@settings(max_examples=60)
@given(operators(U1H), operators(U1H))
def test_homogenize_preserves_products(P, Q):
    HP, HQ = homogenize(P), homogenize(Q)
    prod = HP * HQ
    assert dehomogenize(prod) == P * Q
    if not prod.is_zero():
        assert prod.is_homogeneous()
        assert prod.total_degrees() == {max(HP.total_degrees()) + max(HQ.total_degrees())}


def test_mode_mismatch_is_rejected():
    with pytest.raises(ModeMismatch):
        D("dy1") + parse_operator(U1, "R", "dy1")


# ---------------------------------------------------------------- weight initial forms

def test_weight_initial_forms_of_slack_system():
    sd = make_I_prime(1)
    w = make_weight(sd.U)
    U = sd.U
    want = parse_operator(U, "D", "2*(x22 - x11)*dy1*dy2 + (y2 + b2*c2)*dy1 - (y1 + b1*c1)*dy2")
    assert initial_form_weight(sd["C'12"], w) == want
    assert initial_form_weight(sd["A'12"], w) == parse_operator(U, "D", "x12*dx12 - a12^3")


@given(operators(names=("dx12", "dy1", "dy2")))
def test_zero_weight_is_identity(P):
    assert initial_form_weight(P, WeightVector.from_dict(U1, {})) == P


@settings(max_examples=60)
@given(operators(names=("dx12", "dy1", "dy2")), operators(names=("dx12", "dy1", "dy2")))
def test_initial_form_multiplicative(P, Q):
    w = make_weight(U1)
    assert initial_form_weight(P * Q, w) == initial_form_weight(P, w) * initial_form_weight(Q, w)


def test_initial_form_needs_polynomial_mode():
    with pytest.raises(ModeMismatch):
        initial_form_weight(parse_operator(U1, "R", "dy1"), make_weight(U1))


@given(st.integers(0, 3), st.integers(0, 3))
def test_rational_scalar_left_scale(a, b):
    c = RationalFunction.const(U1, a + 1) / RationalFunction.const(U1, b + 1)
    P = parse_operator(U1, "R", "dy1 + y1")
    assert P.left_scale(c) == parse_operator(U1, "R", f"{a + 1}/{b + 1}*dy1 + {a + 1}/{b + 1}*y1")
