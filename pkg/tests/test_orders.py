import json

from hypothesis import given, settings
from hypothesis import strategies as st

from fbrank.orders import (d_exponent, full_exponent, make_grlex_order, make_h_order, make_h_order_n1_preset,
                           make_prop2_order, make_weight, weight_degree)
from fbrank.systems import universe

from conftest import U1, U1H

UD2 = universe(2, diagonal=True)
UH2 = universe(2, slack=True, homogenized=True)


def d(U, **powers):
    return d_exponent(U, powers)


def f(U, **powers):
    return full_exponent(U, powers)


def test_prop2_block_dominance():
    o = make_prop2_order(UD2)
    assert o.compare(d(UD2, dr=1), d(UD2, dx11=10)) == 1
    assert o.compare(d(UD2, dx33=1), d(UD2, dy1=9)) == 1
    assert o.compare(d(UD2, dy1=2), d(UD2, dy1=1, dy2=1)) == 1
    assert o.compare(d(UD2, dy3=3), d(UD2, dy1=2)) == 1
    m = d(UD2, dy2=1, dx11=2)
    assert o.compare(m, m) == 0


def test_prop2_off_diagonal_block_sits_between():
    o = make_prop2_order(U1)
    assert o.compare(d(U1, dr=1), d(U1, dx12=5)) == 1
    assert o.compare(d(U1, dx12=1), d(U1, dx11=5, dx22=5)) == 1


def test_h_order_initials():
    o = make_h_order(U1H)
    # -b1 c1 d2 against x12 d1^2: same degree, the x12 term has weight -1
    assert o.compare(f(U1H, b1=1, c1=1, dy2=1), f(U1H, x12=1, dy1=2)) == 1
    assert o.compare(f(U1H, d=3), f(U1H, r=1, h=1, dr=1)) == 1
    assert o.compare(f(U1H, h=1), f(U1H)) == 1
    assert o.compare(f(U1H, r=2), f(U1H, dy1=2)) == 1


def test_weight_degrees():
    w = make_weight(U1)
    assert w.weights == (0, 1, 0, 0, 0, 0)
    assert w.as_dict() == {"dx12": 1}
    assert weight_degree(f(U1, x12=1, dx12=1), w) == 0
    assert weight_degree(f(U1, dx12=1), w) == 1
    assert weight_degree(f(U1, x12=1, dy1=1, dy2=1), w) == -1
    assert weight_degree(f(U1, dx11=1, dr=1), w) == 0


def test_descriptor_serializes():
    desc = json.loads(make_h_order(U1H).to_json())
    assert [layer["kind"] for layer in desc["layers"]] == ["total-degree", "weight", "block"]


def monomials(U, top=3):
    n = len(U.all_names)
    return st.lists(st.integers(0, top), min_size=n, max_size=n).map(tuple)


ORDERS = [make_prop2_order(UD2), make_grlex_order(UD2), make_h_order(U1H), make_h_order(U1H, c_reverse=True)]


@settings(max_examples=1000)
@given(st.data())
def test_orders_are_multiplicative(data):
    for o in ORDERS:
        a, b, c = (data.draw(monomials(o.U)) for _ in range(3))
        ac = tuple(x + y for x, y in zip(a, c))
        bc = tuple(x + y for x, y in zip(b, c))
        assert o.compare(ac, bc) == o.compare(a, b)


@settings(max_examples=300)
@given(st.data())
def test_one_is_minimal_and_order_is_total(data):
    for o in ORDERS:
        a, b = data.draw(monomials(o.U)), data.draw(monomials(o.U))
        zero = (0,) * len(a)
        assert o.compare(a, zero) == (0 if a == zero else 1)
        assert (o.compare(a, b) == 0) == (a == b)


@given(st.lists(monomials(U1H, 2), min_size=2, max_size=30))
def test_sorting_a_degree_slice_is_strict(ms):
    o = make_h_order(U1H)
    top = max(sum(m) for m in ms)
    slice_ = sorted({m[:-1] + (m[-1] + top - sum(m),) for m in ms}, key=o.key)
    assert all(o.compare(x, y) == -1 for x, y in zip(slice_, slice_[1:]))
    assert sorted(reversed(slice_), key=o.key) == slice_


@settings(max_examples=500)
@given(monomials(U1H), monomials(U1H))
def test_n1_preset_matches_general_construction(a, b):
    assert make_h_order_n1_preset(U1H).compare(a, b) == make_h_order(U1H).compare(a, b)


@given(monomials(UH2), monomials(UH2))
def test_weight_degree_additive(a, b):
    w = make_weight(UH2)
    ab = tuple(x + y for x, y in zip(a, b))
    assert weight_degree(ab, w) == weight_degree(a, w) + weight_degree(b, w)
