import math
import random

import numpy as np
import pytest

from fbrank.numeric import (EvalPoint, SingularPathError, annihilation_residual, bessel_i0, build_pfaffian,
                            check_flatness, check_path, convergence_order, initial_vector, integrate_pfaffian,
                            loop_transport, quadrature_Z, random_point, random_segment, system_residuals,
                            transport)
from fbrank.systems import make_I, make_I_tilde
from fbrank.weyl import WeylOperator


@pytest.fixture(scope="module")
def pf1():
    return build_pfaffian(1)


def points(n, count, seed, diagonal=False):
    rng = random.Random(seed)
    return [random_point(n, rng, diagonal=diagonal) for _ in range(count)]


def test_trivial_values():
    assert abs(quadrature_Z(EvalPoint.zero(1)) - 2 * math.pi) < 1e-10
    assert abs(quadrature_Z(EvalPoint.zero(2)) - 4 * math.pi) < 1e-8


@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0])
def test_von_mises(kappa):
    p = EvalPoint.zero(1).replace(y1=kappa)
    assert abs(quadrature_Z(p) - 2 * math.pi * bessel_i0(kappa)) < 1e-8


def test_bessel_series():
    assert bessel_i0(0.0) == 1.0
    assert abs(bessel_i0(1.0) - 1.2660658777520082) < 1e-15


def test_point_json_round_trip():
    p = points(2, 1, 3)[0]
    q = EvalPoint.from_json(p.to_json())
    assert np.array_equal(p.x, q.x) and np.array_equal(p.y, q.y) and p.r == q.r


def test_points_respect_the_sampling_box():
    for p in points(2, 30, 1):
        d = np.diag(p.x)
        assert np.all(np.abs(p.x) <= 1) and np.all(np.abs(p.y) <= 1) and 0.5 <= p.r <= 1.5
        assert min(abs(d[i] - d[j]) for i in range(3) for j in range(i + 1, 3)) >= 0.1


def test_moment_derivative_matches_finite_difference():
    p = points(1, 1, 11)[0]
    h = 1e-5
    fd = (quadrature_Z(p.replace(y1=p.y[0] + h)) - quadrature_Z(p.replace(y1=p.y[0] - h))) / (2 * h)
    assert abs(quadrature_Z(p, {"y1": 1}) - fd) < 1e-6 * abs(fd)
    fd2 = (quadrature_Z(p.replace(x12=p.x[0, 1] + h)) - quadrature_Z(p.replace(x12=p.x[0, 1] - h))) / (2 * h)
    assert abs(quadrature_Z(p, {"x12": 1}) - fd2) < 1e-6 * abs(fd2)


def test_fisher_bingham_generators_annihilate_Z():
    rows = system_residuals(make_I(1), points(1, 20, 0))
    assert len(rows) == 20 * 6
    assert max(r["residual"] for r in rows) < 1e-6


@pytest.mark.parametrize("n,count", [(1, 20), (2, 5)])
def test_diagonal_generators_annihilate_Z(n, count):
    rows = system_residuals(make_I_tilde(n), points(n, count, 2, diagonal=True))
    assert max(r["residual"] for r in rows) < 1e-6


def test_a_wrong_operator_does_not_annihilate():
    sd = make_I(1)
    wrong = sd["B"] + WeylOperator.var(sd.U, "D", "dy1")
    assert annihilation_residual(wrong, points(1, 1, 4)[0]) > 1e-3


def test_zero_operator_residual():
    U = make_I(1).U
    assert annihilation_residual(WeylOperator.zero(U, "D"), EvalPoint.zero(1)) == 0.0


# ---------------------------------------------------------------- Pfaffian system

def test_pfaffian_shape(pf1):
    assert pf1.size == 4
    assert pf1.monomial_names() == ["1", "dy1", "dy2", "dy2^2"]
    assert sorted(pf1.variables) == ["r", "x11", "x22", "y1", "y2"]
    assert all(len(m) == 4 and all(len(row) == 4 for row in m) for m in pf1.matrices.values())


def test_pfaffian_rows_in_y1(pf1):
    M = pf1.matrices["y1"]
    assert [str(c) for c in M[0]] == ["0", "1", "0", "0"]
    assert [str(c) for c in M[1]] == ["r^2", "0", "0", "-1"]


def test_flatness_is_exact(pf1):
    flat = check_flatness(pf1)
    assert len(flat) == 10 and all(v is True for v in flat.values())


def test_flatness_n2():
    P = build_pfaffian(2)
    assert P.size == 6
    assert all(v is True for v in check_flatness(P).values())


def test_transport_matches_quadrature(pf1):
    a, b = random_segment(pf1, random.Random(0))
    F = integrate_pfaffian(pf1, a, b, steps=1000)
    ref = initial_vector(pf1, b)
    assert np.max(np.abs(F - ref)) / np.max(np.abs(ref)) < 1e-6


def test_zero_length_path(pf1):
    p = points(1, 1, 5, diagonal=True)[0]
    F0 = initial_vector(pf1, p)
    assert np.array_equal(integrate_pfaffian(pf1, p, p, steps=10, F0=F0), F0)


def test_fourth_order_convergence(pf1):
    a, b = random_segment(pf1, random.Random(1))
    res = convergence_order(pf1, a, b, steps=(16, 32, 64))
    assert all(10 < r < 22 for r in res["ratios"])


def test_loop_closes(pf1):
    p = EvalPoint(1, np.diag([0.4, -0.3]), [0.2, 0.5], 1.0, diagonal=True)
    F0, F = loop_transport(pf1, p, "x11", "y2", 0.2, 0.3, steps=100)
    assert np.max(np.abs(F - F0)) / np.max(np.abs(F0)) < 1e-6


def test_singular_path_is_rejected(pf1):
    a = EvalPoint(1, np.diag([0.5, -0.5]), [0, 0], 1.0, diagonal=True)
    b = EvalPoint(1, np.diag([-0.5, 0.5]), [0, 0], 1.0, diagonal=True)
    with pytest.raises(SingularPathError):
        integrate_pfaffian(pf1, a, b)


def test_transport_of_basis_vectors_is_linear(pf1):
    a, b = random_segment(pf1, random.Random(2))
    ca = np.array([a.values()[v] for v in pf1.variables])
    cb = np.array([b.values()[v] for v in pf1.variables])
    check_path(pf1, ca, cb)
    e = np.eye(4)
    cols = np.stack([transport(pf1, e[k], ca, cb, 50) for k in range(4)], axis=1)
    v = np.array([1.0, -2.0, 0.5, 3.0])
    assert np.allclose(cols @ v, transport(pf1, v, ca, cb, 50))
