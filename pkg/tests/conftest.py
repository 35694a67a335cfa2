from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from fbrank.algebra import Polynomial, VarUniverse
from fbrank.systems import universe
from fbrank.weyl import WeylOperator

settings.register_profile("fbrank", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("fbrank")

U1 = VarUniverse(1)
U1H = VarUniverse(1, slack=True, homogenized=True)

coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def exponents(length: int, width: int = 4, top: int = 2):
    head = st.lists(st.integers(0, top), min_size=width, max_size=width)
    return head.map(lambda e: tuple(e) + (0,) * (length - width))


def polynomials(U=U1, width=4, top=2, terms=4):
    return st.dictionaries(exponents(U.ncoeff, width, top), coefficients, max_size=terms).map(
        lambda d: Polynomial.from_terms(U, d))


def operators(U=U1, mode="D", terms=3, names=("dx11", "dy1", "dy2")):
    """Small operators: coefficients in x11, x12, x22, y1 and three
    differential variables."""
    slots = [U.diff_names.index(v) for v in names]

    def build(items):
        out = WeylOperator.zero(U, mode)
        for (a, b, c), poly in items:
            e = [0] * U.ndiff
            for k, s in zip((a, b, c), slots):
                e[s] = k
            out = out + WeylOperator.dmono(U, mode, e).left_scale(poly)
        return out

    mono = st.tuples(st.integers(0, 1), st.integers(0, 2), st.integers(0, 1))
    return st.lists(st.tuples(mono, polynomials(U, width=4, top=1, terms=2)),
                    max_size=terms).map(build)


@pytest.fixture
def u1():
    return U1


@pytest.fixture
def u_diag2():
    return universe(2, diagonal=True)


def frac(a, b=1):
    return Fraction(a, b)


ACCEPTANCE: dict = {}  # criterion number -> report line, filled by test_acceptance


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
