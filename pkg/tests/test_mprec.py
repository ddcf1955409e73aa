from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyreg import mprec
from polyreg.mprec import (
    bernoulli_number,
    bernoulli_poly,
    find_integer_relation,
    find_integer_relation_vec,
    harmonic_number,
    lll_reduce,
    recognize_rational,
    workdigits,
    zeta_value,
)


def euler_maclaurin_zeta(n: int, digits: int):
    """Independent zeta oracle: Euler-Maclaurin with exact Bernoulli weights."""
    with mpmath.mp.workdps(digits + 15):
        N = digits + 20
        s = mpmath.mpf(n)
        acc = mpmath.fsum(mpmath.mpf(k) ** (-s) for k in range(1, N))
        acc += mpmath.mpf(N) ** (1 - s) / (s - 1)
        acc += mpmath.mpf(N) ** (-s) / 2
        term_count = digits // 2 + 8
        for j in range(1, term_count):
            b = bernoulli_number(2 * j)
            rising = mpmath.mpf(1)
            for i in range(2 * j - 1):
                rising *= s + i
            acc += (
                mpmath.mpf(b.numerator)
                / b.denominator
                / mpmath.factorial(2 * j)
                * rising
                * mpmath.mpf(N) ** (-s - 2 * j + 1)
            )
        return +acc


class TestZeta:
    def test_printed_digits(self):
        v = zeta_value(3, 30)
        with mpmath.mp.workdps(35):
            assert mpmath.nstr(v, 30) == "1.20205690315959428539973816151"

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 7])
    def test_against_euler_maclaurin(self, n):
        digits = 40
        v = zeta_value(n, digits)
        w = euler_maclaurin_zeta(n, digits)
        with mpmath.mp.workdps(digits + 5):
            assert abs(v - w) < mpmath.mpf(10) ** (-(digits - 2))

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            zeta_value(1, 30)


class TestBernoulli:
    def test_known_values(self):
        assert bernoulli_number(0) == 1
        assert bernoulli_number(1) == Fraction(-1, 2)
        assert bernoulli_number(2) == Fraction(1, 6)
        assert bernoulli_number(12) == Fraction(-691, 2730)
        assert bernoulli_number(13) == 0

    def test_poly_reflection(self):
        # B_k(1-x) = (-1)^k B_k(x)
        for k in range(8):
            x = Fraction(2, 7)
            assert bernoulli_poly(k, 1 - x) == (-1) ** k * bernoulli_poly(k, x)

    def test_harmonic(self):
        assert harmonic_number(4) == Fraction(25, 12)


class TestIntegerRelation:
    def test_sqrt2_example(self):
        with workdigits(50):
            vals = [mpmath.mpf(1), mpmath.sqrt(2), 1 + mpmath.sqrt(2)]
        rel = find_integer_relation(vals, digits=40)
        assert rel is not None
        assert rel.coefficients == (1, 1, -1)

    def test_no_relation_for_pi(self):
        with workdigits(50):
            vals = [mpmath.mpf(1), mpmath.pi]
        assert find_integer_relation(vals, digits=40) is None

    def test_log_relation(self):
        with workdigits(60):
            vals = [mpmath.log(2), mpmath.log(3), mpmath.log(6)]
        rel = find_integer_relation(vals, digits=45)
        assert rel is not None
        assert rel.coefficients == (1, 1, -1)

    def test_matches_pslq_oracle(self):
        with workdigits(60):
            vals = [mpmath.log(2), mpmath.log(5), mpmath.log(40)]
            oracle = mpmath.pslq(vals, maxcoeff=10**6)
        rel = find_integer_relation(vals, digits=45)
        assert rel is not None
        c = list(rel.coefficients)
        # oracle relation is proportional
        assert oracle is not None
        k = None
        for a, b in zip(oracle, c):
            if b != 0:
                k = Fraction(a, b)
                break
        assert k is not None and all(Fraction(a) == k * b for a, b in zip(oracle, c))

    def test_vector_relation(self):
        # rows of a rank-2 system: v3 = v1 + 2 v2 componentwise
        with workdigits(60):
            v1 = [mpmath.sqrt(2), mpmath.sqrt(3)]
            v2 = [mpmath.sqrt(5), mpmath.sqrt(7)]
            v3 = [v1[0] + 2 * v2[0], v1[1] + 2 * v2[1]]
        rel = find_integer_relation_vec([v1, v2, v3], digits=45)
        assert rel is not None
        assert rel.coefficients == (1, 2, -1)

    def test_vector_no_false_positive(self):
        with workdigits(60):
            vecs = [
                [mpmath.sqrt(2), mpmath.sqrt(3)],
                [mpmath.sqrt(5), mpmath.sqrt(7)],
                [mpmath.sqrt(11), mpmath.sqrt(13)],
            ]
        assert find_integer_relation_vec(vecs, digits=45) is None


class TestLLL:
    def test_shortens(self):
        rows = [[1, 0, 0, 10**20], [0, 1, 0, 10**20 + 1], [0, 0, 1, 2 * 10**20 + 1]]
        red = lll_reduce(rows)
        norms = [sum(x * x for x in r) for r in red]
        assert min(norms) <= 12  # (1,1,-1,0)

    def test_preserves_lattice_determinant_shape(self):
        rows = [[2, 0], [1, 3]]
        red = lll_reduce(rows)
        det = red[0][0] * red[1][1] - red[0][1] * red[1][0]
        assert abs(det) == 6


class TestRecognizeRational:
    def test_simple(self):
        assert recognize_rational(0.75, digits=40) == Fraction(3, 4)

    def test_pi_is_not_rational(self):
        with workdigits(130):
            x = +mpmath.pi
        assert recognize_rational(x, digits=60) is None

    def test_callable_two_pass(self):
        target = Fraction(-1369, 24)

        def f(d):
            with mpmath.mp.workdps(d + 5):
                return mpmath.mpf(target.numerator) / target.denominator

        assert recognize_rational(f, digits=60) == target

    @settings(max_examples=25, deadline=None)
    @given(
        num=st.integers(min_value=-(10**6), max_value=10**6),
        den=st.integers(min_value=1, max_value=10**6),
    )
    def test_roundtrip(self, num, den):
        q = Fraction(num, den)
        with workdigits(80):
            x = mpmath.mpf(q.numerator) / q.denominator
        assert recognize_rational(x, digits=60) == q
