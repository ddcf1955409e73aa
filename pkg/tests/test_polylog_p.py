"""Tests for p-adic polylogarithms: series chain, disc expansions, invariants."""

from fractions import Fraction

import pytest

from polyreg.padics import PadicTower, padic_log, teichmuller
from polyreg.polylog_p import (
    frobenius_residual_valuations,
    gn_series,
    li_padic,
    p_np,
)


def li_series_oracle(n: int, z: Fraction, p: int, nterms: int, modexp: int) -> int:
    """Exact partial sums of sum z^k/k^n reduced mod p^modexp (needs v_p(z) >= 1)."""
    total = Fraction(0)
    zk = Fraction(1)
    for k in range(1, nterms + 1):
        zk *= z
        total += zk / Fraction(k) ** n
    den = total.denominator
    assert den % p != 0
    m = p**modexp
    return total.numerator % m * pow(den % m, -1, m) % m


class TestGnSeries:
    def test_g0_integral_and_vanishing(self):
        g = gn_series(5, 2, 12)
        assert g.levels[0][0] == 0
        assert g.scale(0) == 0

    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_value_at_one_vanishes(self, p):
        g = gn_series(p, 3, 14)
        for level in range(1, 4):
            assert g.defect_at_one(level) >= 12

    @pytest.mark.parametrize("p,n", [(3, 2), (5, 2), (5, 3)])
    def test_frobenius_identity_small_disc(self, p, n):
        # g_n(1/(1-z)) must equal Li_n(z) - p^-n Li_n(z^p) for |z| < 1,
        # where both Li values come from the independent series route
        t = PadicTower(p)
        N = 16
        g = gn_series(p, n, N + 6)
        for zval in (p, 2 * p, p * p):
            z = t.from_int(zval, N + 8)
            lhs = li_padic(n, z, N + 4) - li_padic(n, z**p, N + 4) * Fraction(1, p**n)
            u = (1 - z).inverse()
            rhs = g.eval(n, u)
            assert lhs.is_congruent(rhs, N - 2), (p, n, zval)


class TestSeriesBranch:
    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_against_fraction_oracle(self, n):
        p, N = 5, 18
        t = PadicTower(p)
        for zval in (5, 10, 35):
            got = li_padic(n, t.from_int(zval, N + 4), N)
            want = li_series_oracle(n, Fraction(zval), p, 120, N - 2)
            assert got.is_congruent(want, N - 2)

    def test_level_one_is_log(self):
        t = PadicTower(7)
        z = t.from_int(14, 20)
        got = li_padic(1, z)
        want = -padic_log(1 - z)
        assert got.is_congruent(want, 18)


class TestUnitDisc:
    def test_rejects_disc_of_one(self):
        t = PadicTower(5)
        with pytest.raises(ValueError):
            li_padic(2, t.from_int(6, 15))
        with pytest.raises(ValueError):
            li_padic(2, t.from_int(1, 15))

    def test_rejects_p2(self):
        t = PadicTower(2)
        with pytest.raises(NotImplementedError):
            li_padic(2, t.from_int(3, 15))

    def test_teichmuller_point_closed_form(self):
        p, n, N = 5, 3, 14
        t = PadicTower(p)
        w = teichmuller(t.from_int(2, N + 14))
        got = li_padic(n, w, N)
        g = gn_series(p, n, N + 8)
        u = (1 - w).inverse()
        want = g.eval(n, u) / t.from_rational(1 - Fraction(1, p**n), N + 8)
        assert got.is_congruent(want, N - 2)

    @pytest.mark.parametrize("p,n", [(5, 2), (7, 3)])
    def test_frobenius_identity_unit_disc(self, p, n):
        # same identity as the small disc but through the expansion route,
        # at a non-Teichmuller unit point (t != 0)
        N = 14
        t = PadicTower(p)
        z = t.from_int(2 + p, N + 10)
        lhs = li_padic(n, z, N) - li_padic(n, z**p, N) * Fraction(1, p**n)
        g = gn_series(p, n, N + 8)
        rhs = g.eval(n, (1 - z).inverse())
        assert lhs.is_congruent(rhs, N - 3)

    @pytest.mark.parametrize("n", [2, 3])
    def test_inversion_invariant_units(self, n):
        p, N = 7, 14
        t = PadicTower(p)
        for zval in (3, 10, 17):
            z = t.from_int(zval, N + 10)
            zi = z.inverse()
            resid = li_padic(n, z, N) + (-1) ** n * li_padic(n, zi, N)
            resid = resid + padic_log(z) ** n * Fraction(1, _fact(n))
            assert resid.is_zero() or resid.valuation >= N - 3, (n, zval)

    def test_inversion_invariant_nonunit(self):
        p, n, N = 5, 3, 16
        t = PadicTower(p)
        z = t.from_int(10, N + 8)  # |z| < 1, inverse has |.| > 1
        resid = li_padic(n, z, N) + (-1) ** n * li_padic(n, z.inverse(), N)
        resid = resid + padic_log(z) ** n * Fraction(1, _fact(n))
        assert resid.is_zero() or resid.valuation >= N - 3

    def test_extension_orbit(self):
        # residue generates F_9 over F_3: the Frobenius orbit has length 2
        t = PadicTower(3, unram_poly=(1, 0, 1))
        N = 12
        z = t.from_coeffs([1, 1], N + 12)
        val = li_padic(2, z, N)
        assert val.precision >= N - 2
        lhs = li_padic(2, z, N) - li_padic(2, z**3, N) * Fraction(1, 9)
        g = gn_series(3, 2, N + 8)
        rhs = g.eval(2, (1 - z).inverse())
        assert lhs.is_congruent(rhs, N - 3)


class TestFrobeniusResidual:
    def test_rational_disc(self):
        t = PadicTower(5)
        vals = frobenius_residual_valuations(t, 3, (2,), 18, 12)
        for j, v in enumerate(vals):
            assert v is None or v >= 10, (j, v)

    def test_extension_disc(self):
        t = PadicTower(3, unram_poly=(1, 0, 1))
        vals = frobenius_residual_valuations(t, 2, (1, 1), 14, 10)
        for j, v in enumerate(vals):
            assert v is None or v >= 8, (j, v)


class TestPnp:
    def test_vanishes_at_minus_one_even(self):
        t = PadicTower(5)
        for n in (2, 4):
            val = p_np(n, t.from_int(-1, 24), 18)
            assert val.is_zero() or val.valuation >= 16

    def test_minus_one_odd_valuation(self):
        t = PadicTower(5)
        val = p_np(3, t.from_int(-1, 24), 18)
        assert not val.is_zero()
        assert val.valuation >= 1

    @pytest.mark.parametrize("p,n", [(5, 2), (5, 3), (7, 2)])
    def test_distribution_m2(self, p, n):
        N = 14
        t = PadicTower(p)
        for zval in (2, p + 2):
            z = t.from_int(zval, N + 10)
            z2 = z * z
            if _bad_disc(z, t) or _bad_disc(-z, t) or _bad_disc(z2, t):
                continue
            lhs = p_np(n, z2, N)
            rhs = (p_np(n, z, N) + p_np(n, -z, N)) * 2 ** (n - 1)
            assert lhs.is_congruent(rhs, N - 3), (p, n, zval)

    def test_distribution_m2_p3_extension(self):
        # over Q_3 every unit is in the disc of 1 or -1, so the relation
        # only has room to move in an extension
        t = PadicTower(3, unram_poly=(1, 0, 1))
        N, n = 12, 2
        z = t.from_coeffs([1, 1], N + 12)
        lhs = p_np(n, z * z, N)
        rhs = (p_np(n, z, N) + p_np(n, -z, N)) * 2 ** (n - 1)
        assert lhs.is_congruent(rhs, N - 3)

    def test_domain_checks(self):
        t = PadicTower(5)
        with pytest.raises(ValueError):
            p_np(2, t.from_int(5, 15))  # not a unit
        with pytest.raises(ValueError):
            p_np(2, t.from_int(6, 15))  # 1 - z not a unit


def _fact(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _bad_disc(z, t):
    d = z - 1
    return d.is_zero() or d.valuation >= 1
