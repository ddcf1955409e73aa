"""Complex polylogarithms Li_n and their single-valued real projections P_n.

Li_n is computed by three regimes: the defining series for |z| <= 1/2, an
inversion formula for |z| >= 2, and an expansion in mu = log z on the middle
annulus. P_n combines Li_1..Li_n with powers of log|z| so the result is
single-valued on C minus {0, 1}; the real part is taken for odd n and the
imaginary part for even n.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath

from .mprec import bernoulli_number, harmonic_number, workdigits


def _mpq(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def _zeta_int(m: int):
    """zeta(m) for any integer m != 1, exact rational cases done exactly."""
    if m == 1:
        raise ValueError("zeta(1) pole")
    if m >= 2:
        return mpmath.zeta(m)
    if m == 0:
        return mpmath.mpf(-0.5)
    j = -m
    if j % 2 == 0:
        return mpmath.mpf(0)
    return _mpq(Fraction(-1, j + 1) * bernoulli_number(j + 1))


def _li_series(n: int, z, eps):
    total = mpmath.mpc(0)
    zk = mpmath.mpc(1)
    k = 1
    while True:
        zk *= z
        term = zk / mpmath.mpf(k) ** n
        total += term
        if abs(term) < eps:
            break
        k += 1
        if k > 10**7:
            raise ArithmeticError("series did not converge")
    return total


def _li_annulus(n: int, z, eps):
    mu = mpmath.log(z)
    total = mpmath.mpc(0)
    muk = mpmath.mpc(1)  # mu^k / k!
    small = 0
    k = 0
    while True:
        if k == n - 1:
            hn = _mpq(harmonic_number(n - 1))
            total += (hn - mpmath.log(-mu)) * muk
        else:
            term = _zeta_int(n - k) * muk
            total += term
            if k > n:
                small = small + 1 if abs(term) < eps else 0
                if small >= 3:
                    break
        k += 1
        muk = muk * mu / k
        if k > 10**6:
            raise ArithmeticError("annulus expansion did not converge")
    return total


def _li_inversion(n: int, z, eps):
    inner = li_like(n, 1 / z, eps)
    w = mpmath.mpf(0.5) + mpmath.log(-z) / (2j * mpmath.pi)
    # Bernoulli polynomial B_n(w)
    bn = mpmath.mpc(0)
    for j in range(n + 1):
        bn += mpmath.binomial(n, j) * _mpq(bernoulli_number(j)) * w ** (n - j)
    fact = mpmath.factorial(n)
    return (-1) ** (n - 1) * inner - (2j * mpmath.pi) ** n / fact * bn


def li_like(n: int, z, eps):
    az = abs(z)
    if az == 0:
        return mpmath.mpc(0)
    if az <= 0.5:
        return _li_series(n, z, eps)
    if az >= 2:
        return _li_inversion(n, z, eps)
    if z == 1:
        return mpmath.mpc(mpmath.zeta(n))
    return _li_annulus(n, z, eps)


def li_complex(n: int, z, digits: int = 40):
    """Polylogarithm Li_n(z) to roughly the requested decimal accuracy."""
    if n < 2:
        raise ValueError("index must be at least 2")
    guard = 15 + 2 * n
    with workdigits(digits + guard):
        zz = mpmath.mpc(z)
        eps = mpmath.mpf(10) ** (-(digits + guard - 5))
        val = li_like(n, zz, eps)
        return +val


def p_n(n: int, z, digits: int = 40):
    """Single-valued projection of Li_n; real for odd n, from Im for even n.

    P_n(z) = proj( sum_{k=0}^{n-1} 2^k B_k / k! * log^k|z| * Li_{n-k}(z) ),
    with Li_1(z) = -log(1 - z). Defined on C minus {0, 1}; returns 0 at z = 0
    and the projection of zeta(n) at z = 1.
    """
    if n < 2:
        raise ValueError("index must be at least 2")
    guard = 15 + 2 * n
    with workdigits(digits + guard):
        zz = mpmath.mpc(z)
        if zz == 0:
            return mpmath.mpf(0)
        eps = mpmath.mpf(10) ** (-(digits + guard - 5))
        if zz == 1:
            val = mpmath.mpc(mpmath.zeta(n))
        else:
            lz = mpmath.log(abs(zz))
            val = mpmath.mpc(0)
            lzk = mpmath.mpf(1)  # log^k|z|
            for k in range(n):
                m = n - k
                li = -mpmath.log(1 - zz) if m == 1 else li_like(m, zz, eps)
                coeff = _mpq(Fraction(2**k) * bernoulli_number(k) / math.factorial(k))
                val += coeff * lzk * li
                lzk *= lz
        out = val.real if n % 2 == 1 else val.imag
        return +out
