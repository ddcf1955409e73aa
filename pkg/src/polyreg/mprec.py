"""Multiprecision scalars, exact rationals, and integer relation detection.

Real and complex numbers are mpmath types carried at an explicit decimal
precision that every function takes as an argument; nothing in this module
reads or mutates global precision outside a local working context.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp

MpReal = mpmath.mpf
MpComplex = mpmath.mpc
BigRational = Fraction


@contextmanager
def workdigits(digits: int):
    """Local working precision in decimal digits."""
    with mp.workdps(max(digits, 5)):
        yield


def to_real(x, digits: int) -> MpReal:
    with workdigits(digits):
        return mpmath.mpf(x)


def to_complex(x, digits: int) -> MpComplex:
    with workdigits(digits):
        return mpmath.mpc(x)


def zeta_value(n: int, digits: int) -> MpReal:
    """Riemann zeta at an integer n >= 2, accurate to `digits` decimals."""
    if n < 2:
        raise ValueError("zeta_value requires n >= 2")
    with workdigits(digits + 10):
        v = mpmath.zeta(n)
    with workdigits(digits):
        return +v


@lru_cache(maxsize=None)
def bernoulli_number(k: int) -> Fraction:
    """Exact Bernoulli number B_k (B_1 = -1/2)."""
    if k < 0:
        raise ValueError("negative Bernoulli index")
    if k == 0:
        return Fraction(1)
    if k == 1:
        return Fraction(-1, 2)
    if k % 2 == 1:
        return Fraction(0)
    # B_k = -1/(k+1) * sum_{j<k} C(k+1, j) B_j
    acc = Fraction(0)
    for j in range(k):
        acc += math.comb(k + 1, j) * bernoulli_number(j)
    return -acc / (k + 1)


def bernoulli_poly(k: int, x: Fraction) -> Fraction:
    """Exact Bernoulli polynomial value B_k(x) for rational x."""
    x = Fraction(x)
    acc = Fraction(0)
    for j in range(k + 1):
        acc += math.comb(k, j) * bernoulli_number(j) * x ** (k - j)
    return acc


@lru_cache(maxsize=None)
def harmonic_number(k: int) -> Fraction:
    if k <= 0:
        return Fraction(0)
    return harmonic_number(k - 1) + Fraction(1, k)


@dataclass(frozen=True)
class IntegerRelation:
    """An integer relation sum(c_i * v_i) = 0 certified to working precision.

    residual_exponent is floor(log10 |sum c_i v_i|) observed at the stated
    digits (very negative means clean vanishing).
    """

    coefficients: tuple[int, ...]
    digits: int
    residual_exponent: int


def _frac_round(x: Fraction) -> int:
    # round half away from zero; exact on Fractions
    if x >= 0:
        return int((2 * x.numerator + x.denominator) // (2 * x.denominator))
    return -int((-2 * x.numerator + x.denominator) // (2 * x.denominator))


def lll_reduce(rows: list[list[int]], delta: Fraction = Fraction(99, 100)) -> list[list[int]]:
    """Exact-arithmetic LLL on integer rows (assumed linearly independent)."""
    b = [list(map(int, r)) for r in rows]
    n = len(b)
    if n <= 1:
        return b

    mu: list[list[Fraction]] = [[Fraction(0)] * n for _ in range(n)]
    norm2: list[Fraction] = [Fraction(0)] * n

    def recompute() -> None:
        star: list[list[Fraction]] = []
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                num = sum(Fraction(x) * y for x, y in zip(b[i], star[j]))
                mu[i][j] = num / norm2[j]
                v = [x - mu[i][j] * y for x, y in zip(v, star[j])]
            norm2[i] = sum(x * x for x in v)
            if norm2[i] == 0:
                raise ValueError("dependent rows in LLL input")
            star.append(v)

    recompute()
    k = 1
    while k < n:
        changed = False
        for j in range(k - 1, -1, -1):
            q = _frac_round(mu[k][j])
            if q:
                b[k] = [a - q * c for a, c in zip(b[k], b[j])]
                changed = True
        if changed:
            recompute()
        if norm2[k] >= (delta - mu[k][k - 1] ** 2) * norm2[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            recompute()
            k = max(k - 1, 1)
    return b


def _relation_from_rows(reduced, k, values, digits, max_coeff):
    with workdigits(digits + 10):
        vals = [mpmath.mpf(v) for v in values]
        scale = max(mpmath.mpf(1), max(abs(v) for v in vals))
        tol = mpmath.mpf(10) ** (-(digits - 8))
        best = None
        for row in reduced:
            coeffs = row[:k]
            if all(c == 0 for c in coeffs):
                continue
            if max(abs(c) for c in coeffs) > max_coeff:
                continue
            resid = mpmath.fsum(c * v for c, v in zip(coeffs, vals))
            if abs(resid) < tol * scale:
                size = max(abs(c) for c in coeffs)
                if best is None or size < best[0]:
                    best = (size, coeffs, resid)
        if best is None:
            return None
        _, coeffs, resid = best
        g = 0
        for c in coeffs:
            g = math.gcd(g, abs(c))
        coeffs = [c // g for c in coeffs]
        for c in coeffs:
            if c != 0:
                if c < 0:
                    coeffs = [-x for x in coeffs]
                break
        if resid == 0:
            rexp = -(digits + 10)
        else:
            rexp = int(mpmath.floor(mpmath.log10(abs(resid) / g)))
        return IntegerRelation(tuple(coeffs), digits, rexp)


def find_integer_relation(values, digits: int = 40, max_coeff: int = 10**12):
    """Search for integers c with sum(c_i * values_i) = 0.

    Lattice reduction on rows [e_i | round(10^(digits-5) * v_i)]; a candidate
    is accepted only if its residual vanishes to within 10^-(digits-8).
    Returns an IntegerRelation or None. Callers that can recompute the values
    should re-verify any accepted relation at digits+30.
    """
    vals = list(values)
    k = len(vals)
    if k == 0:
        return None
    with workdigits(digits + 10):
        scale = mpmath.mpf(10) ** (digits - 5)
        col = [int(mpmath.nint(scale * mpmath.mpf(v))) for v in vals]
    rows = [[1 if i == j else 0 for j in range(k)] + [col[i]] for i in range(k)]
    reduced = lll_reduce(rows)
    return _relation_from_rows(reduced, k, vals, digits, max_coeff)


def find_integer_relation_vec(vectors, digits: int = 40, max_coeff: int = 10**12):
    """Simultaneous integer relation across several real components.

    vectors: list of equal-length sequences; seeks c with
    sum(c_i * vectors[i][t]) = 0 for every component t.
    """
    vecs = [list(v) for v in vectors]
    k = len(vecs)
    if k == 0:
        return None
    width = len(vecs[0])
    with workdigits(digits + 10):
        scale = mpmath.mpf(10) ** (digits - 5)
        cols = [[int(mpmath.nint(scale * mpmath.mpf(v[t]))) for t in range(width)] for v in vecs]
    rows = [[1 if i == j else 0 for j in range(k)] + cols[i] for i in range(k)]
    reduced = lll_reduce(rows)
    # residual check against the max-abs component combination
    with workdigits(digits + 10):
        vals = [[mpmath.mpf(x) for x in v] for v in vecs]
        scale_v = max(mpmath.mpf(1), max(abs(x) for v in vals for x in v))
        tol = mpmath.mpf(10) ** (-(digits - 8))
        best = None
        for row in reduced:
            coeffs = row[:k]
            if all(c == 0 for c in coeffs):
                continue
            if max(abs(c) for c in coeffs) > max_coeff:
                continue
            worst = max(
                abs(mpmath.fsum(coeffs[i] * vals[i][t] for i in range(k)))
                for t in range(width)
            )
            if worst < tol * scale_v:
                size = max(abs(c) for c in coeffs)
                if best is None or size < best[0]:
                    best = (size, coeffs, worst)
        if best is None:
            return None
        _, coeffs, worst = best
        g = 0
        for c in coeffs:
            g = math.gcd(g, abs(c))
        coeffs = [c // g for c in coeffs]
        for c in coeffs:
            if c != 0:
                if c < 0:
                    coeffs = [-x for x in coeffs]
                break
        rexp = -(digits + 10) if worst == 0 else int(mpmath.floor(mpmath.log10(worst / g)))
        return IntegerRelation(tuple(coeffs), digits, rexp)


def _cf_candidate(x: MpReal, digits: int):
    # continued fraction until a huge partial quotient signals convergence
    big = 10**8
    p0, q0, p1, q1 = 1, 0, 0, 1
    y = x
    neg = y < 0
    if neg:
        y = -y
    for _ in range(6 * digits):
        a = int(mpmath.floor(y))
        p0, p1 = a * p0 + p1, p0
        q0, q1 = a * q0 + q1, q0
        frac = y - a
        if frac == 0:
            cand = Fraction(p0, q0)
            return -cand if neg else cand
        y = 1 / frac
        if y > big:
            cand = Fraction(p0, q0)
            return -cand if neg else cand
        if q0 > 10 ** max(digits - 8, 2):
            return None
    return None


def recognize_rational(x, digits: int = 60, reverify_digits: int = 120):
    """Recognize x as an exact rational, or return None.

    x may be a number (assumed accurate to `digits`) or a callable
    digits -> value. The continued-fraction convergent must be identical at
    two precisions at least 20 digits apart, and must reproduce x to nearly
    full precision.
    """
    if reverify_digits < digits + 20:
        reverify_digits = digits + 20
    if callable(x):
        lo = to_real(x(digits), digits + 5)
        hi = to_real(x(reverify_digits), reverify_digits + 5)
        digits_hi = reverify_digits
    else:
        with workdigits(digits + 5):
            hi = mpmath.mpf(x)
        # truncate to a strictly lower precision for the stability pass
        with workdigits(digits - 20):
            lo = +hi
        digits_hi = digits
    with workdigits(digits + 10):
        c1 = _cf_candidate(mpmath.mpf(lo), max(digits - 20, 20))
        c2 = _cf_candidate(mpmath.mpf(hi), digits_hi)
        if c1 is None or c2 is None or c1 != c2:
            return None
        err = abs(mpmath.mpf(hi) - mpmath.mpf(c2.numerator) / c2.denominator)
        scale = max(mpmath.mpf(1), abs(mpmath.mpf(hi)))
        if err > scale * mpmath.mpf(10) ** (-(digits_hi - 8)):
            return None
    return c2
