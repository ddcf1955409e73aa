"""p-adic polylogarithms on the unit disc complement of 1.

The functions Li_{n,p} are characterized by the Frobenius equation

    Li_{n,p}(z) - p^-n Li_{n,p}(z^p) = g_n(1/(1-z))

together with the series sum z^k/k^n on |z| < 1 and the differential
recursion z (d/dz) Li_n = Li_{n-1}. The right-hand side g_n is a power
series in v with p-adically decaying coefficients, built from

    g_0(v) = (v-1) - (v-1)^p / (v^p - (v-1)^p),
    g_n'(v) = g_{n-1}(v) / (v (v-1)),   g_n(0) = 0,

and g_n(1) = 0 holds automatically (used as a truncation self-test).

A unit argument z with z != 1 mod p is handled by expanding around the
Teichmuller point of its residue disc; the constant terms over the
Frobenius orbit of the disc satisfy a cyclic linear system driven by g_n,
and the higher coefficients integrate the expansion one level down.
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import comb, factorial

from .padics import PadicElement, PadicTower, padic_log, teichmuller


def _vp_int(a: int, p: int) -> int:
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def _log_ceil(x: int, p: int) -> int:
    # smallest a with p^a >= x
    a, v = 0, 1
    while v < x:
        v *= p
        a += 1
    return a


class GnSeries:
    """The chain g_0 .. g_top for one prime, as scaled integer coefficients.

    Level k is stored as ints c_j with g_k(v) = p^-scale(k) sum c_j v^j,
    all modulo p^modexp; scale(k) = k * scale_step absorbs the divisions
    by j during integration.
    """

    def __init__(self, p: int, top: int, prec: int):
        self.p = p
        self.top = top
        self.prec = prec
        J = (p - 1) * (prec + top * _log_ceil(max(prec, 2), p) + 6) + p + 6
        self.J = J
        self.scale_step = _log_ceil(J + 1, p)
        self.modexp = prec + top * self.scale_step + 4
        mod = p**self.modexp
        self._mod = mod

        # w(v) = (v^p - (v-1)^p - 1)/p, integer coefficients, w(0) = 0
        c = [-comb(p, k) * (-1) ** (p - k) for k in range(p)]  # v^p-(v-1)^p
        assert c[0] == 1
        w = [0] + [ck // p for ck in c[1:]]
        for k in range(1, p):
            assert c[k] % p == 0

        # S = 1/(1 + p w) mod v^(J+1), by linear recurrence
        s = [0] * (J + 1)
        s[0] = 1
        for j in range(1, J + 1):
            acc = 0
            for i in range(1, min(j, p - 1) + 1):
                if w[i]:
                    acc += w[i] * s[j - i]
            s[j] = (-p * acc) % mod

        # g_0 = (v-1) - (v-1)^p * S
        a = [comb(p, k) * (-1) ** (p - k) % mod for k in range(p + 1)]  # (v-1)^p
        g0 = [0] * (J + 1)
        for k in range(min(p, J) + 1):
            if a[k]:
                for j in range(k, J + 1):
                    g0[j] = (g0[j] - a[k] * s[j - k]) % mod
        g0[0] = (g0[0] - 1) % mod
        if J >= 1:
            g0[1] = (g0[1] + 1) % mod
        assert g0[0] == 0
        levels = [g0]

        for _lev in range(1, top + 1):
            g = levels[-1]
            # u_j = sum_{i<=j} g_i  (multiplication by 1/(1-v))
            u = [0] * (J + 2)
            run = 0
            for j in range(J + 1):
                run = (run + g[j]) % mod
                u[j] = run
            # h = g / (v(v-1)) = -(1/v) * u ; then integrate with scaling
            nxt = [0] * (J + 1)
            for j in range(1, J + 1):
                hj = (-u[j]) % mod  # coefficient of t^(j-1) in the integrand
                a_j = _vp_int(j, p)
                unit = j // p**a_j
                val = hj * p ** (self.scale_step - a_j) % mod
                nxt[j] = val * pow(unit, -1, mod) % mod
            levels.append(nxt)
        self.levels = levels

    def scale(self, level: int) -> int:
        return level * self.scale_step

    def defect_at_one(self, level: int) -> int:
        """Valuation of g_level(1); large values certify the truncation."""
        total = sum(self.levels[level]) % self._mod
        if total == 0:
            return self.modexp - self.scale(level)
        return _vp_int(total, self.p) - self.scale(level)

    def eval(self, level: int, v: PadicElement) -> PadicElement:
        tower = v.tower
        acc = tower.zero(self.modexp)
        for c in reversed(self.levels[level]):
            acc = acc * v + tower.from_int(c, self.modexp)
        return acc * Fraction(1, self.p ** self.scale(level))

    def eval_series(self, level, useries, J, tower, prec):
        """g_level composed with a power series (constant term allowed)."""
        zero = tower.zero(prec + self.scale(level) + 2)
        acc = [zero] * (J + 1)
        for c in reversed(self.levels[level]):
            acc = _series_mul(acc, useries, J, zero)
            acc[0] = acc[0] + tower.from_int(c, self.modexp)
        inv = Fraction(1, self.p ** self.scale(level))
        return [a * inv for a in acc]


_GN_CACHE: dict = {}


def gn_series(p: int, top: int, prec: int) -> GnSeries:
    for (pp, t, pr), g in _GN_CACHE.items():
        if pp == p and t >= top and pr >= prec:
            return g
    g = GnSeries(p, top, prec)
    _GN_CACHE[(p, top, prec)] = g
    return g


def _series_mul(a, b, J, zero):
    out = [zero] * (J + 1)
    for i, ai in enumerate(a):
        if i > J:
            break
        if ai.is_zero() and ai.precision >= zero.precision:
            continue
        for j, bj in enumerate(b):
            if i + j > J:
                break
            out[i + j] = out[i + j] + ai * bj
    return out


def _div_one_plus_t(coeffs, zero):
    # B/(1+t): b_j = a_j - b_{j-1}
    out = []
    prev = zero
    for a in coeffs:
        cur = a - prev
        out.append(cur)
        prev = cur
    return out


class DiscExpansion:
    """Expansions of Li_{1..n,p} around the Teichmuller point of one residue disc.

    Coefficients a_j of Li_{lev,p}(omega (1+t)) = sum a_j t^j for j <= J.
    The constant terms solve the cyclic Frobenius system over the orbit of
    the disc; higher coefficients come from integrating the level below
    against 1/(1+t).
    """

    def __init__(self, tower: PadicTower, n: int, residue, J: int, prec: int):
        p = tower.p
        if p == 2:
            raise NotImplementedError("p = 2 has a single unit disc at 1")
        one = tuple([1] + [0] * (tower.f - 1))
        if tuple(residue) == one:
            raise ValueError("the residue disc of 1 is not in the domain")
        if all(r % p == 0 for r in residue):
            raise ValueError("residue must be a unit")
        self.tower = tower
        self.n = n
        self.J = J
        self.prec = prec
        work = prec + n * (_log_ceil(J + 1, p) + 2) + 4

        omega = teichmuller(tower.from_coeffs([int(r) for r in residue], work))
        orbit = [omega]
        while True:
            nxt = orbit[-1] ** p
            if nxt.residue() == omega.residue():
                break
            orbit.append(nxt)
            if len(orbit) > tower.f:
                raise ArithmeticError("Frobenius orbit failed to close")
        self.orbit = orbit
        f_orb = len(orbit)
        gn = gn_series(p, n, work + n * f_orb + 2)
        self.gn = gn

        # level 1: -log(1 - omega (1+t)) expanded explicitly
        one_minus = [(1 - om) for om in orbit]
        a1 = [-padic_log(one_minus[0])]
        r = omega / one_minus[0]
        rj = tower.one(work)
        for j in range(1, J + 1):
            rj = rj * r
            a1.append(rj * Fraction(1, j))
        levels = [a1]

        inv_points = [om_m.inverse() for om_m in one_minus]  # 1/(1-omega^(p^m))
        for lev in range(2, n + 1):
            below = levels[-1]
            h = _div_one_plus_t(below, tower.zero(work))
            coeffs = [None] * (J + 1)
            for j in range(1, J + 1):
                coeffs[j] = h[j - 1] * Fraction(1, j)
            cvals = [gn.eval(lev, u) for u in inv_points]
            s = tower.zero(work + n * f_orb + 2)
            for j in range(f_orb):
                s = s + cvals[j] * Fraction(1, p ** (lev * j))
            lead = tower.from_rational(1 - Fraction(1, p ** (lev * f_orb)), work + n * f_orb + 2)
            coeffs[0] = s / lead
            levels.append(coeffs)
        self.levels = levels

    def coefficients(self, level: int | None = None):
        return self.levels[(level or self.n) - 1]

    def eval(self, t: PadicElement, level: int | None = None) -> PadicElement:
        cs = self.coefficients(level)
        acc = self.tower.zero(self.prec + 2)
        for c in reversed(cs):
            acc = acc * t + c
        return acc


_DISC_CACHE: dict = {}


def _disc_expansion(tower, n, residue, J, prec) -> DiscExpansion:
    key = (tower, n, tuple(residue), J, prec)
    d = _DISC_CACHE.get(key)
    if d is None:
        d = DiscExpansion(tower, n, residue, J, prec)
        _DISC_CACHE[key] = d
    return d


def _series_branch(n: int, z: PadicElement, N: int) -> PadicElement:
    # sum z^k / k^n for |z| < 1; the tail beyond K has valuation
    # K v(z) - n log_p K > N
    tower = z.tower
    p = tower.p
    K = N + n * _log_ceil(max(N, 2), p) + 8
    acc = tower.zero(N + 2)
    zk = tower.one(N + n * _log_ceil(K + 1, p) + 4)
    for k in range(1, K + 1):
        zk = zk * z
        acc = acc + zk * Fraction(1, k**n)
    return acc


def li_padic(n: int, z: PadicElement, precision: int | None = None) -> PadicElement:
    """Li_{n,p}(z) to absolute precision min(precision, precision of z)."""
    if n < 1:
        raise ValueError("index must be at least 1")
    tower = z.tower
    if tower.p == 2:
        raise NotImplementedError("odd residue characteristic only")
    if z.is_zero():
        return tower.zero(z.precision)
    N = z.precision if precision is None else min(precision, z.precision)
    if n == 1:
        return -padic_log(1 - z)
    v = z.valuation
    if v >= 1:
        return _series_branch(n, z, N)
    if v <= -1:
        inner = li_padic(n, z.inverse(), N)
        logz = padic_log(z)
        return -((-1) ** n) * inner - logz**n * Fraction(1, factorial(n))
    dz = z - 1
    if dz.is_zero() or dz.valuation >= 1:
        raise ValueError("the residue disc of 1 is not in the domain")
    p = tower.p
    J = max(min(4 * N, (p - 1) * N), N + n * _log_ceil(max(N, 2), p) + 10)
    work = N + n * (_log_ceil(J + 1, p) + 2) + 4
    exp = _disc_expansion(tower, n, z.residue(), J, work)
    t = z / exp.orbit[0] - 1
    val = exp.eval(t)
    return PadicElement(tower, val.v, min(val.n, N), val.u)._normalized() if val.u else val


def p_np(n: int, z: PadicElement, precision: int | None = None) -> PadicElement:
    """Single-valued combination Li_{n,p}(z) + log^(n-1)(z) log(1-z) / n!.

    Both z and 1-z must be units; vanishes at z = -1 for even n.
    """
    if n < 2:
        raise ValueError("index must be at least 2")
    if z.is_zero() or z.valuation != 0:
        raise ValueError("z must be a unit")
    omz = 1 - z
    if omz.is_zero() or omz.valuation != 0:
        raise ValueError("1 - z must be a unit")
    li = li_padic(n, z, precision)
    logz = padic_log(z)
    corr = logz ** (n - 1) * padic_log(omz) * Fraction(1, factorial(n))
    return li + corr


def frobenius_residual_valuations(tower, n, residue, J, prec):
    """Per-order residuals of the Frobenius equation on one disc.

    Expands both sides of Li(omega(1+t)) - p^-n Li(omega^p (1+t)^p) =
    g_n(1/(1 - omega(1+t))) and returns the valuation of each coefficient
    difference (None where the difference is zero to working precision).
    Orders j >= 1 exercise the integration chain against an independent
    composition; order 0 restates the cyclic system.
    """
    p = tower.p
    d0 = _disc_expansion(tower, n, residue, J, prec)
    omega = d0.orbit[0]
    res_p = d0.orbit[1 % len(d0.orbit)].residue()
    d1 = _disc_expansion(tower, n, res_p, J, prec)

    work = prec + n * (_log_ceil(J + 1, p) + 2) + 4
    zero = tower.zero(work)

    # s(t) = (1+t)^p - 1 as exact small polynomial
    s = [zero] * (J + 1)
    for k in range(1, min(p, J) + 1):
        s[k] = tower.from_int(comb(p, k), work)

    # B(t) = A^(1)(s(t))
    b = d1.coefficients()
    B = [zero] * (J + 1)
    for c in reversed(b):
        B = _series_mul(B, s, J, zero)
        B[0] = B[0] + c

    # u(t) = 1/(1 - omega(1+t)) = (1/(1-omega)) sum r^j t^j, r = omega/(1-omega)
    one_minus = 1 - omega
    r = omega / one_minus
    u = []
    cur = one_minus.inverse()
    for _ in range(J + 1):
        u.append(cur)
        cur = cur * r
    rhs = d0.gn.eval_series(n, u, J, tower, prec)

    a = d0.coefficients()
    out = []
    for j in range(J + 1):
        diff = a[j] - B[j] * Fraction(1, p**n) - rhs[j]
        out.append(None if diff.is_zero() else diff.valuation)
    return out
