"""Complex L-values at integer arguments via smoothed Mellin-Barnes sums.

A descriptor carries Dirichlet coefficients (generated from reciprocal
local Euler factors), the conductor, and the gamma-factor shape. Values
L(n) for integer n >= 2 come from a smoothed approximate functional
equation: the completed function is written as two rapidly convergent
sums against kernels

    K1(y) = (1/2 pi i) int gamma(n+z) H(z) y^(-z) dz/z,
    K2(y) = (1/2 pi i) int gamma(1-n+v) H(-v) y^(-v) dv/v,

where H(z) = (z+n-1)(z+n)/((n-1)n) is 1 at z = 0 and vanishes at the two
points where a Dedekind zeta's completed function has poles, so one
formula serves entire L-functions and zetas alike. The root number is
solved for numerically by comparing two balance parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import mpmath
import sympy

from .ktheory import _field_factors_mod
from .numfields import MotivicSetup, NumberField


class CutoffError(ArithmeticError):
    """Coefficient cutoff too short for the requested precision."""


# ----- descriptors -----


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_div_exact(num, den):
    """num / den in Z[T], both with constant term 1; must divide exactly."""
    num = list(num)
    qlen = len(num) - len(den) + 1
    if qlen <= 0:
        raise ValueError("degree mismatch in local factor division")
    q = [0] * qlen
    for i in range(qlen):
        acc = num[i]
        for j in range(1, min(i, len(den) - 1) + 1):
            acc -= den[j] * q[i - j]
        q[i] = acc
    if _poly_mul(q, list(den)) != num:
        raise ValueError("local factor does not divide")
    return tuple(q)


@dataclass(frozen=True)
class LSeriesDescriptor:
    """Degree, conductor, gamma shape, and local-factor source of one L."""

    name: str
    degree: int
    conductor: int
    gamma_plus: int
    gamma_minus: int
    has_pole: bool
    local_source: object  # callable p -> reciprocal Euler factor, ascending
    _cache: dict = dc_field(default_factory=dict, compare=False, repr=False)

    def local_factor(self, p: int) -> tuple:
        key = ("loc", p)
        if key not in self._cache:
            fac = tuple(int(c) for c in self.local_source(p))
            if fac[0] != 1 or len(fac) - 1 > self.degree:
                raise ValueError("bad local factor")
            self._cache[key] = fac
        return self._cache[key]

    def coefficients(self, M: int) -> list:
        """Dirichlet coefficients a_1..a_M (index 0 unused)."""
        have = self._cache.get("coeffs")
        if have is not None and len(have) > M:
            return have[: M + 1]
        a = [0] * (M + 1)
        if M >= 1:
            a[1] = 1
        spf = list(range(M + 1))
        for p in range(2, int(M**0.5) + 1):
            if spf[p] == p:
                for q in range(p * p, M + 1, p):
                    if spf[q] == q:
                        spf[q] = p
        for m in range(2, M + 1):
            p = spf[m]
            e, rest = 0, m
            while rest % p == 0:
                rest //= p
                e += 1
            if rest == 1:
                fac = self.local_factor(p)
                acc = 0
                for j in range(1, min(e, len(fac) - 1) + 1):
                    acc -= fac[j] * a[m // p**j]
                a[m] = acc
            else:
                a[m] = a[p**e] * a[rest]
        self._cache["coeffs"] = a
        return a


_DESCRIPTORS: dict = {}


def zeta_descriptor() -> LSeriesDescriptor:
    if "zeta" not in _DESCRIPTORS:
        _DESCRIPTORS["zeta"] = LSeriesDescriptor("zeta", 1, 1, 1, 0, True,
                                                 lambda p: (1, -1))
    return _DESCRIPTORS["zeta"]


def dedekind_descriptor(field: NumberField, name: str | None = None) -> LSeriesDescriptor:
    """Dedekind zeta from the defining polynomial.

    The shape of f mod p is read as the splitting type, which presumes the
    power basis generates the ring of integers; that holds for every
    bundled preset (their polynomial discriminants equal the field
    discriminants).
    """

    key = ("dedekind", tuple(field.poly))
    if key in _DESCRIPTORS:
        return _DESCRIPTORS[key]

    def local(p):
        simple, repeated = _field_factors_mod(field.poly, p)
        degs = [len(g) - 1 for g in simple] + [len(g) - 1 for g, _ in repeated]
        out = [1]
        for dg in degs:
            fac = [1] + [0] * (dg - 1) + [-1]
            out = _poly_mul(out, fac)
        return tuple(out)

    desc = LSeriesDescriptor(name or f"zeta[{field.poly}]", field.degree,
                             abs(field.disc), field.r1 + field.r2, field.r2,
                             True, local)
    _DESCRIPTORS[key] = desc
    return desc


def quotient_descriptor(num: LSeriesDescriptor, den: LSeriesDescriptor,
                        name: str) -> LSeriesDescriptor:
    if num.conductor % den.conductor:
        raise ValueError("conductors do not divide")
    gp = num.gamma_plus - den.gamma_plus
    gm = num.gamma_minus - den.gamma_minus
    if gp < 0 or gm < 0:
        raise ValueError("gamma shapes do not divide")

    def local(p):
        return _poly_div_exact(num.local_factor(p), den.local_factor(p))

    return LSeriesDescriptor(name, num.degree - den.degree,
                             num.conductor // den.conductor, gp, gm,
                             False, local)


def quadratic_field(disc: int) -> NumberField:
    if disc % 4 == 1:
        return NumberField([-(disc - 1) // 4, -1, 1])
    if disc % 4 == 0:
        return NumberField([-disc // 4, 0, 1])
    raise ValueError("not a discriminant")


def artin_descriptor(setup: MotivicSetup) -> LSeriesDescriptor:
    """The two-dimensional piece attached to a preset, as a zeta quotient."""
    key = ("artin", setup.name, tuple(setup.field.poly), setup.conductor)
    if key in _DESCRIPTORS:
        return _DESCRIPTORS[key]
    num = dedekind_descriptor(setup.field)
    if setup.group == "S3":
        den = zeta_descriptor()
    elif setup.group == "D8":
        if setup.quad_subfield_disc is None:
            raise ValueError("preset lacks its quadratic subfield discriminant")
        den = dedekind_descriptor(quadratic_field(setup.quad_subfield_disc))
    else:
        raise ValueError(f"no L-series decomposition for group {setup.group}")
    desc = quotient_descriptor(num, den, f"V[{setup.name}]")
    if setup.conductor and desc.conductor != setup.conductor:
        raise ValueError(
            f"conductor bookkeeping failed: {desc.conductor} != {setup.conductor}")
    _DESCRIPTORS[key] = desc
    return desc


def conductor(setup: MotivicSetup) -> int:
    return artin_descriptor(setup).conductor


def local_factors(setup: MotivicSetup, p: int) -> tuple:
    """Reciprocal Euler factor of the preset's two-dimensional piece at p."""
    return artin_descriptor(setup).local_factor(p)


# ----- kernels -----


class _Kernel:
    """Trapezoid data for K1/K2 at one (gamma shape, n, working digits)."""

    def __init__(self, gp: int, gm: int, n: int, digits: int):
        self.gp, self.gm, self.n, self.digits = gp, gm, n, digits
        d = gp + gm
        with mpmath.workdps(digits + 10):
            ln10 = mpmath.log(10)
            target = digits * ln10
            self.c = mpmath.mpf("2.5")
            self.c2 = 2 * n + self.c - 1
            strip = 2
            # h must stay an exact mpf: node ordinates k*h feed both the
            # stored weights and the phase ladder, and any float rounding
            # between the two puts a noise floor under the kernel.
            self.h = mpmath.mpf(float(2 * mpmath.pi * strip / (target + 10 * ln10)))
            T = float(4 * (target + 10 * ln10) / (mpmath.pi * d))
            self.N = int(T / float(self.h)) + 2
            self.w1 = self._weights(self.c, lambda z: self._H(z) *
                                    self._gamma(n + z))
            self.w2 = self._weights(self.c2, lambda v: self._H(-v) *
                                    self._gamma(1 - n + v))

    def _gamma(self, s):
        pi = +mpmath.pi
        out = mpmath.power(pi, -(self.gp * s + self.gm * (s + 1)) / 2)
        if self.gp:
            out *= mpmath.gamma(s / 2) ** self.gp
        if self.gm:
            out *= mpmath.gamma((s + 1) / 2) ** self.gm
        return out

    def _H(self, z):
        n = self.n
        return (z + n - 1) * (z + n) / (n * (n - 1))

    def _weights(self, line, f):
        out = []
        for k in range(self.N + 1):
            z = mpmath.mpc(line, k * self.h)
            out.append(f(z) / z)
        return out

    def _ladder(self, weights, line, y):
        # (h/2pi) y^(-line) [w_0 + 2 Re sum w_k rho^k], rho = y^(-ih)
        rho = mpmath.exp(mpmath.mpc(0, -self.h * mpmath.log(y)))
        acc = weights[0] / 2
        pw = mpmath.mpc(1)
        for k in range(1, self.N + 1):
            pw *= rho
            acc += weights[k] * pw
        return (self.h / mpmath.pi) * mpmath.power(y, -line) * acc.real

    def k1(self, y):
        return self._ladder(self.w1, self.c, y)

    def k2(self, y):
        return self._ladder(self.w2, self.c2, y)


_KERNELS: dict = {}


def _kernel(gp, gm, n, digits) -> _Kernel:
    key = (gp, gm, n, digits)
    if key not in _KERNELS:
        _KERNELS[key] = _Kernel(gp, gm, n, digits)
    return _KERNELS[key]


def _cutoff(kern: _Kernel, sqC, digits, xmax) -> int:
    """Smallest coefficient index with both kernel tails negligible."""
    with mpmath.workdps(kern.digits + 10):
        tol = mpmath.mpf(10) ** (-(digits + 8))
        y = mpmath.mpf(1)
        for _ in range(60):
            t1 = abs(kern.k1(y / xmax))
            t2 = abs(kern.k2(y)) * mpmath.power(y * sqC, kern.n - 1)
            if t1 < tol and t2 * xmax ** kern.n < tol:
                break
            y *= mpmath.mpf("1.25")
        else:
            raise CutoffError("kernel tail does not reach the target")
        return int(mpmath.ceil(y * sqC)) + 8


def _afe_sums(desc: LSeriesDescriptor, n: int, kern: _Kernel, X, M: int):
    a = desc.coefficients(M)
    sqC = mpmath.sqrt(desc.conductor)
    S1 = mpmath.mpf(0)
    S2 = mpmath.mpf(0)
    for m in range(1, M + 1):
        if not a[m]:
            continue
        y = m / sqC
        S1 += a[m] * mpmath.power(m, -n) * kern.k1(y / X)
        S2 += a[m] * mpmath.power(m, n - 1) * kern.k2(y * X)
    return S1, S2


def root_number(desc: LSeriesDescriptor, digits: int = 30) -> mpmath.mpf:
    """Solve for the functional-equation constant from two balance points."""
    key = ("W", digits)
    if key in desc._cache:
        return desc._cache[key]
    n = 2
    C = desc.conductor
    work = digits + 18 + int(2 * math.log10(C) + 0.5) if C > 1 else digits + 18
    with mpmath.workdps(work + 10):
        kern = _kernel(desc.gamma_plus, desc.gamma_minus, n, work)
        sqC = mpmath.sqrt(C)
        xs = [mpmath.mpf(1), mpmath.mpf(4) / 3, mpmath.mpf(8) / 5]
        M = _cutoff(kern, sqC, work, float(max(xs)))
        sums = [_afe_sums(desc, n, kern, x, M) for x in xs]
        scale = mpmath.power(C, n - mpmath.mpf(1) / 2)
        W1 = scale * (sums[0][0] - sums[1][0]) / (sums[1][1] - sums[0][1])
        W2 = scale * (sums[0][0] - sums[2][0]) / (sums[2][1] - sums[0][1])
        if abs(W1 - W2) > mpmath.mpf(10) ** (-(digits - 5)):
            raise ArithmeticError("functional equation constant is unstable")
        if abs(abs(W1) - 1) > mpmath.mpf(10) ** (-(digits - 5)):
            raise ArithmeticError("functional equation constant is not unimodular")
        W = +W1
    desc._cache[key] = W
    return W


def l_value(desc: LSeriesDescriptor, n: int, digits: int = 50):
    """L(n) for integer n >= 2, real for the bundled descriptors."""
    if int(n) != n or n < 2:
        raise ValueError("integer argument >= 2 required")
    n = int(n)
    key = ("val", n, digits)
    if key in desc._cache:
        return desc._cache[key]
    work = digits + 15
    with mpmath.workdps(work + 10):
        kern = _kernel(desc.gamma_plus, desc.gamma_minus, n, work)
        sqC = mpmath.sqrt(desc.conductor)
        M = _cutoff(kern, sqC, work, 1.0)
        S1, S2 = _afe_sums(desc, n, kern, mpmath.mpf(1), M)
        W = root_number(desc, digits=min(digits, 30))
        gam = kern._gamma(mpmath.mpf(n))
        val = S1 / gam + W * mpmath.power(desc.conductor,
                                          mpmath.mpf(1) / 2 - n) * S2 / gam
        out = +val
    desc._cache[key] = out
    return out


def artin_l_value(setup: MotivicSetup, n: int, digits: int = 50, route: str = "afe"):
    """Value of the preset's two-dimensional L at n by either route."""
    if route == "afe":
        return l_value(artin_descriptor(setup), n, digits)
    if route == "quotient":
        num = dedekind_descriptor(setup.field)
        if setup.group == "S3":
            den = zeta_descriptor()
        elif setup.group == "D8":
            den = dedekind_descriptor(quadratic_field(setup.quad_subfield_disc))
        else:
            raise ValueError(f"no quotient route for group {setup.group}")
        with mpmath.workdps(digits + 15):
            return l_value(num, n, digits) / l_value(den, n, digits)
    raise ValueError("route must be 'afe' or 'quotient'")
