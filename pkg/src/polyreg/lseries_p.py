"""p-adic L-values of ray class characters over Q and real quadratic fields.

The pipeline: exact partial zeta values at nonpositive integers (Hurwitz
polynomials over Q, two-generator cone decompositions over a real quadratic
field), beta-regularized moment sequences, a measure presentation with a
certified decay bound, and a Newton series evaluator for the p-adic partial
zetas that twisted character sums combine into L_p values.

Values of characters of order t live in E = Q(zeta_t); elements of E tensor
Q_p are held as coordinate vectors over the power basis of zeta_t, so no
embedding of E into a p-adic field is ever chosen.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .padics import PadicElement, PadicTower, PrecisionError, padic_exp, padic_log, teichmuller

__all__ = [
    "DirichletChar",
    "PMeasure",
    "QuadField",
    "RayClassSetup",
    "ShintaniCone",
    "ShintaniData",
    "bernoulli",
    "bernoulli_char",
    "bernoulli_poly",
    "build_measure",
    "character_table",
    "cyclotomic_coords",
    "dirichlet_characters",
    "e_mul",
    "e_unit_valuation",
    "field_zeta_setup",
    "lp_artin",
    "lp_dirichlet",
    "lp_dirichlet_reference",
    "lp_partial",
    "lp_value",
    "mahler_pairing",
    "ray_class_setup",
    "rational_partial_zeta",
    "residue_balance",
    "shintani_zeta_nonpositive",
    "siegel_zeta_minus1",
    "siegel_zeta_minus3",
]


# ---------------------------------------------------------------------------
# integer utilities


def _vp(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _phi(n: int) -> int:
    out = n
    for q in _prime_factors(n):
        out = out // q * (q - 1)
    return out


def _squarefree(n: int) -> bool:
    n = abs(n)
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        if n % d == 0:
            n //= d
        d += 1
    return True


# ---------------------------------------------------------------------------
# Bernoulli numbers and polynomials

_BERN: list[Fraction] = [Fraction(1)]


def bernoulli(n: int) -> Fraction:
    """B_n with the B_1 = -1/2 convention."""
    while len(_BERN) <= n:
        m = len(_BERN)
        s = Fraction(0)
        for k in range(m):
            s += math.comb(m + 1, k) * _BERN[k]
        _BERN.append(-s / (m + 1))
    return _BERN[n]


def bernoulli_poly(n: int, x: Fraction) -> Fraction:
    x = Fraction(x)
    return sum(
        (math.comb(n, k) * bernoulli(k)) * x ** (n - k) for k in range(n + 1)
    )


def rational_partial_zeta(M: int, a: int, r: int) -> Fraction:
    """sum over w > 0, w = a mod M of w^(-s), continued to s = -r.

    Equals -M^r B_{r+1}(a/M) / (r+1) with the representative a taken in (0, M].
    """
    if M < 1:
        raise ValueError("modulus must be positive")
    a = a % M
    if a == 0:
        a = M
    return -(Fraction(M) ** r) * bernoulli_poly(r + 1, Fraction(a, M)) / (r + 1)


def _stirling_first(n_max: int) -> list[list[int]]:
    # signed: x(x-1)...(x-n+1) = sum_r s(n,r) x^r
    rows = [[1]]
    for n in range(1, n_max + 1):
        prev = rows[-1]
        row = [0] * (n + 1)
        for r, c in enumerate(prev):
            row[r] -= (n - 1) * c
            row[r + 1] += c
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# cyclotomic coordinate algebra for E = Q(zeta_t)


def _cyclotomic_poly(t: int) -> list[Fraction]:
    if t == 1:
        return [Fraction(-1), Fraction(1)]
    num = [Fraction(-1)] + [Fraction(0)] * (t - 1) + [Fraction(1)]
    for d in range(1, t):
        if t % d:
            continue
        phi_d = _cyclotomic_poly(d)
        # exact division num //= phi_d
        out = [Fraction(0)] * (len(num) - len(phi_d) + 1)
        rem = list(num)
        for i in range(len(out) - 1, -1, -1):
            c = rem[i + len(phi_d) - 1] / phi_d[-1]
            out[i] = c
            if c:
                for j, pc in enumerate(phi_d):
                    rem[i + j] -= c * pc
        if any(rem):
            raise ArithmeticError("cyclotomic division left a remainder")
        num = out
    return num


_RED_CACHE: dict[int, list[list[Fraction]]] = {}


def cyclotomic_coords(t: int) -> list[list[Fraction]]:
    """Table red[j] = coordinates of zeta_t^j over 1, zeta, ..., zeta^(phi(t)-1)."""
    if t in _RED_CACHE:
        return _RED_CACHE[t]
    phi = _cyclotomic_poly(t)
    deg = len(phi) - 1
    red: list[list[Fraction]] = []
    vec = [Fraction(0)] * deg
    vec[0] = Fraction(1)
    red.append(vec)
    for _ in range(2 * t):
        prev = red[-1]
        top = prev[deg - 1]
        vec = [Fraction(0)] + list(prev[: deg - 1])
        if top:
            for k in range(deg):
                vec[k] -= top * phi[k]
        red.append(vec)
    _RED_CACHE[t] = red
    return red


def e_mul(u: list, v: list, t: int) -> list:
    """Product of two coordinate vectors over the zeta_t power basis."""
    red = cyclotomic_coords(t)
    deg = len(red[0])
    out = [0 * u[0]] * deg
    for i, a in enumerate(u):
        if not a:
            continue
        for j, b in enumerate(v):
            if not b:
                continue
            for k, c in enumerate(red[i + j]):
                if c:
                    out[k] = out[k] + (a * b) * c
    return out


def _zeta_vec(exp: int, t: int, scalar=Fraction(1)) -> list[Fraction]:
    red = cyclotomic_coords(t)
    return [scalar * c for c in red[exp % t]]


def e_unit_valuation(coords: list[PadicElement], t: int) -> int:
    """Valuation of the E tensor Q_p element with the given coordinates.

    Computed as v_p(det) / phi(t) rounded toward the determinant of the
    multiplication matrix; returns the minimum coordinate valuation bound
    if the determinant is zero to precision.
    """
    red = cyclotomic_coords(t)
    deg = len(red[0])
    if len(coords) != deg:
        raise ValueError("coordinate length mismatch")
    # column j = coords of zeta^j * L
    cols = []
    for j in range(deg):
        col = [None] * deg
        for i, a in enumerate(coords):
            for k, c in enumerate(red[i + j]):
                if c:
                    term = a * c
                    col[k] = term if col[k] is None else col[k] + term
        tower = coords[0].tower
        cols.append([tower.zero(coords[0].precision) if x is None else x for x in col])
    rows = [[cols[j][i] for j in range(deg)] for i in range(deg)]
    det = _padic_det(rows)
    return det.valuation


def _padic_det(rows: list[list[PadicElement]]) -> PadicElement:
    n = len(rows)
    rows = [list(r) for r in rows]
    tower = rows[0][0].tower
    det = tower.one(rows[0][0].precision)
    sign = 1
    for c in range(n):
        piv, piv_v = None, None
        for r in range(c, n):
            x = rows[r][c]
            if x.is_zero():
                continue
            if piv is None or x.valuation < piv_v:
                piv, piv_v = r, x.valuation
        if piv is None:
            return rows[c][c]  # zero to precision
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            sign = -sign
        pv = rows[c][c]
        det = det * pv
        for r in range(c + 1, n):
            x = rows[r][c]
            if x.is_zero():
                continue
            f = x / pv
            rows[r] = [rows[r][j] - f * rows[c][j] for j in range(n)]
    return det * sign


# ---------------------------------------------------------------------------
# quadratic field layer; elements are coordinate pairs (x, y) for x + y*omega


def _is_fundamental_disc(D: int) -> bool:
    if D <= 1:
        return False
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return _squarefree(m) and m % 4 in (2, 3)
    return False


class QuadField:
    """Real quadratic field of fundamental discriminant D with basis (1, omega).

    omega = (s + sqrt(D))/2 where s = D mod 2, so omega^2 = s*omega - n0 with
    n0 = (s^2 - D)/4.
    """

    def __init__(self, disc: int):
        if not _is_fundamental_disc(disc):
            raise ValueError(f"{disc} is not a fundamental discriminant > 1")
        self.disc = disc
        self.s = disc % 2
        self.n0 = (self.s * self.s - disc) // 4

    def mul(self, a, b):
        x, y = a
        u, v = b
        return (x * u - y * v * self.n0, x * v + y * u + y * v * self.s)

    def conj(self, a):
        x, y = a
        return (x + self.s * y, -y)

    def norm(self, a):
        x, y = a
        return x * x + self.s * x * y + self.n0 * y * y

    def trace(self, a):
        x, y = a
        return 2 * x + self.s * y

    def pow(self, a, k: int):
        out = (1, 0)
        base = a
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def scal(self, c, a):
        return (c * a[0], c * a[1])

    def sigma_sign(self, a, place: int) -> int:
        """Sign of the real embedding sigma_place(a), place in (1, 2)."""
        t = self.trace(a)
        u = a[1] if place == 1 else -a[1]
        if t == 0 and u == 0:
            return 0
        if t >= 0 and u >= 0:
            return 1
        if t <= 0 and u <= 0:
            return -1
        if t * t > u * u * self.disc:
            return 1 if t > 0 else -1
        return 1 if u > 0 else -1

    def totally_positive(self, a) -> bool:
        return self.norm(a) > 0 and self.trace(a) > 0

    def sigma(self, a, place: int) -> tuple[Fraction, Fraction]:
        """Embedding as (rational part, coefficient of sqrt(D))."""
        x, y = a
        b = Fraction(y, 2) if place == 1 else Fraction(-y, 2)
        return (Fraction(x) + Fraction(y * self.s, 2), b)

    def fundamental_unit(self):
        """Smallest unit > 1 under sigma_1; solves N = +-1."""
        y = 1
        while True:
            found = []
            for sgn in (1, -1):
                # x^2 + s x y + n0 y^2 = sgn
                disc = self.s * self.s * y * y - 4 * (self.n0 * y * y - sgn)
                if disc < 0:
                    continue
                r = math.isqrt(disc)
                if r * r != disc:
                    continue
                for pm in (r, -r):
                    num = -self.s * y + pm
                    if num % 2:
                        continue
                    x = num // 2
                    cand = (x, y)
                    if self.sigma_sign(cand, 1) < 0:
                        cand = (-x, -y)
                    t, u = cand
                    # require sigma_1 > 1, i.e. the element exceeds 1
                    if self.sigma_sign((t - 1, u), 1) > 0:
                        found.append(cand)
            if found:
                # any unit > 1 has positive omega coordinate, so at this y
                # sigma_1 is ordered by the rational coordinate
                return min(found, key=lambda c: c[0])
            y += 1
            if y > 10**6:
                raise ArithmeticError("unit search runaway")

    def totally_positive_unit(self):
        """Generator of the totally positive units modulo torsion."""
        e0 = self.fundamental_unit()
        if self.norm(e0) == 1:
            return e0 if self.totally_positive(e0) else self.scal(-1, e0)
        return self.mul(e0, e0)

    def assert_class_number_one(self) -> None:
        bound = math.isqrt(self.disc) // 2 + 1
        for q in range(2, bound + 1):
            if not _is_prime(q):
                continue
            # q must not be a non-principal split/ramified prime
            ks = self.disc % (4 * q)
            # solve x^2 = D mod 4q to find ideals of norm q
            found_root = None
            for x in range(2 * q):
                if (x * x - self.disc) % (4 * q) == 0:
                    found_root = x
                    break
            if found_root is None:
                continue  # inert
            # the ideal (q, (x + sqrt D)/2) has norm q; check principality
            if not self._has_element_of_norm(q):
                raise NotImplementedError(
                    f"class number of disc {self.disc} exceeds 1 (prime {q})"
                )
            _ = ks

    def _has_element_of_norm(self, q: int) -> bool:
        # search x + y omega with |norm| = q, small box
        lim = 4 * (math.isqrt(q * self.disc) + 2)
        for y in range(-lim, lim + 1):
            for x in range(-lim, lim + 1):
                if abs(self.norm((x, y))) == q:
                    return True
        return False


def _det2(a, b) -> int:
    return a[0] * b[1] - a[1] * b[0]


def _lattice_index(cols) -> int:
    """Index in Z^2 of the lattice spanned by the integer columns (0 if rank < 2)."""
    cols = [c for c in cols if c != (0, 0)]
    if not cols:
        return 0
    # eliminate on the first coordinate
    cols = [tuple(c) for c in cols]
    while True:
        nz = [c for c in cols if c[0] != 0]
        if len(nz) <= 1:
            break
        nz.sort(key=lambda c: abs(c[0]))
        a = nz[0]
        new = [a]
        for c in cols:
            if c is a:
                continue
            if c[0] != 0:
                k = c[0] // a[0]
                c = (c[0] - k * a[0], c[1] - k * a[1])
            new.append(c)
        cols = [c for c in new if c != (0, 0)]
    lead = [c for c in cols if c[0] != 0]
    rest = [c[1] for c in cols if c[0] == 0]
    if not lead or not rest:
        return 0
    g = 0
    for y in rest:
        g = math.gcd(g, y)
    return abs(lead[0][0]) * g


class _ResidueRing:
    """O / (gamma) with canonical labels via a triangular basis of gamma*O."""

    def __init__(self, F: QuadField, gamma):
        self.F = F
        c1 = gamma
        c2 = F.mul(gamma, (0, 1))
        y1, y2 = c1[1], c2[1]
        g, u, v = _xgcd(y1, y2)
        w2 = (u * c1[0] + v * c2[0], g)
        w1 = ((y2 // g) * c1[0] - (y1 // g) * c2[0], 0)
        if w1[0] < 0:
            w1 = (-w1[0], 0)
        self.a = w1[0]
        self.g = g if g > 0 else -g
        self.c = w2[0] % self.a if self.a else w2[0]
        self.w2 = (self.c, self.g)
        self.size = self.a * self.g
        if self.size != abs(F.norm(gamma)):
            raise ArithmeticError("residue ring size mismatch")
        self.gamma = gamma

    def label(self, x) -> tuple[int, int]:
        a, b = x
        k = b // self.g
        a -= k * self.c
        b -= k * self.g
        return (a % self.a, b)

    def is_unit(self, x) -> bool:
        F = self.F
        cols = [x, F.mul(x, (0, 1)), self.gamma, F.mul(self.gamma, (0, 1))]
        return _lattice_index(cols) == 1


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


# ---------------------------------------------------------------------------
# cone chains and residue points


def period_chain(F: QuadField) -> list:
    """Lattice points on the hull boundary of the cone sector from 1 to the
    totally positive fundamental unit; consecutive coordinate determinants
    are +-1 and chain points include every lattice point on the boundary."""
    eps = F.totally_positive_unit()
    if eps[1] <= 0:
        raise ArithmeticError("unexpected unit orientation")
    ref = _det2((1, 0), eps)

    def in_sector(pt) -> bool:
        if pt == (0, 0):
            return False
        d1 = _det2((1, 0), pt)
        d2 = _det2(pt, eps)
        if d1 * ref < 0 or d2 * ref < 0:
            return False
        if d1 == 0:
            return pt[0] > 0
        if d2 == 0:
            return F.totally_positive(pt)
        return True

    cands = []
    for b in range(0, eps[1] + 1):
        for a in range(-abs(eps[0]) - 1, abs(eps[0]) + eps[1] + 2):
            pt = (a, b)
            if not in_sector(pt):
                continue
            # keep only points not beyond the segment [1, eps]
            lam = Fraction(_det2(pt, eps), ref)
            mu = Fraction(_det2((1, 0), pt), ref)
            if lam + mu <= 1:
                cands.append(pt)
    chain = [(1, 0)]
    cur = (1, 0)
    while cur != eps:
        best = None
        for pt in cands:
            if pt == cur:
                continue
            d = _det2(cur, pt)
            if d * ref <= 0:
                continue  # not strictly past cur
            if best is None:
                best = pt
                continue
            c = _det2(best, pt)
            if c * ref < 0:
                best = pt
            elif c == 0 and _height(pt) < _height(best):
                best = pt
        if best is None:
            raise ArithmeticError("chain walk stalled")
        if abs(_det2(cur, best)) != 1:
            raise ArithmeticError("chain step is not unimodular")
        chain.append(best)
        cur = best
    return chain


def _height(pt) -> int:
    return abs(pt[0]) + abs(pt[1])


def extend_chain(F: QuadField, chain: list, k: int) -> list:
    """Chain from 1 to eps^k obtained by translating the period chain."""
    if k < 1:
        raise ValueError("k must be positive")
    eps = chain[-1]
    out = list(chain)
    power = eps
    for _ in range(k - 1):
        out.extend(F.mul(power, w) for w in chain[1:])
        power = F.mul(power, eps)
    for i in range(len(out) - 1):
        if abs(_det2(out[i], out[i + 1])) != 1:
            raise ArithmeticError("extended chain lost unimodularity")
    return out


@dataclass
class ShintaniCone:
    v1: tuple
    v2: tuple
    points: list  # residue points, one per cone for unimodular chains


@dataclass
class ShintaniData:
    """Half-open cone decomposition data for each ray class representative."""

    gamma: tuple
    chain: list
    cones: list  # cones[i] = list of ShintaniCone for class i

    def sample_check(self, F: QuadField, reps: list, eps, count: int = 12) -> None:
        """Verify on sample lattice points that the cones tile each coset of
        gamma*O in the totally positive quadrant up to the action of eps."""
        for i, alpha in enumerate(reps):
            seen = 0
            for m1 in range(-3, 4):
                for m2 in range(-3, 4):
                    w = (
                        alpha[0] + self.gamma[0] * m1 + _omega_part(F, self.gamma, m2)[0],
                        alpha[1] + self.gamma[1] * m1 + _omega_part(F, self.gamma, m2)[1],
                    )
                    if not F.totally_positive(w):
                        continue
                    hits = 0
                    for j in range(-6, 7):
                        wj = F.mul(F.pow(eps, abs(j)) if j >= 0 else _inv_unit(F, eps, -j), w) if j else w
                        for cone in self.cones[i]:
                            lam, mu = _cone_coords(F, cone.v1, cone.v2, wj)
                            if lam is not None and lam > 0 and mu >= 0:
                                hits += 1
                    if hits != 1:
                        raise ArithmeticError("tiling check failed")
                    seen += 1
                    if seen >= count:
                        break
                if seen >= count:
                    break


def _omega_part(F: QuadField, gamma, m2: int):
    g_omega = F.mul(gamma, (0, 1))
    return (g_omega[0] * m2, g_omega[1] * m2)


def _inv_unit(F: QuadField, eps, k: int):
    # eps has norm 1 so eps^(-1) = conj(eps)
    return F.pow(F.conj(eps), k)


def _cone_coords(F: QuadField, v1, v2, w):
    d = _det2(v1, v2)
    if d == 0:
        return (None, None)
    lam = Fraction(_det2(w, v2), d)
    mu = Fraction(_det2(v1, w), d)
    return (lam, mu)


def _cone_residue_points(F: QuadField, alpha, gamma, v1, v2) -> list:
    """Points of alpha + gamma*O in the half-open cell lam in (0,1], mu in [0,1).

    For unimodular cone pairs scaled by gamma there is exactly one.
    """
    delta = _det2(v1, v2)
    if delta == 0:
        raise ArithmeticError("degenerate cone")
    sg = 1 if delta > 0 else -1
    dabs = abs(delta)
    g1 = gamma
    g2 = F.mul(gamma, (0, 1))
    # x = alpha + m1 g1 + m2 g2; A = det(x, v2), B = det(v1, x)
    a0 = _det2(alpha, v2)
    c1 = _det2(g1, v2)
    c2 = _det2(g2, v2)
    b0 = _det2(v1, alpha)
    d1 = _det2(v1, g1)
    d2 = _det2(v1, g2)
    out = []
    g, u, v = _xgcd(c1, c2)
    if g == 0:
        raise ArithmeticError("cone map degenerate")
    for a_target in range(1, dabs + 1):
        rhs = sg * a_target - a0
        if rhs % g:
            continue
        m1_0 = u * (rhs // g)
        m2_0 = v * (rhs // g)
        # general solution (m1, m2) = (m1_0 + t c2/g, m2_0 - t c1/g)
        s1, s2 = c2 // g, -c1 // g
        bc = b0 + d1 * m1_0 + d2 * m2_0
        step = d1 * s1 + d2 * s2
        # want sg*B in [0, dabs)
        if step == 0:
            if 0 <= sg * bc < dabs:
                out.append((m1_0, m2_0))
            continue
        # solve 0 <= sg*(bc + t*step) < dabs for integer t
        lo, hi = 0, dabs  # half open on sg*B
        sstep = sg * step
        sbc = sg * bc
        if sstep > 0:
            t_lo = math.ceil(Fraction(lo - sbc, sstep))
            t_hi = math.floor(Fraction(hi - 1 - sbc, sstep))
        else:
            t_lo = math.ceil(Fraction(hi - 1 - sbc, sstep))
            t_hi = math.floor(Fraction(lo - sbc, sstep))
        for t in range(t_lo, t_hi + 1):
            out.append((m1_0 + t * s1, m2_0 + t * s2))
    pts = []
    for m1, m2 in out:
        x = (
            alpha[0] + g1[0] * m1 + g2[0] * m2,
            alpha[1] + g1[1] * m1 + g2[1] * m2,
        )
        lam, mu = _cone_coords(F, v1, v2, x)
        if not (0 < lam <= 1 and 0 <= mu < 1):
            raise ArithmeticError("residue solver produced a point off the cell")
        pts.append(x)
    return pts


# ---------------------------------------------------------------------------
# exact cone zeta engine (Fraction pairs over basis (1, sqrt D))

_XQ_ZERO = (Fraction(0), Fraction(0))


def _xq_mul(a, b, D):
    return (a[0] * b[0] + a[1] * b[1] * D, a[0] * b[1] + a[1] * b[0])


def _xq_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _xq_scal(c, a):
    return (c * a[0], c * a[1])


def _xq_inv(a, D):
    n = a[0] * a[0] - a[1] * a[1] * D
    if n == 0:
        raise ZeroDivisionError("non-invertible quadratic pair")
    return (a[0] / n, -a[1] / n)


class _ExactSeries:
    """Laurent series in t with coefficients in Q(sqrt D), exact."""

    __slots__ = ("off", "cs")

    def __init__(self, off: int, cs: list):
        self.off = off
        self.cs = cs


def _xs_trim(s: _ExactSeries, deg: int) -> _ExactSeries:
    keep = deg - s.off + 1
    if keep < len(s.cs):
        s.cs = s.cs[:keep]
    return s


def _xs_add(a: _ExactSeries, b: _ExactSeries, deg: int) -> _ExactSeries:
    off = min(a.off, b.off)
    ln = max(a.off + len(a.cs), b.off + len(b.cs)) - off
    cs = [_XQ_ZERO] * ln
    for i, c in enumerate(a.cs):
        cs[a.off - off + i] = c
    for i, c in enumerate(b.cs):
        cs[b.off - off + i] = _xq_add(cs[b.off - off + i], c)
    return _xs_trim(_ExactSeries(off, cs), deg)


def _xs_mul(a: _ExactSeries, b: _ExactSeries, D, deg: int) -> _ExactSeries:
    off = a.off + b.off
    ln = min(len(a.cs) + len(b.cs) - 1, deg - off + 1)
    if ln <= 0:
        return _ExactSeries(off, [])
    cs = [_XQ_ZERO] * ln
    for i, ca in enumerate(a.cs):
        if ca == _XQ_ZERO:
            continue
        jmax = min(len(b.cs), ln - i)
        for j in range(jmax):
            cb = b.cs[j]
            if cb == _XQ_ZERO:
                continue
            cs[i + j] = _xq_add(cs[i + j], _xq_mul(ca, cb, D))
    return _ExactSeries(off, cs)


def _xs_scal(c, a: _ExactSeries, D) -> _ExactSeries:
    return _ExactSeries(a.off, [_xq_mul(c, x, D) for x in a.cs])


def _bplus_over_fact(m: int) -> Fraction:
    # z/(1 - e^{-z}) = sum B+_m z^m / m!
    return (-1) ** m * bernoulli(m) / math.factorial(m)


def _gen_binom(m_minus_1: int, k: int) -> int:
    # C(m-1, k) extended to m = 0, where it equals (-1)^k
    if m_minus_1 < 0:
        return (-1) ** k
    if m_minus_1 < k:
        return 0
    return math.comb(m_minus_1, k)


def _exact_g_list(F: QuadField, v, J: int):
    """g_k series with Psi(t1, t2) = 1/(1 - exp(-(sigma1 v) t1 - (sigma2 v) t2))
    = sum_k g_k(t1) t2^k.

    Since Psi depends on t1, t2 only through u = sigma1 t1 + sigma2 t2,
    g_k = (sigma2^k / k!) Psi_1^(k)(sigma1 t1) for the one variable
    Psi_1(u) = 1/(1 - e^-u) = sum_m B+_m u^(m-1)/m!, so the coefficient of
    t1^(m-1-k) in g_k is (B+_m/m!) C(m-1, k) sigma2^k sigma1^(m-1-k).

    g_k has a pole of order k + 1, so to read products of two such lists off
    at t1 exponents up to J every series keeps exponents through 2J + 2.
    """
    D = F.disc
    a1 = F.sigma(v, 1)
    a2 = F.sigma(v, 2)
    deg = 2 * J + 2
    inv_a1 = _xq_inv(a1, D)
    g = []
    a2k = (Fraction(1), Fraction(0))  # sigma2^k
    for k in range(J + 1):
        cs = []
        # term = sigma2^k sigma1^(m-1-k) starting at m = 0
        term = a2k
        for _ in range(k + 1):
            term = _xq_mul(term, inv_a1, D)
        for m in range(0, deg + k + 2):
            j = m - 1 - k
            if j > deg:
                break
            b = _gen_binom(m - 1, k)
            cs.append(_xq_scal(_bplus_over_fact(m) * b, term) if b else _XQ_ZERO)
            term = _xq_mul(term, a1, D)
        g.append(_ExactSeries(-(k + 1), cs))
        a2k = _xq_mul(a2k, a2, D)
    return g


def _exact_cone_table(F: QuadField, v1, v2, points, J: int):
    """Table T[r1][r2] of sum over residue points of [t1^r1 t2^r2] G * r1! r2!
    expanding t2 first; entries are Q(sqrt D) pairs."""
    D = F.disc
    gA = _exact_g_list(F, v1, J)
    gB = _exact_g_list(F, v2, J)
    deg = 2 * J + 2
    P = []
    for c in range(J + 1):
        acc = None
        for k1 in range(c + 1):
            t = _xs_mul(gA[k1], gB[c - k1], D, deg)
            acc = t if acc is None else _xs_add(acc, t, deg)
        P.append(acc)
    table = [[_XQ_ZERO] * (J + 1) for _ in range(J + 1)]
    for x in points:
        X1 = F.sigma(x, 1)
        X2 = F.sigma(x, 2)
        # exp(-X1 t1) coefficients
        e1 = []
        term = (Fraction(1), Fraction(0))
        for m in range(deg + 2):
            e1.append(_xq_scal(Fraction(1, math.factorial(m)), term))
            term = _xq_mul(term, _xq_scal(Fraction(-1), X1), D)
        x2pow = []
        term = (Fraction(1), Fraction(0))
        for m in range(J + 1):
            x2pow.append(_xq_scal(Fraction(1, math.factorial(m)), term))
            term = _xq_mul(term, _xq_scal(Fraction(-1), X2), D)
        for r2 in range(J + 1):
            row = None
            for c in range(r2 + 1):
                t = _xs_scal(x2pow[r2 - c], P[c], D)
                row = t if row is None else _xs_add(row, t, deg)
            # multiply by e^{ -X1 t1 } and read off coefficients of t1^r1
            for r1 in range(J + 1):
                acc = _XQ_ZERO
                for i, c in enumerate(row.cs):
                    k = r1 - (row.off + i)
                    if 0 <= k < len(e1):
                        acc = _xq_add(acc, _xq_mul(c, e1[k], D))
                val = _xq_scal(
                    Fraction(math.factorial(r1) * math.factorial(r2)), acc
                )
                table[r1][r2] = _xq_add(table[r1][r2], val)
    return table


def _exact_class_zeta(F: QuadField, cones, r: int) -> Fraction:
    """Partial zeta value at s = -r for one class."""
    return _exact_diag_values(F, cones, r)[r]


def _exact_diag_values(F: QuadField, cones, R: int) -> list[Fraction]:
    """All diagonal values for r = 0..R from one table pass per cone."""
    tots = [_XQ_ZERO] * (R + 1)
    for cone in cones:
        table = _exact_cone_table(F, cone.v1, cone.v2, cone.points, R)
        for r in range(R + 1):
            tots[r] = _xq_add(tots[r], table[r][r])
    # the symmetrized value is (z + conj z)/2, i.e. the rational component;
    # the sqrt part survives only when the sampled data is conjugation-stable,
    # so it is discarded rather than asserted away
    return [tots[r][0] for r in range(R + 1)]


def F_conj_pair(a):
    return (a[0], -a[1])


# ---------------------------------------------------------------------------
# fixed point cone zeta engine


class _Fp:
    """Fixed point arithmetic mod p^Kb on pairs (u, v) for u + v sqrt(D),
    with a shared power-of-p exponent per series: value = stored * p^(-exp)."""

    def __init__(self, p: int, Kb: int, D: int):
        self.p = p
        self.Kb = Kb
        self.m = p**Kb
        self.D = D % self.m
        self.inv2 = pow(2, -1, self.m)

    def embed_frac(self, fr: Fraction) -> tuple[int, int]:
        num, den = fr.numerator, fr.denominator
        e = 0
        while den % self.p == 0:
            den //= self.p
            e += 1
        return (num * pow(den % self.m, -1, self.m)) % self.m, e

    def sigma_pair(self, F: QuadField, a, place: int) -> tuple[int, int]:
        x, y = a
        yy = y if place == 1 else -y
        u = (x + y * F.s * self.inv2) % self.m
        v = (yy * self.inv2) % self.m
        return (u, v)

    def pmul(self, a, b):
        return (
            (a[0] * b[0] + a[1] * b[1] * self.D) % self.m,
            (a[0] * b[1] + a[1] * b[0]) % self.m,
        )

    def pscale(self, c, a):
        return (c * a[0] % self.m, c * a[1] % self.m)

    def padd(self, a, b):
        return ((a[0] + b[0]) % self.m, (a[1] + b[1]) % self.m)


class _FpSeries:
    __slots__ = ("off", "exp", "cs")

    def __init__(self, off: int, exp: int, cs: list):
        self.off = off
        self.exp = exp
        self.cs = cs


def _fs_add(ctx: _Fp, a: _FpSeries, b: _FpSeries, deg: int) -> _FpSeries:
    exp = max(a.exp, b.exp)
    sa = pow(ctx.p, exp - a.exp) if exp > a.exp else 1
    sb = pow(ctx.p, exp - b.exp) if exp > b.exp else 1
    off = min(a.off, b.off)
    ln = max(a.off + len(a.cs), b.off + len(b.cs)) - off
    ln = min(ln, deg - off + 1)
    cs = [(0, 0)] * ln
    for i, c in enumerate(a.cs):
        j = a.off - off + i
        if j < ln:
            cs[j] = ctx.pscale(sa, c) if sa != 1 else c
    for i, c in enumerate(b.cs):
        j = b.off - off + i
        if j < ln:
            cc = ctx.pscale(sb, c) if sb != 1 else c
            cs[j] = ctx.padd(cs[j], cc)
    return _FpSeries(off, exp, cs)


def _fs_mul(ctx: _Fp, a: _FpSeries, b: _FpSeries, deg: int) -> _FpSeries:
    off = a.off + b.off
    ln = min(len(a.cs) + len(b.cs) - 1, deg - off + 1)
    if ln <= 0:
        return _FpSeries(off, a.exp + b.exp, [])
    m, D = ctx.m, ctx.D
    cs = [(0, 0)] * ln
    bu = [c[0] for c in b.cs]
    bv = [c[1] for c in b.cs]
    for i, (au, av) in enumerate(a.cs):
        if not au and not av:
            continue
        jmax = min(len(b.cs), ln - i)
        for j in range(jmax):
            u2, v2 = bu[j], bv[j]
            if not u2 and not v2:
                continue
            cu, cv = cs[i + j]
            cs[i + j] = (
                (cu + au * u2 + av * v2 * D) % m,
                (cv + au * v2 + av * u2) % m,
            )
    return _FpSeries(off, a.exp + b.exp, cs)


def _fs_pair_scale(ctx: _Fp, s: _FpSeries, pair, exp_add: int) -> _FpSeries:
    return _FpSeries(s.off, s.exp + exp_add, [ctx.pmul(pair, c) for c in s.cs])


def _fp_g_list(ctx: _Fp, F: QuadField, v, J: int):
    """Fixed point g_k lists by the direct derivative formula; see the exact
    engine docstring. The 1/a1 pole powers are carried in the series exponent
    as w = v_p(N(v)) per power, since p^w / a1 is integral."""
    a1 = ctx.sigma_pair(F, v, 1)
    a2 = ctx.sigma_pair(F, v, 2)
    nrm = F.norm(v)
    w = _vp(nrm, ctx.p)
    unit = nrm // ctx.p**w
    conj1 = ctx.sigma_pair(F, F.conj(v), 1)
    inv_pair = ctx.pscale(pow(unit % ctx.m, -1, ctx.m), conj1)  # = p^w / a1
    deg = 2 * J + 2
    g = []
    a2k = (1, 0)
    for k in range(J + 1):
        qs = [
            _bplus_over_fact(m) * _gen_binom(m - 1, k)
            for m in range(deg + k + 2)
        ]
        embedded = [ctx.embed_frac(q) for q in qs]
        emax = max(e for _, e in embedded)
        term = a2k
        for _ in range(k + 1):
            term = ctx.pmul(term, inv_pair)
        cs = []
        for m in range(deg + k + 2):
            num, e = embedded[m]
            if num:
                num = num * pow(ctx.p, emax - e, ctx.m) % ctx.m
                cs.append(ctx.pscale(num, term))
            else:
                cs.append((0, 0))
            term = ctx.pmul(term, a1)
        g.append(_FpSeries(-(k + 1), w * (k + 1) + emax, cs))
        a2k = ctx.pmul(a2k, a2)
    return g


def _fp_cone_tables(ctx: _Fp, F: QuadField, v1, v2, J: int):
    gA = _fp_g_list(ctx, F, v1, J)
    gB = _fp_g_list(ctx, F, v2, J)
    deg = 2 * J + 2
    P = []
    for c in range(J + 1):
        acc = None
        for k1 in range(c + 1):
            t = _fs_mul(ctx, gA[k1], gB[c - k1], deg)
            acc = t if acc is None else _fs_add(ctx, acc, t, deg)
        P.append(acc)
    return P


def _fp_point_eval(ctx: _Fp, F: QuadField, P, x, J: int):
    """Diagonal extractions [t1^r t2^r] G * (r!)^2 for r <= J at one residue
    point; entries are ((u, v) pair, exponent)."""
    X1 = ctx.sigma_pair(F, x, 1)
    X2 = ctx.sigma_pair(F, x, 2)
    deg = 2 * J + 2

    def exp_coeffs(Xp):
        out = []
        term = (1, 0)
        neg = ((-Xp[0]) % ctx.m, (-Xp[1]) % ctx.m)
        for mdeg in range(deg + 2):
            e = _vp(math.factorial(mdeg), ctx.p) if mdeg else 0
            unit = math.factorial(mdeg) // ctx.p**e
            inv_u = pow(unit % ctx.m, -1, ctx.m)
            out.append((ctx.pscale(inv_u, term), e))
            term = ctx.pmul(term, neg)
        return out

    e1 = exp_coeffs(X1)
    e2 = exp_coeffs(X2)
    e1_max = max(e for _, e in e1)
    e1_ser = _FpSeries(
        0,
        e1_max,
        [ctx.pscale(pow(ctx.p, e1_max - e), c) for c, e in e1],
    )
    diag = []
    for r in range(J + 1):
        row = None
        for c in range(r + 1):
            pair, e = e2[r - c]
            t = _fs_pair_scale(ctx, P[c], pair, e)
            row = t if row is None else _fs_add(ctx, row, t, deg)
        # single coefficient of t1^r in row * exp(-X1 t1)
        acc = (0, 0)
        exp = row.exp + e1_ser.exp
        for i, cr in enumerate(row.cs):
            k = r - (row.off + i)
            if 0 <= k < len(e1_ser.cs):
                acc = ctx.padd(acc, ctx.pmul(cr, e1_ser.cs[k]))
        fct = math.factorial(r) ** 2
        diag.append((ctx.pscale(fct % ctx.m, acc), exp))
    return diag


def _pair_to_padic(ctx: _Fp, tower: PadicTower, entry, margin: int = 4):
    """Convert ((u, v), exp) to the rational component as a PadicElement.

    The sqrt D component is the antisymmetric part of the two extraction
    orders and is discarded: the symmetrized value is the rational part."""
    (u, _), exp = entry
    absprec = ctx.Kb - exp - margin
    if absprec <= 0:
        raise PrecisionError("fixed point exponent consumed the working precision")
    return tower.from_rational(Fraction(u, ctx.p**exp), absprec)


# ---------------------------------------------------------------------------
# ray class setups


@dataclass
class RayClassSetup:
    """Ray class data for the modulus (gamma) * (all real places).

    Over Q the field slot is None and elements are pairs (a, 0).
    """

    p: int
    disc: int  # 1 for base Q
    field: QuadField | None
    gamma: tuple  # generator of the full modulus including the p part
    gamma0: tuple  # prime-to-p part
    reps: list
    norms: list
    labels: list
    beta: tuple
    b: int
    eps: tuple | None
    chain: list | None
    shintani: ShintaniData | None
    class_count: int
    rep_offset: int = 0

    def cache_key(self) -> str:
        blob = json.dumps(
            [
                self.p,
                self.disc,
                list(self.gamma),
                list(self.beta),
                [list(r) for r in self.reps],
                self.rep_offset,
            ]
        )
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def ray_class_setup(p: int, disc: int, cond, *, rep_offset: int = 0) -> RayClassSetup:
    """Build the ray class setup for modulus cond * p * (real places).

    disc = 1 builds over Q with cond a positive integer; otherwise disc is a
    real quadratic fundamental discriminant and cond a coordinate pair for a
    totally positive generator of the prime-to-p conductor.
    """
    if p < 3 or not _is_prime(p):
        raise ValueError("p must be an odd prime")
    if disc == 1:
        return _setup_q(p, int(cond) if not isinstance(cond, tuple) else cond[0], rep_offset)
    return _setup_quadratic(p, disc, tuple(cond), rep_offset)


def _setup_q(p: int, m0: int, rep_offset: int) -> RayClassSetup:
    if m0 < 1:
        raise ValueError("conductor must be positive")
    vpm = _vp(m0, p) if m0 % p == 0 else 0
    M = m0 * (p if vpm == 0 else 1)
    reps, labels = [], []
    a = 0
    skip = rep_offset
    seen = set()
    while len(seen) < _phi(M):
        a += 1
        if math.gcd(a, M) != 1:
            continue
        lab = a % M
        if lab in seen:
            continue
        if skip:
            # shift every representative by the same number of coset hits
            reps.append(((a + M * rep_offset), 0))
        else:
            reps.append((a, 0))
        labels.append(lab)
        seen.add(lab)
    norms = [r[0] for r in reps]
    k = 1
    while True:
        bcand = 1 + k * M
        if k % p and _is_prime(bcand):
            break
        k += 1
    beta = (bcand, 0)
    return RayClassSetup(
        p=p,
        disc=1,
        field=None,
        gamma=(M, 0),
        gamma0=(m0, 0),
        reps=reps,
        norms=norms,
        labels=labels,
        beta=beta,
        b=bcand,
        eps=None,
        chain=None,
        shintani=None,
        class_count=len(reps),
        rep_offset=rep_offset,
    )


def _setup_quadratic(p: int, disc: int, cond: tuple, rep_offset: int) -> RayClassSetup:
    F = QuadField(disc)
    F.assert_class_number_one()
    if disc % p == 0:
        raise ValueError(f"p = {p} ramifies in the base field of discriminant {disc}")
    gamma0 = cond
    if F.trace(gamma0) < 0:
        gamma0 = (-gamma0[0], -gamma0[1])
    if not F.totally_positive(gamma0):
        raise ValueError("conductor generator must have a totally positive associate")
    n0 = F.norm(gamma0)
    if math.gcd(n0, p) != 1:
        raise ValueError("conductor must be prime to p")
    gamma = F.scal(p, gamma0)
    ring = _ResidueRing(F, gamma)
    # unit residues and the sign group
    units = []
    for xa in range(ring.a):
        for yb in range(ring.g):
            x = (xa, yb)
            if ring.is_unit(x):
                units.append(ring.label(x))
    unit_set = set(units)
    order4 = [(s1, s2) for s1 in (1, -1) for s2 in (1, -1)]
    full = {(u, s) for u in unit_set for s in order4}

    def elem_of(alpha):
        return (
            ring.label(alpha),
            (F.sigma_sign(alpha, 1), F.sigma_sign(alpha, 2)),
        )

    def gmul(e1, e2):
        r1, s1 = e1
        r2, s2 = e2
        rr = ring.label(F.mul(r1, r2))
        return (rr, (s1[0] * s2[0], s1[1] * s2[1]))

    e0 = F.fundamental_unit()
    gens = [elem_of((-1, 0)), elem_of(e0)]
    sub = {(ring.label((1, 0)), (1, 1))}
    frontier = list(sub)
    while frontier:
        nxt = []
        for e in frontier:
            for ggen in gens:
                cand = gmul(e, ggen)
                if cand not in sub:
                    sub.add(cand)
                    nxt.append(cand)
        frontier = nxt
    sub_list = sorted(sub)

    def coset_label(e):
        return min(gmul(e, s) for s in sub_list)

    h = len(full) // len(sub)
    # representatives: small totally positive alpha prime to gamma
    found: dict = {}
    candidates_per: dict = {}
    bound = 4
    while True:
        for y in range(-bound, bound + 1):
            for x in range(-bound, bound + 1):
                alpha = (x, y)
                if not F.totally_positive(alpha):
                    continue
                if not ring.is_unit(alpha):
                    continue
                lab = coset_label(elem_of(alpha))
                lst = candidates_per.setdefault(lab, [])
                if alpha not in lst:
                    lst.append(alpha)
        if len(candidates_per) == h and all(
            len(v) > rep_offset for v in candidates_per.values()
        ):
            break
        bound *= 2
        if bound > 512:
            raise ArithmeticError("representative search runaway")
    labels = sorted(candidates_per)
    reps = []
    for lab in labels:
        cands = sorted(
            candidates_per[lab], key=lambda a: (F.trace(a), abs(F.norm(a)), a)
        )
        reps.append(cands[rep_offset])
    norms = [F.norm(r) for r in reps]
    if any(n % p == 0 for n in norms):
        raise ArithmeticError("representative norm divisible by p")
    # unit power fixing the coset structure
    eps_plus = F.totally_positive_unit()
    k = 1
    cur = ring.label(eps_plus)
    one = ring.label((1, 0))
    while cur != one:
        k += 1
        cur = ring.label(F.mul(cur, eps_plus))
        if k > 10**6:
            raise ArithmeticError("unit order runaway")
    eps = F.pow(eps_plus, k)
    chain = extend_chain(F, period_chain(F), k)
    cones_per_class = []
    for alpha in reps:
        cones = []
        for t in range(len(chain) - 1):
            v1 = F.mul(gamma, chain[t])
            v2 = F.mul(gamma, chain[t + 1])
            pts = _cone_residue_points(F, alpha, gamma, v1, v2)
            if len(pts) != 1:
                raise ArithmeticError("expected exactly one residue point per cone")
            cones.append(ShintaniCone(v1=v1, v2=v2, points=pts))
        cones_per_class.append(cones)
    shint = ShintaniData(gamma=gamma, chain=chain, cones=cones_per_class)
    shint.sample_check(F, reps, eps, count=4)
    # beta = 1 mod gamma, totally positive, prime norm, v_p(b - 1) = 1
    beta = None
    g_om = F.mul(gamma, (0, 1))
    for radius in range(1, 40):
        best = None
        for m2 in range(-radius, radius + 1):
            for m1 in range(-radius, radius + 1):
                cand = (1 + gamma[0] * m1 + g_om[0] * m2, gamma[1] * m1 + g_om[1] * m2)
                if cand == (1, 0) or not F.totally_positive(cand):
                    continue
                bn = F.norm(cand)
                if bn <= 2 or not _is_prime(bn):
                    continue
                if _vp(bn - 1, p) != 1:
                    continue
                if best is None or bn < best[1]:
                    best = (cand, bn)
        if best:
            beta, bnorm = best
            break
    if beta is None:
        raise ArithmeticError("no usable regularizing element found")
    return RayClassSetup(
        p=p,
        disc=disc,
        field=F,
        gamma=gamma,
        gamma0=gamma0,
        reps=reps,
        norms=norms,
        labels=labels,
        beta=beta,
        b=bnorm,
        eps=eps,
        chain=chain,
        shintani=shint,
        class_count=h,
        rep_offset=rep_offset,
    )


def field_zeta_setup(disc: int) -> RayClassSetup:
    """Setup with trivial conductor whose single partial zeta is the full
    zeta function of the real quadratic field.

    Needs narrow class number one, which with class number one amounts to the
    fundamental unit having norm -1. No p is attached; only the exact values
    at nonpositive integers are available from this setup.
    """
    F = QuadField(disc)
    F.assert_class_number_one()
    if F.norm(F.fundamental_unit()) != -1:
        raise NotImplementedError("needs a norm -1 fundamental unit")
    eps = F.totally_positive_unit()
    chain = period_chain(F)
    alpha = (1, 0)
    cones = []
    for t in range(len(chain) - 1):
        pts = _cone_residue_points(F, alpha, (1, 0), chain[t], chain[t + 1])
        if len(pts) != 1:
            raise ArithmeticError("expected exactly one residue point per cone")
        cones.append(ShintaniCone(v1=chain[t], v2=chain[t + 1], points=pts))
    shint = ShintaniData(gamma=(1, 0), chain=chain, cones=[cones])
    shint.sample_check(F, [alpha], eps, count=4)
    return RayClassSetup(
        p=0,
        disc=disc,
        field=F,
        gamma=(1, 0),
        gamma0=(1, 0),
        reps=[alpha],
        norms=[1],
        labels=[(1, 0)],
        beta=(1, 0),
        b=0,
        eps=eps,
        chain=chain,
        shintani=shint,
        class_count=1,
        rep_offset=0,
    )


# ---------------------------------------------------------------------------
# characters on the ray classes


def character_table(setup: RayClassSetup, order: int) -> list[int]:
    """Exponent e_i with chi(class_i) = zeta_order^(e_i), for the canonical
    character of the stated order on the prime-to-p ray class group.

    Supported: order 3 via the discrete logarithm in the residue field of the
    conductor (norm 4 residue ring), order 2 via the quadratic residue symbol
    at a degree one prime conductor.
    """
    if setup.field is None:
        raise ValueError("use DirichletChar for characters over Q")
    F = setup.field
    if order == 3:
        ring0 = _ResidueRing(F, setup.gamma0)
        if ring0.size != 4:
            raise NotImplementedError("order 3 table needs a norm 4 conductor")
        # multiplicative group of F_4: find a generator among residues
        gen = None
        for x in range(ring0.a):
            for y in range(ring0.g):
                cand = ring0.label((x, y))
                if not ring0.is_unit(cand):
                    continue
                if ring0.label(F.mul(cand, cand)) != cand and cand != ring0.label((1, 0)):
                    gen = cand
                    break
            if gen:
                break
        if gen is None:
            raise ArithmeticError("residue field generator missing")
        dlog = {ring0.label((1, 0)): 0}
        cur = gen
        e = 1
        while cur not in dlog:
            dlog[cur] = e
            cur = ring0.label(F.mul(cur, gen))
            e += 1
        return [dlog[ring0.label(alpha)] for alpha in setup.reps]
    if order == 2:
        b0 = abs(F.norm(setup.gamma0))
        if not _is_prime(b0):
            raise NotImplementedError("order 2 table needs a prime norm conductor")
        x0, y0 = setup.gamma0
        if math.gcd(y0, b0) != 1:
            raise NotImplementedError("conductor is not a degree one prime")
        c = (-x0) * pow(y0, -1, b0) % b0
        out = []
        for alpha in setup.reps:
            r = (alpha[0] + alpha[1] * c) % b0
            if r == 0:
                raise ArithmeticError("representative not prime to the conductor")
            ls = pow(r, (b0 - 1) // 2, b0)
            out.append(0 if ls == 1 else 1)
        return out
    raise NotImplementedError(f"no bundled character of order {order}")


# ---------------------------------------------------------------------------
# partial zeta values at nonpositive integers


def shintani_zeta_nonpositive(setup: RayClassSetup, i: int, exps) -> Fraction:
    """Exact value of the partial zeta of class i continued to the given
    nonpositive integer exponents (one per field degree)."""
    if isinstance(exps, int):
        exps = (exps,)
    exps = tuple(int(r) for r in exps)
    if any(r < 0 for r in exps):
        raise ValueError("exponents index s = -r with r >= 0")
    if setup.field is None:
        (r,) = exps
        M = setup.gamma[0]
        return rational_partial_zeta(M, setup.reps[i][0], r)
    if len(set(exps)) != 1:
        raise NotImplementedError("only the norm power (equal exponents) is supported")
    return _exact_class_zeta(setup.field, setup.shintani.cones[i], exps[0])


# ---------------------------------------------------------------------------
# measures


@dataclass
class PMeasure:
    """Moment data of the beta-regularized measure attached to one setup.

    tj[i] holds the finite difference transforms of the moments of class i,
    mahler[i] the Mahler coefficients of the pushforward measure, and
    moments_exact[i] the exact leading moments used for the acceptance of the
    construction. 'cutoffs' records the per-dimension truncation orders.
    """

    p: int
    cutoffs: tuple
    prec: int
    tower: PadicTower
    tj: list
    mahler: list
    moments_exact: list
    c0: int
    flipped: bool
    mixed: list | None = None

    def moment(self, i: int, r: int) -> PadicElement:
        # binomial inversion of the difference transform, exact at integers
        out = None
        for j in range(r + 1):
            term = self.tj[i][j] * math.comb(r, j)
            out = term if out is None else out + term
        return out


def _measure_cache_path(cache_dir: str, key: str) -> str:
    return os.path.join(cache_dir, f"moments_{key}.json")


def _serialize_padic(x: PadicElement) -> dict:
    return {"v": x.v, "n": x.n, "u": None if x.u is None else list(x.u)}


def _deserialize_padic(tower: PadicTower, d: dict) -> PadicElement:
    if d["u"] is None:
        return tower.zero(d["n"])
    return PadicElement(tower, d["v"], d["n"], tuple(d["u"]))


_TOWERS: dict[int, PadicTower] = {}


def _tower(p: int) -> PadicTower:
    if p not in _TOWERS:
        _TOWERS[p] = PadicTower(p)
    return _TOWERS[p]


def build_measure(
    setup: RayClassSetup,
    shintani: ShintaniData | None = None,
    p: int | None = None,
    cutoffs=None,
    *,
    prec: int | None = None,
    exact_r: int | None = None,
    cache_dir: str | None = None,
    tower: PadicTower | None = None,
) -> PMeasure:
    """Moments, certified decay, and Mahler data for the regularized measure.

    cutoffs: an integer J (diagonal truncation) or a tuple whose first entry
    is J. The decay certificate requires v_p(T_j) >= j - c0 with a bounded
    c0; a failure flips the moment signs once and otherwise rejects the
    construction. The moment identity against the exact partial zeta values
    is verified at small exponents before the measure is accepted.
    """
    if shintani is None:
        shintani = setup.shintani
    if p is None:
        p = setup.p
    if p != setup.p or p == 0:
        raise ValueError("prime mismatch with the setup")
    if cutoffs is None:
        raise ValueError("a truncation order is required")
    J = cutoffs if isinstance(cutoffs, int) else int(cutoffs[0])
    if prec is None:
        prec = J + 8
    if exact_r is None:
        exact_r = J if setup.field is None else min(6, J)
    key = None
    tw = tower or _tower(p)
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        key = hashlib.sha256(
            (setup.cache_key() + f":{J}:{prec}:v2").encode()
        ).hexdigest()[:16]
        path = _measure_cache_path(cache_dir, key)
        if os.path.exists(path):
            with open(path) as fh:
                data = json.load(fh)
            return PMeasure(
                p=p,
                cutoffs=tuple(data["cutoffs"]),
                prec=data["prec"],
                tower=tw,
                tj=[[_deserialize_padic(tw, d) for d in row] for row in data["tj"]],
                mahler=[[_deserialize_padic(tw, d) for d in row] for row in data["mahler"]],
                moments_exact=[
                    [Fraction(s) for s in row] for row in data["moments_exact"]
                ],
                c0=data["c0"],
                flipped=data["flipped"],
            )
    h = setup.class_count
    b = setup.b
    moments_p: list[list[PadicElement]] = []
    exact_zetas: list[list[Fraction]] = []
    if setup.field is None:
        M = setup.gamma[0]
        for i in range(h):
            a = setup.reps[i][0]
            nm = setup.norms[i]
            zs = [rational_partial_zeta(M, a, r) for r in range(J + 1)]
            exact_zetas.append(zs[: exact_r + 1])
            row = []
            for r in range(J + 1):
                mr = (Fraction(b) ** (-r - 1) - 1) * Fraction(nm) ** (-r) * zs[r]
                row.append(tw.from_rational(mr, prec + 6) if mr else tw.zero(prec + 6))
            moments_p.append(row)
    else:
        F = setup.field
        # exponent budget: pole powers contribute v_p(N(gamma)) per t2 order
        # across both g lists, factorial folds add ~ 9J/(p-1)
        w_gamma = _vp(F.norm(setup.gamma), p)
        Kb = prec + w_gamma * (J + 2) + 9 * J // (p - 1) + 24
        ctx = _Fp(p, Kb, F.disc)
        diag_acc = [[((0, 0), 0)] * (J + 1) for _ in range(h)]
        n_cones = len(setup.chain) - 1
        for t in range(n_cones):
            v1 = shintani.cones[0][t].v1
            v2 = shintani.cones[0][t].v2
            P = _fp_cone_tables(ctx, F, v1, v2, J)
            for i in range(h):
                cone = shintani.cones[i][t]
                for x in cone.points:
                    diag = _fp_point_eval(ctx, F, P, x, J)
                    for r in range(J + 1):
                        diag_acc[i][r] = _entry_add(ctx, diag_acc[i][r], diag[r])
        R = min(exact_r, J)
        for i in range(h):
            exact_zetas.append(_exact_diag_values(F, shintani.cones[i], R))
        for i in range(h):
            nm = setup.norms[i]
            row = []
            for r in range(J + 1):
                el = _pair_to_padic(ctx, tw, diag_acc[i][r])
                if r < len(exact_zetas[i]):
                    want = (
                        tw.from_rational(exact_zetas[i][r], el.precision)
                        if exact_zetas[i][r]
                        else tw.zero(el.precision)
                    )
                    dd = el - want
                    if not dd.is_zero() and dd.valuation < min(el.precision, prec) - 2:
                        raise ArithmeticError(
                            "fixed point moments disagree with the exact engine"
                        )
                pref = (Fraction(b) ** (-r - 1) - 1) * Fraction(nm) ** (-r)
                row.append(el * pref)
            moments_p.append(row)

    def difference(rows):
        tj = []
        for i in range(h):
            mrow = rows[i]
            trow = []
            for j in range(J + 1):
                acc = None
                for r in range(j + 1):
                    c = math.comb(j, r) * (-1) ** (j - r)
                    term = mrow[r] * c
                    acc = term if acc is None else acc + term
                trow.append(acc)
            tj.append(trow)
        return tj

    def certify(tj):
        worst = 0
        for i in range(h):
            for j, x in enumerate(tj[i]):
                if x.is_zero():
                    continue
                worst = max(worst, j - x.valuation)
        return worst

    cap = max(10, J // 3)
    tj = difference(moments_p)
    c0 = certify(tj)
    flipped = False
    if c0 > cap:
        flipped_moments = [
            [m * ((-1) ** r) for r, m in enumerate(moments_p[i])] for i in range(h)
        ]
        tj2 = difference(flipped_moments)
        c02 = certify(tj2)
        if c02 <= cap:
            tj, c0, flipped = tj2, c02, True
        else:
            raise ArithmeticError(
                f"decay certificate rejected the construction (c0 = {c0})"
            )
    # Mahler coefficients of the pushforward measure
    stir = _stirling_first(min(J, prec + 4))
    mahler = []
    for i in range(h):
        arow = []
        for n in range(len(stir)):
            acc = None
            for r, c in enumerate(stir[n]):
                if not c:
                    continue
                term = moments_p[i][r] * c
                acc = term if acc is None else acc + term
            arow.append(acc * Fraction(1, math.factorial(n)))
        mahler.append(arow)
    exact_rows = []
    for i in range(h):
        nm = setup.norms[i]
        row = [
            (Fraction(b) ** (-r - 1) - 1) * Fraction(nm) ** (-r) * exact_zetas[i][r]
            for r in range(len(exact_zetas[i]))
        ]
        exact_rows.append(row)
    meas = PMeasure(
        p=p,
        cutoffs=(J,) if isinstance(cutoffs, int) else tuple(cutoffs),
        prec=prec,
        tower=tw,
        tj=tj,
        mahler=mahler,
        moments_exact=exact_rows,
        c0=c0,
        flipped=flipped,
    )
    # contract: the stated moment identity must hold at m = 0, -1, -2
    for i in range(h):
        for r in range(min(2, len(exact_rows[i]) - 1) + 1):
            got = meas.moment(i, r)
            want = exact_rows[i][r]
            wel = tw.from_rational(want, got.precision) if want else tw.zero(got.precision)
            dd = got - wel
            if not dd.is_zero() and dd.valuation < prec - 2:
                raise ArithmeticError("moment contract failed at small exponents")
    if cache_dir and key:
        data = {
            "cutoffs": list(meas.cutoffs),
            "prec": prec,
            "tj": [[_serialize_padic(x) for x in row] for row in tj],
            "mahler": [[_serialize_padic(x) for x in row] for row in mahler],
            "moments_exact": [[str(x) for x in row] for row in exact_rows],
            "c0": c0,
            "flipped": flipped,
        }
        with open(_measure_cache_path(cache_dir, key), "w") as fh:
            json.dump(data, fh)
    return meas


def _entry_add(ctx: _Fp, a, b):
    (u1, v1), e1 = a
    (u2, v2), e2 = b
    e = max(e1, e2)
    if e > e1:
        s = pow(ctx.p, e - e1)
        u1, v1 = u1 * s % ctx.m, v1 * s % ctx.m
    if e > e2:
        s = pow(ctx.p, e - e2)
        u2, v2 = u2 * s % ctx.m, v2 * s % ctx.m
    return (((u1 + u2) % ctx.m, (v1 + v2) % ctx.m), e)


# ---------------------------------------------------------------------------
# Newton evaluation of the p-adic partial zetas


def _proj_one(tower: PadicTower, x: int, prec: int) -> PadicElement:
    """<x> = x / omega(x) in 1 + pZ_p."""
    el = tower.from_int(x, prec)
    return el / teichmuller(el)


def lp_partial(setup: RayClassSetup, measure: PMeasure, i: int, s) -> PadicElement:
    """zeta_{p, class i}(s) via the Newton series of the measure transform.

    s may be an int, Fraction with p-unit denominator, or PadicElement in Z_p.
    At s = 1 the regularizing factor vanishes; that pole is reported.
    """
    tw = measure.tower
    p = setup.p
    J = len(measure.tj[i]) - 1
    b = setup.b
    nm = setup.norms[i]
    if isinstance(s, PadicElement):
        if not s.is_zero() and s.valuation < 0:
            raise ValueError("s lies outside Z_p")
        prec = min(s.precision, measure.prec)
        sm1 = s - 1
        if sm1.is_zero():
            raise ZeroDivisionError("pole of the regularizing factor at s = 1")
        # binomial coefficients binom(-s, j) iteratively
        coeffs = [tw.one(prec + 8)]
        for j in range(1, J + 1):
            coeffs.append(coeffs[-1] * (s * (-1) - (j - 1)) * Fraction(1, j))
        acc = None
        for j in range(J + 1):
            term = coeffs[j] * measure.tj[i][j]
            acc = term if acc is None else acc + term
        logb = padic_log(tw.from_int(b, prec + 8))
        breg = padic_exp(sm1 * logb) - 1
        proj = _proj_one(tw, nm, prec + 8)
        scale = padic_exp((s * (-1)) * padic_log(proj))
        out = acc * scale / breg
        # the truncated Newton tail is O(p^(J+1-c0)) before the regularizer
        cap = J + 1 - measure.c0 - breg.valuation
        return out + tw.zero(cap) if cap < out.precision else out
    s = Fraction(s)
    if s == 1:
        raise ZeroDivisionError("pole of the regularizing factor at s = 1")
    if s.denominator % p == 0:
        raise ValueError("s lies outside Z_p")
    if s.denominator == 1:
        si = int(s)
        acc = None
        for j in range(J + 1):
            c = math.comb(si + j - 1, j) * (-1) ** j if si > 0 else math.comb(-si, j)
            # binom(-s, j) for integer s
            term = measure.tj[i][j] * c
            acc = term if acc is None else acc + term
        prec = acc.precision
        breg = Fraction(b) ** (si - 1) - 1
        vb = _vp(breg.numerator, p) if breg else 0
        proj = _proj_one(tw, nm, prec + vb + 6)
        scale = _padic_int_pow(proj, -si)
        out = acc * scale * (1 / breg)
        cap = J + 1 - measure.c0 - vb
        return out + tw.zero(cap) if cap < out.precision else out
    # Fraction in Z_p: evaluate through the exponential form
    prec = measure.prec
    sel = tw.from_rational(s, prec + 8)
    return lp_partial(setup, measure, i, sel)


def _padic_int_pow(x: PadicElement, k: int) -> PadicElement:
    if k == 0:
        return x.tower.one(x.precision)
    inv = k < 0
    k = abs(k)
    out = None
    base = x
    while k:
        if k & 1:
            out = base if out is None else out * base
        base = base * base
        k >>= 1
    return out.inverse() if inv else out


def lp_value(
    setup: RayClassSetup,
    measure: PMeasure,
    chi: tuple[int, list[int]],
    l: int,
    s,
) -> list[PadicElement]:
    """Sum over classes of chi(a_i) omega(Nm a_i)^l zeta_{p, i}(s), returned
    as coordinates over the power basis of zeta_t, t the character order."""
    order, exps = chi
    deg = len(cyclotomic_coords(order)[0])
    tw = measure.tower
    coords: list = [None] * deg
    for i in range(setup.class_count):
        z = lp_partial(setup, measure, i, s)
        te = teichmuller(tw.from_int(setup.norms[i], z.precision + 8))
        w = _padic_int_pow(te, l)
        val = z * w
        vec = _zeta_vec(exps[i], order)
        for k, c in enumerate(vec):
            if not c:
                continue
            term = val * c
            coords[k] = term if coords[k] is None else coords[k] + term
    out = []
    for k in range(deg):
        out.append(coords[k] if coords[k] is not None else tw.zero(measure.prec))
    return out


def residue_balance(setup: RayClassSetup, measure: PMeasure) -> list[PadicElement]:
    """Per-class residue data of the simple pole: the value
    (Nm a_i)^(-1) * F_i(1) / log_p(b) is independent of the class.

    The norm divides as a full p-adic unit (Teichmuller part included); the
    principal projection alone leaves a class-dependent omega twist."""
    tw = measure.tower
    out = []
    for i in range(setup.class_count):
        acc = None
        for j, t in enumerate(measure.tj[i]):
            term = t * (-1) ** j
            acc = term if acc is None else acc + term
        logb = padic_log(tw.from_int(setup.b, measure.prec + 6))
        nm = tw.from_int(setup.norms[i], measure.prec + 6)
        out.append(acc / logb / nm)
    return out


# ---------------------------------------------------------------------------
# literal Mahler pairing (independent evaluation route)


def mahler_pairing(setup: RayClassSetup, measure: PMeasure, i: int, s: int, n_max: int | None = None) -> PadicElement:
    """Pair the Mahler coefficients with x -> <x>^(-s) supported on 1 + pZ_p.

    Converges slowly (about n/(p(p-1)) digits at cutoff n); meant as a low
    precision consistency route, not the production evaluator.
    """
    tw = measure.tower
    p = setup.p
    if n_max is None:
        n_max = len(measure.mahler[i]) - 1
    n_max = min(n_max, len(measure.mahler[i]) - 1)
    prec = measure.prec
    # h(j) = <j>^(-s) 1_{1 + pZ_p}(j); forward differences c_n = (Delta^n h)(0)
    hs = []
    for j in range(n_max + 1):
        if j % p == 1 and j >= 1:
            el = _proj_one(tw, j, prec + 8) if j > 1 else tw.one(prec + 8)
            hs.append(_padic_int_pow(el, -s) if s else tw.one(prec + 8))
        else:
            hs.append(tw.zero(prec + 8))
    cs = []
    row = list(hs)
    for n in range(n_max + 1):
        cs.append(row[0])
        row = [row[k + 1] - row[k] for k in range(len(row) - 1)]
    acc = None
    for n in range(n_max + 1):
        term = measure.mahler[i][n] * cs[n]
        acc = term if acc is None else acc + term
    b = setup.b
    breg = Fraction(b) ** (s - 1) - 1
    proj = _proj_one(tw, setup.norms[i], prec + 8)
    return acc * _padic_int_pow(proj, -s) * (1 / breg)


# ---------------------------------------------------------------------------
# Dirichlet characters over Q


class DirichletChar:
    """Character mod M described by exponent data on the unit group."""

    def __init__(self, M: int, comps: list, exps: tuple):
        self.M = M
        self.comps = comps  # list of (modulus, generator, order)
        self.exps = exps
        self.order = 1
        for (_, _, o), e in zip(comps, exps):
            if e:
                self.order = math.lcm(self.order, o // math.gcd(o, e))
        self._dlogs = []
        for mod, gen, o in comps:
            table = {}
            cur = 1
            for k in range(o):
                table[cur] = k
                cur = cur * gen % mod
            self._dlogs.append(table)
        self._conductor = None

    def value_exp(self, a: int) -> int | None:
        """Exponent e with chi(a) = zeta_order^e, or None when gcd(a, M) > 1."""
        if math.gcd(a, self.M) != 1:
            return None
        tot = 0
        for (mod, _, o), e, table in zip(self.comps, self.exps, self._dlogs):
            if e == 0:
                continue
            r = a % mod
            if r not in table:
                # component group is (Z/2^k)^* = <-1> x <5>; handled via pairs
                raise ArithmeticError("dlog table incomplete")
            # zeta_o^(e dlog) = zeta_order^(e dlog order / o); e order / o is
            # integral because order is a multiple of o / gcd(o, e)
            tot += table[r] * (e * self.order // o)
        return tot % self.order

    def parity(self) -> int:
        e = self.value_exp(self.M - 1)
        return 1 if e == 0 else -1

    def conductor(self) -> int:
        if self._conductor is not None:
            return self._conductor
        for d in sorted(_divisors(self.M)):
            ok = True
            for a in range(1, self.M + 1):
                if math.gcd(a, self.M) != 1:
                    continue
                if a % d == 1 % d and self.value_exp(a) != 0:
                    ok = False
                    break
            if ok:
                self._conductor = d
                return d
        raise ArithmeticError("conductor search failed")

    def prim_value_exp(self, a: int) -> int | None:
        """Value exponent of the primitive character inducing this one."""
        f = self.conductor()
        if math.gcd(a, f) != 1:
            return None
        if math.gcd(a, self.M) == 1:
            return self.value_exp(a)
        step = f
        cand = a % (f * _coprime_part(self.M, f))
        while math.gcd(cand, self.M) != 1:
            cand += step
        return self.value_exp(cand)

    def __repr__(self):
        return f"DirichletChar(M={self.M}, order={self.order}, exps={self.exps})"


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _coprime_part(M: int, f: int) -> int:
    out = M
    g = math.gcd(out, f)
    while g > 1:
        out //= g
        g = math.gcd(out, f)
    return out


def _unit_group_components(M: int) -> list:
    comps = []
    n = M
    a2 = 0
    while n % 2 == 0:
        n //= 2
        a2 += 1
    if a2 == 2:
        comps.append((4, 3, 2))
    elif a2 >= 3:
        comps.append((2**a2, 2**a2 - 1, 2))
        comps.append((2**a2, 5, 2 ** (a2 - 2)))
    for q in _prime_factors(n):
        e = _vp(n, q)
        mod = q**e
        o = _phi(mod)
        g = None
        for cand in range(2, mod):
            if math.gcd(cand, mod) != 1:
                continue
            ok = True
            for qq in _prime_factors(o):
                if pow(cand, o // qq, mod) == 1:
                    ok = False
                    break
            if ok:
                g = cand
                break
        comps.append((mod, g, o))
    return comps


def dirichlet_characters(M: int):
    """All characters mod M (including imprimitive ones)."""
    comps = _unit_group_components(M)
    if M <= 2:
        yield DirichletChar(M, [], ())
        return
    ranges = [range(o) for (_, _, o) in comps]
    import itertools

    for exps in itertools.product(*ranges):
        ch = DirichletChar(M, comps, exps)
        # dlog tables for 2^a with a >= 3 need the <-1> x <5> structure
        if any(mod % 8 == 0 for mod, _, _ in comps):
            ch = _fix_two_part(ch)
        yield ch


def _fix_two_part(ch: DirichletChar) -> DirichletChar:
    # rebuild dlog tables so every odd residue mod 2^a appears
    for idx, (mod, gen, o) in enumerate(ch.comps):
        if mod % 8 or gen != mod - 1:
            continue
        table = {}
        for sgn in range(2):
            for k in range(mod // 4):
                r = (mod - 1) ** sgn * pow(5, k, mod) % mod
                table[r] = sgn
        ch._dlogs[idx] = table
    for idx, (mod, gen, o) in enumerate(ch.comps):
        if mod % 8 or gen != 5:
            continue
        table = {}
        for sgn in range(2):
            for k in range(mod // 4):
                r = (mod - 1) ** sgn * pow(5, k, mod) % mod
                table[r] = k
        ch._dlogs[idx] = table
    return ch


def bernoulli_char(chi: DirichletChar, r: int) -> list[Fraction]:
    """Generalized Bernoulli number B_{r, chi} of the primitive character,
    as coordinates over the zeta_t power basis."""
    f = chi.conductor()
    t = chi.order
    deg = len(cyclotomic_coords(t)[0])
    out = [Fraction(0)] * deg
    for a in range(1, f + 1):
        e = chi.prim_value_exp(a)
        if e is None:
            continue
        val = Fraction(f) ** (r - 1) * bernoulli_poly(r, Fraction(a, f))
        vec = _zeta_vec(e, t, val)
        for k in range(deg):
            out[k] += vec[k]
    return out


def lp_dirichlet_reference(chi: DirichletChar, p: int, m: int) -> list[Fraction]:
    """L_p(m, chi omega^(1-m)) for m <= 0 through the generalized Bernoulli
    formula with the Euler factors at primes of lcm(M, p) away from the
    conductor removed; exact E-coordinates."""
    if m > 0:
        raise ValueError("the reference route needs m <= 0")
    r = 1 - m
    t = chi.order
    B = bernoulli_char(chi, r)
    val = [-(c / r) for c in B]
    f = chi.conductor()
    Mt = math.lcm(chi.M, p)
    for ell in _prime_factors(Mt):
        if f % ell == 0:
            continue
        e = chi.prim_value_exp(ell)
        if e is None:
            raise ArithmeticError("Euler factor at a prime dividing the conductor")
        # multiply by (1 - chi(ell) ell^(-m))
        factor_vec = _zeta_vec(0, t, Fraction(1))
        sub = _zeta_vec(e, t, Fraction(ell) ** (-m))
        factor = [factor_vec[k] - sub[k] for k in range(len(factor_vec))]
        val = e_mul(val, factor, t)
    return val


def lp_dirichlet(
    chi: DirichletChar,
    p: int,
    s,
    *,
    digits: int = 20,
    cache_dir: str | None = None,
    rep_offset: int = 0,
) -> list[PadicElement]:
    """Measure route for the p-adic Dirichlet L value at an integer s = m,
    with the Teichmuller twist omega^(1-m) that makes the interpolation to
    the classical value work. Agrees with lp_dirichlet_reference at
    admissible m. Coordinates are on the power basis of Q(zeta_order)."""
    if isinstance(s, PadicElement) or (isinstance(s, Fraction) and s.denominator != 1):
        raise ValueError("use lp_value for non-integer evaluation points")
    m = int(s)
    setup = _setup_q(p, chi.M, rep_offset)
    if setup.gamma[0] % chi.M:
        raise ArithmeticError("modulus mismatch in the Dirichlet route")
    J = digits + 10
    meas = build_measure(setup, None, p, J, prec=digits + 12, cache_dir=cache_dir)
    exps = []
    for a, _ in setup.reps:
        e = chi.value_exp(a % chi.M)
        if e is None:
            raise ArithmeticError("representative shares a factor with the modulus")
        exps.append(e)
    return lp_value(setup, meas, (chi.order, exps), -m, m)


# ---------------------------------------------------------------------------
# Artin motive values through the quadratic base


_PRESET_KEYS = ("rayclass_disc", "rayclass_cond", "chi_order")


def lp_artin(
    preset,
    p: int,
    n: int,
    *,
    digits: int | None = None,
    cache_dir: str | None = None,
    rep_offset: int = 0,
    return_coords: bool = False,
):
    """L_p(n, chi_pi tensor omega^(1-n)) for a bundled two dimensional motive,
    evaluated through the inducing ray class character of its quadratic field.

    Returns a PadicElement (the E = Q coordinate after the forced vanishing of
    the others) unless return_coords is set.
    """
    from .numfields import MotivicSetup

    setup_m = preset if isinstance(preset, MotivicSetup) else MotivicSetup.preset(preset)
    if not all(k in setup_m.extra for k in _PRESET_KEYS):
        raise NotImplementedError(
            f"no inducing character bundled for preset {setup_m.name}"
        )
    if n < 2:
        raise ValueError("n must be at least 2")
    if setup_m.gamma_minus == 0 and n % 2 == 0:
        raise ValueError("parity mismatch: even n with a totally real motive")
    if setup_m.gamma_minus > 0 and n % 2 == 1:
        raise ValueError("parity mismatch: odd n with gamma_minus positive")
    if p < 3 or not _is_prime(p):
        raise ValueError("p must be an odd prime")
    if setup_m.field.disc % p == 0:
        raise ValueError(f"p = {p} ramifies in the field of {setup_m.name}")
    disc = int(setup_m.extra["rayclass_disc"])
    cond = tuple(int(c) for c in str(setup_m.extra["rayclass_cond"]).split(","))
    order = int(setup_m.extra["chi_order"])
    if disc % p == 0:
        raise ValueError(f"p = {p} ramifies in the quadratic base of {setup_m.name}")
    if digits is None:
        digits = math.ceil(15 / math.log10(p)) + 4
    rc = ray_class_setup(p, disc, cond, rep_offset=rep_offset)
    exps = character_table(rc, order)
    c0_guess = 8
    J = digits + c0_guess + 6
    meas = build_measure(
        rc, None, p, J, prec=digits + c0_guess + 6, cache_dir=cache_dir
    )
    if meas.c0 + digits + 4 > J:
        J = digits + meas.c0 + 8
        meas = build_measure(
            rc, None, p, J, prec=digits + meas.c0 + 8, cache_dir=cache_dir
        )
    coords = lp_value(rc, meas, (order, exps), -n, n)
    if return_coords:
        return coords
    if order == 2:
        return coords[0]
    # Galois stability forces the non-rational coordinates to vanish
    lead = coords[0]
    for extra in coords[1:]:
        if not extra.is_zero() and extra.valuation < digits - 2:
            raise ArithmeticError("value failed to be Galois stable")
    return lead


# ---------------------------------------------------------------------------
# closed form oracles


def siegel_zeta_minus1(D: int) -> Fraction:
    """zeta_k(-1) for the real quadratic field of discriminant D via the
    divisor sum formula sum sigma_1((D - x^2)/4) / 60."""
    tot = Fraction(0)
    for x in range(-math.isqrt(D), math.isqrt(D) + 1):
        if (D - x * x) % 4 == 0 and x * x < D:
            tot += _sigma(1, (D - x * x) // 4)
    return tot / 60


def siegel_zeta_minus3(D: int) -> Fraction:
    tot = Fraction(0)
    for x in range(-math.isqrt(D), math.isqrt(D) + 1):
        if (D - x * x) % 4 == 0 and x * x < D:
            tot += _sigma(3, (D - x * x) // 4)
    return tot / 120


def _sigma(k: int, n: int) -> int:
    if n == 0:
        return 0
    tot = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            tot += d**k
            if d != n // d:
                tot += (n // d) ** k
        d += 1
    return tot
