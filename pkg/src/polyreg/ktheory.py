"""Symbol search, exact polylog kernels, and regulator determinants.

The model: formal symbols [x]_n over a number field map under d_n to
(1-x)^x (wedge, n=2) or class_{n-1}(x) (x) (tensor, n>2). Kernel elements
represent K_{2n-1} classes; their evaluations under weighted polylogarithm
sums across embeddings give the regulator matrices on both the complex and
the p-adic side. All kernel linear algebra is exact rational arithmetic;
only the quotient by vanishing polylog images uses verified numerics.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import mpmath
import sympy

from .mprec import find_integer_relation_vec, workdigits
from .numfields import (
    EmbeddingSet,
    MotivicSetup,
    NumberField,
    build_embeddings,
    complex_embeddings,
    disc_pairing,
    galois_action,
    k_group_rank,
)
from .polylog import p_n
from .polylog_p import p_np


class ApplicabilityError(ValueError):
    """The requested determinant is outside the conjecture's scope."""


# ----- symbols -----


@dataclass(frozen=True)
class SymbolCombination:
    """Integer combination of level-n symbols [x]."""

    n: int
    terms: tuple  # ((coeff, element-tuple), ...)

    def __str__(self):
        parts = []
        for c, x in self.terms:
            parts.append(f"{c}*[{'/'.join(str(v) for v in x)}]_{self.n}")
        return " + ".join(parts) if parts else "0"


def _inv_element(field: NumberField, x):
    return field.inv(x)


def canonical_symbol(field: NumberField, x):
    """Representative of {x, 1/x}; flip records the substitution parity."""
    xi = _inv_element(field, x)
    if xi < x:
        return xi, True
    return x, False


def make_symbol(field: NumberField, n: int, terms) -> SymbolCombination:
    acc: dict = {}
    one = field.one()
    zero = field.el([0])
    for c, x in terms:
        x = field.el(x)
        if x == zero or x == one:
            raise ValueError("symbol argument must avoid 0 and 1")
        rep, flipped = canonical_symbol(field, x)
        c = int(c)
        if flipped:
            c = c if n % 2 == 1 else -c
        acc[rep] = acc.get(rep, 0) + c
    terms = tuple((c, x) for x, c in sorted(acc.items()) if c != 0)
    return SymbolCombination(n, terms)


# ----- small exact linear algebra over Q -----


def _rref(rows):
    """Row-reduce in place over Fraction; returns (rows, pivot_columns)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rational_kernel(rows, ncols):
    """Integer basis of {v in Q^ncols : rows . v = 0}."""
    rref, pivots = _rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for rrow, pcol in zip(rref, pivots):
            v[pcol] = -rrow[fcol]
        den = 1
        for x in v:
            den = den * x.denominator // math.gcd(den, x.denominator)
        iv = [int(x * den) for x in v]
        g = 0
        for x in iv:
            g = math.gcd(g, abs(x))
        if g > 1:
            iv = [x // g for x in iv]
        basis.append(iv)
    return basis


def _quotient_coords(nsym: int, relations):
    """Coordinates on Q^nsym / span(relations): index -> vector over free set."""
    if not relations:
        return [tuple(Fraction(int(i == j)) for j in range(nsym)) for i in range(nsym)], nsym
    rref, pivots = _rref([[Fraction(x) for x in r] for r in relations])
    free = [c for c in range(nsym) if c not in pivots]
    pos = {c: i for i, c in enumerate(free)}
    coords = []
    for i in range(nsym):
        v = [Fraction(0)] * len(free)
        if i in pos:
            v[pos[i]] = Fraction(1)
        else:
            row = rref[pivots.index(i)]
            for c in free:
                if row[c]:
                    v[pos[c]] -= row[c]
        coords.append(tuple(v))
    return coords, len(free)


# ----- valuation functionals on the multiplicative group -----


def _poly_ext_gcd_fp(a, b, p):
    # returns (g, s, t) with s*a + t*b = g over F_p, g monic
    def red(u):
        u = [c % p for c in u]
        while u and u[-1] == 0:
            u.pop()
        return u

    def mul(u, v):
        if not u or not v:
            return []
        out = [0] * (len(u) + len(v) - 1)
        for i, ui in enumerate(u):
            for j, vj in enumerate(v):
                out[i + j] = (out[i + j] + ui * vj) % p
        return red(out)

    def sub(u, v):
        m = max(len(u), len(v))
        u = u + [0] * (m - len(u))
        v = v + [0] * (m - len(v))
        return red([(x - y) % p for x, y in zip(u, v)])

    def divmod_fp(u, v):
        u = list(u)
        q = [0] * max(1, len(u) - len(v) + 1)
        inv = pow(v[-1], p - 2, p)
        while len(u) >= len(v) and u:
            c = u[-1] * inv % p
            s = len(u) - len(v)
            q[s] = c
            for i, vc in enumerate(v):
                u[s + i] = (u[s + i] - c * vc) % p
            u = red(u)
        return red(q), u

    r0, r1 = red(a), red(b)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = divmod_fp(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1))
        t0, t1 = t1, sub(t0, mul(q, t1))
    inv = pow(r0[-1], p - 2, p)
    return red([c * inv % p for c in r0]), red([c * inv % p for c in s0]), red([c * inv % p for c in t0])


def _hensel_factor_lift(f_coeffs, g0, ell, m):
    """Lift a simple monic factor g0 of f mod ell to a factor mod ell^m."""

    def red_mod(u, q):
        return [c % q for c in u]

    def mul_int(u, v):
        out = [0] * (len(u) + len(v) - 1)
        for i, ui in enumerate(u):
            if ui:
                for j, vj in enumerate(v):
                    out[i + j] += ui * vj
        return out

    def divmod_monic(u, v, q):
        # v monic; arithmetic mod q
        u = [c % q for c in u]
        dq = len(u) - len(v)
        qq = [0] * (dq + 1) if dq >= 0 else [0]
        for s in range(dq, -1, -1):
            c = u[s + len(v) - 1] % q
            qq[s] = c
            for i, vc in enumerate(v):
                u[s + i] = (u[s + i] - c * vc) % q
        while len(u) > len(v) - 1:
            u.pop()
        return qq, u

    f = list(f_coeffs)
    g = [c % ell for c in g0]
    h, rem = divmod_monic(f, g, ell)
    if any(rem):
        raise ArithmeticError("factor does not divide mod ell")
    _, s, t = _poly_ext_gcd_fp(g, h, ell)
    q = ell
    while q < ell**m:
        # e = (f - g*h)/q mod ell ; correct g by t*e mod g, h accordingly
        prod = mul_int(g, h)
        e = [(fc - pc) // q % ell for fc, pc in
             itertools.zip_longest(f, prod, fillvalue=0)]
        te = mul_int(t, e)
        _, dg = divmod_monic(red_mod(te, ell), g, ell)
        num = [(ec - vc) % ell for ec, vc in
               itertools.zip_longest(e, mul_int(dg, h), fillvalue=0)]
        dh, r2 = divmod_monic(num, g, ell)
        if any(r2):
            raise ArithmeticError("lift step failed")
        g = [(gc + q * c) for gc, c in itertools.zip_longest(g, dg, fillvalue=0)]
        h = [(hc + q * c) for hc, c in itertools.zip_longest(h, dh, fillvalue=0)]
        q *= ell
        g = red_mod(g, q)
        h = red_mod(h, q)
    return g


def _vp_int(x: int, ell: int) -> int:
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    while x % ell == 0:
        x //= ell
        v += 1
    return v


_X = sympy.symbols("x")


def _resultant_int(a, b):
    pa = sympy.Poly(sum(c * _X**k for k, c in enumerate(a)), _X)
    pb = sympy.Poly(sum(c * _X**k for k, c in enumerate(b)), _X)
    return int(sympy.resultant(pa, pb, _X))


_FACMOD_CACHE: dict = {}
_LIFT_CACHE: dict = {}


def _field_factors_mod(poly, ell):
    key = (poly, ell)
    if key not in _FACMOD_CACHE:
        fac = sympy.Poly(sum(c * _X**k for k, c in enumerate(poly)), _X,
                         modulus=ell).factor_list()
        simple, repeated = [], []
        for g, mult in fac[1]:
            gl = tuple(int(c) % ell for c in reversed(g.all_coeffs()))
            if mult == 1:
                simple.append(gl)
            else:
                repeated.append((gl, mult))
        _FACMOD_CACHE[key] = (simple, repeated)
    return _FACMOD_CACHE[key]


def _lifted_factor(poly, ell, g0, m):
    m = ((m + 7) // 8) * 8
    key = (poly, ell, g0, m)
    if key not in _LIFT_CACHE:
        _LIFT_CACHE[key] = _hensel_factor_lift(list(poly), list(g0), ell, m)
    return _LIFT_CACHE[key], m


class MultiplicativeSpan:
    """Exact Q-coordinates on the subgroup of k* spanned by given values.

    A value's coordinate splits into an exact prime part (valuations at the
    primes above each rational prime dividing its norm or denominator, read
    off through resultants against lifted local factors) and a unit part
    (expansion over a log-embedding basis, accepted only after an exact
    power-product identity check where feasible; the minimum length of a
    nonzero unit log-vector in low degree covers the rest). Values whose
    unit part cannot be certified become coordinate axes of their own,
    which can only shrink later kernels, never inflate them.
    """

    def __init__(self, field: NumberField, values, digits: int = 60, embeddings=None):
        self.field = field
        self.digits = digits
        self.gens = []
        self.index = {}
        for v in values:
            v = field.el(v)
            if v == field.el([0]):
                raise ValueError("zero has no multiplicative coordinates")
            if tuple(v) not in self.index:
                self.index[tuple(v)] = len(self.gens)
                self.gens.append(v)
        self._es = embeddings or complex_embeddings(field, digits)
        self._coords = self._build_coords()
        self.dim = len(self._coords[0]) if self._coords else 0

    # -- valuation functionals --

    def _int_form(self, x):
        den = 1
        for c in x:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return [int(c * den) for c in x], den

    def _valuation_matrix(self):
        field = self.field
        norms = [field.norm(g) for g in self.gens]
        relevant = []
        all_primes = set()
        dens = []
        for g, nm in zip(self.gens, norms):
            den = 1
            for c in g:
                den = den * c.denominator // math.gcd(den, c.denominator)
            dens.append(den)
            ps = set(sympy.factorint(abs(nm.numerator)).keys())
            ps |= set(sympy.factorint(nm.denominator).keys())
            ps |= set(sympy.factorint(den).keys())
            relevant.append(ps)
            all_primes |= ps
        rows = [[] for _ in self.gens]
        for ell in sorted(all_primes):
            simple, repeated = _field_factors_mod(field.poly, ell)
            nslots = len(simple) + (1 if len(repeated) == 1 else 0)
            for i, g in enumerate(self.gens):
                if ell not in relevant[i]:
                    # integral away from ell with unit norm: all local valuations zero
                    rows[i].extend([0] * nslots)
                    continue
                X, den = self._int_form(g)
                vden = _vp_int(den, ell) if den % ell == 0 else 0
                nm = norms[i]
                vnorm = (_vp_int(nm.numerator, ell) if nm.numerator % ell == 0 else 0) - \
                        (_vp_int(nm.denominator, ell) if nm.denominator % ell == 0 else 0)
                row = []
                total_simple = 0
                for g0 in simple:
                    if len(g0) - 1 == field.degree:
                        row.append(vnorm)
                        total_simple += vnorm
                        continue
                    m = abs(vnorm) + field.degree * vden + 10
                    while True:
                        glift, mm = _lifted_factor(field.poly, ell, g0, m)
                        res = _resultant_int(glift, X)
                        if res % ell**mm != 0:
                            w = _vp_int(res, ell) if res % ell == 0 else 0
                            break
                        m = 2 * mm
                    row.append(w - (len(g0) - 1) * vden)
                    total_simple += row[-1]
                if len(repeated) == 1:
                    row.append(vnorm - total_simple)
                rows[i].extend(row)
        return rows

    def _rep_indices(self):
        r1 = self.field.r1
        return list(range(r1)) + [r1 + 2 * t for t in range(self.field.r2)]

    def _is_torsion(self, t):
        field = self.field
        one = field.one()
        acc = t
        for _ in range(24):
            if acc == one:
                return True
            acc = field.mul(acc, t)
        return False

    def _verify_exact(self, rel):
        if not any(rel):
            return True
        if max(abs(c) for c in rel if c) > 10**5:
            return False
        field = self.field
        num = field.one()
        den = field.one()
        for c, g in zip(rel, self.gens):
            if c > 0:
                num = field.mul(num, field.pow_el(g, c))
            elif c < 0:
                den = field.mul(den, field.pow_el(g, -c))
        t = field.mul(num, field.inv(den))
        return self._is_torsion(t)

    def _verify_expansion(self, i, prime_part, axes, mu):
        """Exact check of gen_i = prod(selected^c) * prod(axes^mu) * torsion."""
        coeffs = {i: Fraction(1)}
        for b, c in prime_part.items():
            coeffs[b] = coeffs.get(b, Fraction(0)) - c
        for s, m in zip(axes, mu):
            if m:
                coeffs[s] = coeffs.get(s, Fraction(0)) - m
                for b, c in self._prime_parts[s].items():
                    coeffs[b] = coeffs.get(b, Fraction(0)) + m * c
        den = 1
        for c in coeffs.values():
            den = den * c.denominator // math.gcd(den, c.denominator)
        if den * max(abs(c) for c in coeffs.values()) > 10**4:
            return None  # too costly to certify
        rel = [0] * len(self.gens)
        for j, c in coeffs.items():
            rel[j] = int(c * den)
        return self._verify_exact(rel)

    def _build_coords(self):
        V = self._valuation_matrix()
        ncols = len(V[0]) if V else 0
        # exact row basis of the valuation matrix, tracking expansions
        rref = []          # (reduced row, expansion over selected gen indices)
        self._prime_parts = {}
        prime_parts = []
        for i, raw in enumerate(V):
            r = [Fraction(x) for x in raw]
            combo = {}
            for row, expand in rref:
                piv = next(j for j, x in enumerate(row) if x)
                if r[piv]:
                    f = r[piv] / row[piv]
                    r = [a - f * b for a, b in zip(r, row)]
                    for b, c in expand.items():
                        combo[b] = combo.get(b, Fraction(0)) + f * c
            if any(r):
                rref.append((r, {i: Fraction(1)}))
                combo = {i: Fraction(1)}
            prime_parts.append(combo)
            self._prime_parts[i] = combo
        selected = sorted({b for pp in prime_parts for b in pp})
        selpos = {b: t for t, b in enumerate(selected)}

        # unit parts from residual log vectors
        reps = self._rep_indices()
        axes, axis_logs, unit_parts = [], [], []
        with mpmath.workdps(self.digits + 10):
            logs = []
            for g in self.gens:
                logs.append([mpmath.log(abs(self._es.apply(g, t))) for t in reps])
            tol = mpmath.mpf(10) ** -8
            for i in range(len(self.gens)):
                res = list(logs[i])
                for b, c in prime_parts[i].items():
                    if i == b:
                        res = [mpmath.mpf(0)] * len(reps)
                        break
                    f = mpmath.mpf(c.numerator) / c.denominator
                    res = [a - f * lb for a, lb in zip(res, logs[b])]
                if max(abs(x) for x in res) < tol:
                    # below the minimum length of a nonzero unit log-vector
                    ok = self._verify_expansion(i, prime_parts[i], [], [])
                    if ok is False:
                        warnings.warn("torsion check failed on a flat expansion; kept independent")
                        axes.append(i)
                        axis_logs.append(res)
                        unit_parts.append({i: Fraction(1)})
                        continue
                    unit_parts.append({})
                    continue
                mu = None
                if axis_logs:
                    rel = find_integer_relation_vec([res] + axis_logs,
                                                    digits=self.digits - 10,
                                                    max_coeff=10**9)
                    if rel is not None and rel.coefficients[0] != 0:
                        k0 = rel.coefficients[0]
                        cand = [Fraction(-k, k0) for k in rel.coefficients[1:]]
                        ok = self._verify_expansion(i, prime_parts[i], axes, cand)
                        if ok:
                            mu = cand
                        elif ok is False:
                            warnings.warn("unverifiable multiplicative relation; kept independent")
                if mu is None:
                    axes.append(i)
                    axis_logs.append(res)
                    unit_parts.append({i: Fraction(1)})
                else:
                    unit_parts.append({s: m for s, m in zip(axes, mu) if m})

        dim = len(selected) + len(axes)
        axpos = {s: len(selected) + t for t, s in enumerate(axes)}
        coords = []
        for i in range(len(self.gens)):
            # an axis carries only the unit residue; the prime part stays
            v = [Fraction(0)] * dim
            for b, c in prime_parts[i].items():
                v[selpos[b]] = c
            for s, m in unit_parts[i].items():
                v[axpos[s]] = m
            coords.append(tuple(v))
        return coords

    def coord(self, x):
        key = tuple(self.field.el(x))
        if key not in self.index:
            raise KeyError("value not registered in the multiplicative span")
        return self._coords[self.index[key]]


# ----- kernels of d_n -----


def _wedge(a, b):
    out = []
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            out.append(a[i] * b[j] - a[j] * b[i])
    return out


def _tensor(a, b):
    out = []
    for x in a:
        for y in b:
            out.append(x * y)
    return out


class _PCache:
    """Memoized complex polylog sums over an embedding set."""

    def __init__(self, es: EmbeddingSet, digits: int):
        self.es = es
        self.digits = digits
        self._vals = {}

    def value(self, m, x, i):
        key = (m, tuple(x), i)
        if key not in self._vals:
            z = self.es.apply(x, i)
            self._vals[key] = p_n(m, z, digits=self.digits)
        return self._vals[key]

    def combo_vector(self, m, terms, indices):
        with mpmath.workdps(self.digits + 10):
            out = []
            for i in indices:
                tot = mpmath.mpf(0)
                for c, x in terms:
                    tot += c * self.value(m, x, i)
                out.append(tot)
            return out


def _rep_indices_for(field: NumberField, m: int):
    r1, r2 = field.r1, field.r2
    if m % 2 == 0:
        return [r1 + 2 * t for t in range(r2)]
    return list(range(r1)) + [r1 + 2 * t for t in range(r2)]


class _KernelWork:
    """Shared state for the level recursion over one symbol list."""

    def __init__(self, field, symbols, digits, span=None, es=None):
        self.field = field
        self.symbols = [field.el(s) for s in symbols]
        seen = {}
        for s in self.symbols:
            key = tuple(s)
            if key in seen:
                raise ValueError("duplicate symbol in input")
            seen[key] = True
        self.digits = digits
        self.es = es or complex_embeddings(field, digits + 35)
        vals = []
        one = field.one()
        for s in self.symbols:
            vals.append(s)
            vals.append(field.sub(one, s))
        self.span = span or MultiplicativeSpan(field, vals, digits, embeddings=self.es)
        self.pcache = _PCache(self.es, digits)
        self._class_cache = {}
        self.certificate = {"levels": {}}

    def d_columns(self, m):
        field = self.field
        one = field.one()
        cols = []
        if m == 2:
            for s in self.symbols:
                a = self.span.coord(field.sub(one, s))
                b = self.span.coord(s)
                cols.append(_wedge(a, b))
        else:
            classes, _dim = self.class_coords(m - 1)
            for t, s in enumerate(self.symbols):
                cols.append(_tensor(classes[t], self.span.coord(s)))
        return cols

    def kernel(self, m):
        cols = self.d_columns(m)
        nrows = len(cols[0]) if cols else 0
        rows = [[cols[t][r] for t in range(len(cols))] for r in range(nrows)]
        rows = [r for r in rows if any(r)]
        basis = rational_kernel(rows, len(self.symbols))
        self.certificate["levels"].setdefault(str(m), {})["kernel_dim"] = len(basis)
        return basis

    def class_coords(self, m):
        """B_m coordinates of the generators [x_t]_m."""
        if m in self._class_cache:
            return self._class_cache[m]
        kernel = self.kernel(m)
        field = self.field
        if field.is_totally_real and m % 2 == 0:
            # even polylogs vanish identically on real embeddings
            lam = kernel
            self.certificate["levels"][str(m)]["vanishing"] = "parity"
        else:
            lam = self._numeric_zero_sublattice(kernel, m)
            self.certificate["levels"][str(m)]["vanishing"] = f"numeric:{len(lam)}"
        coords, dim = _quotient_coords(len(self.symbols), lam)
        self._class_cache[m] = (coords, dim)
        return coords, dim

    def _numeric_zero_sublattice(self, kernel, m):
        reps = _rep_indices_for(self.field, m)
        if not reps or not kernel:
            return kernel if not reps else []
        lam = []
        span, span_vecs = [], []
        with mpmath.workdps(self.digits + 10):
            tol = mpmath.mpf(10) ** (-(self.digits - 12))
            for vec in kernel:
                terms = [(c, s) for c, s in zip(vec, self.symbols) if c]
                lv = self.pcache.combo_vector(m, terms, reps)
                scale = max([mpmath.mpf(1)] + [abs(self.pcache.value(m, s, i))
                                               for _, s in terms for i in reps])
                if max(abs(x) for x in lv) < tol * scale:
                    lam.append(vec)
                    continue
                rel = None
                if span_vecs:
                    rel = find_integer_relation_vec([lv] + span_vecs,
                                                    digits=self.digits - 10,
                                                    max_coeff=10**9)
                if rel is not None and rel.coefficients[0] != 0:
                    combo = [rel.coefficients[0] * x for x in vec]
                    for cf, sv in zip(rel.coefficients[1:], span):
                        combo = [a + cf * b for a, b in zip(combo, sv)]
                    terms2 = [(c, s) for c, s in zip(combo, self.symbols) if c]
                    lv2 = self.pcache.combo_vector(m, terms2, reps)
                    if max(abs(x) for x in lv2) < tol * scale * max(
                            1, max(abs(c) for c in combo)):
                        lam.append(combo)
                        continue
                span.append(vec)
                span_vecs.append(lv)
        return lam


def kernel_dn(symbols, n: int, field: NumberField, *, digits: int = 60,
              work: _KernelWork | None = None):
    """Exact rational basis of Ker(d_n) on the span of the given symbols."""
    if n < 2:
        raise ValueError("levels start at 2")
    work = work or _KernelWork(field, symbols, digits)
    basis = work.kernel(n)
    combos = []
    for vec in basis:
        terms = tuple((c, s) for c, s in zip(vec, work.symbols) if c)
        combos.append(SymbolCombination(n, terms))
    return combos


# ----- symbol search -----


def _smooth_part_ok(q: Fraction, primes) -> bool:
    for v in (abs(q.numerator), q.denominator):
        for p in primes:
            while v % p == 0:
                v //= p
        if v != 1:
            return False
    return True


def _box_symbols(field: NumberField, height: int, primes):
    one = field.one()
    zero = field.el([0])
    seen = set()
    out = []
    for vec in itertools.product(range(-height, height + 1), repeat=field.degree):
        x = field.el(vec)
        if x == zero or x == one:
            continue
        if not _smooth_part_ok(field.norm(x), primes):
            continue
        if not _smooth_part_ok(field.norm(field.sub(one, x)), primes):
            continue
        rep, _ = canonical_symbol(field, x)
        if tuple(rep) in seen:
            continue
        seen.add(tuple(rep))
        out.append(rep)
    return out


def search_symbols(field: NumberField, height_bound: int, smooth_bound: int):
    """Box enumeration of x with smooth |Nm(x)| and |Nm(1-x)|."""
    if height_bound <= 0 or smooth_bound <= 0:
        raise ValueError("bounds must be positive")
    primes = list(sympy.primerange(2, smooth_bound + 1))
    return _box_symbols(field, height_bound, primes)


# ----- K-basis -----


@dataclass
class KBasis:
    field_poly: tuple
    n: int
    combos: list
    rank: int
    certificate: dict

    def to_json(self) -> str:
        data = {
            "field_poly": list(self.field_poly),
            "n": self.n,
            "rank": self.rank,
            "certificate": self.certificate,
            "combos": [
                {
                    "terms": [[c, [[f.numerator, f.denominator] for f in x]]
                              for c, x in combo.terms]
                }
                for combo in self.combos
            ],
        }
        return json.dumps(data, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "KBasis":
        data = json.loads(text)
        combos = []
        for item in data["combos"]:
            terms = tuple(
                (int(c), tuple(Fraction(a, b) for a, b in x))
                for c, x in item["terms"]
            )
            combos.append(SymbolCombination(data["n"], terms))
        return cls(tuple(data["field_poly"]), data["n"], combos,
                   data["rank"], data.get("certificate", {}))


def _norm_clean(field, x, unit_primes) -> bool:
    one = field.one()
    for v in (x, field.sub(one, x)):
        nm = field.norm(v)
        for p in unit_primes:
            if nm.numerator % p == 0 or nm.denominator % p == 0:
                return False
    return True


_DEFAULT_HEIGHTS = {1: 9, 2: 7, 3: 5, 4: 3, 5: 2, 6: 2}


def k_basis(field: NumberField, n: int, primes=None, precision: int = 60, *,
            height: int | None = None, prefer_unit_primes=(3, 5, 7, 11),
            cache_dir=None) -> KBasis:
    """Kernel of d_n modulo vanishing polylog images, rank-checked.

    Elements whose symbol arguments have norms coprime to prefer_unit_primes
    are favored so one basis serves every later p-adic evaluation.
    """
    if primes is None:
        primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31]
    primes = sorted(set(int(p) for p in primes))
    target = k_group_rank(field, n)
    hmax = height if height is not None else _DEFAULT_HEIGHTS.get(field.degree, 2)

    cache_path = None
    if cache_dir is not None:
        key = hashlib.sha256(repr((field.poly, n, tuple(primes), precision,
                                   hmax, tuple(prefer_unit_primes))).encode()).hexdigest()[:20]
        cache_path = Path(cache_dir) / f"kbasis_{key}.json"
        if cache_path.exists():
            kb = KBasis.from_json(cache_path.read_text())
            if kb.field_poly == field.poly and kb.n == n:
                return kb

    if target == 0:
        return KBasis(field.poly, n, [], 0, {"note": "rank zero by parity"})

    def sym_key(s):
        clean = _norm_clean(field, s, prefer_unit_primes)
        ht = sum(abs(f.numerator) + f.denominator for f in s)
        return (not clean, ht, s)

    ordered = sorted(_box_symbols(field, hmax, primes), key=sym_key)
    combos, cert = [], {}
    size = max(40, 10 * target)
    while True:
        subset = ordered[:size]
        work = _KernelWork(field, subset, precision)
        kernel_combos = kernel_dn(subset, n, field, digits=precision, work=work)
        cert = dict(work.certificate)
        cert.update({"height": hmax, "primes": primes, "symbols": len(subset),
                     "digits": precision})
        combos = _select_independent(field, kernel_combos, n, target, precision,
                                     prefer_unit_primes, work)
        if len(combos) == target or size >= len(ordered):
            break
        size = min(len(ordered), 2 * size)

    kb = KBasis(field.poly, n, combos, len(combos), cert)
    if kb.rank < target:
        warnings.warn(f"rank shortfall: found {kb.rank}, expected {target}")
    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        cache_path.write_text(kb.to_json())
    return kb


def _select_independent(field, kernel_combos, n, target, digits,
                        unit_primes, work: _KernelWork):
    reps = _rep_indices_for(field, n)

    def order_key(combo):
        clean = all(_norm_clean(field, x, unit_primes) for _, x in combo.terms)
        size = max((abs(c) for c, _ in combo.terms), default=0)
        ht = sum(abs(f.numerator) + f.denominator for _, x in combo.terms for f in x)
        return (not clean, len(combo.terms), size, ht)

    ordered = sorted(kernel_combos, key=order_key)
    kept, kept_vecs = [], []
    with mpmath.workdps(digits + 10):
        tol = mpmath.mpf(10) ** (-(digits - 12))
        for combo in ordered:
            if len(kept) == target:
                break
            v = work.pcache.combo_vector(n, combo.terms, reps)
            if max(abs(x) for x in v) < tol:
                continue
            if kept_vecs:
                rel = find_integer_relation_vec(kept_vecs + [v],
                                                digits=digits - 10,
                                                max_coeff=10**9)
                if rel is not None and rel.coefficients[-1] != 0:
                    continue
            kept.append(combo)
            kept_vecs.append(v)
    return kept


# ----- regulator and discriminant determinants -----


_W_S3 = [[Fraction(2, 3), Fraction(-1, 3), Fraction(-1, 3)],
         [Fraction(-1, 3), Fraction(2, 3), Fraction(-1, 3)]]
_W_D8 = [[Fraction(1, 2), Fraction(0), Fraction(-1, 2), Fraction(0)],
         [Fraction(0), Fraction(1, 2), Fraction(0), Fraction(-1, 2)]]


def _det(rows):
    m = len(rows)
    if m == 1:
        return rows[0][0]
    if m == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    out = None
    sign = 1
    for j in range(m):
        minor = [[rows[i][t] for t in range(m) if t != j] for i in range(1, m)]
        term = rows[0][j] * _det(minor)
        if sign < 0:
            term = -term
        out = term if out is None else out + term
        sign = -sign
    return out


def _motivic_rows(setup: MotivicSetup, es: EmbeddingSet):
    if setup.group == "S3":
        if setup.field.degree != 3:
            raise ApplicabilityError("S3 preset needs a cubic field")
        return _W_S3, list(range(3))
    if setup.group == "D8":
        if setup.witness is None:
            raise ApplicabilityError("D8 preset needs its involution witness")
        perm = galois_action(es, setup.witness)
        i0 = 0
        i1 = next(j for j in range(4) if j not in (i0, perm[i0]))
        return _W_D8, [i0, i1, perm[i0], perm[i1]]
    raise ApplicabilityError(f"no determinant recipe for group {setup.group}")


def _check_applicability(setup, field, n):
    if n < 2:
        raise ApplicabilityError("weights start at 2")
    if isinstance(setup, MotivicSetup):
        if setup.group not in ("S3", "D8"):
            raise ApplicabilityError(f"no determinant recipe for group {setup.group}")
        if field.is_totally_real and n % 2 == 0:
            raise ApplicabilityError("totally real piece at even weight: refused")
        if not field.is_totally_real and n % 2 == 1:
            raise ApplicabilityError("CM piece at odd weight: refused")


def _punit_terms_check(es: EmbeddingSet, combo: SymbolCombination):
    field = es.field
    one = field.one()
    for _, x in combo.terms:
        for val in (x, field.sub(one, x)):
            for i in range(len(es.roots)):
                img = es.apply(val, i)
                if img.is_zero() or img.valuation != 0:
                    raise ValueError(
                        f"symbol argument not a unit above p={es.tower.p}: {val}")


def punit_columns(field: NumberField, kbasis: KBasis, p_list, count: int,
                  embeddings_map: dict) -> list:
    """Indices of kbasis elements usable at every prime in p_list."""
    out = []
    for idx, combo in enumerate(kbasis.combos):
        ok = True
        for p in p_list:
            es = embeddings_map[p]
            try:
                _punit_terms_check(es, combo)
            except ValueError:
                ok = False
                break
        if ok:
            out.append(idx)
        if len(out) == count:
            break
    if len(out) < count:
        raise ValueError("not enough p-unit basis elements for the requested primes")
    return out


def motivic_columns(setup: MotivicSetup, kbasis: KBasis, n: int, *,
                    digits: int = 40, p_list=(), embeddings_map=None) -> list:
    """First basis pair with a nondegenerate weighted pairing.

    Classes supported on a subfield fixed by the group project to zero, so
    the pair must be checked numerically; the choice is deterministic and
    is meant to be reused verbatim on every side of the comparison.
    """
    field = setup.field
    es = complex_embeddings(field, digits)
    W, order = _motivic_rows(setup, es)
    cache = _PCache(es, digits)
    fact = math.factorial(n - 1)
    cand = []
    for idx, combo in enumerate(kbasis.combos):
        ok = True
        for p in p_list:
            try:
                _punit_terms_check(embeddings_map[p], combo)
            except ValueError:
                ok = False
                break
        if ok:
            cand.append(idx)
    with mpmath.workdps(digits + 10):
        proj = {}
        for idx in cand:
            combo = kbasis.combos[idx]
            col = [fact * mpmath.fsum(c * cache.value(n, x, i) for c, x in combo.terms)
                   for i in order]
            proj[idx] = [mpmath.fsum(mpmath.mpf(w.numerator) / w.denominator * col[i]
                                     for i, w in enumerate(row)) for row in W]
        scale = max([mpmath.mpf(1)] + [abs(v) for pv in proj.values() for v in pv])
        tol = scale * scale * mpmath.mpf(10) ** (-digits + 12)
        for a in range(len(cand)):
            for b in range(a + 1, len(cand)):
                i, j = cand[a], cand[b]
                det = proj[i][0] * proj[j][1] - proj[i][1] * proj[j][0]
                if abs(det) > tol:
                    return [i, j]
    raise ValueError("no nondegenerate basis pair for the weighted pairing")


def regulator_det(setup, kbasis: KBasis, n: int, side, *, digits: int = 50,
                  precision: int | None = None, embeddings: EmbeddingSet | None = None,
                  columns=None):
    """Determinant of the weighted polylogarithm pairing.

    setup: a MotivicSetup (weighted 2x2 piece) or a bare NumberField (full
    pairing across all embeddings). side: 'archimedean' or a prime number.
    """
    field = setup.field if isinstance(setup, MotivicSetup) else setup
    _check_applicability(setup, field, n)
    ncols = 2 if isinstance(setup, MotivicSetup) else k_group_rank(field, n)
    if ncols == 0:
        raise ApplicabilityError("rank zero: no determinant to form")
    if columns is None:
        columns = list(range(ncols))
    if len(columns) != ncols or max(columns, default=-1) >= len(kbasis.combos):
        raise ValueError(f"need {ncols} valid basis columns")
    combos = [kbasis.combos[i] for i in columns]
    fact = math.factorial(n - 1)

    arch = side in ("archimedean", "inf", "oo")
    if arch:
        es = embeddings or complex_embeddings(field, digits)
        cache = _PCache(es, digits)
        if isinstance(setup, MotivicSetup):
            W, order = _motivic_rows(setup, es)
        else:
            W, order = None, _rep_indices_for(field, n)
        with mpmath.workdps(digits + 10):
            A = [[fact * mpmath.fsum(c * cache.value(n, x, i) for c, x in combo.terms)
                  for combo in combos] for i in order]
            if W is not None:
                A = [[mpmath.fsum(mpmath.mpf(w.numerator) / w.denominator * A[i][j]
                                  for i, w in enumerate(row)) for j in range(ncols)]
                     for row in W]
            return _det(A)

    p = int(side)
    es = embeddings or build_embeddings(field, p, precision)
    for combo in combos:
        _punit_terms_check(es, combo)
    if isinstance(setup, MotivicSetup):
        W, order = _motivic_rows(setup, es)
    else:
        if not field.is_totally_real:
            raise ApplicabilityError("full p-adic pairing needs a totally real field")
        W, order = None, list(range(field.degree))
    vals = {}
    for combo in combos:
        for _, x in combo.terms:
            for i in order:
                key = (tuple(x), i)
                if key not in vals:
                    vals[key] = p_np(n, es.apply(x, i), precision=precision)
    A = []
    for i in order:
        row = []
        for combo in combos:
            tot = None
            for c, x in combo.terms:
                term = vals[(tuple(x), i)] * c
                tot = term if tot is None else tot + term
            row.append(tot * fact)
        A.append(row)
    if W is not None:
        A2 = []
        for wrow in W:
            row = []
            for j in range(ncols):
                tot = None
                for i, w in enumerate(wrow):
                    if w:
                        term = A[i][j] * w
                        tot = term if tot is None else tot + term
                row.append(tot)
            A2.append(row)
        A = A2
    return _det(A)


def disc_det(setup, side, *, digits: int = 50, precision: int | None = None,
             embeddings: EmbeddingSet | None = None, powers=(1, 2)):
    """Determinant of the weighted power-basis pairing (square root of a
    discriminant-like quantity, compatible with regulator_det ordering)."""
    field = setup.field if isinstance(setup, MotivicSetup) else setup
    arch = side in ("archimedean", "inf", "oo")
    if arch:
        es = embeddings or complex_embeddings(field, digits)
    else:
        es = embeddings or build_embeddings(field, int(side), precision)
    if not isinstance(setup, MotivicSetup):
        return disc_pairing(es)
    W, order = _motivic_rows(setup, es)
    gens = [field.pow_el(field.gen(), t) for t in powers]
    if arch:
        with mpmath.workdps(digits + 10):
            A = [[es.apply(g, i) for g in gens] for i in order]
            M = [[mpmath.fsum(mpmath.mpf(w.numerator) / w.denominator * A[i][j]
                              for i, w in enumerate(row)) for j in range(len(gens))]
                 for row in W]
            d = _det(M)
            if abs(d) < mpmath.mpf(10) ** (-digits // 2):
                raise ArithmeticError("degenerate power pair for the pairing; pass other powers")
            return d
    A = [[es.apply(g, i) for g in gens] for i in order]
    M = []
    for wrow in W:
        row = []
        for j in range(len(gens)):
            tot = None
            for i, w in enumerate(wrow):
                if w:
                    term = A[i][j] * w
                    tot = term if tot is None else tot + term
            row.append(tot)
        M.append(row)
    d = _det(M)
    if d.is_zero():
        raise ArithmeticError("degenerate power pair for the pairing; pass other powers")
    return d
