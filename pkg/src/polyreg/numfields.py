"""Number fields in a power basis, their embeddings, and motive presets.

A field is Q[x]/(f) for a monic irreducible integer polynomial f. Elements
are tuples of Fractions on the power basis. Embeddings come in two kinds:
the ordered complex roots of f, and the roots of f inside one unramified
p-adic tower (available exactly when f is squarefree mod p). Both kinds
carry the defining invariant prod_{i<j}(r_i - r_j)^2 = disc(f).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path

import mpmath
import sympy

from .padics import PadicElement, PadicTower, hensel_root

_X = sympy.symbols("x")


class NumberField:
    """Q[x]/(f) with exact power-basis arithmetic."""

    def __init__(self, coeffs):
        poly = tuple(int(c) for c in coeffs)
        if len(poly) < 2 or poly[-1] != 1:
            raise ValueError("defining polynomial must be monic with integer coefficients")
        self.poly = poly
        self.degree = len(poly) - 1
        expr = sum(c * _X**k for k, c in enumerate(poly))
        p = sympy.Poly(expr, _X)
        if not p.is_irreducible:
            raise ValueError("defining polynomial is reducible over Q")
        self.disc = int(sympy.discriminant(expr, _X))
        self.r1 = len(p.real_roots())
        self.r2 = (self.degree - self.r1) // 2
        self.is_totally_real = self.r2 == 0
        # integer rows for x^k mod f, k = degree .. 2*degree-2
        n = self.degree
        rows = []
        cur = [-c for c in poly[:-1]]
        rows.append(list(cur))
        for _ in range(n - 2):
            nxt = [0] + rows[-1]
            lead = nxt.pop()
            nxt = [a + lead * b for a, b in zip(nxt, rows[0])]
            rows.append(nxt)
        self._red_rows = rows

    def __repr__(self):
        return f"NumberField({list(self.poly)})"

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.poly == other.poly

    def __hash__(self):
        return hash(self.poly)

    # ----- elements: tuples of Fractions on the power basis -----

    def el(self, coeffs) -> tuple:
        cs = [Fraction(c) for c in coeffs]
        if len(cs) > self.degree:
            raise ValueError("too many coefficients")
        cs += [Fraction(0)] * (self.degree - len(cs))
        return tuple(cs)

    def one(self):
        return self.el([1])

    def gen(self):
        if self.degree == 1:
            return self.el([-self.poly[0]])
        return self.el([0, 1])

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def scale(self, a, c):
        c = Fraction(c)
        return tuple(x * c for x in a)

    def mul(self, a, b):
        n = self.degree
        prod = [Fraction(0)] * (2 * n - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        out = prod[:n]
        for k in range(n, 2 * n - 1):
            c = prod[k]
            if c:
                row = self._red_rows[k - n]
                for i in range(n):
                    out[i] += c * row[i]
        return tuple(out)

    def pow_el(self, a, k: int):
        if k < 0:
            return self.pow_el(self.inv(a), -k)
        out = self.one()
        base = a
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def inv(self, a):
        # extended Euclid in Q[x] against f
        f = [Fraction(c) for c in self.poly]
        r0, r1 = f, list(a)
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while True:
            while r1 and r1[-1] == 0:
                r1.pop()
            if not r1:
                raise ZeroDivisionError("inverse of zero")
            if len(r1) == 1:
                c = r1[0]
                return self.el([si / c for si in s1])
            q, rr = _pq_divmod(r0, r1)
            qs1 = _pq_mul(q, s1)
            new_s = _pq_sub(s0, qs1)
            r0, r1 = r1, rr
            s0, s1 = s1, new_s

    def norm(self, a) -> Fraction:
        n = self.degree
        cols = []
        cur = list(a)
        for k in range(n):
            cols.append(cur)
            if k + 1 < n:
                cur = list(self.mul(tuple(cur), self.gen()))
        rows = [[cols[j][i] for j in range(n)] for i in range(n)]
        return _det_fractions(rows)

    def trace(self, a) -> Fraction:
        n = self.degree
        tot = Fraction(0)
        cur = list(a)
        # trace = sum of diagonal of the multiplication matrix
        cols = []
        for k in range(n):
            cols.append(cur)
            if k + 1 < n:
                cur = list(self.mul(tuple(cur), self.gen()))
        for i in range(n):
            tot += cols[i][i]
        return tot

    def apply_poly(self, pcoeffs, a):
        """Evaluate a polynomial with rational coefficients at the element a."""
        acc = self.el([0])
        for c in reversed([Fraction(c) for c in pcoeffs]):
            acc = self.add(self.mul(acc, a), self.el([c]))
        return acc

    def involution_check(self, u) -> bool:
        """True if x -> u(x) is a field automorphism squaring to the identity."""
        ux = self.apply_poly(u, self.gen())
        fu = self.apply_poly(self.poly, ux)
        if any(c != 0 for c in fu):
            return False
        uux = self.apply_poly(u, ux)
        return uux == self.gen()

    def eval_at(self, a, x_val):
        """Horner evaluation of the element at any ring value (mpc, p-adic)."""
        acc = None
        for c in reversed(a):
            if acc is None:
                acc = x_val * 0 + _as_scalar(c, x_val)
            else:
                acc = acc * x_val + _as_scalar(c, x_val)
        return acc


def _as_scalar(c: Fraction, like):
    if isinstance(like, PadicElement):
        return c
    return mpmath.mpf(c.numerator) / c.denominator


def _pq_divmod(a, b):
    a = list(a)
    out = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    inv_lead = 1 / b[-1]
    while len(a) >= len(b):
        c = a[-1] * inv_lead
        shift = len(a) - len(b)
        out[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] -= c * bi
        while a and a[-1] == 0:
            a.pop()
    return out, a


def _pq_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _pq_sub(a, b):
    m = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (m - len(a))
    b = list(b) + [Fraction(0)] * (m - len(b))
    return [x - y for x, y in zip(a, b)]


def _det_fractions(rows) -> Fraction:
    n = len(rows)
    m = [list(r) for r in rows]
    det = Fraction(1)
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col]:
                factor = m[r][col] * inv
                for c in range(col, n):
                    m[r][c] -= factor * m[col][c]
    return det


class EmbeddingSet:
    """All embeddings of a field into C or into one unramified p-adic tower."""

    def __init__(self, field: NumberField, kind: str, roots, tower=None, digits=None):
        self.field = field
        self.kind = kind
        self.roots = list(roots)
        self.tower = tower
        self.digits = digits

    def __len__(self):
        return len(self.roots)

    def apply(self, a, i: int):
        return self.field.eval_at(a, self.roots[i])

    def apply_all(self, a):
        return [self.field.eval_at(a, r) for r in self.roots]

    def disc_product(self):
        rs = self.roots
        if self.kind == "arch":
            with mpmath.workdps((self.digits or 30) + 10):
                out = mpmath.mpc(1)
                for i in range(len(rs)):
                    for j in range(i + 1, len(rs)):
                        out *= (rs[i] - rs[j]) ** 2
                return out
        out = None
        for i in range(len(rs)):
            for j in range(i + 1, len(rs)):
                d = (rs[i] - rs[j]) ** 2
                out = d if out is None else out * d
        if out is None:
            out = self.tower.from_int(1, rs[0].precision)
        return out

    def check_disc(self) -> bool:
        want = self.field.disc
        got = self.disc_product()
        if self.kind == "arch":
            with mpmath.workdps((self.digits or 30) + 10):
                tol = mpmath.mpf(10) ** (-(self.digits or 30) + 8) * max(1, abs(want))
                return abs(got - want) < tol
        k = max(1, got.precision - 2)
        return got.is_congruent(want, k)


def complex_embeddings(field: NumberField, digits: int = 40) -> EmbeddingSet:
    with mpmath.workdps(digits + 15):
        coeffs = [mpmath.mpf(c) for c in reversed(field.poly)]
        roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=80)
        reals = sorted((r for r in roots if abs(r.imag) < mpmath.mpf(10) ** (-digits)),
                       key=lambda r: mpmath.mpf(r.real))
        reals = [mpmath.mpc(r.real, 0) for r in reals]
        cplx = sorted((r for r in roots if abs(r.imag) >= mpmath.mpf(10) ** (-digits)),
                      key=lambda r: (mpmath.mpf(r.real), abs(r.imag), -mpmath.mpf(r.imag)))
    es = EmbeddingSet(field, "arch", list(reals) + list(cplx), digits=digits)
    if not es.check_disc():
        raise ArithmeticError("complex roots fail the discriminant identity")
    return es


def build_embeddings(field: NumberField, p: int, precision: int | None = None) -> EmbeddingSet:
    """Roots of f in one unramified tower over Q_p; refuses ramified p."""
    expr = sum(c * _X**k for k, c in enumerate(field.poly))
    fac = sympy.Poly(expr, _X, modulus=p).factor_list()
    degs = []
    for g, mult in fac[1]:
        if mult > 1:
            raise ValueError(f"defining polynomial not squarefree mod {p}")
        degs.append(g.degree())
    L = math.lcm(*degs)
    pick = None
    for g, _m in fac[1]:
        if g.degree() == L:
            pick = g
            break
    if pick is None:
        raise ValueError(
            f"no factor mod {p} has degree lcm {L}; tower construction declined"
        )
    if p**L > 20000:
        raise ValueError("residue enumeration too large for this prime")
    gl = [int(c) % p for c in reversed(pick.all_coeffs())]
    tower = PadicTower(p) if L == 1 else PadicTower(p, unram_poly=tuple(gl))
    n_target = precision if precision is not None else tower.default_precision()

    # residue roots of f over the residue field, by enumeration
    seeds = []
    fp = [c % p for c in field.poly]
    for code in range(p**L):
        vec = []
        c = code
        for _ in range(L):
            vec.append(c % p)
            c //= p
        x = tower.from_coeffs(vec, 1) if any(vec) else tower.zero(1)
        acc = tower.zero(1)
        for cf in reversed(fp):
            acc = acc * x + cf
        if acc.is_zero():
            seeds.append(tuple(vec))
    if len(seeds) != field.degree:
        raise ArithmeticError("wrong number of residue roots; tower degree mismatch")
    seeds.sort()
    roots = [hensel_root(tower, list(field.poly), s, n_target) for s in seeds]
    es = EmbeddingSet(field, "padic", roots, tower=tower)
    if not es.check_disc():
        raise ArithmeticError("p-adic roots fail the discriminant identity")
    return es


def disc_pairing(embeddings: EmbeddingSet):
    """Vandermonde determinant det[s_i(x^j)] = prod_{i<j}(r_j - r_i).

    Its square is disc(f) on either side, pinning the square root of the
    discriminant compatibly with the embedding order.
    """
    rs = embeddings.roots
    n = len(rs)
    if embeddings.kind == "arch":
        with mpmath.workdps((embeddings.digits or 30) + 10):
            out = mpmath.mpc(1)
            for i in range(n):
                for j in range(i + 1, n):
                    out *= rs[j] - rs[i]
            if abs(out.imag) < abs(out) * mpmath.mpf(10) ** (-(embeddings.digits or 30) + 8):
                out = mpmath.mpc(out.real, 0)
            return out
    out = None
    for i in range(n):
        for j in range(i + 1, n):
            d = rs[j] - rs[i]
            out = d if out is None else out * d
    if out is None:
        out = embeddings.tower.from_int(1, rs[0].precision)
    return out


def galois_action(embeddings: EmbeddingSet, witness) -> list[int]:
    """Permutation of embeddings induced by x -> witness(x), verified exactly."""
    field = embeddings.field
    if not field.involution_check([Fraction(c) for c in witness]):
        raise ValueError("witness is not an involutive automorphism")
    perm = []
    if embeddings.kind == "arch":
        digits = embeddings.digits or 30
        with mpmath.workdps(digits + 10):
            tol = mpmath.mpf(10) ** (-digits // 2)
            for r in embeddings.roots:
                img = _eval_poly_num(witness, r)
                match = [j for j, s in enumerate(embeddings.roots) if abs(img - s) < tol]
                if len(match) != 1:
                    raise ArithmeticError("ambiguous root matching for the action")
                perm.append(match[0])
    else:
        for r in embeddings.roots:
            img = _eval_poly_padic(witness, r)
            match = []
            for j, s in enumerate(embeddings.roots):
                d = img - s
                if d.is_zero() or d.valuation >= max(2, d.precision - 4):
                    match.append(j)
            if len(match) != 1:
                raise ArithmeticError("ambiguous root matching for the action")
            perm.append(match[0])
    if sorted(perm) != list(range(len(embeddings.roots))):
        raise ArithmeticError("witness action is not a permutation")
    return perm


def _eval_poly_num(coeffs, x):
    acc = mpmath.mpc(0)
    for c in reversed([Fraction(c) for c in coeffs]):
        acc = acc * x + mpmath.mpf(c.numerator) / c.denominator
    return acc


def _eval_poly_padic(coeffs, x: PadicElement):
    acc = x.tower.zero(x.precision)
    for c in reversed([Fraction(c) for c in coeffs]):
        acc = acc * x + c
    return acc


def k_group_rank(field: NumberField, n: int) -> int:
    """Rational rank of K_{2n-1} of the ring of integers, n >= 2."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return field.r2 if n % 2 == 0 else field.r1 + field.r2


# ----- presets -----


@dataclass
class MotivicSetup:
    name: str
    group: str
    field: NumberField
    conductor: int
    gamma_plus: int
    gamma_minus: int
    coefficient_field: str = "Q"
    witness: tuple | None = None
    sqrt_disc_element: tuple | None = None
    quad_subfield_disc: int | None = None
    extra: dict = dc_field(default_factory=dict)

    @classmethod
    def from_config(cls, text: str) -> "MotivicSetup":
        data = parse_config(text)
        need = ("name", "group", "poly", "artin_conductor", "gamma_plus", "gamma_minus")
        for k in need:
            if k not in data:
                raise ValueError(f"missing config key: {k}")
        fld = NumberField([int(c) for c in data["poly"].split(",")])
        witness = None
        if "witness" in data:
            witness = tuple(Fraction(c.strip()) for c in data["witness"].split(","))
        sqrt_el = None
        if "sqrt_disc_element" in data:
            sqrt_el = tuple(Fraction(c.strip()) for c in data["sqrt_disc_element"].split(","))
        known = {*need, "witness", "sqrt_disc_element", "coefficient_field", "quad_subfield_disc"}
        return cls(
            name=data["name"],
            group=data["group"],
            field=fld,
            conductor=int(data["artin_conductor"]),
            gamma_plus=int(data["gamma_plus"]),
            gamma_minus=int(data["gamma_minus"]),
            coefficient_field=data.get("coefficient_field", "Q"),
            witness=witness,
            sqrt_disc_element=sqrt_el,
            quad_subfield_disc=int(data["quad_subfield_disc"]) if "quad_subfield_disc" in data else None,
            extra={k: v for k, v in data.items() if k not in known},
        )

    @classmethod
    def from_file(cls, path) -> "MotivicSetup":
        return cls.from_config(Path(path).read_text())

    @classmethod
    def preset(cls, name: str, n: int | None = None) -> "MotivicSetup":
        if name.upper().startswith("CYCLO"):
            if n is None:
                raise ValueError("cyclotomic preset needs the level")
            expr = sympy.cyclotomic_poly(n, _X)
            coeffs = [int(c) for c in reversed(sympy.Poly(expr, _X).all_coeffs())]
            return cls(
                name=f"cyclo{n}",
                group=f"C{n}",
                field=NumberField(coeffs),
                conductor=n,
                gamma_plus=0,
                gamma_minus=0,
            )
        alias = {"S3": "table1_cubic", "D8": "table5_quartic", "S3XC3": "table13_sextic"}
        fname = alias.get(name.upper(), name)
        path = Path(__file__).parent / "presets" / f"{fname}.cfg"
        if not path.exists():
            raise ValueError(f"unknown preset {name}")
        return cls.from_file(path)


def parse_config(text: str) -> dict:
    out = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out
