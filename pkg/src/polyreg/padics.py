"""p-adic arithmetic with explicit precision tracking.

Elements live in Q_p or in an unramified extension Q_p[T]/(g) and carry a
valuation v together with an absolute precision N (the element is known
modulo p^N). Addition keeps min(N1, N2); multiplication keeps
min(N1 + v2, N2 + v1). An optional Eisenstein stage is validated
structurally but its arithmetic is out of scope; constructions that would
need it raise.
"""

from __future__ import annotations

import math
from fractions import Fraction


class PrecisionError(ArithmeticError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % sp == 0:
            return n == sp
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


def _poly_mod_fp(a: list[int], b: list[int], p: int) -> list[int]:
    a = [x % p for x in a]
    while a and a[-1] == 0:
        a.pop()
    b = [x % p for x in b]
    while b and b[-1] == 0:
        b.pop()
    if not b:
        raise ZeroDivisionError
    inv_lead = pow(b[-1], -1, p)
    while len(a) >= len(b):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        while a and a[-1] == 0:
            a.pop()
    return a


def _poly_mul_fp(a, b, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _poly_gcd_fp(a, b, p):
    a = [x % p for x in a]
    b = [x % p for x in b]
    while any(b):
        a, b = b, _poly_mod_fp(a, b, p)
    return a


def _poly_powmod_fp(base, exp, mod, p):
    result = [1]
    base = _poly_mod_fp(list(base), mod, p)
    while exp:
        if exp & 1:
            result = _poly_mod_fp(_poly_mul_fp(result, base, p), mod, p)
        base = _poly_mod_fp(_poly_mul_fp(base, base, p), mod, p)
        exp >>= 1
    return result


def _is_irreducible_fp(poly: list[int], p: int) -> bool:
    # distinct-degree criterion: T^(p^f) == T mod poly and gcd tests below f
    f = len(poly) - 1
    x = [0, 1]
    xq = _poly_powmod_fp(x, p**f, poly, p)
    diff = [(a - b) % p for a, b in zip(xq + [0] * 2, x + [0] * len(xq))]
    while diff and diff[-1] == 0:
        diff.pop()
    if diff:
        return False
    for k in range(1, f):
        if f % k == 0:
            xq = _poly_powmod_fp(x, p**k, poly, p)
            diff = [(a - b) % p for a, b in zip(xq + [0] * 2, x + [0] * len(xq))]
            while diff and diff[-1] == 0:
                diff.pop()
            g = _poly_gcd_fp(poly, diff if diff else [0], p)
            if len(g) - 1 > 0:
                return False
    return True


class PadicTower:
    """Q_p or an unramified extension Q_p[T]/(g) with g monic, irreducible mod p."""

    def __init__(self, p: int, unram_poly=None, eis_poly=None):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.q = 4 if p == 2 else p
        if unram_poly is None:
            self.f = 1
            self.g = None
        else:
            g = tuple(int(c) for c in unram_poly)
            if len(g) < 2 or g[-1] != 1:
                raise ValueError("unramified polynomial must be monic of degree >= 1")
            self.f = len(g) - 1
            if self.f == 1:
                self.g = None
            else:
                if not _is_irreducible_fp(list(g), p):
                    raise ValueError("unramified polynomial reducible mod p")
                self.g = g
        self.e = 1
        if eis_poly is not None:
            ep = tuple(int(c) for c in eis_poly)
            if len(ep) < 3 or ep[-1] != 1:
                raise ValueError("Eisenstein polynomial must be monic of degree >= 2")
            if any(c % p for c in ep[:-1]) or ep[0] % (p * p) == 0:
                raise ValueError("polynomial is not Eisenstein")
            self.eis = ep
            self.e = len(ep) - 1
        else:
            self.eis = None
        # exact integer rows for T^k mod g, k = f .. 2f-2
        if self.g is not None:
            rows = [[-c for c in self.g[:-1]]]  # T^f mod g
            for _ in range(self.f - 2):
                nxt = [0] + rows[-1]
                lead = nxt.pop()
                nxt = [a + lead * b for a, b in zip(nxt, rows[0])]
                rows.append(nxt)
            self._red_rows = rows
        else:
            self._red_rows = []

    def _check_unramified(self):
        if self.e != 1:
            raise NotImplementedError(
                "arithmetic in ramified stages is out of scope; unramified towers only"
            )

    def __repr__(self):
        if self.f == 1:
            return f"PadicTower(p={self.p})"
        return f"PadicTower(p={self.p}, f={self.f})"

    def __eq__(self, other):
        return (
            isinstance(other, PadicTower)
            and self.p == other.p
            and self.f == other.f
            and self.g == other.g
            and self.eis == other.eis
        )

    def __hash__(self):
        return hash((self.p, self.f, self.g, self.eis))

    def default_precision(self, decimal_target: int = 30, guard: int = 10) -> int:
        """Smallest N with p^N >= 10^decimal_target, plus guard digits."""
        n = 1
        v = self.p
        bound = 10**decimal_target
        while v < bound:
            v *= self.p
            n += 1
        return n + guard

    # ----- constructors -----

    def zero(self, n: int) -> "PadicElement":
        self._check_unramified()
        return PadicElement(self, n, n, None)

    def one(self, n: int) -> "PadicElement":
        return self.from_int(1, n)

    def from_int(self, a: int, n: int) -> "PadicElement":
        self._check_unramified()
        a = int(a)
        if a == 0:
            return self.zero(n)
        v = 0
        while a % self.p == 0:
            a //= self.p
            v += 1
        rel = n - v
        if rel <= 0:
            return self.zero(n)
        u = [a % self.p**rel] + [0] * (self.f - 1)
        return PadicElement(self, v, n, tuple(u))

    def from_rational(self, x, n: int) -> "PadicElement":
        self._check_unramified()
        x = Fraction(x)
        if x == 0:
            return self.zero(n)
        num, den = x.numerator, x.denominator
        v = 0
        while num % self.p == 0:
            num //= self.p
            v += 1
        while den % self.p == 0:
            den //= self.p
            v -= 1
        rel = n - v
        if rel <= 0:
            return self.zero(n)
        m = self.p**rel
        u = [num % m * pow(den % m, -1, m) % m] + [0] * (self.f - 1)
        return PadicElement(self, v, n, tuple(u))

    def from_coeffs(self, coeffs, n: int) -> "PadicElement":
        """Element sum(coeffs[i] * T^i) with rational coefficients."""
        self._check_unramified()
        cs = [Fraction(c) for c in coeffs]
        if len(cs) > self.f:
            raise ValueError("too many coefficients for tower degree")
        cs += [Fraction(0)] * (self.f - len(cs))
        if all(c == 0 for c in cs):
            return self.zero(n)
        v = min(self._vp_fraction(c) for c in cs if c != 0)
        rel = n - v
        if rel <= 0:
            return self.zero(n)
        m = self.p**rel
        pv = Fraction(self.p) ** v
        u = []
        for c in cs:
            c2 = c / pv
            u.append(c2.numerator % m * pow(c2.denominator % m, -1, m) % m)
        return PadicElement(self, v, n, tuple(u))._normalized()

    def _vp_fraction(self, c: Fraction) -> int:
        v = 0
        num, den = c.numerator, c.denominator
        while num % self.p == 0:
            num //= self.p
            v += 1
        while den % self.p == 0:
            den //= self.p
            v -= 1
        return v

    # ----- internal polynomial reduction (coefficients mod m) -----

    def _mul_vec(self, a, b, m):
        f = self.f
        if f == 1:
            return [a[0] * b[0] % m]
        prod = [0] * (2 * f - 1)
        for i in range(f):
            ai = a[i]
            if ai:
                for j in range(f):
                    if b[j]:
                        prod[i + j] = (prod[i + j] + ai * b[j]) % m
        out = prod[:f]
        for k in range(f, 2 * f - 1):
            c = prod[k]
            if c:
                row = self._red_rows[k - f]
                for i in range(f):
                    out[i] = (out[i] + c * row[i]) % m
        return out

    def _inv_vec(self, a, rel):
        # invert a unit vector mod p^rel by lifting the mod-p inverse
        f = self.f
        p = self.p
        if f == 1:
            return [pow(a[0], -1, p**rel)]
        # inverse mod p via extended Euclid in F_p[T]/(g)
        inv_p = self._inv_vec_fp([x % p for x in a])
        cur = inv_p
        k = 1
        while k < rel:
            k = min(2 * k, rel)
            m = p**k
            t = self._mul_vec([x % m for x in a], cur, m)
            t[0] = (2 - t[0]) % m
            for i in range(1, f):
                t[i] = (-t[i]) % m
            cur = self._mul_vec(cur, t, m)
        return cur

    def _inv_vec_fp(self, a):
        p = self.p
        g = list(self.g)
        # extended Euclid: find u with a*u == 1 mod (g, p)
        r0, r1 = [x % p for x in g], [x % p for x in a]
        s0, s1 = [0], [1]
        while True:
            while r1 and r1[-1] == 0:
                r1.pop()
            if len(r1) == 0:
                raise ZeroDivisionError("non-unit in residue field")
            if len(r1) == 1:
                inv = pow(r1[0], -1, p)
                res = [c * inv % p for c in s1]
                res += [0] * (self.f - len(res))
                return res[: self.f]
            # divide r0 by r1
            q = [0] * (len(r0) - len(r1) + 1)
            rr = list(r0)
            inv_lead = pow(r1[-1], -1, p)
            for shift in range(len(rr) - len(r1), -1, -1):
                c = rr[shift + len(r1) - 1] * inv_lead % p
                q[shift] = c
                if c:
                    for i, bi in enumerate(r1):
                        rr[shift + i] = (rr[shift + i] - c * bi) % p
            while rr and rr[-1] == 0:
                rr.pop()
            qs1 = _poly_mul_fp(q, s1, p)
            new_s = [
                (a1 - b1) % p
                for a1, b1 in zip(s0 + [0] * max(0, len(qs1) - len(s0)), qs1 + [0] * max(0, len(s0) - len(qs1)))
            ]
            r0, r1 = r1, rr
            s0, s1 = s1, new_s

    def element(self, v: int, n: int, unit_vec) -> "PadicElement":
        return PadicElement(self, v, n, tuple(unit_vec))._normalized()


class PadicElement:
    """p^v * (unit written on the power basis of the tower), known mod p^n."""

    __slots__ = ("tower", "v", "n", "u")

    def __init__(self, tower: PadicTower, v: int, n: int, u):
        self.tower = tower
        self.v = v
        self.n = n
        self.u = u  # None means zero to precision n (then v == n)

    # ----- basics -----

    def is_zero(self) -> bool:
        return self.u is None

    @property
    def valuation(self) -> int:
        if self.u is None:
            raise PrecisionError(f"zero to precision {self.n}: valuation unknown")
        return self.v

    @property
    def precision(self) -> int:
        return self.n

    def rel_precision(self) -> int:
        return self.n - self.v

    def _normalized(self) -> "PadicElement":
        if self.u is None:
            return self
        p = self.tower.p
        rel = self.n - self.v
        if rel <= 0:
            return PadicElement(self.tower, self.n, self.n, None)
        m = p**rel
        u = [c % m for c in self.u]
        if all(c == 0 for c in u):
            return PadicElement(self.tower, self.n, self.n, None)
        shift = min(_int_vp(c, p) if c else rel for c in u)
        if shift:
            v = self.v + shift
            rel -= shift
            m = p**rel
            u = [(c // p**shift) % m for c in u]
            return PadicElement(self.tower, v, self.n, tuple(u))
        return PadicElement(self.tower, self.v, self.n, tuple(u))

    # ----- arithmetic -----

    def _coerce(self, other):
        if isinstance(other, PadicElement):
            if other.tower != self.tower:
                raise ValueError("mixed towers")
            return other
        if isinstance(other, (int, Fraction)):
            # exact scalars join at a precision that never limits the result
            return self.tower.from_rational(Fraction(other), self.n + abs(self.v) + 64)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = min(self.n, o.n)
        if self.u is None and o.u is None:
            return PadicElement(self.tower, n, n, None)
        if self.u is None:
            return PadicElement(self.tower, o.v, n, o.u)._normalized()
        if o.u is None:
            return PadicElement(self.tower, self.v, n, self.u)._normalized()
        v = min(self.v, o.v)
        rel = n - v
        if rel <= 0:
            return PadicElement(self.tower, n, n, None)
        p = self.tower.p
        m = p**rel
        s1 = p ** (self.v - v)
        s2 = p ** (o.v - v)
        u = [(a * s1 + b * s2) % m for a, b in zip(self.u, o.u)]
        return PadicElement(self.tower, v, n, tuple(u))._normalized()

    __radd__ = __add__

    def __neg__(self):
        if self.u is None:
            return self
        m = self.tower.p ** (self.n - self.v)
        return PadicElement(self.tower, self.v, self.n, tuple((-c) % m for c in self.u))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and other != 0:
            # exact scalar: shifts valuation and absolute precision
            x = Fraction(other)
            vs = self.tower._vp_fraction(x)
            if self.u is None:
                return PadicElement(self.tower, self.n + vs, self.n + vs, None)
            rel = self.n - self.v
            m = self.tower.p**rel
            unit = x / Fraction(self.tower.p) ** vs
            mult = unit.numerator % m * pow(unit.denominator % m, -1, m) % m
            u = [c * mult % m for c in self.u]
            return PadicElement(self.tower, self.v + vs, self.n + vs, tuple(u))._normalized()
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.u is None or o.u is None:
            if self.u is None and o.u is None:
                return PadicElement(self.tower, self.n + o.n, self.n + o.n, None)
            z, w = (self, o) if self.u is None else (o, self)
            n = z.n + w.v
            return PadicElement(self.tower, n, n, None)
        n = min(self.n + o.v, o.n + self.v)
        v = self.v + o.v
        rel = n - v
        if rel <= 0:
            return PadicElement(self.tower, n, n, None)
        m = self.tower.p**rel
        u = self.tower._mul_vec([c % m for c in self.u], [c % m for c in o.u], m)
        return PadicElement(self.tower, v, n, tuple(u))

    __rmul__ = __mul__

    def inverse(self) -> "PadicElement":
        if self.u is None:
            raise ZeroDivisionError("inverse of (0 mod p^n)")
        rel = self.n - self.v
        inv_u = self.tower._inv_vec(list(self.u), rel)
        return PadicElement(self.tower, -self.v, rel - self.v, tuple(inv_u))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return self.tower.one(self.rel_precision() if self.u is not None else self.n)
        base = self if k > 0 else self.inverse()
        k = abs(k)
        out = None
        while k:
            if k & 1:
                out = base if out is None else out * base
            k >>= 1
            if k:
                base = base * base
        return out

    # ----- predicates and access -----

    def is_congruent(self, other, k: int) -> bool:
        """True if v_p(self - other) >= k, requiring enough known precision."""
        o = self._coerce(other)
        d = self - o
        if d.n < k:
            raise PrecisionError(f"congruence mod p^{k} undecidable at precision {d.n}")
        return d.u is None or d.v >= k

    def is_unit(self) -> bool:
        return self.u is not None and self.v == 0

    def residue(self):
        """Image in the residue field as a tuple of f integers mod p."""
        if self.u is None:
            if self.n <= 0:
                raise PrecisionError("no known digits")
            return tuple([0] * self.tower.f)
        if self.v < 0:
            raise ValueError("negative valuation has no residue")
        if self.v > 0:
            return tuple([0] * self.tower.f)
        return tuple(c % self.tower.p for c in self.u)

    def unit_int(self) -> int:
        """Unit part as an integer (degree-1 towers only)."""
        if self.tower.f != 1:
            raise ValueError("unit_int requires a degree-1 tower")
        if self.u is None:
            return 0
        return self.u[0]

    def lift_coeffs(self):
        """Representative of p^-v * self as integers mod p^(n-v)."""
        if self.u is None:
            return tuple([0] * self.tower.f)
        return self.u

    def digit_string(self, ndigits: int | None = None) -> str:
        """Render as (a0.a1a2...)_p x p^v, digits beyond 9 as letters."""
        if self.tower.f != 1:
            raise ValueError("digit_string requires a degree-1 tower")
        p = self.tower.p
        if self.u is None:
            return f"(0)_{p} × {p}^{self.n}"
        rel = self.n - self.v
        count = rel if ndigits is None else min(ndigits, rel)
        u = self.u[0]
        digits = []
        for _ in range(count):
            digits.append(u % p)
            u //= p
        alphabet = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"
        txt = "".join(alphabet[d] for d in digits)
        mantissa = txt[0] + ("." + txt[1:] if len(txt) > 1 else "")
        return f"({mantissa})_{p} × {p}^{self.v}"

    def __repr__(self):
        if self.u is None:
            return f"O({self.tower.p}^{self.n})"
        if self.tower.f == 1:
            return f"{self.u[0]}*{self.tower.p}^{self.v} + O({self.tower.p}^{self.n})"
        return f"{list(self.u)}*{self.tower.p}^{self.v} + O({self.tower.p}^{self.n})"


def _int_vp(a: int, p: int) -> int:
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


# ----- transcendental operations -----


def teichmuller(x: PadicElement) -> PadicElement:
    """Teichmuller representative with the same residue as the unit part of x."""
    tower = x.tower
    if x.u is None:
        raise ValueError("Teichmuller lift of an unknown unit")
    u = PadicElement(tower, 0, x.n - x.v, x.u)
    n = u.n
    p = tower.p
    if p == 2:
        if tower.f != 1:
            raise NotImplementedError("p=2 towers beyond Q_2 not supported here")
        sign = 1 if u.u[0] % 4 == 1 else -1
        return tower.from_int(sign, n)
    q = p**tower.f
    y = u
    # Newton iteration for y^q = y; derivative q*y^(q-1) - 1 is a unit
    for _ in range(max(2, n.bit_length() + 2)):
        yq = y**q
        num = yq - y
        if num.u is None:
            break
        den = yq * q / y - 1  # q*y^(q-1) - 1, a unit since v(q) >= 1
        y = y - num / den
    return y


def padic_log(x: PadicElement) -> PadicElement:
    """Iwasawa branch logarithm: log(p) = 0 and log kills Teichmuller parts."""
    tower = x.tower
    if x.u is None:
        raise ValueError("log of (0 mod p^n)")
    u = PadicElement(tower, 0, x.n - x.v, x.u)
    w = u / teichmuller(u) - 1
    # w is divisible by q; the series log(1+w) converges
    n = u.n
    p = tower.p
    if not (w.u is None or w.v >= 1):
        raise ArithmeticError("unit part did not reduce into 1 + qZ_p")
    if w.u is None:
        return tower.zero(n)
    acc = tower.zero(n)
    term = tower.one(n + _guard_log(n, p))
    k = 1
    while True:
        # all terms from k on have valuation >= k*v(w) - log_p(k); stop when
        # that envelope clears the target precision
        if k > 1 and k * w.v - int(math.log(k, p)) - 1 > n:
            break
        term = term * w
        acc = acc + term * Fraction((-1) ** (k + 1), k)
        k += 1
        if k > 8 * (n + 8):
            raise ArithmeticError("log series failed to converge")
    return acc


def _guard_log(n, p):
    return int(math.log(max(n, 2), p)) + 3


def padic_exp(x: PadicElement) -> PadicElement:
    """Exponential; requires v(x) >= 1 (>= 2 for p = 2)."""
    tower = x.tower
    p = tower.p
    need = 2 if p == 2 else 1
    if not (x.u is None or x.v >= need):
        raise ArithmeticError(f"exp requires valuation >= {need}")
    n = x.n
    if x.u is None:
        return tower.one(n)
    acc = tower.one(n)
    term = tower.one(n)
    k = 1
    while True:
        term = term * x * Fraction(1, k)
        if term.u is None or term.v > n + int(math.log(k + 2, p)) + 2:
            break
        acc = acc + term
        k += 1
        if k > 8 * n + 16:
            raise ArithmeticError("exp series failed to converge")
    return acc


def hensel_root(tower: PadicTower, coeffs, seed, n: int) -> PadicElement:
    """Root of a polynomial by Newton lifting from a simple residue root.

    coeffs: polynomial coefficients (constant first) as ints, Fractions, or
    PadicElements. seed: residue-field approximation (int, residue tuple, or
    element). Refuses multiple roots (derivative vanishing mod p).
    """
    work = n + 8
    cs = []
    for c in coeffs:
        if isinstance(c, PadicElement):
            cs.append(c)
        else:
            cs.append(tower.from_rational(Fraction(c), work))
    if isinstance(seed, PadicElement):
        x = seed
    elif isinstance(seed, (tuple, list)):
        x = tower.from_coeffs([Fraction(s) for s in seed], work)
    else:
        x = tower.from_int(int(seed), work)

    def evalpoly(cl, z):
        acc = tower.zero(work + 32)
        for c in reversed(cl):
            acc = acc * z + c
        return acc

    dcs = [c * k for k, c in enumerate(cs)][1:]
    fx = evalpoly(cs, x)
    dfx = evalpoly(dcs, x)
    if dfx.u is None or dfx.v > 0:
        raise ValueError("multiple root: derivative vanishes mod p")
    if fx.u is not None and fx.v < 1:
        raise ValueError("seed is not an approximate root")
    for _ in range(2 * max(4, n.bit_length() + 3)):
        fx = evalpoly(cs, x)
        if fx.u is None or fx.v >= n:
            break
        dfx = evalpoly(dcs, x)
        x = x - fx / dfx
    fx = evalpoly(cs, x)
    if not (fx.u is None or fx.v >= n):
        raise ArithmeticError("Newton iteration failed to reach target precision")
    return PadicElement(tower, x.v, min(x.n, n), x.u)._normalized()
