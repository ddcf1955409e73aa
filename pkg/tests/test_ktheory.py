"""Symbol kernels, K-bases, and regulator determinants."""

import math
from fractions import Fraction

import mpmath
import pytest

from polyreg.numfields import (EmbeddingSet, MotivicSetup, NumberField,
                               build_embeddings, complex_embeddings)
from polyreg.ktheory import (ApplicabilityError, KBasis, MultiplicativeSpan,
                             SymbolCombination, _KernelWork, canonical_symbol,
                             disc_det, k_basis, kernel_dn, make_symbol,
                             motivic_columns, punit_columns, regulator_det,
                             search_symbols)
from polyreg.polylog_p import p_np

Q = NumberField([0, 1])


@pytest.fixture(scope="module")
def s3():
    return MotivicSetup.preset("S3")


@pytest.fixture(scope="module")
def d8():
    return MotivicSetup.preset("D8")


@pytest.fixture(scope="module")
def kb_q():
    return k_basis(Q, 3, precision=50)


@pytest.fixture(scope="module")
def kb_cubic(s3):
    return k_basis(s3.field, 3, precision=50, height=2)


@pytest.fixture(scope="module")
def kb_quartic(d8):
    return k_basis(d8.field, 3, precision=50, height=2)


class TestSymbols:
    def test_inversion_normalization_odd(self):
        # [1/x]_3 = [x]_3, so the pair merges
        c = make_symbol(Q, 3, [(1, [2]), (1, [Fraction(1, 2)])])
        assert len(c.terms) == 1
        assert c.terms[0][0] == 2

    def test_inversion_normalization_even(self):
        # [1/x]_2 = -[x]_2, so the pair cancels
        c = make_symbol(Q, 2, [(1, [2]), (1, [Fraction(1, 2)])])
        assert c.terms == ()

    def test_forbidden_arguments(self):
        with pytest.raises(ValueError):
            make_symbol(Q, 2, [(1, [0])])
        with pytest.raises(ValueError):
            make_symbol(Q, 2, [(1, [1])])

    def test_canonical_pairing(self):
        x = Q.el([Fraction(-1, 2)])
        rep, flip = canonical_symbol(Q, x)
        rep2, flip2 = canonical_symbol(Q, Q.inv(x))
        assert rep == rep2 and flip != flip2

    def test_search_contains_expected_up_to_inversion(self):
        found = search_symbols(Q, 2, 3)
        keys = set()
        for s in found:
            keys.add(tuple(s))
            keys.add(tuple(Q.inv(s)))
        for want in (-1, 2, Fraction(1, 2), Fraction(-1, 2)):
            assert tuple(Q.el([want])) in keys

    def test_search_dedups_inverses_and_skips_01(self):
        found = search_symbols(Q, 3, 3)
        as_set = {tuple(s) for s in found}
        assert tuple(Q.el([0])) not in as_set
        assert tuple(Q.el([1])) not in as_set
        for s in found:
            inv = tuple(Q.inv(s))
            assert inv == tuple(s) or inv not in as_set

    def test_search_norm_smoothness(self, s3):
        K = s3.field
        one = K.one()
        for s in search_symbols(K, 2, 7):
            for val in (s, K.sub(one, s)):
                nm = K.norm(val)
                v = abs(nm.numerator) * nm.denominator
                for p in (2, 3, 5, 7):
                    while v % p == 0:
                        v //= p
                assert v == 1


class TestMultiplicativeSpan:
    def test_exact_coordinates_additive(self):
        vals = [Q.el([2]), Q.el([3]), Q.el([6]), Q.el([Fraction(2, 3)])]
        span = MultiplicativeSpan(Q, vals, digits=40)
        c2, c3 = span.coord([2]), span.coord([3])
        c6, c23 = span.coord([6]), span.coord([Fraction(2, 3)])
        assert tuple(a + b for a, b in zip(c2, c3)) == c6
        assert tuple(a - b for a, b in zip(c2, c3)) == c23

    def test_torsion_has_zero_coordinates(self):
        span = MultiplicativeSpan(Q, [Q.el([-1]), Q.el([2])], digits=40)
        assert all(v == 0 for v in span.coord([-1]))
        assert any(v != 0 for v in span.coord([2]))

    def test_units_coordinatized(self, s3):
        K = s3.field
        # the generator is a unit (norm -1): needs a unit axis, not a prime slot
        theta = K.gen()
        assert K.norm(theta) == -1
        span = MultiplicativeSpan(K, [theta, K.mul(theta, theta)], digits=40)
        ct = span.coord(theta)
        ct2 = span.coord(K.mul(theta, theta))
        assert tuple(2 * v for v in ct) == ct2


class TestKernels:
    def test_q_kernel_contains_minus_one(self):
        syms = search_symbols(Q, 3, 3)
        ker = kernel_dn(syms, 3, Q, digits=45)
        singles = [c for c in ker if len(c.terms) == 1]
        assert any(c.terms[0][1] == Q.el([-1]) for c in singles)

    def test_level2_trivial_element(self):
        # (1-x) wedge x vanishes at x = 1/2
        ker = kernel_dn([Q.el([Fraction(1, 2)])], 2, Q, digits=40)
        assert len(ker) == 1

    def test_level2_nonkernel_element(self):
        ker = kernel_dn([Q.el([3])], 2, Q, digits=40)
        assert ker == []

    def test_kernel_image_exactly_zero(self, s3):
        K = s3.field
        syms = search_symbols(K, 2, 11)
        work = _KernelWork(K, syms, 45)
        basis = kernel_dn(syms, 3, K, digits=45, work=work)
        assert basis
        cols = work.d_columns(3)
        lookup = {tuple(s): t for t, s in enumerate(work.symbols)}
        for combo in basis:
            total = [Fraction(0)] * len(cols[0])
            for c, x in combo.terms:
                col = cols[lookup[tuple(x)]]
                total = [a + c * b for a, b in zip(total, col)]
            assert all(v == 0 for v in total)

    def test_galois_equivariance(self, d8, kb_quartic):
        # the involution fixing the quadratic subfield permutes kernel elements
        K = d8.field
        u = K.el(d8.witness)
        combo = kb_quartic.combos[2]
        image_terms = [(c, K.apply_poly([xc for xc in x], u)) for c, x in combo.terms]
        base = [x for _, x in combo.terms] + [x for _, x in image_terms]
        seen, syms = set(), []
        for x in base:
            rep, _ = canonical_symbol(K, x)
            if tuple(rep) not in seen:
                seen.add(tuple(rep))
                syms.append(rep)
        work = _KernelWork(K, syms, 45)
        cols = work.d_columns(3)
        lookup = {tuple(s): t for t, s in enumerate(work.symbols)}
        image = make_symbol(K, 3, image_terms)
        total = [Fraction(0)] * len(cols[0])
        for c, x in image.terms:
            col = cols[lookup[tuple(x)]]
            total = [a + c * b for a, b in zip(total, col)]
        assert all(v == 0 for v in total)


class TestKBasis:
    def test_rank_zero_even_weight_totally_real(self):
        kb = k_basis(Q, 2, precision=40)
        assert kb.rank == 0 and kb.combos == []

    def test_q_weight3(self, kb_q):
        assert kb_q.rank == 1
        assert kb_q.combos[0].terms == ((1, Q.el([-1])),)

    def test_cubic_rank(self, s3, kb_cubic):
        assert kb_cubic.rank == 3

    def test_quartic_rank(self, d8, kb_quartic):
        assert kb_quartic.rank == 4

    def test_rank_bounded(self, s3, kb_cubic):
        from polyreg.numfields import k_group_rank
        assert kb_cubic.rank <= k_group_rank(s3.field, 3)

    def test_json_roundtrip(self, kb_cubic):
        kb2 = KBasis.from_json(kb_cubic.to_json())
        assert kb2.field_poly == kb_cubic.field_poly
        assert kb2.rank == kb_cubic.rank
        assert all(a.terms == b.terms for a, b in zip(kb2.combos, kb_cubic.combos))

    def test_cache_roundtrip(self, tmp_path):
        kb1 = k_basis(Q, 3, precision=45, cache_dir=tmp_path)
        files = list(tmp_path.glob("kbasis_*.json"))
        assert len(files) == 1
        kb2 = k_basis(Q, 3, precision=45, cache_dir=tmp_path)
        assert [c.terms for c in kb2.combos] == [c.terms for c in kb1.combos]

    def test_shortfall_warns(self):
        # a box this small cannot reach the cubic rank
        K = MotivicSetup.preset("S3").field
        with pytest.warns(UserWarning, match="rank shortfall"):
            kb = k_basis(K, 3, precision=40, height=1)
        assert kb.rank < 3


class TestRegulators:
    def test_q_archimedean_value(self, kb_q):
        R = regulator_det(Q, kb_q, 3, "archimedean", digits=50)
        with mpmath.workdps(60):
            want = -mpmath.mpf(3) / 2 * mpmath.zeta(3)
            assert abs(R - want) < mpmath.mpf(10) ** -40

    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_q_padic_value(self, kb_q, p):
        es = build_embeddings(Q, p)
        Rp = regulator_det(Q, kb_q, 3, p, embeddings=es)
        direct = p_np(3, es.apply(Q.el([-1]), 0)) * 2
        assert (Rp - direct).is_zero()

    def test_precision_stability(self, s3, kb_cubic):
        R1 = regulator_det(s3.field, kb_cubic, 3, "archimedean", digits=40)
        R2 = regulator_det(s3.field, kb_cubic, 3, "archimedean", digits=60)
        with mpmath.workdps(70):
            assert abs(R1 - R2) < abs(R2) * mpmath.mpf(10) ** -35

    def test_unimodular_invariance(self, s3, kb_cubic):
        K = s3.field
        # integral change of basis with determinant one
        M = [[1, 1, 0], [0, 1, 1], [0, 0, 1]]
        new = []
        for row in M:
            terms = []
            for c, combo in zip(row, kb_cubic.combos):
                terms.extend((c * cc, x) for cc, x in combo.terms)
            new.append(make_symbol(K, 3, terms))
        kb2 = KBasis(K.poly, 3, new, 3, {})
        R1 = regulator_det(K, kb_cubic, 3, "archimedean", digits=50)
        R2 = regulator_det(K, kb2, 3, "archimedean", digits=50)
        with mpmath.workdps(60):
            assert abs(abs(R1) - abs(R2)) < abs(R1) * mpmath.mpf(10) ** -40

    def test_motivic_quotient_embedding_invariance(self, s3, kb_cubic):
        cols = motivic_columns(s3, kb_cubic, 3)
        es0 = complex_embeddings(s3.field, 50)
        quots = []
        for order in ([0, 1, 2], [1, 2, 0], [2, 0, 1]):
            es = EmbeddingSet(s3.field, "arch", [es0.roots[i] for i in order], digits=50)
            R = regulator_det(s3, kb_cubic, 3, "archimedean", digits=50,
                              columns=cols, embeddings=es)
            D = disc_det(s3, "archimedean", digits=50, embeddings=es)
            quots.append(R / D)
        with mpmath.workdps(60):
            assert abs(quots[0] - quots[1]) < abs(quots[0]) * mpmath.mpf(10) ** -35
            assert abs(quots[0] - quots[2]) < abs(quots[0]) * mpmath.mpf(10) ** -35

    def test_motivic_quotient_d8_invariance(self, d8, kb_quartic):
        cols = motivic_columns(d8, kb_quartic, 3)
        es0 = complex_embeddings(d8.field, 50)
        R1 = regulator_det(d8, kb_quartic, 3, "archimedean", digits=50, columns=cols)
        D1 = disc_det(d8, "archimedean", digits=50)
        es_r = EmbeddingSet(d8.field, "arch", list(reversed(es0.roots)), digits=50)
        R2 = regulator_det(d8, kb_quartic, 3, "archimedean", digits=50,
                           columns=cols, embeddings=es_r)
        D2 = disc_det(d8, "archimedean", digits=50, embeddings=es_r)
        with mpmath.workdps(60):
            q1, q2 = R1 / D1, R2 / D2
            assert abs(q1 - q2) < abs(q1) * mpmath.mpf(10) ** -35

    def test_motivic_padic_sides(self, s3, kb_cubic):
        emb = {p: build_embeddings(s3.field, p) for p in (5, 7)}
        cols = motivic_columns(s3, kb_cubic, 3, p_list=[5, 7], embeddings_map=emb)
        for p in (5, 7):
            Rp = regulator_det(s3, kb_cubic, 3, p, embeddings=emb[p], columns=cols)
            Dp = disc_det(s3, p, embeddings=emb[p])
            quot = Rp / Dp
            assert quot.precision > 20

    def test_rational_class_column_degenerate(self, s3, kb_cubic):
        # [-1]_3 comes from the rationals: its weighted projection vanishes
        cols = motivic_columns(s3, kb_cubic, 3)
        assert 0 not in cols
        R = regulator_det(s3, kb_cubic, 3, "archimedean", digits=45, columns=[0, 1])
        with mpmath.workdps(50):
            assert abs(R) < mpmath.mpf(10) ** -30

    def test_punit_selection_and_refusal(self, s3, kb_cubic):
        K = s3.field
        es = build_embeddings(K, 5)
        good = punit_columns(K, kb_cubic, [5], 2, {5: es})
        assert len(good) == 2
        bad = KBasis(K.poly, 3, [make_symbol(K, 3, [(1, K.el([5]))])], 1, {})
        with pytest.raises(ValueError, match="not a unit"):
            regulator_det(K, bad, 3, 5, embeddings=es, columns=[0, 0, 0])

    def test_even_weight_refused_totally_real(self, s3, kb_cubic):
        with pytest.raises(ApplicabilityError):
            regulator_det(s3, kb_cubic, 4, "archimedean")

    def test_sextic_refused(self):
        sx = MotivicSetup.preset("S3XC3")
        kb = KBasis(sx.field.poly, 3, [], 0, {})
        with pytest.raises(ApplicabilityError):
            regulator_det(sx, kb, 3, "archimedean")

    def test_disc_pairing_plain(self, s3):
        D = disc_det(s3.field, "archimedean", digits=50)
        with mpmath.workdps(60):
            assert abs(D**2 - 148) < mpmath.mpf(10) ** -40
