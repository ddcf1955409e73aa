"""Number fields: exact arithmetic, embeddings on both sides, presets."""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from polyreg.numfields import (
    EmbeddingSet,
    MotivicSetup,
    NumberField,
    build_embeddings,
    complex_embeddings,
    disc_pairing,
    galois_action,
    k_group_rank,
    parse_config,
)

CUBIC = NumberField([1, -3, -1, 1])        # x^3 - x^2 - 3x + 1, disc 148
QUARTIC = NumberField([1, 1, -3, -1, 1])   # x^4 - x^3 - 3x^2 + x + 1, disc 725
GAUSS = NumberField([1, 0, 1])             # x^2 + 1

WITNESS = (1, -3, -1, 1)                   # involution of QUARTIC fixing sqrt 5
SQRT5 = (-1, 4, 2, -2)                     # element of QUARTIC squaring to 5


class TestFieldBasics:
    def test_discriminants(self):
        assert CUBIC.disc == 148
        assert QUARTIC.disc == 725
        assert GAUSS.disc == -4
        assert NumberField([-1, -4, 0, 1]).disc == 229
        assert NumberField([-2, -6, 0, 1]).disc == 756
        assert NumberField([2, 0, -6, 1]).disc == 1620
        assert NumberField([1, -5, 4, 7, -6, -1, 1]).disc == 722000

    def test_signature(self):
        assert (CUBIC.r1, CUBIC.r2) == (3, 0)
        assert (QUARTIC.r1, QUARTIC.r2) == (4, 0)
        assert (GAUSS.r1, GAUSS.r2) == (0, 1)
        assert CUBIC.is_totally_real and not GAUSS.is_totally_real

    def test_reducible_rejected(self):
        with pytest.raises(ValueError):
            NumberField([1, 2, 1])
        with pytest.raises(ValueError):
            NumberField([1, 0, 2])  # not monic

    def test_norm_and_trace_of_generator(self):
        # for monic f of degree n: N(x) = (-1)^n f(0), Tr(x) = -a_{n-1}
        assert CUBIC.norm(CUBIC.gen()) == -1
        assert CUBIC.trace(CUBIC.gen()) == 1
        assert QUARTIC.norm(QUARTIC.gen()) == 1
        assert GAUSS.norm(GAUSS.gen()) == 1

    def test_inverse_roundtrip(self):
        a = CUBIC.el([Fraction(1, 2), 3, -1])
        assert CUBIC.mul(a, CUBIC.inv(a)) == CUBIC.one()
        b = QUARTIC.el([2, 0, 1, -1])
        assert QUARTIC.mul(QUARTIC.inv(b), b) == QUARTIC.one()

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.integers(-9, 9), min_size=3, max_size=3),
           st.lists(st.integers(-9, 9), min_size=3, max_size=3))
    def test_norm_multiplicative(self, u, v):
        a, b = CUBIC.el(u), CUBIC.el(v)
        assert CUBIC.norm(CUBIC.mul(a, b)) == CUBIC.norm(a) * CUBIC.norm(b)

    def test_sqrt5_element(self):
        w = QUARTIC.el(SQRT5)
        assert QUARTIC.mul(w, w) == QUARTIC.el([5])

    def test_involution_check(self):
        assert QUARTIC.involution_check(WITNESS)
        assert QUARTIC.involution_check((0, 1))        # identity
        assert not QUARTIC.involution_check((1, 1))    # x+1 is not a root map
        # the automorphism x -> u(x) sends g(x) to g(u(x)); it fixes sqrt 5
        u_el = QUARTIC.apply_poly(WITNESS, QUARTIC.gen())
        img = QUARTIC.apply_poly(SQRT5, u_el)
        assert img == QUARTIC.el(SQRT5)


class TestComplexEmbeddings:
    def test_cubic_real_roots_sorted(self):
        es = complex_embeddings(CUBIC, digits=40)
        assert len(es) == 3
        with mpmath.workdps(45):
            vals = [r.real for r in es.roots]
            assert vals[0] < vals[1] < vals[2]
            assert all(abs(r.imag) == 0 for r in es.roots)

    def test_embedding_evaluates_elements(self):
        es = complex_embeddings(CUBIC, digits=40)
        a = CUBIC.el([1, 2, Fraction(1, 3)])
        with mpmath.workdps(45):
            r = es.roots[1]
            want = 1 + 2 * r + r**2 / 3
            assert abs(es.apply(a, 1) - want) < mpmath.mpf(10) ** -35

    def test_norm_matches_product_of_embeddings(self):
        es = complex_embeddings(CUBIC, digits=40)
        a = CUBIC.el([3, -1, 2])
        with mpmath.workdps(45):
            prod = mpmath.mpc(1)
            for v in es.apply_all(a):
                prod *= v
            nm = CUBIC.norm(a)
            assert abs(prod - mpmath.mpf(nm.numerator) / nm.denominator) < mpmath.mpf(10) ** -30

    def test_gauss_pairing_is_minus_2i(self):
        es = complex_embeddings(GAUSS, digits=40)
        d = disc_pairing(es)
        with mpmath.workdps(45):
            assert abs(d - mpmath.mpc(0, -2)) < mpmath.mpf(10) ** -35

    def test_pairing_squares_to_disc(self):
        for fld in (CUBIC, QUARTIC, GAUSS):
            es = complex_embeddings(fld, digits=40)
            d = disc_pairing(es)
            with mpmath.workdps(45):
                assert abs(d * d - fld.disc) < mpmath.mpf(10) ** -25


class TestPadicEmbeddings:
    def test_cubic_inert_prime(self):
        es = build_embeddings(CUBIC, 3, precision=20)
        assert es.tower.f == 3 and len(es) == 3
        # roots are Galois conjugates: residues distinct
        res = {tuple(r.residue()) if isinstance(r.residue(), (list, tuple)) else r.residue()
               for r in es.roots}
        assert len(res) == 3

    def test_cubic_split_prime(self):
        # mod 5 the cubic factors as (linear)(quadratic): tower degree 2
        es = build_embeddings(CUBIC, 5, precision=20)
        assert es.tower.f == 2 and len(es) == 3

    def test_roots_satisfy_polynomial(self):
        es = build_embeddings(CUBIC, 7, precision=18)
        for r in es.roots:
            acc = es.tower.zero(r.precision)
            for c in reversed(CUBIC.poly):
                acc = acc * r + c
            assert acc.is_zero()

    def test_ramified_prime_refused(self):
        with pytest.raises(ValueError, match="squarefree"):
            build_embeddings(CUBIC, 37)
        with pytest.raises(ValueError, match="squarefree"):
            build_embeddings(CUBIC, 2)
        with pytest.raises(ValueError, match="squarefree"):
            build_embeddings(QUARTIC, 5)

    def test_pairing_squares_to_disc_padic(self):
        es = build_embeddings(CUBIC, 5, precision=20)
        d = disc_pairing(es)
        sq = d * d
        assert sq.is_congruent(148, 18)

    def test_quartic_towers(self):
        es3 = build_embeddings(QUARTIC, 3, precision=12)
        assert es3.tower.f == 4 and len(es3) == 4
        es7 = build_embeddings(QUARTIC, 7, precision=12)
        assert es7.tower.f == 2 and len(es7) == 4
        es11 = build_embeddings(QUARTIC, 11, precision=10)
        assert es11.tower.f == 2 and len(es11) == 4

    def test_split_gauss(self):
        es = build_embeddings(GAUSS, 5, precision=15)
        assert es.tower.f == 1 and len(es) == 2
        r0 = es.roots[0]
        assert (r0 * r0).is_congruent(-1, 14)


class TestGaloisAction:
    def test_complex_action_pairs_roots(self):
        es = complex_embeddings(QUARTIC, digits=40)
        perm = galois_action(es, WITNESS)
        assert perm == [2, 3, 0, 1]

    def test_action_preserves_sqrt5_branch(self):
        es = complex_embeddings(QUARTIC, digits=40)
        perm = galois_action(es, WITNESS)
        w = QUARTIC.el(SQRT5)
        with mpmath.workdps(45):
            vals = es.apply_all(w)
            for i, j in enumerate(perm):
                assert abs(vals[i] - vals[j]) < mpmath.mpf(10) ** -30
            # two embeddings land on +sqrt5, two on -sqrt5
            signs = sorted(mpmath.sign(v.real) for v in vals)
            assert signs == [-1, -1, 1, 1]

    def test_padic_action(self):
        es = build_embeddings(QUARTIC, 7, precision=14)
        perm = galois_action(es, WITNESS)
        assert sorted(perm) == [0, 1, 2, 3]
        assert all(perm[perm[i]] == i and perm[i] != i for i in range(4))
        w = QUARTIC.el(SQRT5)
        vals = [es.apply(w, i) for i in range(4)]
        for i, j in enumerate(perm):
            assert (vals[i] - vals[j]).is_zero()

    def test_bad_witness_rejected(self):
        es = complex_embeddings(QUARTIC, digits=30)
        with pytest.raises(ValueError, match="involutive"):
            galois_action(es, (1, 1))


class TestRanks:
    def test_k_group_ranks(self):
        assert k_group_rank(CUBIC, 3) == 3
        assert k_group_rank(CUBIC, 2) == 0
        assert k_group_rank(QUARTIC, 3) == 4
        assert k_group_rank(QUARTIC, 4) == 0
        assert k_group_rank(GAUSS, 2) == 1
        assert k_group_rank(GAUSS, 3) == 1
        with pytest.raises(ValueError):
            k_group_rank(CUBIC, 1)


class TestPresets:
    def test_table1_preset(self):
        m = MotivicSetup.preset("S3")
        assert m.field == CUBIC
        assert m.conductor == 148
        assert (m.gamma_plus, m.gamma_minus) == (2, 0)
        assert m.coefficient_field == "Q"

    def test_table5_preset(self):
        m = MotivicSetup.preset("D8")
        assert m.field == QUARTIC
        assert m.conductor == 145
        assert m.quad_subfield_disc == 5
        assert m.witness is not None
        assert m.field.involution_check(m.witness)
        w = m.field.el(m.sqrt_disc_element)
        assert m.field.mul(w, w) == m.field.el([m.quad_subfield_disc])

    def test_sextic_preset(self):
        m = MotivicSetup.preset("S3xC3")
        assert m.field.degree == 6
        assert m.field.disc == 722000
        assert m.conductor == 380
        assert m.coefficient_field == "Q(zeta3)"

    def test_cyclotomic_preset(self):
        m = MotivicSetup.preset("CYCLO", n=5)
        assert m.field.poly == (1, 1, 1, 1, 1)
        assert m.conductor == 5

    def test_named_file_presets(self):
        for name, disc in (("cubic_disc229", 229), ("cubic_disc756", 756),
                           ("cubic_disc1620", 1620)):
            m = MotivicSetup.preset(name)
            assert m.field.disc == disc
            assert m.conductor == disc

    def test_config_parser(self):
        data = parse_config("a = 1\n# comment\nb = x, y # trailing\n\n")
        assert data == {"a": "1", "b": "x, y"}
        with pytest.raises(ValueError):
            parse_config("just words\n")
        with pytest.raises(ValueError, match="missing"):
            MotivicSetup.from_config("name = t\ngroup = S3\n")
