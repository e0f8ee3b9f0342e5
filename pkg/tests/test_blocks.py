"""Genus-0 blocks: residue machinery, hom/3-point blocks, propagation."""

import random
from fractions import Fraction as F

import pytest

from voablocks.blocks import (INFINITY, BlockFunctional, IntertwinerError,
                              RationalFunction, SpherePoints,
                              UnderdeterminedCap, block_property_check,
                              gamma_twist, global_form_tails, hom_block,
                              identity_hom, propagate_block, propagate_eval,
                              rational_glue, residue_pairing,
                              strong_residue_check, three_point_block,
                              vertex_block)
from voablocks.models import (contragredient, fock_module, heisenberg_model,
                              virasoro_model)
from voablocks.series import TruncSeries

H = heisenberg_model()
VIR = virasoro_model(F(1, 2))

ONE = RationalFunction(poly={0: F(1)})
# 1/(zeta (zeta - 1)) in partial fractions
POLE01 = RationalFunction(poles={0: {1: F(-1)}, 1: {1: F(1)}})


def rand_frac(rng, nonzero=False):
    n = rng.randint(1, 5) if nonzero else rng.randint(-5, 5)
    return F(n, rng.randint(1, 3))


class TestRationalFunction:
    def test_eval_partial_fractions(self):
        for x in (F(2), F(1, 3), F(-5, 7)):
            assert POLE01.eval(x) == 1 / (x * (x - 1))

    def test_expansions(self):
        s0 = POLE01.expand_at(0, 4)
        assert [s0.coeff(k) for k in range(-1, 4)] == [F(-1)] * 5
        s1 = POLE01.expand_at(1, 3)
        assert s1.coeff(-1) == 1 and s1.coeff(0) == -1 and s1.coeff(1) == 1
        si = POLE01.expand_at_infinity(6)
        assert [si.coeff(k) for k in range(6)] == [0, 0, 1, 1, 1, 1]

    def test_eval_at_pole_raises(self):
        with pytest.raises(ZeroDivisionError):
            POLE01.eval(0)


class TestGlue:
    def test_constant(self):
        rep = rational_glue(ONE.expand_at(0, 3), ONE.expand_at(1, 3),
                            ONE.expand_at_infinity(3), 1)
        assert rep.passed and rep.section == ONE

    def test_partial_fraction_oracle(self):
        rep = rational_glue(POLE01.expand_at(0, 4), POLE01.expand_at(1, 4),
                            POLE01.expand_at_infinity(4), 1)
        assert rep.passed and rep.section == POLE01

    def test_perturbed_fails_with_witness(self):
        t = POLE01.expand_at(0, 4)
        bad = TruncSeries(t.var, t.floor, list(t.coeffs), t.order)
        bad.coeffs[0] += 1
        rep = rational_glue(bad, POLE01.expand_at(1, 4),
                            POLE01.expand_at_infinity(4), 1)
        assert not rep.passed
        assert rep.witness.product_exponents(1) is not None

    def test_agrees_with_strong_residue_check(self):
        rng = random.Random(30)
        passing = failing = 0
        while passing < 15 or failing < 15:
            z0 = F(rng.randint(1, 4))
            f = RationalFunction(
                poly={0: rand_frac(rng), 1: rand_frac(rng)},
                poles={0: {1: rand_frac(rng)}, z0: {1: rand_frac(rng)}})
            tails = [f.expand_at(0, 4), f.expand_at(z0, 4),
                     f.expand_at_infinity(5)]
            perturb = failing < 15 and (passing >= 15 or rng.random() < 0.5)
            if perturb:
                t = tails[rng.randrange(3)]
                t.coeffs[rng.randrange(len(t.coeffs))] += 1
            rep1 = rational_glue(tails[0], tails[1], tails[2], z0)
            rep2 = strong_residue_check({F(0): tails[0], z0: tails[1],
                                         INFINITY: tails[2]})
            assert rep1.passed == rep2.passed
            if rep1.passed:
                assert rep1.section == rep2.section
                passing += 1
            else:
                assert rep1.witness.point == rep2.witness.point
                assert rep1.witness.order == rep2.witness.order
                failing += 1


class TestStrongResidue:
    def test_global_section_roundtrip(self):
        g = RationalFunction(poles={0: {2: F(-1)}})
        rep = strong_residue_check({F(0): g.expand_at(0, 3),
                                    INFINITY: g.expand_at_infinity(5)})
        assert rep.passed and rep.section == g

    def test_zero_tails(self):
        rep = strong_residue_check({F(0): TruncSeries.zero("t", 3),
                                    INFINITY: TruncSeries.zero("w", 3)})
        assert rep.passed and rep.section.is_zero()

    def test_bare_residue_violation(self):
        t = TruncSeries.from_coeff_map("t", {-1: F(1)}, 2)
        rep = strong_residue_check({F(0): t, INFINITY: TruncSeries.zero("w", 3)})
        assert not rep.passed

    def test_requires_infinity(self):
        with pytest.raises(ValueError):
            strong_residue_check({F(0): TruncSeries.zero("t", 2)})


class TestResiduePairing:
    def test_unit_residue(self):
        form = RationalFunction(poles={0: {1: F(1)}})
        assert residue_pairing({F(0): form.expand_at(0, 2)}, ONE) == 1

    def test_holomorphic_vanishes(self):
        form = RationalFunction(poly={2: F(1)})
        assert residue_pairing({F(0): form.expand_at(0, 4)}, ONE) == 0

    def test_coboundaries_vanish(self):
        rng = random.Random(18)
        pts = SpherePoints([F(0), F(1), INFINITY])
        targets = [ONE, POLE01, RationalFunction(poly={0: F(3), 1: F(2)})]
        for _ in range(20):
            g = RationalFunction(
                poly={k: rand_frac(rng) for k in range(2)},
                poles={0: {1: rand_frac(rng)}, 1: {2: rand_frac(rng)}})
            cob = global_form_tails(g, pts, 7)
            for t in targets:
                assert residue_pairing(cob, t) == 0


class TestGammaTwist:
    def test_heisenberg_generator(self):
        assert gamma_twist((1,), H) == [(2, {(1,): F(-1)})]

    def test_conformal_vector(self):
        assert gamma_twist((2,), VIR) == [(4, {(2,): F(1)})]

    def test_vacuum(self):
        assert gamma_twist((), H) == [(0, {(): F(1)})]

    def test_l1_descendants(self):
        # L_{-2}L_{-2}|0> picks up lower L_1-corrections
        tw = dict(gamma_twist((2, 2), VIR))
        assert tw[8] == {(2, 2): F(1)}
        assert tw[7] == {(3,): F(3)}
        assert tw[6] == {(2,): F(6)}


class TestHomBlock:
    def test_identity_is_canonical_pairing(self):
        phi = identity_hom(H, 4)
        u = {(2, 1): F(3), (1,): F(2)}
        v = {(2, 1): F(5), (3,): F(7)}
        assert phi(u, v) == 15

    def test_linearity_in_T(self):
        T2 = {l: {l: F(2)} for wt in range(5) for l in H.basis_at(wt)}
        phi2 = hom_block(T2, H, contragredient(H), 4)
        assert phi2({(1,): F(1)}, {(1,): F(1)}) == 2

    def test_fock_dual_basis_pairing(self):
        Fm = fock_module(H, F(2, 3))
        T = {l: {l: F(1)} for wt in range(5) for l in Fm.basis_at(wt)}
        phi = hom_block(T, Fm, contragredient(Fm), 4)
        assert phi({(1, 1): F(1)}, {(1, 1): F(1)}) == 1

    def test_failing_T_rejected_with_witness(self):
        T = {l: {l: F(1)} for wt in range(4) for l in H.basis_at(wt)}
        T[(1,)] = {(1,): F(2)}
        with pytest.raises(IntertwinerError) as ei:
            hom_block(T, H, contragredient(H), 3)
        assert "n" in ei.value.witness

    def test_round_trip_recovers_T(self):
        phi = identity_hom(H, 3)
        for wt in range(4):
            for l1 in H.basis_at(wt):
                for l2 in H.basis_at(wt):
                    assert phi({l1: F(1)}, {l2: F(1)}) == (1 if l1 == l2 else 0)


class TestThreePoint:
    def test_vacuum_insertion(self):
        w = {(2, 1): F(3)}
        wp = {(2, 1): F(4), (1,): F(1)}
        for z0 in (F(1), F(5, 2), F(-3)):
            assert three_point_block(H, (), z0, w, wp) == 12

    def test_conformal_vector_on_vacuum(self):
        assert three_point_block(VIR, (2,), 1, {(): F(1)}, {(2,): F(1)}) == 1

    def test_heisenberg_mode_oracle(self):
        # only the z^{-2} term survives: alpha_1 alpha_{-1}|0> = |0>
        assert three_point_block(H, (1,), 2, {(1,): F(1)}, {(): F(1)}) == F(1, 4)

    def test_vertex_block_wrapper(self):
        vb = vertex_block(H, F(1), 6)
        got = vb({(1,): F(1)}, {(1,): F(1)}, {(1, 1): F(1)})
        assert got == three_point_block(H, (1,), 1, {(1,): F(1)}, {(1, 1): F(1)})


class TestPropagation:
    U = {(2, 1): F(3), (1,): F(2)}
    V = {(2, 1): F(5), (3,): F(7)}

    def test_vacuum_law(self):
        phi = identity_hom(H, 4)
        for y in (F(3), F(-1, 2), F(7, 5)):
            assert propagate_eval(phi, (), y, [self.U, self.V]) == phi(self.U, self.V)

    def test_matches_vertex_insertion(self):
        phi = identity_hom(H, 4)
        for v in ((1,), (1, 1), (2,)):
            for y in (F(2), F(1, 3), F(-1)):
                got = propagate_eval(phi, v, y, [self.U, self.V])
                want = three_point_block(H, v, y, self.U, self.V)
                assert got == want, (v, y)

    def test_matches_vertex_insertion_virasoro(self):
        phi = identity_hom(VIR, 8)
        u = {(2,): F(1), (3,): F(2)}
        v = {(2,): F(1), (2, 2): F(-1)}
        for ins in ((2,), (2, 2)):
            for y in (F(2), F(-1, 2)):
                assert propagate_eval(phi, ins, y, [u, v]) == \
                    three_point_block(VIR, ins, y, u, v)

    def test_cap_insufficiency_fails_closed(self):
        phi = identity_hom(VIR, 5)
        with pytest.raises(UnderdeterminedCap):
            propagate_eval(phi, (2, 2), F(2),
                           [{(2, 2): F(1)}, {(2, 2): F(1)}])

    def test_double_propagation_symmetry(self):
        phi = identity_hom(H, 10)
        w1 = {(1,): F(2), (2,): F(1)}
        w2 = {(1,): F(1), (1, 1): F(3)}
        pairs = [(F(2), F(3)), (F(1, 2), F(-1)), (F(5), F(1, 3)),
                 (F(-2), F(3, 4)), (F(7), F(2))]
        for u_ins, v_ins in [((1,), (1,)), ((1,), (2,))]:
            for x, y in pairs:
                py = propagate_block(phi, y, 4)
                px = propagate_block(phi, x, 4)
                A = propagate_eval(py, u_ins, x, [w1, {v_ins: F(1)}, w2])
                B = propagate_eval(px, v_ins, y, [w1, {u_ins: F(1)}, w2])
                assert A == B, (u_ins, v_ins, x, y)

    def test_iterated_vacuum_collapse(self):
        # propagating the vacuum through an already-propagated block
        # reduces to single propagation
        phi = identity_hom(H, 10)
        w1 = {(1,): F(2)}
        w2 = {(1, 1): F(3)}
        py = propagate_block(phi, F(3), 4)
        got = propagate_eval(py, (), F(2), [w1, {(2,): F(1)}, w2])
        want = propagate_eval(phi, (2,), F(3), [w1, w2])
        assert got == want


class TestBlockProperty:
    FORMS = [RationalFunction(poly={0: F(1)}),
             RationalFunction(poly={2: F(1)}),
             RationalFunction(poles={0: {1: F(1)}}),
             RationalFunction(poles={0: {2: F(1)}}),
             RationalFunction(poly={1: F(2)}, poles={0: {1: F(-3)}})]

    def test_hom_blocks_are_blocks(self):
        phi = identity_hom(H, 8)
        for v in ((1,), (2,)):
            for g in self.FORMS:
                assert block_property_check(phi, v, g,
                                            [{(2, 1): F(1)}, {(1, 1): F(2)}])

    def test_virasoro_block(self):
        phi = identity_hom(VIR, 10)
        for g in self.FORMS:
            assert block_property_check(phi, (2,), g,
                                        [{(2,): F(1)}, {(2,): F(1)}])

    def test_vertex_block_three_points(self):
        vb = vertex_block(H, F(1), 8)
        g = RationalFunction(poles={0: {1: F(1)}, 1: {1: F(-2)}}, poly={0: F(1)})
        assert block_property_check(vb, (1,), g,
                                    [{(1,): F(1)}, {(): F(1)}, {(1,): F(1)}])

    def test_non_block_detected(self):
        bogus = BlockFunctional(
            SpherePoints([F(0), INFINITY]), [H, contragredient(H)], [8, 8],
            lambda u, v: sum(u.values(), F(0)) * sum(v.values(), F(0)))
        results = [block_property_check(bogus, (1,), g,
                                        [{(1,): F(1)}, {(1,): F(1)}])
                   for g in self.FORMS]
        assert not all(results)


class TestSpherePoints:
    def test_distinct_required(self):
        with pytest.raises(ValueError):
            SpherePoints([F(0), F(0)])

    def test_infinity_last(self):
        with pytest.raises(ValueError):
            SpherePoints([INFINITY, F(0)])
