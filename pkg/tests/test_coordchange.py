"""Coordinate changes: extraction closed forms, the group law, Huang
conjugation, and the gamma relation."""

import random
from fractions import Fraction as F

import pytest

from voablocks.coordchange import (CoordChange, U_apply, U_inverse_apply,
                                   extract_coeffs, gamma_relation_check,
                                   gamma_series, huang_conjugation_check,
                                   poly_compose)
from voablocks.graded import vec_add_into, vec_is_zero, weight_of
from voablocks.models import heisenberg_model, virasoro_model

H = heisenberg_model()
VIR = virasoro_model(F(1, 2))

RNG = random.Random(61803)


def rand_frac(rng, nonzero=False):
    n = rng.randint(1, 5) if nonzero else rng.randint(-5, 5)
    return F(n * rng.choice((1, -1)) if nonzero else n, rng.randint(1, 4))


def rand_coord(rng, degree=4):
    poly = {1: rand_frac(rng, nonzero=True)}
    for k in range(2, degree + 1):
        c = rand_frac(rng)
        if c:
            poly[k] = c
    return CoordChange(poly)


class TestExtract:
    def test_closed_forms_generic(self):
        rng = random.Random(165)
        for _ in range(25):
            a1 = rand_frac(rng, nonzero=True)
            a2, a3 = rand_frac(rng), rand_frac(rng)
            rho = CoordChange({1: a1, 2: a2, 3: a3})
            c = rho.coeffs(2)
            assert c[0] == a1
            assert c[1] == a2 / a1
            assert c[2] == a3 / a1 - (a2 / a1) ** 2

    def test_series_entry_point(self):
        rho = CoordChange({1: F(1), 2: F(1), 3: F(1)})
        cs = extract_coeffs(rho.series(8), 2)
        assert cs == [F(1), F(1), F(0)]


@pytest.mark.parametrize("voa", [H, VIR], ids=["heisenberg", "virasoro"])
def test_group_law(voa):
    rng = random.Random(474747)
    labels = [l for wt in range(7) for l in voa.basis_at(wt)]
    for _ in range(15):
        r1 = rand_coord(rng)
        r2 = rand_coord(rng)
        comp = CoordChange(poly_compose(r1.poly, r2.poly))
        w = {rng.choice(labels): F(1)}
        lhs = U_apply(comp, w, voa)
        rhs = U_apply(r1, U_apply(r2, w, voa), voa)
        diff = vec_add_into(dict(lhs), rhs, F(-1))
        assert vec_is_zero(diff), (r1.poly, r2.poly, w)


def test_U_inverse_roundtrip():
    rng = random.Random(99)
    labels = [l for wt in range(5) for l in H.basis_at(wt)]
    for _ in range(10):
        rho = rand_coord(rng)
        w = {rng.choice(labels): F(1)}
        back = U_inverse_apply(rho, U_apply(rho, w, H), H)
        diff = vec_add_into(dict(back), w, F(-1))
        assert vec_is_zero(diff)


def test_scaling_is_graded_dilation():
    # rho(z) = a z acts as a^{Ltilde0}
    for a in (F(2), F(-1, 3), F(5, 7)):
        rho = CoordChange({1: a})
        for wt in range(5):
            for label in H.basis_at(wt):
                out = U_apply(rho, {label: F(1)}, H)
                assert out == {label: a ** wt}


class TestHuang:
    def test_randomized_instances(self):
        rng = random.Random(52)
        labels = [l for wt in range(4) for l in H.basis_at(wt)]
        for _ in range(12):
            alpha = rand_coord(rng, degree=3)
            w = {rng.choice(labels): F(1)}
            rep = huang_conjugation_check(alpha, (1,), w, H, 5)
            assert rep, (alpha.poly, w)

    def test_virasoro_instance(self):
        alpha = CoordChange({1: F(1), 2: F(1, 2)})
        rep = huang_conjugation_check(alpha, (2,), {(2,): F(1)}, VIR, 4)
        assert rep


def test_gamma_series_expansion():
    # gamma_xi(z) = 1/(xi+z) - 1/xi = -z/xi^2 + z^2/xi^3 - ...
    g = gamma_series(F(2), 5)
    assert g.coeff(1) == F(-1, 4) and g.coeff(2) == F(1, 8)


def test_gamma_relation():
    for xi in (F(1), F(3), F(-1, 2)):
        for label in ((), (1,), (1, 1), (2, 1)):
            assert gamma_relation_check(xi, {label: F(1)}, H)
