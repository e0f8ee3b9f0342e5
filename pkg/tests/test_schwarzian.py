"""Schwarzian calculus: Moebius kernel, cocycle identities, transition
law, uniformization round trips."""

import random
from fractions import Fraction as F

import pytest

from voablocks.models import virasoro_model
from voablocks.coordchange import CoordChange
from voablocks.schwarzian import (antisymmetry_check, cocycle_check,
                                  conformal_transition, exp_minus_one_series,
                                  mobius_series, schwarzian,
                                  triple_cocycle_check, uniformize)
from voablocks.series import TruncSeries


def rand_frac(rng, nonzero=False):
    n = rng.randint(1, 6) if nonzero else rng.randint(-6, 6)
    return F(n, rng.randint(1, 4))


def rand_series(rng, order=10):
    cmap = {1: rand_frac(rng, nonzero=True)}
    for k in range(2, 5):
        c = rand_frac(rng)
        if c:
            cmap[k] = c
    return TruncSeries.from_coeff_map("z", cmap, order)


def test_mobius_kill():
    rng = random.Random(1)
    for _ in range(50):
        a, b, c = rand_frac(rng), rand_frac(rng), rand_frac(rng)
        d = rand_frac(rng, nonzero=True)
        if a * d - b * c == 0:
            continue
        s = schwarzian(mobius_series(a, b, c, d, 9))
        assert s.is_zero(), (a, b, c, d)


def test_chain_rule_random():
    rng = random.Random(166)
    for _ in range(50):
        assert cocycle_check(rand_series(rng), rand_series(rng))


def test_antisymmetry_random():
    rng = random.Random(167)
    for _ in range(50):
        assert antisymmetry_check(rand_series(rng))


def test_triple_cocycle_random():
    rng = random.Random(260)
    for _ in range(50):
        assert triple_cocycle_check(rand_series(rng), rand_series(rng),
                                    rand_series(rng))


def test_exponential_schwarzian():
    # S(e^{az} - 1) = -a^2/2, constant
    for a in (F(1), F(2), F(-3), F(1, 2), F(5, 3), F(-2, 7),
              F(4), F(-1, 4), F(7, 2), F(3, 5)):
        s = schwarzian(exp_minus_one_series(a, 10))
        assert s.coeff(0) == -a * a / 2
        assert all(s.coeff(n) == 0 for n in range(1, s.order))


def test_known_expansion():
    # S(z + z^3) = 6 - 72 z^2 + 378 z^4 - ... (cross-checked symbolically)
    s = schwarzian(TruncSeries.from_coeff_map("z", {1: F(1), 3: F(1)}, 8))
    assert s.coeff(0) == 6 and s.coeff(1) == 0
    assert s.coeff(2) == -72 and s.coeff(4) == 378


def test_uniformize_roundtrip():
    rng = random.Random(168)
    for _ in range(20):
        cmap = {k: rand_frac(rng) for k in range(0, 5)}
        Q = TruncSeries.from_coeff_map("z", cmap, 8)
        f = uniformize(Q)  # verified internally against schwarzian
        s = schwarzian(f)
        w = min(s.order, 8)
        assert (s - Q.truncate(w)).truncate(w).is_zero()


def test_conformal_transition():
    model = virasoro_model(F(1, 2))
    rho = CoordChange({1: F(2), 2: F(1), 3: F(1, 3)})
    s_c, s_1 = conformal_transition(rho, model)
    assert s_c == 4
    c2 = rho.coeffs(2)[2]
    assert s_1 == model.c / 2 * c2
