"""The Schwarzian derivative and projective structures.

S f = f'''/f' - (3/2)(f''/f')^2 kills exactly the Moebius maps, obeys the
cocycle law S(f o g) = ((S f) o g) g'^2 + S g, and inverts: given a
polynomial Q one can solve S f = Q order by order (the uniformization of
a projective structure).
"""

from fractions import Fraction as F

from voablocks.schwarzian import (exp_minus_one_series, mobius_series,
                                  schwarzian, uniformize)
from voablocks.series import TruncSeries


def main():
    mob = mobius_series(F(1), F(2), F(3), F(7), 9)
    print("S((z+2)/(3z+7)) =", "0" if schwarzian(mob).is_zero() else "!?")

    f = TruncSeries.from_coeff_map("z", {1: F(1), 3: F(1)}, 8)
    s = schwarzian(f)
    print("S(z + z^3) =", [s.coeff(k) for k in range(5)], "...")

    # the exponential family: S(e^{az} - 1) is the constant -a^2/2; under
    # a -> 2 pi i this is the constant 2 pi^2 of the standard annulus
    # coordinate
    for a in (F(1), F(2), F(-1, 2)):
        print(f"S(e^({a}z) - 1) =", schwarzian(exp_minus_one_series(a, 10)).coeff(0))

    Q = TruncSeries.from_coeff_map("z", {0: F(6), 2: F(-72)}, 6)
    g = uniformize(Q)
    print("uniformize(6 - 72 z^2): f =",
          [g.coeff(k) for k in range(1, 6)], "(coefficients of z..z^5)")
    sg = schwarzian(g)
    w = min(sg.order, Q.order)
    print("  round trip S f - Q =",
          "0" if (sg - Q.truncate(w)).truncate(w).is_zero() else "!?")


if __name__ == "__main__":
    main()
