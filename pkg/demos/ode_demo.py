"""A simple-pole ODE worked end to end.

q dpsi/dq = (q/(1-q)) psi is solved by psi = 1/(1-q), whose mode
recursion gives all coefficients equal to 1.  We run the exact
recursion, certify a convergence radius from the majorant bound, and
cross-check a floating-point continuation against the closed form.
"""

from fractions import Fraction as F

from voablocks.odepole import (PoleODE, formal_solve, numeric_continue,
                               radius_estimate)
from voablocks.series import TruncSeries


def main():
    order = 30
    a = TruncSeries.from_coeff_map("q", {k: F(1) for k in range(1, order)},
                                   order)
    ode = PoleODE([[a]])

    sol = formal_solve(ode, {0: [F(1)]}, order - 1)
    print("first modes of the formal solution:",
          [v[0] for v in sol.modes[:6]], "...")

    est = radius_estimate(ode, F(1, 2), majorant=(F(1), F(1)), solution=sol)
    print(f"radius certificate: alpha = {est.alpha}, gamma = {est.gamma}, "
          f"r0 = {est.r0} (growth inequality checked on "
          f"{est.growth_checked} modes)")

    val, err = numeric_continue(ode, [1.0 / 0.95], [0.05, 0.3], steps=400)
    print(f"continued 1/(1-q) from q=0.05 to q=0.3: {val[0]:.12f}")
    print(f"closed form 1/0.7 = {1.0 / 0.7:.12f}, "
          f"Richardson estimate {err:.2e}")


if __name__ == "__main__":
    main()
