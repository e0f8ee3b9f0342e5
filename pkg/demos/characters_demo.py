"""Graded characters as q-series.

The torus character of a module M is the trace of q^{L0} over the graded
pieces.  For the rank-one free boson the vacuum character is the
partition generating function; for the Virasoro vacuum module the
singular vector at weight 1 removes all parts equal to 1.  The modular
normalization multiplies by q^{-c/24}.
"""

from fractions import Fraction as F

from voablocks.models import fock_module, heisenberg_model, virasoro_model
from voablocks.sewing import normalize_character, torus_character


def main():
    H = heisenberg_model()
    VIR = virasoro_model(F(1, 2))

    ch = torus_character(H, (), 12)
    print("Heisenberg vacuum character (coefficients = partition numbers):")
    print(" ", list(ch.coeffs))

    chv = torus_character(VIR, (), 12)
    print("Virasoro c=1/2 vacuum character (partitions into parts >= 2):")
    print(" ", list(chv.coeffs))

    mu = F(2, 3)
    chf = torus_character(fock_module(H, mu), (), 8)
    print(f"Fock module F_mu, mu = {mu}: same coefficients, offset "
          f"Delta = mu^2/2 = {chf.delta}")

    nh = normalize_character(ch, F(1))
    nv = normalize_character(chv, VIR.c)
    print("normalized offsets (Delta - c/24):",
          nh.offset, "for the boson,", nv.offset, "for Virasoro c=1/2")


if __name__ == "__main__":
    main()
