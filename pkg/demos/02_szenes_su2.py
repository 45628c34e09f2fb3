"""Lattice sums over SU(2) weights: exact residue side against truncated sums."""
import math

from qhresidue.expr import parse_mero_expression as parse
from qhresidue.szenes import sun_case, szenes_lhs_extrapolated, verify_szenes


def main():
    cases = [("1/Y1^2", None, "weight"), ("exp(-1/2*Y1)/Y1^2", None, "weight"),
             ("1/Y1^2", None, "integer"), ("1/Y1^4", None, "weight")]
    for text, t, lattice in cases:
        case = sun_case(2, parse(text), t=t, lattice=lattice, box=10 ** 4)
        rep = verify_szenes(case)
        print(f"{text:>20} on {lattice:>7}: exact {rep.rhs}, box sum {rep.lhs:.12f}, "
              f"diff {rep.difference:.2e}, extrapolated {szenes_lhs_extrapolated(case):.12f}")
    # the raw box sum of 1/Y1^2 converges like 1/B
    print(f"predicted box-sum error for 1/Y1^2 at B = 10^4: {1 / (2 * math.pi ** 2 * 10 ** 4):.3e}")


if __name__ == "__main__":
    main()
