"""SU(3): general and symmetrized residue sides, checked against box sums."""
from fractions import Fraction

from qhresidue.expr import parse_mero_expression as parse
from qhresidue.szenes import sun_case, szenes_sun_rhs, verify_szenes


def main():
    g = parse("1/(Y1^2*Y2^2*(Y1 + Y2)^2)")
    for gamma in [(0, 0), (Fraction(1, 3), Fraction(2, 3)), (Fraction(1, 2), 0)]:
        t = tuple(-Fraction(c) for c in gamma)
        rep = verify_szenes(sun_case(3, g, t=t, box=300))
        sym = szenes_sun_rhs(3, g, gamma)
        print(f"gamma = ({', '.join(str(Fraction(c)) for c in gamma)}): general {rep.rhs}, symmetrized {sym}, "
              f"box sum {rep.lhs:.3e}, diff {rep.difference:.1e}")


if __name__ == "__main__":
    main()
