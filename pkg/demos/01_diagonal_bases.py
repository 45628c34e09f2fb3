"""Diagonal bases of the SU(n) positive-root arrangements and their certificates."""
from qhresidue.arrangement import OrderedBasis, diagonal_basis, enumerate_bases, expansion_coefficients
from qhresidue.rootsystem import RootSystem


def main():
    for n in (2, 3, 4):
        arr = RootSystem(n).arrangement()
        ob = diagonal_basis(arr)
        print(f"SU({n}): {len(arr.forms)} roots, {len(enumerate_bases(arr))} bases, "
              f"{len(ob.members)} diagonal members, identity certificate: {ob.is_identity()}")
        print("   members:", ", ".join(m.label() for m in ob.members))
    arr = RootSystem(3).arrangement()
    ob = diagonal_basis(arr)
    sigma = OrderedBasis(arr, (1, 2))
    coeffs = expansion_coefficients(ob, sigma)
    print(f"phi_(2,3) = ({coeffs[0]}) phi_(1,2) + ({coeffs[1]}) phi_(1,3)")


if __name__ == "__main__":
    main()
