"""Weyl dimensions and regular weights for small SU(n)."""
from qhresidue.rootsystem import RootSystem


def fmt(v):
    return "(" + ", ".join(str(x) for x in v) + ")"


def main():
    su3 = RootSystem(3)
    for lam in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (3, 0), (2, 2)]:
        print(f"SU(3) {lam}: dim {su3.weyl_dim(lam)}")
    su4 = RootSystem(4)
    print("SU(4) adjoint:", su4.weyl_dim((1, 0, 1)))
    print("SU(4) rho:", fmt(su4.rho), " |W| =", su4.weyl_order)
    print("dominant regular SU(3) weights in box 2:", ", ".join(fmt(w) for w in su3.dominant_regular_weights(2)))


if __name__ == "__main__":
    main()
