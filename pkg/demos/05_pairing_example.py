"""Residue pairing and its lattice-sum form on the built-in problems."""
from qhresidue.pairing import (amw_residue_block, amw_residue_form, numeric_block_check, residue_blocks,
                               residue_pairing, s_sum, su2_single_block, woodward_su3_example)


def main():
    p = su2_single_block()
    print("SU(2) single block: residue pairing", residue_pairing(p), " AMW form", amw_residue_form(p))
    value, tail = s_sum(p, "T")
    print(f"   lattice sum {value:.10f} vs exact {float(amw_residue_block(p, 'T')):.10f}")
    w = woodward_su3_example()
    for b in residue_blocks(w):
        print(f"SU(3) block {b.subgroup}/{b.fixed_point}: {b.value} (numeric {numeric_block_check(b).real:.12f})")
    print("SU(3) residue pairing", residue_pairing(w), " AMW form", amw_residue_form(w))


if __name__ == "__main__":
    main()
