import random
from fractions import Fraction

import pytest

from qhresidue.expr import parse_mero_expression as parse
from qhresidue.numkernel import as_vector, frac_str
from qhresidue.pairing import (Constants, FixedPointDatum, PairingError, PairingProblem, SubgroupDatum,
                               amw_lattice_sum, amw_residue_block, amw_residue_form, free_torus_example,
                               numeric_block_check, residue_block_value, residue_blocks, residue_pairing, s_sum,
                               su2_single_block, woodward_su3_example)
from qhresidue.rootsystem import RootSystem

F = Fraction


# SU(2), one block ---------------------------------------------------------------

def test_su2_single_block_values():
    p = su2_single_block()
    blocks = residue_blocks(p)
    assert [b.value for b in blocks] == [F(-1, 48)]
    assert residue_pairing(p) == F(-1, 48) * p.residue_constant()
    assert amw_residue_block(p, "T") == F(-1, 48)
    assert amw_residue_form(p) == F(-1, 96)


def test_su2_constants_scale_linearly():
    c = Constants(n1=3, n0p=2, k=5, vol_g_squared=7)
    p = su2_single_block(constants=c)
    assert residue_pairing(p) == F(-1, 48) * F(3, 2 * 2)
    assert amw_residue_form(p) == F(-1, 48) * F(5, 2 * 7)


def test_su2_lattice_sum_matches_residue():
    p = su2_single_block()
    value, tail = s_sum(p, "T")
    assert abs(value - (-1 / 48)) < 1e-6
    total, _ = amw_lattice_sum(p)
    assert abs(total - float(amw_residue_form(p))) < 1e-6


def test_su2_nonzero_mu():
    p = su2_single_block(mu=F(1, 4))
    exact = amw_residue_block(p, "T")
    value, _ = s_sum(p, "T")
    assert abs(value - float(exact)) < 1e-6


def test_su2_periodicity():
    p = su2_single_block()
    (b,) = residue_blocks(p)
    alpha = b.sigma[0].coeffs
    for k in (-3, -1, 1, 2):
        shifted = tuple(m + k * a for m, a in zip(p.block("T").mu(p.fixed_points[0]), alpha))
        assert residue_block_value(p, "T", b.sigma, "F", shifted) == b.value


# free torus action -----------------------------------------------------------------

def test_free_torus_gives_value():
    p = free_torus_example(rank=2, value=F(7, 3))
    assert residue_pairing(p) == F(7, 3)
    assert amw_residue_form(p) == F(7, 3)
    assert amw_lattice_sum(p)[0] == pytest.approx(7 / 3)


# three circles in SU(3) --------------------------------------------------------------

@pytest.fixture(scope="module")
def woodward():
    return woodward_su3_example()


def test_woodward_blocks(woodward):
    blocks = residue_blocks(woodward)
    assert [b.value for b in blocks] == [F(1, 18), F(1, 18), F(-1, 6)]
    assert residue_pairing(woodward) == F(-1, 108)
    assert amw_residue_form(woodward) == F(-1, 432)


def test_woodward_numeric_blocks(woodward):
    for b in residue_blocks(woodward):
        assert abs(numeric_block_check(b) - float(b.value)) < 1e-8


def test_woodward_periodicity(woodward):
    rng = random.Random(1)
    for b in residue_blocks(woodward):
        fp = next(f for f in woodward.fixed_points if f.label == b.fixed_point)
        mu = woodward.block(b.subgroup).mu(fp)
        for _ in range(3):
            ks = [rng.randint(-4, 4) for _ in b.sigma]
            shift = [sum(k * a.coeffs[i] for k, a in zip(ks, b.sigma)) for i in range(len(mu))]
            shifted = tuple(m + s for m, s in zip(mu, shift))
            assert residue_block_value(woodward, b.subgroup, b.sigma, b.fixed_point, shifted) == b.value


def test_woodward_transform_consistency(woodward):
    for s in woodward.subgroups:
        exact = amw_residue_block(woodward, s.id)
        value, _ = s_sum(woodward, s.id)
        assert abs(value - float(exact)) < 1e-6


def test_parallel_blocks_agree(woodward):
    assert [b.value for b in residue_blocks(woodward, jobs=2)] == [b.value for b in residue_blocks(woodward)]


# validation ------------------------------------------------------------------------

def test_fixed_point_needs_exactly_one_contribution():
    with pytest.raises(PairingError):
        FixedPointDatum("F", "T", (0,))
    with pytest.raises(PairingError):
        FixedPointDatum("F", "T", (0,), h=parse("1/Y1^4"), eta=parse("1/Y1^4"))


def test_unknown_subgroup_reference():
    with pytest.raises(PairingError):
        PairingProblem(RootSystem(2), [SubgroupDatum("T", ((1,),))],
                       [FixedPointDatum("F", "S", (0,), h=parse("1/Y1^4"))])


def test_weight_vanishing_on_subgroup():
    rs = RootSystem(3)
    sub = SubgroupDatum("S", ((1, -1),), arrangement="restricted_positive_roots")
    # Y1 + Y2 vanishes on (1, -1)
    fp = FixedPointDatum("F", "S", (0, 0), (rs.positive_roots[2],), eta=parse("1/Y1^4"))
    p = PairingProblem(rs, [sub], [fp])
    with pytest.raises(PairingError):
        residue_pairing(p)


def test_zero_constant_rejected():
    with pytest.raises(PairingError):
        Constants(n1=0)


def test_mu_restriction(woodward):
    blk = woodward.block("U1_0")
    fp = woodward.fixed_points[0]
    assert blk.mu(fp) == (F(1, 3),)
    assert frac_str(as_vector(blk.mu(fp))[0]) == "1/3"
