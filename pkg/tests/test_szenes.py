import math
from fractions import Fraction

import pytest

from qhresidue.expr import parse_mero_expression as parse
from qhresidue.numkernel import LatticeBasis, identity
from qhresidue.arrangement import Arrangement
from qhresidue.rootsystem import RootSystem
from qhresidue.szenes import (SzenesCase, SzenesError, f_t_sigma, split_exponent, sun_case, sun_integrand,
                              szenes_lhs_extrapolated, szenes_lhs_truncated, szenes_rhs, szenes_rhs_terms,
                              szenes_sun_rhs, verify_szenes)

F = Fraction


def zeta(s, terms=200000):
    return sum(1 / k ** s for k in range(1, terms))


# exact right-hand sides -------------------------------------------------------

def test_su2_weight_lattice_inverse_square():
    case = sun_case(2, parse("1/Y1^2"), box=100)
    assert szenes_rhs(case) == F(-1, 12)
    assert szenes_sun_rhs(2, parse("1/Y1^2"), (0,)) == F(-1, 12)


def test_su2_half_shift():
    case = sun_case(2, parse("1/Y1^2"), t=(F(-1, 2),), box=100)
    assert szenes_rhs(case) == F(1, 24)
    assert szenes_sun_rhs(2, parse("1/Y1^2"), (F(1, 2),)) == F(1, 24)


def test_exponential_factor_moves_into_the_character():
    case = sun_case(2, parse("exp(-1/2*Y1)/Y1^2"), box=100)
    assert case.t == (F(-1, 2),)
    assert not case.f.has_exponential()
    assert szenes_rhs(case) == F(1, 24)


def test_su2_integer_lattice_has_two_cosets():
    case = sun_case(2, parse("1/Y1^2"), lattice="integer", box=100)
    kernel = f_t_sigma(case.t, case.basis.members[0].forms, case.dual)
    assert len(kernel.terms) == 2
    assert szenes_rhs(case) == F(-1, 48)


def test_su2_fourth_power():
    assert szenes_rhs(sun_case(2, parse("1/Y1^4"), box=10)) == F(1, 720)
    assert szenes_sun_rhs(2, parse("1/Y1^4"), (0,)) == F(1, 720)


def test_odd_power_vanishes():
    assert szenes_sun_rhs(2, parse("1/Y1^3"), (0,)) == 0
    assert szenes_rhs(sun_case(2, parse("1/Y1^3"), box=10)) == 0


@pytest.mark.parametrize("gamma,expected", [((0, 0), F(-1, 30240)), ((F(1, 3), F(2, 3)), F(-53, 2449440)),
                                            ((F(1, 2), 0), F(1, 96768))])
def test_su3_both_forms_agree(gamma, expected):
    g = parse("1/(Y1^2*Y2^2*(Y1 + Y2)^2)")
    t = tuple(-c for c in gamma)
    for order in [(0, 1, 2), (2, 1, 0)]:
        assert szenes_rhs(sun_case(3, g, t=t, order=order, box=10)) == expected
    assert szenes_sun_rhs(3, g, gamma) == expected


def test_rhs_terms_follow_basis_order():
    case = sun_case(3, parse("1/(Y1^2*Y2^2*(Y1 + Y2)^2)"), box=10)
    terms = szenes_rhs_terms(case)
    assert len(terms) == 2 and sum(terms) == szenes_rhs(case)


def test_rhs_is_independent_of_jobs():
    case = sun_case(3, parse("1/(Y1^2*Y2^2*(Y1 + Y2)^2)"), box=10)
    assert szenes_rhs(case, jobs=2) == szenes_rhs(case)


# truncated left-hand sides ------------------------------------------------------

def test_lhs_against_zeta_values():
    # sum over n != 0 of 1/(2 pi i n)^2 = -2 zeta(2) / (4 pi^2)
    lhs, _ = szenes_lhs_truncated(sun_case(2, parse("1/Y1^2"), box=2000))
    assert abs(lhs - (-2 * zeta(2, 2001) / (4 * math.pi ** 2))) < 1e-12


def test_lhs_truncation_error_matches_tail_estimate():
    # the box sum misses sum_{|n| > B} 1/(2 pi i n)^2 ~ -1/(2 pi^2 B)
    box = 10 ** 4
    lhs, tail = szenes_lhs_truncated(sun_case(2, parse("1/Y1^2"), box=box))
    err = lhs - (-1 / 12)
    assert err > 0
    assert abs(err - 1 / (2 * math.pi ** 2 * box)) < 1e-9
    # the outermost shell underestimates the remainder by a factor of order B
    assert tail < err


def test_fourth_power_lhs_meets_tolerance():
    rep = verify_szenes(sun_case(2, parse("1/Y1^4"), box=10 ** 4))
    assert rep.passed and rep.difference < 1e-12


def test_half_shift_lhs_meets_tolerance():
    rep = verify_szenes(sun_case(2, parse("1/Y1^2"), t=(F(-1, 2),), box=10 ** 4))
    assert rep.passed and rep.difference < 1e-9


def test_extrapolation_recovers_the_limit():
    case = sun_case(2, parse("1/Y1^2"), box=10 ** 4)
    assert abs(szenes_lhs_extrapolated(case) + 1 / 12) < 1e-8


def test_su3_lhs():
    g = parse("1/(Y1^2*Y2^2*(Y1 + Y2)^2)")
    for gamma in [(0, 0), (F(1, 3), F(2, 3))]:
        rep = verify_szenes(sun_case(3, g, t=tuple(-c for c in gamma), box=300))
        assert rep.passed and rep.difference < 1e-10


def test_generic_lattice_and_arrangement():
    # Z^2 with forms Y1, Y2, Y1 + Y2 (the same as SU(3) weights but with identity gram)
    arr = Arrangement(((1, 0), (0, 1), (1, 1)))
    case = SzenesCase(LatticeBasis(identity(2)), arr, parse("1/(Y1^2*Y2^2*(Y1 + Y2)^2)"), box=300)
    rep = verify_szenes(case)
    assert rep.passed
    assert rep.rhs == F(-1, 30240)


# preconditions ----------------------------------------------------------------------

def test_slow_decay_is_rejected():
    with pytest.raises(SzenesError):
        szenes_lhs_truncated(sun_case(2, parse("1/Y1"), box=10))


def test_foreign_poles_are_rejected():
    arr = RootSystem(3).arrangement()
    case = SzenesCase(RootSystem(3).weight_lattice, arr, parse("1/(Y1^2*Y2^2*(Y1 - Y2)^2)"), box=10)
    with pytest.raises(SzenesError):
        szenes_lhs_truncated(case)


def test_rank_mismatch():
    with pytest.raises(SzenesError):
        SzenesCase(RootSystem(3).weight_lattice, RootSystem(3).arrangement(), parse("1/Y1^2"))


def test_mixed_exponentials_cannot_split():
    with pytest.raises(SzenesError):
        split_exponent(parse("exp(Y1)/Y1^2 + 1/Y1^2"))


def test_sun_gamma_must_be_reduced():
    rs = RootSystem(2)
    with pytest.raises(SzenesError):
        sun_integrand(rs, parse("1/Y1^2"), (F(3, 2),))
