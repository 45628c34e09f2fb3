import itertools
import random
from fractions import Fraction

import pytest

from qhresidue.arrangement import (Arrangement, ArrangementError, DiagonalBasis, OrderedBasis, circuits,
                                   diagonal_basis, enumerate_bases, expansion_coefficients, extend_diagonal_basis,
                                   nbc_bases, residue_matrix, simple_fraction)
from qhresidue.numkernel import LinearForm, det, identity
from qhresidue.rootsystem import RootSystem

F = Fraction


def random_regular_point(arr, rng):
    while True:
        p = tuple(F(rng.randint(-40, 40), rng.randint(1, 9)) for _ in range(arr.rank))
        if all(f(p) != 0 for f in arr.forms):
            return p


def phi_at(sigma, p):
    out = F(1)
    for f in sigma.forms:
        out /= f(p)
    return out


def test_validation():
    with pytest.raises(ArrangementError):
        Arrangement(((1, 0), (1, 0)))
    with pytest.raises(ArrangementError):
        Arrangement(((1, 0), (0, 0)))
    with pytest.raises(ArrangementError):
        Arrangement(((1, 0), (0, 1)), order=(0, 0))
    with pytest.raises(ArrangementError):
        diagonal_basis(Arrangement(((1, 0), (2, 0))))


def test_proportional_forms_are_reported():
    arr = Arrangement(((1, 0), (2, 0), (0, 1)))
    assert arr.proportional_pairs() == [(0, 1)]


def test_su3_combinatorics():
    arr = RootSystem(3).arrangement()
    assert [b.indices for b in enumerate_bases(arr)] == [(0, 1), (0, 2), (1, 2)]
    assert circuits(arr) == [(0, 1, 2)]
    assert [b.label() for b in nbc_bases(arr)] == ["(1,2)", "(1,3)"]


def test_su3_diagonal_basis():
    ob = diagonal_basis(RootSystem(3).arrangement())
    assert [m.label() for m in ob.members] == ["(1,2)", "(1,3)"]
    assert ob.certificate == identity(2)


@pytest.mark.parametrize("n,count", [(2, 1), (3, 2), (4, 6), (5, 24)])
def test_diagonal_basis_sizes(n, count):
    # the NBC count for type A_{n-1} is (n-1)!
    if n == 5:
        ob = diagonal_basis(RootSystem(n).arrangement(), check=False)
    else:
        ob = diagonal_basis(RootSystem(n).arrangement())
    assert len(ob.members) == count


def test_all_orders_of_su3_give_identity_certificates():
    rs = RootSystem(3)
    for order in itertools.permutations(range(3)):
        ob = diagonal_basis(rs.arrangement(order))
        assert ob.is_identity()


def test_sampled_orders_of_su4():
    rs = RootSystem(4)
    rng = random.Random(11)
    orders = list(itertools.permutations(range(6)))
    for order in rng.sample(orders, 40):
        assert diagonal_basis(rs.arrangement(order)).is_identity()


def test_hand_expansion():
    arr = RootSystem(3).arrangement()
    ob = diagonal_basis(arr)
    sigma = OrderedBasis(arr, (1, 2))
    assert expansion_coefficients(ob, sigma) == (1, -1)


@pytest.mark.parametrize("n,seed", [(3, 0), (3, 1), (4, 0), (4, 7)])
def test_spanning_property(n, seed):
    arr = RootSystem(n).arrangement()
    ob = diagonal_basis(arr)
    rng = random.Random(seed)
    points = [random_regular_point(arr, rng) for _ in range(20)]
    for sigma in enumerate_bases(arr):
        coeffs = expansion_coefficients(ob, sigma)
        for p in points:
            rhs = sum((c * phi_at(tau, p) for c, tau in zip(coeffs, ob.members)), F(0))
            assert phi_at(sigma, p) == rhs


def test_spanning_for_a_generic_arrangement():
    arr = Arrangement(((1, 0), (0, 1), (1, -2), (2, 1), (1, 1)))
    ob = diagonal_basis(arr)
    assert len(ob.members) == 4  # (number of forms - 1) for a rank-2 generic arrangement
    rng = random.Random(3)
    for sigma in enumerate_bases(arr):
        coeffs = expansion_coefficients(ob, sigma)
        p = random_regular_point(arr, rng)
        assert phi_at(sigma, p) == sum((c * phi_at(t, p) for c, t in zip(coeffs, ob.members)), F(0))


def test_simple_fraction_values():
    arr = RootSystem(3).arrangement()
    phi = simple_fraction(OrderedBasis(arr, (0, 2)))
    assert abs(phi.evaluate([[0.5, 0.25]])[0] - 1 / (0.5 * 0.75)) < 1e-12


def test_residue_matrix_sees_the_linear_relation():
    # phi_(2,3) = phi_(1,2) - phi_(1,3), so the third column is the difference of the first two
    arr = RootSystem(3).arrangement()
    c = residue_matrix(enumerate_bases(arr))
    assert all(row[2] == row[0] - row[1] for row in c)
    assert det(c) == 0


# extension by a last element --------------------------------------------------------

def _random_case(rng, r):
    """A diagonal basis on rank r-1, a vector e1 and a lift into rank r."""
    if r == 1:
        small = DiagonalBasis((), ())
        lift = None
    else:
        while True:
            forms = {tuple(rng.randint(-3, 3) for _ in range(r - 1)) for _ in range(rng.randint(r - 1, r + 2))}
            forms = [f for f in forms if any(f)]
            if not forms:
                continue
            arr = Arrangement(tuple(LinearForm(f) for f in forms))
            if arr.span_rank() == r - 1 and not arr.proportional_pairs():
                break
        small = diagonal_basis(arr)
    e1 = tuple(rng.randint(-3, 3) for _ in range(r - 1)) + (rng.choice((1, 2, 3)),)
    if r > 1:
        # lifted forms vanish on a line that e1 does not annihilate
        while True:
            lift = [tuple(rng.randint(-2, 2) for _ in range(r)) for _ in range(r - 1)]
            if det(lift + [e1]) != 0:
                break
    return small, LinearForm(e1), lift


def test_extension_preserves_identity_certificate():
    rng = random.Random(2024)
    for case in range(25):
        r = (case % 3) + 1
        small, e1, lift = _random_case(rng, r)
        big, ob = extend_diagonal_basis(small, e1, lift)
        assert ob.is_identity()
        assert len(ob.members) == max(1, len(small.members))
        assert all(m.indices[-1] == ob.members[0].indices[-1] for m in ob.members)
