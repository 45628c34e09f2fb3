import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhresidue.numkernel import (LatticeBasis, LatticeError, LinearForm, Poly, as_fraction, coset_reps_in_box,
                                 det, dual_lattice, identity, integer_kernel, inverse, lattice_quotient, matmul,
                                 matvec, natural_dual, rank, restrict_lattice, snf, solve, transpose)
from qhresidue.rootsystem import RootSystem

F = Fraction

small_ints = st.integers(min_value=-5, max_value=5)


def square(n):
    return st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n)


def nonsingular(n):
    return square(n).filter(lambda m: det(m) != 0)


# exact scalars -------------------------------------------------------------

def test_as_fraction_accepts_exact_inputs():
    assert as_fraction("3/6") == F(1, 2)
    assert as_fraction(4) == F(4)
    assert as_fraction(F(2, 3)) == F(2, 3)


@pytest.mark.parametrize("bad", [0.5, True, "x"])
def test_as_fraction_refuses_inexact(bad):
    with pytest.raises((TypeError, ValueError)):
        as_fraction(bad)


# linear algebra --------------------------------------------------------------

@given(nonsingular(3))
def test_inverse_is_two_sided(m):
    inv = inverse(m)
    assert matmul(m, inv) == identity(3)
    assert matmul(inv, m) == identity(3)


@given(nonsingular(3), st.lists(small_ints, min_size=3, max_size=3))
def test_solve_round_trip(m, b):
    x = solve(m, b)
    assert matvec(m, x) == tuple(F(v) for v in b)


def test_rank_of_dependent_rows():
    assert rank(((1, 2, 3), (2, 4, 6), (0, 1, 1))) == 2


# linear forms and polynomials ----------------------------------------------

def test_linear_form_substitution():
    y1, y2 = LinearForm.coordinate(0, 2), LinearForm.coordinate(1, 2)
    f = LinearForm((2, -1))
    # Y1 -> Y1 + Y2, Y2 -> Y2
    assert f.substitute((y1 + y2, y2)) == LinearForm((2, 1))
    assert f((F(1, 2), 3)) == -2


def test_poly_product_and_evaluation():
    x = LinearForm((1, 0)).to_poly()
    y = LinearForm((0, 1)).to_poly()
    p = (x + y) * (x - y)
    assert p == x * x - y * y
    assert p.evaluate_exact((F(3), F(2))) == 5
    assert p.degree() == 2


@given(st.lists(small_ints, min_size=2, max_size=2), st.lists(small_ints, min_size=2, max_size=2))
def test_poly_substitution_matches_evaluation(a, b):
    p = Poly({(2, 0): F(1), (1, 1): F(-3), (0, 0): F(2)}, 2)
    images = (LinearForm(a), LinearForm(b))
    point = (F(2, 3), F(-5, 7))
    pulled = (images[0](point), images[1](point))
    assert p.substitute(images).evaluate_exact(point) == p.evaluate_exact(pulled)


# Smith normal form -----------------------------------------------------------

@settings(max_examples=60)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_snf_is_a_valid_decomposition(m, n, data):
    a = data.draw(st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=m, max_size=m))
    diag, u, v = snf(a)
    d = [[diag[i] if i == j and i < len(diag) else 0 for j in range(n)] for i in range(m)]
    assert [list(r) for r in matmul(matmul(u, a), v)] == d
    assert abs(det(u)) == 1 and abs(det(v)) == 1
    nz = [x for x in diag if x]
    assert all(x > 0 for x in diag if x)
    assert all(b % a_ == 0 for a_, b in zip(nz, nz[1:]))
    assert len(nz) == rank(a)


def test_snf_reference_example():
    # gamma12, gamma13 in fundamental-weight coordinates of SU(3)
    diag, _, _ = snf(((2, 1), (-1, 1)))
    assert list(diag) == [1, 3]


# lattice quotients -----------------------------------------------------------

def brute_force_cosets(gens, box=12):
    """Count Z^r / span(gens) by reducing a box of integer points."""
    sub = transpose(tuple(tuple(F(x) for x in g) for g in gens))
    inv = inverse(sub)
    reps = set()
    r = len(gens)
    for p in itertools.product(range(-box, box + 1), repeat=r):
        n = matvec(inv, p)
        frac = tuple(x - math.floor(x) for x in n)
        reps.add(frac)
    return len(reps)


@settings(max_examples=30, deadline=None)
@given(nonsingular(2))
def test_quotient_index_is_determinant(m):
    cols = transpose(m)
    z2 = LatticeBasis(identity(2))
    q = lattice_quotient(z2, cols)
    assert q.index == abs(det(m))
    assert len(set(q.representatives)) == q.index
    if q.index <= 20:
        assert brute_force_cosets(cols) == q.index


def test_quotient_reference_example():
    z2 = LatticeBasis(identity(2))
    q = lattice_quotient(z2, ((2, -1), (1, 1)))
    assert q.index == 3


def test_quotient_rejects_non_sublattice():
    z2 = LatticeBasis(identity(2))
    with pytest.raises(LatticeError):
        lattice_quotient(z2, ((F(1, 2), 0), (0, 1)))
    with pytest.raises(LatticeError):
        lattice_quotient(z2, ((1, 2), (2, 4)))


@settings(max_examples=30, deadline=None)
@given(nonsingular(2), st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=6), min_size=2, max_size=2))
def test_coset_reps_in_box_property(m, t):
    sigma = transpose(m)
    z2 = LatticeBasis(identity(2))
    reps = coset_reps_in_box(z2, sigma, t)
    assert reps.index == abs(det(m))
    sub_inv = inverse(m)
    classes = set()
    for u in reps.representatives:
        assert all(x.denominator == 1 for x in u)
        n = matvec(sub_inv, tuple(a - b for a, b in zip(t, u)))
        assert all(0 <= x < 1 for x in n)
        classes.add(tuple(x - math.floor(x) for x in matvec(sub_inv, u)))
    assert len(classes) == reps.index
    assert list(reps.representatives) == sorted(reps.representatives)


# dual lattices ---------------------------------------------------------------

def test_su2_dual_of_root_lattice_is_half_root():
    rs = RootSystem(2)
    m = dual_lattice(rs.integer_lattice)
    alpha = rs.integer_lattice.generators[0]
    assert m.same_lattice(LatticeBasis.from_generators([tuple(x / 2 for x in alpha)], rs.gram))
    assert rs.inner(m.generators[0], alpha) == 1


def test_self_dual_square_lattice():
    z3 = LatticeBasis(identity(3))
    assert dual_lattice(z3).same_lattice(z3)


def test_su3_root_lattice_dual_is_weight_lattice():
    rs = RootSystem(3)
    m = dual_lattice(rs.integer_lattice)
    assert m.same_lattice(rs.weight_lattice)
    for w in m.generators:
        for e in rs.integer_lattice.generators:
            assert rs.inner(w, e).denominator == 1


@settings(max_examples=30, deadline=None)
@given(nonsingular(2))
def test_dual_is_an_involution(m):
    gram = ((2, 1), (1, 3))
    n = LatticeBasis(m, gram)
    assert dual_lattice(dual_lattice(n)).same_lattice(n)
    for a in dual_lattice(n).generators:
        for b in n.generators:
            assert n.inner(a, b).denominator == 1


def test_natural_dual_pairs_integrally():
    n = LatticeBasis(((2, 1), (0, 3)))
    m = natural_dual(n)
    for a in m.generators:
        for b in n.generators:
            assert sum(x * y for x, y in zip(a, b)).denominator == 1
    assert abs(det(m.vectors) * det(n.vectors)) == 1


# kernels and restriction -------------------------------------------------------

def test_integer_kernel():
    ker = integer_kernel(((1, 1, 1),), 3)
    assert len(ker) == 2
    for k in ker:
        assert sum(k) == 0


def test_restrict_weight_lattice_to_rho_line():
    rs = RootSystem(3)
    # weight lattice Z^2 meets the line through rho = (1,1) in Z*(1,1)
    sub = restrict_lattice(rs.weight_lattice, [(1, 1)])
    assert sub.rank == 1
    assert abs(sub.vectors[0][0]) == 1
    assert sub.gram == ((rs.inner((1, 1), (1, 1)),),)


def test_restrict_integer_lattice_to_lines():
    rs = RootSystem(3)
    # rho = alpha1 + alpha2 lies in the root lattice; omega1 = (2 alpha1 + alpha2)/3 does not
    assert abs(restrict_lattice(rs.integer_lattice, [(1, 1)]).vectors[0][0]) == 1
    assert abs(restrict_lattice(rs.integer_lattice, [(1, 0)]).vectors[0][0]) == 3


# index equality: M / M_sigma = M' / M'_sigma' -------------------------------------

def test_index_equality_after_adjoining_a_vector():
    import random
    rng = random.Random(5)
    for _ in range(25):
        r = rng.choice((1, 2, 3))
        while True:
            mp = [[rng.randint(-5, 5) for _ in range(r - 1)] for _ in range(r - 1)]
            if r == 1 or det(mp) != 0:
                break
        while True:
            coeff = [[rng.randint(-3, 3) for _ in range(r - 1)] for _ in range(r - 1)]
            if r == 1 or det(coeff) != 0:
                break
        mprime_gens = transpose(mp) if r > 1 else ()
        sigma_prime = [matvec(mp, c) for c in transpose(coeff)] if r > 1 else []
        e1 = [rng.randint(-5, 5) for _ in range(r - 1)] + [rng.choice((1, 2, 3))]
        big_gens = [tuple(g) + (0,) for g in mprime_gens] + [tuple(e1)]
        m = LatticeBasis.from_generators(big_gens)
        sigma = [tuple(s) + (0,) for s in sigma_prime] + [tuple(e1)]
        big = lattice_quotient(m, sigma).index
        small = lattice_quotient(LatticeBasis.from_generators(mprime_gens), sigma_prime).index if r > 1 else 1
        assert big == small
