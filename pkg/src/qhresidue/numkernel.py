"""Exact arithmetic substrate: rationals, linear forms, polynomials, lattices.

Rationals are :class:`fractions.Fraction`.  Vectors and matrices are plain
tuples of Fractions; matrices are stored row-major as tuples of rows.  All
lattice data lives in one fixed ambient coordinate system and carries its
inner product explicitly as a Gram matrix.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple  # tuple[Fraction, ...]
Matrix = tuple  # tuple[Vector, ...], row-major


class LatticeError(ValueError):
    """Raised for malformed lattice input (singular bases, non-sublattices)."""


def as_fraction(x) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused: every constant in this package must be exact.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            raise ValueError(f"not a rational literal: {x!r}") from None
    raise TypeError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


def as_vector(xs: Iterable) -> Vector:
    return tuple(as_fraction(x) for x in xs)


def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(as_vector(r) for r in rows)


def frac_str(x: Fraction) -> str:
    """Serialize as ``"p/q"`` (``"p"`` for integers)."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# --------------------------------------------------------------------------
# small exact linear algebra
# --------------------------------------------------------------------------

def transpose(a: Matrix) -> Matrix:
    if not a:
        return ()
    return tuple(zip(*a))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def matvec(a: Matrix, v: Sequence) -> Vector:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((Fraction(x) * y for x, y in zip(u, v)), Fraction(0))


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def _row_reduce(a: Matrix):
    """Return (reduced rows, pivot columns, determinant sign/scale factor)."""
    m = [list(map(Fraction, r)) for r in a]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots = []
    det = Fraction(1)
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            det = Fraction(0)
            continue
        if p != r:
            m[r], m[p] = m[p], m[r]
            det = -det
        piv = m[r][c]
        det *= piv
        m[r] = [x / piv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots, det


def rank(a: Matrix) -> int:
    if not a or not a[0]:
        return 0
    return len(_row_reduce(a)[1])


def det(a: Matrix) -> Fraction:
    n = len(a)
    if n == 0:
        return Fraction(1)
    if any(len(r) != n for r in a):
        raise ValueError("determinant of a non-square matrix")
    _, pivots, d = _row_reduce(a)
    return d if len(pivots) == n else Fraction(0)


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = tuple(tuple(a[i]) + identity(n)[i] for i in range(n))
    m, pivots, _ = _row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise LatticeError("matrix is singular")
    return tuple(tuple(row[n:]) for row in m)


def solve(a: Matrix, b: Sequence) -> Vector:
    """Solve ``a @ x = b`` for square invertible ``a``."""
    return matvec(inverse(a), as_vector(b))


def columns_to_matrix(cols: Sequence[Sequence]) -> Matrix:
    """Build a matrix whose columns are the given vectors."""
    return transpose(tuple(as_vector(c) for c in cols))


# --------------------------------------------------------------------------
# linear forms and polynomials
# --------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class LinearForm:
    """A rational covector: ``sum(coeffs[j] * Y_{j+1})``."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", as_vector(self.coeffs))

    @classmethod
    def zero(cls, r: int) -> "LinearForm":
        return cls((0,) * r)

    @classmethod
    def coordinate(cls, j: int, r: int) -> "LinearForm":
        """The coordinate form ``Y_{j+1}`` (0-based ``j``)."""
        return cls(tuple(int(i == j) for i in range(r)))

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def support(self) -> tuple:
        return tuple(i for i, c in enumerate(self.coeffs) if c != 0)

    def __call__(self, point: Sequence) -> Fraction:
        return dot(self.coeffs, point)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        _check_rank(self, other)
        return LinearForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        _check_rank(self, other)
        return LinearForm(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "LinearForm":
        return LinearForm(tuple(-a for a in self.coeffs))

    def scale(self, c) -> "LinearForm":
        c = as_fraction(c)
        return LinearForm(tuple(c * a for a in self.coeffs))

    def substitute(self, images: Sequence["LinearForm"]) -> "LinearForm":
        """Compose with the linear change of variables ``Y_j = images[j]``."""
        if len(images) != self.rank:
            raise ValueError("substitution needs one image per variable")
        r = images[0].rank if images else 0
        out = [Fraction(0)] * r
        for c, img in zip(self.coeffs, images):
            if c:
                for i, v in enumerate(img.coeffs):
                    out[i] += c * v
        return LinearForm(tuple(out))

    def to_poly(self) -> "Poly":
        r = self.rank
        return Poly({tuple(int(i == j) for i in range(r)): c for j, c in enumerate(self.coeffs) if c}, r)

    def __str__(self) -> str:
        return format_linear(self.coeffs)


def _check_rank(a: LinearForm, b: LinearForm) -> None:
    if a.rank != b.rank:
        raise ValueError(f"rank mismatch: {a.rank} vs {b.rank}")


def format_linear(coeffs: Sequence, var: str = "Y") -> str:
    parts = []
    for j, c in enumerate(coeffs):
        if c == 0:
            continue
        mag = abs(c)
        body = f"{var}{j + 1}" if mag == 1 else f"{frac_str(mag)}*{var}{j + 1}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts) if parts else "0"


class Poly:
    """Sparse polynomial with Fraction coefficients in ``nvars`` variables.

    ``terms`` maps exponent tuples to nonzero coefficients.
    """

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: dict | None = None, nvars: int = 0):
        self.nvars = nvars
        self.terms = {}
        for e, c in (terms or {}).items():
            c = as_fraction(c)
            if c:
                if len(e) != nvars:
                    raise ValueError("exponent length does not match nvars")
                self.terms[tuple(e)] = self.terms.get(tuple(e), Fraction(0)) + c
        self.terms = {e: c for e, c in self.terms.items() if c}

    @classmethod
    def const(cls, c, nvars: int) -> "Poly":
        return cls({(0,) * nvars: c}, nvars)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def min_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=0)

    def constant_value(self):
        """Return the value if the polynomial is a constant, else None."""
        if not self.terms:
            return Fraction(0)
        if set(self.terms) == {(0,) * self.nvars}:
            return self.terms[(0,) * self.nvars]
        return None

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"Poly({self.terms!r}, {self.nvars})"

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return Poly(out, self.nvars)

    def __neg__(self) -> "Poly":
        return Poly({e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c) -> "Poly":
        c = as_fraction(c)
        return Poly({e: c * v for e, v in self.terms.items()}, self.nvars)

    def __mul__(self, other: "Poly") -> "Poly":
        if self.nvars != other.nvars:
            raise ValueError("nvars mismatch")
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return Poly(out, self.nvars)

    def __pow__(self, k: int) -> "Poly":
        result = Poly.const(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def substitute(self, images: Sequence[LinearForm]) -> "Poly":
        """Compose with ``Y_j = images[j]`` (linear forms in new variables)."""
        if len(images) != self.nvars:
            raise ValueError("substitution needs one image per variable")
        nv = images[0].rank if images else 0
        img_polys = [f.to_poly() for f in images]
        cache: dict = {}

        def power(j, k):
            if (j, k) not in cache:
                cache[(j, k)] = img_polys[j] ** k
            return cache[(j, k)]

        out = Poly({}, nv)
        for e, c in self.terms.items():
            mono = Poly.const(c, nv)
            for j, k in enumerate(e):
                if k:
                    mono = mono * power(j, k)
            out = out + mono
        return out

    def split_variable(self, k: int) -> dict:
        """Group by the exponent of variable ``k``: {power: Poly without var k}."""
        out: dict = {}
        for e, c in self.terms.items():
            rest = e[:k] + e[k + 1:]
            out.setdefault(e[k], {})[rest] = c
        return {p: Poly(t, self.nvars - 1) for p, t in out.items()}

    def evaluate(self, point):
        """Evaluate at a point; works with numpy arrays of shape (..., nvars)."""
        import numpy as np

        point = np.asarray(point)
        total = np.zeros(point.shape[:-1], dtype=complex) if point.ndim > 1 else 0j
        for e, c in self.terms.items():
            mono = complex(c)
            for j, k in enumerate(e):
                if k:
                    mono = mono * point[..., j] ** k
            total = total + mono
        return total

    def evaluate_exact(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            mono = c
            for x, k in zip(point, e):
                if k:
                    mono *= Fraction(x) ** k
            total += mono
        return total


# --------------------------------------------------------------------------
# Smith normal form
# --------------------------------------------------------------------------

def _to_int_matrix(a) -> list:
    rows = []
    for r in a:
        row = []
        for x in r:
            x = as_fraction(x)
            if x.denominator != 1:
                raise LatticeError(f"snf expects integer entries, got {frac_str(x)}")
            row.append(int(x))
        rows.append(row)
    return rows


def snf(matrix) -> tuple:
    """Smith normal form of an integer matrix.

    Returns ``(diagonal, U, V)`` with ``U @ A @ V = diag(diagonal)`` padded to
    the shape of ``A``, ``U`` and ``V`` unimodular, every ``d_i`` nonnegative
    and ``d_i | d_{i+1}``.  Zeros in ``diagonal`` mark rank deficiency.
    """
    a = _to_int_matrix(matrix)
    m = len(a)
    n = len(a[0]) if m else 0
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):  # col_dst += k * col_src
        for row in a:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    for t in range(min(m, n)):
        while True:
            nonzero = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
            if not nonzero:
                break
            _, pi, pj = min(nonzero)
            swap_rows(t, pi)
            swap_cols(t, pj)
            done = True
            for i in range(t + 1, m):
                q = a[i][t] // a[t][t]
                if q:
                    add_row(i, t, -q)
                if a[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = a[t][j] // a[t][t]
                if q:
                    add_col(j, t, -q)
                if a[t][j]:
                    done = False
            if not done:
                continue
            # enforce divisibility of the remaining block by the pivot
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    diag = tuple(a[i][i] for i in range(min(m, n)))
    to_m = lambda rows: tuple(tuple(Fraction(x) for x in r) for r in rows)  # noqa: E731
    return diag, to_m(u), to_m(v)


# --------------------------------------------------------------------------
# lattices
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeBasis:
    """A full-rank lattice: generators are the columns of ``vectors``."""

    vectors: Matrix
    gram: Matrix = None

    def __post_init__(self):
        vecs = as_matrix(self.vectors)
        object.__setattr__(self, "vectors", vecs)
        r = len(vecs)
        if any(len(row) != r for row in vecs):
            raise LatticeError("lattice basis must be square")
        if det(vecs) == 0:
            raise LatticeError("lattice generators are linearly dependent")
        g = identity(r) if self.gram is None else as_matrix(self.gram)
        if g != transpose(g):
            raise LatticeError("gram matrix is not symmetric")
        for k in range(1, r + 1):  # Sylvester's criterion
            if det(tuple(row[:k] for row in g[:k])) <= 0:
                raise LatticeError("gram matrix is not positive definite")
        object.__setattr__(self, "gram", g)

    @classmethod
    def from_generators(cls, gens: Sequence[Sequence], gram=None) -> "LatticeBasis":
        return cls(columns_to_matrix(gens), gram)

    @property
    def rank(self) -> int:
        return len(self.vectors)

    @property
    def generators(self) -> tuple:
        return transpose(self.vectors)

    def inner(self, u: Sequence, v: Sequence) -> Fraction:
        return dot(u, matvec(self.gram, v))

    def coordinates(self, point: Sequence) -> Vector:
        return solve(self.vectors, point)

    def contains(self, point: Sequence) -> bool:
        return all(c.denominator == 1 for c in self.coordinates(point))

    def point(self, coords: Sequence) -> Vector:
        return matvec(self.vectors, as_vector(coords))

    def same_lattice(self, other: "LatticeBasis") -> bool:
        """True if both bases generate the same set of points."""
        change = matmul(inverse(self.vectors), other.vectors)
        return all(x.denominator == 1 for row in change for x in row) and abs(det(change)) == 1


@dataclass(frozen=True)
class CosetSystem:
    index: int
    representatives: tuple

    def __post_init__(self):
        if len(self.representatives) != self.index:
            raise LatticeError("representative count differs from the index")


def _sublattice_coords(m: LatticeBasis, gens: Sequence[Sequence]) -> Matrix:
    if len(gens) != m.rank:
        raise LatticeError(f"expected {m.rank} sublattice generators, got {len(gens)}")
    cols = [m.coordinates(as_vector(g)) for g in gens]
    for c in cols:
        if any(x.denominator != 1 for x in c):
            raise LatticeError("generator does not lie in the ambient lattice")
    c = columns_to_matrix(cols)
    if det(c) == 0:
        raise LatticeError("sublattice has infinite index (generators are dependent)")
    return c


def lattice_quotient(m: LatticeBasis, sublattice_gens: Sequence[Sequence]) -> CosetSystem:
    """Enumerate ``M / M_sub`` via the Smith normal form.

    Representatives are reduced into the half-open parallelepiped spanned by
    the sublattice generators and sorted lexicographically.
    """
    c = _sublattice_coords(m, sublattice_gens)
    diag, u, _ = snf(c)
    index = abs(int(det(c)))
    assert math.prod(diag) == index
    u_inv = inverse(u)
    sub = columns_to_matrix([as_vector(g) for g in sublattice_gens])
    sub_inv = inverse(sub)
    reps = set()
    for ks in itertools.product(*(range(d) for d in diag)):
        x = m.point(matvec(u_inv, ks))
        n = matvec(sub_inv, x)
        shift = matvec(sub, tuple(Fraction(math.floor(t)) for t in n))
        reps.add(tuple(a - b for a, b in zip(x, shift)))
    return CosetSystem(index, tuple(sorted(reps)))


def coset_reps_in_box(m: LatticeBasis, sigma: Sequence[Sequence], t: Sequence) -> CosetSystem:
    """All ``u`` in ``M`` with ``t - u = sum n_a a`` and ``0 <= n_a < 1``."""
    t = as_vector(t)
    sub = columns_to_matrix([as_vector(g) for g in sigma])
    if len(sigma) != m.rank or det(sub) == 0:
        raise LatticeError("sigma is not a basis of the ambient space")
    base = lattice_quotient(m, sigma)
    sub_inv = inverse(sub)
    out = []
    for x in base.representatives:
        n = matvec(sub_inv, tuple(a - b for a, b in zip(t, x)))
        shift = matvec(sub, tuple(Fraction(math.floor(v)) for v in n))
        out.append(tuple(a + b for a, b in zip(x, shift)))
    return CosetSystem(base.index, tuple(sorted(out)))


def dual_lattice(n: LatticeBasis) -> LatticeBasis:
    """The lattice of ``m`` with ``<m, v>`` integral for every ``v`` in ``n``."""
    basis = matmul(inverse(n.gram), transpose(inverse(n.vectors)))
    return LatticeBasis(basis, n.gram)


def natural_dual(n: LatticeBasis) -> LatticeBasis:
    """Dual lattice of covectors under the plain coordinate pairing."""
    return LatticeBasis(transpose(inverse(n.vectors)))


def integer_kernel(a: Matrix, ncols: int) -> list:
    """Basis of ``{k in Z^ncols : a @ k = 0}`` (a has rational entries)."""
    if not a:
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    scaled = []
    for row in a:
        lcm = math.lcm(*(Fraction(x).denominator for x in row))
        scaled.append(tuple(Fraction(x) * lcm for x in row))
    diag, _, v = snf(scaled)
    nonzero = sum(1 for d in diag if d)
    return [tuple(v[i][j] for i in range(ncols)) for j in range(nonzero, ncols)]


def restrict_lattice(lattice: LatticeBasis, span: Sequence[Sequence]) -> LatticeBasis:
    """``lattice ∩ span(span)`` expressed in coordinates along ``span``.

    ``span`` lists linearly independent ambient vectors; the result is a
    full-rank lattice in ``R^len(span)`` whose Gram matrix is the restricted
    inner product.
    """
    s = columns_to_matrix([as_vector(v) for v in span])
    r, k = lattice.rank, len(span)
    if rank(s) != k:
        raise LatticeError("subspace generators are dependent")
    coords = matmul(inverse(lattice.vectors), s)  # span in lattice coordinates
    # annihilator of the column span of `coords`
    reduced, pivots, _ = _row_reduce(transpose(coords))
    free = [c for c in range(r) if c not in pivots]
    annihilator = []
    for f in free:
        vec = [Fraction(0)] * r
        vec[f] = Fraction(1)
        for row_i, p in enumerate(pivots):
            vec[p] = -reduced[row_i][f]
        annihilator.append(tuple(vec))
    kernel = integer_kernel(tuple(annihilator), r)
    # express kernel points in span coordinates
    pts = [lattice.point(kv) for kv in kernel]
    gram_s = matmul(matmul(transpose(s), lattice.gram), s)
    s_pinv_rows = _left_inverse(s)
    gens = [matvec(s_pinv_rows, p) for p in pts]
    return LatticeBasis.from_generators(gens, gram_s)


def _left_inverse(s: Matrix) -> Matrix:
    st = transpose(s)
    return matmul(inverse(matmul(st, s)), st)
