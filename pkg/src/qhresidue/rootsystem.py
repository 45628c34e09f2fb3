"""Root data for SU(n).

Points of the Cartan subalgebra are written in Y-coordinates, ``Y_j = X_j - X_{j+1}``
(the values of the simple roots), which are also the fundamental-weight
coordinates once t and t* are identified.  Linear forms are coefficient
vectors on Y; the simple root ``e_j`` is the coordinate form ``Y_j``.  The
inner product on points has Gram matrix ``C^{-1}`` where ``C`` is the Cartan
matrix, so roots have squared length 2 and ``<e_j, rho> = 1``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .arrangement import Arrangement
from .numkernel import LatticeBasis, LinearForm, Poly, as_vector, identity, inverse, matvec

_GROUP = re.compile(r"^su(\d+)$", re.IGNORECASE)


class RootSystemError(ValueError):
    pass


def cartan_matrix(r: int) -> tuple:
    return tuple(tuple(Fraction(2 if i == j else -1 if abs(i - j) == 1 else 0) for j in range(r))
                 for i in range(r))


@dataclass(frozen=True)
class RootSystem:
    """Type A_{n-1} root system of SU(n)."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise RootSystemError("SU(n) needs n >= 2")

    @classmethod
    def from_name(cls, name: str) -> "RootSystem":
        m = _GROUP.match(name.strip())
        if not m:
            raise RootSystemError(f"unknown group {name!r}; expected su2, su3, ...")
        return cls(int(m.group(1)))

    @property
    def name(self) -> str:
        return f"su{self.n}"

    @property
    def rank(self) -> int:
        return self.n - 1

    @cached_property
    def cartan(self) -> tuple:
        return cartan_matrix(self.rank)

    @cached_property
    def gram(self) -> tuple:
        """Inner product of points (Y-coordinates)."""
        return inverse(self.cartan)

    @cached_property
    def simple_roots(self) -> tuple:
        return tuple(LinearForm.coordinate(j, self.rank) for j in range(self.rank))

    def gamma(self, j: int, k: int) -> LinearForm:
        """``gamma_jk = X_j - X_k = Y_j + ... + Y_{k-1}`` for 1-based ``j < k``."""
        if not 1 <= j < k <= self.n:
            raise RootSystemError(f"need 1 <= j < k <= {self.n}")
        return LinearForm(tuple(int(j - 1 <= i < k - 1) for i in range(self.rank)))

    @cached_property
    def positive_root_pairs(self) -> tuple:
        """``(j, k)`` pairs ordered by height, then lexicographically."""
        return tuple(sorted(itertools.combinations(range(1, self.n + 1), 2), key=lambda p: (p[1] - p[0], p)))

    @cached_property
    def positive_roots(self) -> tuple:
        return tuple(self.gamma(j, k) for j, k in self.positive_root_pairs)

    def arrangement(self, order: Sequence[int] | None = None) -> Arrangement:
        labels = tuple(f"gamma{j}{k}" if self.n < 10 else f"gamma{j}_{k}" for j, k in self.positive_root_pairs)
        return Arrangement(self.positive_roots, None if order is None else tuple(order), labels)

    @cached_property
    def rho(self) -> tuple:
        return (Fraction(1),) * self.rank

    @cached_property
    def integer_lattice(self) -> LatticeBasis:
        """Lattice generated by the simple roots, as points."""
        return LatticeBasis(self.cartan, self.gram)

    @cached_property
    def weight_lattice(self) -> LatticeBasis:
        return LatticeBasis(identity(self.rank), self.gram)

    def lattice(self, kind: str) -> LatticeBasis:
        if kind == "weight":
            return self.weight_lattice
        if kind == "integer":
            return self.integer_lattice
        raise RootSystemError(f"unknown lattice kind {kind!r}; expected 'weight' or 'integer'")

    def inner(self, u: Sequence, v: Sequence) -> Fraction:
        return sum((a * g * b for a, row in zip(as_vector(u), self.gram) for g, b in zip(row, as_vector(v))),
                   Fraction(0))

    def point_to_form(self, y: Sequence) -> LinearForm:
        """The form ``<., y>`` as coefficients on Y."""
        return LinearForm(matvec(self.gram, as_vector(y)))

    def form_to_point(self, form: LinearForm) -> tuple:
        return matvec(self.cartan, form.coeffs)

    # Weyl group -------------------------------------------------------------
    def _x_difference(self, a: int, b: int) -> LinearForm:
        """``X_a - X_b`` (1-based) as a form on Y."""
        if a == b:
            return LinearForm.zero(self.rank)
        return self.gamma(a, b) if a < b else -self.gamma(b, a)

    def weyl_group(self) -> list:
        """All permutations ``w`` of ``{1..n}``; ``w`` sends ``X`` to ``X_{w^{-1}(i)}``."""
        return list(itertools.permutations(range(1, self.n + 1)))

    def weyl_subgroup(self) -> list:
        """``W_{n-1}``: permutations fixing ``n``."""
        return [w for w in self.weyl_group() if w[-1] == self.n]

    @property
    def weyl_order(self) -> int:
        return math.factorial(self.n)

    def weyl_images(self, w: Sequence[int]) -> tuple:
        """Forms giving ``Y_j(w^{-1} X)`` in terms of ``Y(X)``.

        Substituting these into a function ``f`` yields ``(w f)(X) = f(w^{-1} X)``.
        Here ``w`` is a permutation tuple (``w[i-1] = w(i)``), and
        ``(w^{-1} X)_i = X_{w(i)}``.
        """
        return tuple(self._x_difference(w[j], w[j + 1]) for j in range(self.rank))

    def weyl_act_point(self, w: Sequence[int], y: Sequence) -> tuple:
        """Y-coordinates of ``w X`` given those of ``X``."""
        inv = [0] * self.n
        for i, wi in enumerate(w):
            inv[wi - 1] = i + 1
        return tuple(self._x_difference(inv[j], inv[j + 1])(as_vector(y)) for j in range(self.rank))

    def weyl_orbit(self, y: Sequence) -> list:
        return sorted({self.weyl_act_point(w, y) for w in self.weyl_group()})

    # weights ----------------------------------------------------------------
    def is_regular(self, y: Sequence) -> bool:
        y = as_vector(y)
        return all(g(y) != 0 for g in self.positive_roots)

    def weyl_dim(self, lam: Sequence) -> int:
        lam = as_vector(lam)
        if len(lam) != self.rank:
            raise RootSystemError(f"weight needs {self.rank} coordinates")
        if any(c < 0 or c.denominator != 1 for c in lam):
            raise RootSystemError("weyl_dim needs a dominant integral weight")
        shifted = tuple(c + 1 for c in lam)
        val = Fraction(1)
        for g in self.positive_roots:
            val *= g(shifted) / g(self.rho)
        assert val.denominator == 1
        return int(val)

    def enumerate_regular_weights(self, box: int) -> list:
        pts = []
        for c in itertools.product(range(-box, box + 1), repeat=self.rank):
            if self.is_regular(c):
                pts.append(tuple(Fraction(x) for x in c))
        return pts

    def dominant_regular_weights(self, box: int) -> list:
        return [tuple(Fraction(x) for x in c) for c in itertools.product(range(1, box + 1), repeat=self.rank)]

    # polynomials and constants ----------------------------------------------
    def dd_poly(self) -> Poly:
        """``D(X) = prod over positive roots``."""
        p = Poly.const(1, self.rank)
        for g in self.positive_roots:
            p = p * g.to_poly()
        return p

    def rho_heights(self) -> tuple:
        return tuple(g(self.rho) for g in self.positive_roots)

    def vol_ratio(self) -> float:
        """``vol G / vol T = prod 1 / (2 pi <alpha, rho>)``."""
        out = 1.0
        for h in self.rho_heights():
            out /= 2 * math.pi * float(h)
        return out


def fractional_reduce(gamma: Sequence) -> tuple:
    """Componentwise ``gamma mod 1`` into ``[0, 1)``."""
    return tuple(c - math.floor(c) for c in as_vector(gamma))
