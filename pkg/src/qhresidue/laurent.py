"""Nested truncated Laurent series ("series towers") with exact coefficients.

A tower of depth ``d`` is a Laurent series in the innermost variable
``Z_d`` whose coefficients are towers of depth ``d - 1`` in
``Z_1, ..., Z_{d-1}``; depth 0 is a plain :class:`~fractions.Fraction`.  This
realizes the regime ``|Z_d| << ... << |Z_1|`` in which an iterated residue,
innermost variable first, is a coefficient extraction.

Every tower knows its own precision: ``cap`` is the highest exponent of the
top variable whose coefficient is known (``None`` means exact).  Arithmetic
propagates precision, so an extracted coefficient is either correct or the
extraction raises :class:`PrecisionError`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


class PrecisionError(ArithmeticError):
    """A coefficient beyond the known truncation window was requested."""


def _min_cap(*caps):
    known = [c for c in caps if c is not None]
    return min(known) if known else None


class Tower:
    __slots__ = ("depth", "terms", "cap")

    def __init__(self, depth: int, terms: dict, cap: int | None = None):
        if depth < 1:
            raise ValueError("towers have depth >= 1; depth 0 is a Fraction")
        self.depth = depth
        self.cap = cap
        if cap is not None:
            terms = {e: c for e, c in terms.items() if e <= cap}
        self.terms = terms

    def __repr__(self) -> str:
        return f"Tower(depth={self.depth}, cap={self.cap}, terms={self.terms!r})"

    def floor(self):
        """Lowest exponent that can carry a nonzero coefficient."""
        if self.terms:
            return min(self.terms)
        return None if self.cap is None else self.cap + 1

    def is_exact_zero(self) -> bool:
        return self.cap is None and not self.terms

    def coefficient(self, e: int):
        if self.cap is not None and e > self.cap:
            raise PrecisionError(f"coefficient of Z_{self.depth}^{e} requested beyond cap {self.cap}")
        if e in self.terms:
            return self.terms[e]
        return zero(self.depth - 1)

    def items(self):
        return sorted(self.terms.items())

    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return scale(self, -1)

    def __sub__(self, other):
        return add(self, scale(other, -1))

    def __eq__(self, other):
        return (isinstance(other, Tower) and self.depth == other.depth and self.cap == other.cap
                and _clean(self).terms == _clean(other).terms)

    __hash__ = None


def _clean(t: Tower) -> Tower:
    """Drop coefficients that are exact zeros."""
    out = {}
    for e, c in t.terms.items():
        if isinstance(c, Tower):
            c = _clean(c)
            if c.is_exact_zero():
                continue
        elif c == 0:
            continue
        out[e] = c
    return Tower(t.depth, out, t.cap)


def zero(depth: int):
    return ZERO if depth == 0 else Tower(depth, {}, None)


def const(depth: int, value) -> Tower | Fraction:
    value = Fraction(value)
    if depth == 0:
        return value
    if value == 0:
        return zero(depth)
    return Tower(depth, {0: const(depth - 1, value)}, None)


def monomial(exponents: Sequence[int], coeff=1):
    """``coeff * Z_1^{e_1} ... Z_d^{e_d}`` as an exact tower."""
    if not exponents:
        return Fraction(coeff)
    return Tower(len(exponents), {exponents[-1]: monomial(exponents[:-1], coeff)}, None)


def _is_zero(x) -> bool:
    return x == 0 if isinstance(x, Fraction) else x.is_exact_zero()


def add(a, b):
    if isinstance(a, Fraction):
        return a + b
    if a.depth != b.depth:
        raise ValueError("cannot add towers over different variable orderings")
    cap = _min_cap(a.cap, b.cap)
    out = dict(a.terms)
    for e, c in b.terms.items():
        out[e] = add(out[e], c) if e in out else c
    return Tower(a.depth, out, cap)


def scale(a, c):
    c = Fraction(c)
    if isinstance(a, Fraction):
        return a * c
    if c == 0:
        return Tower(a.depth, {}, a.cap) if a.cap is not None else zero(a.depth)
    return Tower(a.depth, {e: scale(v, c) for e, v in a.terms.items()}, a.cap)


def mul(a, b):
    if isinstance(a, Fraction):
        return a * b
    if a.depth != b.depth:
        raise ValueError("cannot multiply towers over different variable orderings")
    if a.is_exact_zero() or b.is_exact_zero():
        return zero(a.depth)
    fa, fb = a.floor(), b.floor()
    cap = _min_cap(None if a.cap is None else a.cap + fb, None if b.cap is None else b.cap + fa)
    out: dict = {}
    for i, ai in a.terms.items():
        for j, bj in b.terms.items():
            e = i + j
            if cap is not None and e > cap:
                continue
            p = mul(ai, bj)
            out[e] = add(out[e], p) if e in out else p
    return Tower(a.depth, out, cap)


def truncate(a, caps: Sequence[int | None]):
    """Lower the known window to ``caps`` (one entry per level, outermost first).

    Discarding coefficients is always sound: the result simply claims less.
    """
    if isinstance(a, Fraction):
        return a
    top = caps[a.depth - 1]
    cap = _min_cap(a.cap, top)
    return Tower(a.depth, {e: truncate(c, caps) for e, c in a.terms.items()
                           if cap is None or e <= cap}, cap)


def level_floors(a) -> list:
    """Lowest exponent present at each level (outermost first), over all branches."""
    if isinstance(a, Fraction):
        return []
    floors = [None] * a.depth
    stack = [a]
    while stack:
        t = stack.pop()
        f = t.floor()
        k = t.depth - 1
        if f is not None:
            floors[k] = f if floors[k] is None else min(floors[k], f)
        for c in t.terms.values():
            if isinstance(c, Tower):
                stack.append(c)
    return [0 if f is None else f for f in floors]


def iterated_coefficient(a, exponents: Sequence[int]) -> Fraction:
    """Coefficient of ``Z_1^{e_1} ... Z_d^{e_d}``; innermost level is peeled first."""
    for e in reversed(exponents):
        a = a.coefficient(e)
    return a


def evaluate(a, point: Sequence) -> complex:
    """Numerically evaluate the retained part of a tower at ``point``."""
    if isinstance(a, Fraction):
        return complex(a)
    z = point[a.depth - 1]
    return sum(z ** e * evaluate(c, point) for e, c in a.terms.items())


# --------------------------------------------------------------------------
# constructors for the function class
# --------------------------------------------------------------------------

def from_poly_terms(terms: dict, depth: int):
    """Exact tower of a polynomial given as {exponent tuple: coefficient}."""
    if depth == 0:
        return sum((Fraction(c) for c in terms.values()), ZERO)
    grouped: dict = {}
    for e, c in terms.items():
        grouped.setdefault(e[depth - 1], {})[e[:depth - 1]] = c
    return Tower(depth, {k: from_poly_terms(v, depth - 1) for k, v in grouped.items()}, None)


def _binom_neg(m: int, j: int) -> int:
    """binomial(-m, j)."""
    return (-1) ** j * math.comb(m + j - 1, j)


def expand_linform_inverse(coeffs: Sequence, caps: Sequence[int], power: int = 1):
    """Tower of ``1 / L(Z)^power`` for a nonzero linear form ``L``.

    ``caps[k]`` bounds the exponent kept at level ``k`` (outermost first).
    """
    coeffs = [Fraction(c) for c in coeffs]
    depth = len(coeffs)
    if depth == 0 or all(c == 0 for c in coeffs):
        raise ZeroDivisionError("inverse of the zero linear form")
    c = coeffs[-1]
    rest = coeffs[:-1]
    if c == 0:
        return Tower(depth, {0: expand_linform_inverse(rest, caps[:-1], power)}, None)
    if all(x == 0 for x in rest):
        return Tower(depth, {-power: const(depth - 1, c ** -power)}, None)
    terms = {}
    for j in range(caps[depth - 1] + 1):
        terms[j] = scale(expand_linform_inverse(rest, caps[:-1], power + j), _binom_neg(power, j) * c ** j)
    return Tower(depth, terms, caps[depth - 1])


def compose_series(coeff: Callable[[int], Fraction], coeffs: Sequence, caps: Sequence[int],
                   finite_degree: int | None = None):
    """Tower of ``F(L(Z))`` for a power series ``F(x) = sum coeff(n) x^n``.

    ``finite_degree`` marks ``F`` as a polynomial of that degree (exact result).
    """
    coeffs = [Fraction(c) for c in coeffs]
    depth = len(coeffs)
    if depth == 0:
        return Fraction(coeff(0))
    c = coeffs[-1]
    rest = coeffs[:-1]
    if c == 0:
        return Tower(depth, {0: compose_series(coeff, rest, caps[:-1], finite_degree)}, None)
    top = caps[depth - 1]
    exact = finite_degree is not None and finite_degree <= top
    hi = finite_degree if exact else top
    terms = {}
    if all(x == 0 for x in rest):
        for j in range(hi + 1):
            v = coeff(j) * c ** j
            if v:
                terms[j] = const(depth - 1, v)
        return Tower(depth, terms, None if exact else top)
    for j in range(hi + 1):
        def shifted(n, j=j):
            return coeff(n + j) * math.comb(n + j, j)
        sub_deg = None if finite_degree is None else finite_degree - j
        terms[j] = scale(compose_series(shifted, rest, caps[:-1], sub_deg), c ** j)
    return Tower(depth, terms, None if exact else top)


@lru_cache(maxsize=None)
def _factorial_inverse(n: int) -> Fraction:
    return Fraction(1, math.factorial(n))


def expand_exp_linear(coeffs: Sequence, caps: Sequence[int]):
    """Tower of ``exp(L(Z))``."""
    if all(Fraction(c) == 0 for c in coeffs):
        return const(len(coeffs), 1)
    return compose_series(_factorial_inverse, coeffs, caps)


_BERNOULLI = [Fraction(1)]


def bernoulli(m: int) -> Fraction:
    """Bernoulli number ``B_m`` with ``B_1 = -1/2`` (generating function x/(e^x - 1)).

    Computed once by the recurrence ``sum_{j<=m} C(m+1, j) B_j = 0`` and cached.
    """
    while len(_BERNOULLI) <= m:
        k = len(_BERNOULLI)
        s = sum((math.comb(k + 1, j) * _BERNOULLI[j] for j in range(k)), ZERO)
        _BERNOULLI.append(-s / (k + 1))
    return _BERNOULLI[m]


def _bernoulli_series_coeff(n: int) -> Fraction:
    return bernoulli(n) * _factorial_inverse(n)


def expand_one_minus_exp_inverse(coeffs: Sequence, caps: Sequence[int], power: int = 1):
    """Tower of ``1 / (1 - exp(b(Z)))^power`` for a nonzero form ``b``.

    Uses ``1/(1 - e^x) = -(1/x) * x/(e^x - 1)`` with the Bernoulli series.
    """
    inv = expand_linform_inverse(coeffs, caps)
    ser = compose_series(_bernoulli_series_coeff, coeffs, caps)
    one = scale(mul(inv, ser), -1)
    out = one
    for _ in range(power - 1):
        out = mul(out, one)
    return out
