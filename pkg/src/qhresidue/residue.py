"""Iterated residues of meromorphic functions with poles on hyperplanes.

The function class is finite sums of terms

    g(Y) * exp(l(Y)) / ( prod_i a_i(Y)^{k_i} * prod_j (1 - exp(b_j(Y)))^{p_j} )

with ``g`` a polynomial and ``l, a_i, b_j`` rational linear forms.

``Res^tau`` for an ordered basis ``tau = (a_1, ..., a_r)`` changes variables
to ``Z_j = a_j(Y)`` and takes ``Res_{Z_1=0} ... Res_{Z_r=0}``: the residue in
the last variable ``Z_r`` is taken first, with ``|Z_r| << ... << |Z_1|``.

Two exact routes are provided (series towers, and a sequential route that
keeps the surviving variables symbolic), plus a floating-point contour oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import laurent
from .laurent import PrecisionError
from .numkernel import LinearForm, Poly, as_fraction, inverse

MAX_CAP = 64
CAP_STEP = 4


class ResidueError(ArithmeticError):
    """Residue computation failed (singular basis, truncation, convergence)."""


def _primitive(form: LinearForm) -> tuple:
    """Return ``(p, s)`` with ``form = s * p``, ``p`` primitive integral, first entry > 0."""
    nz = [c for c in form.coeffs if c]
    if not nz:
        raise ZeroDivisionError("zero linear form in a denominator")
    lcm = math.lcm(*(c.denominator for c in nz))
    g = math.gcd(*(int(c * lcm) for c in nz))
    s = Fraction(g, lcm)
    if nz[0] < 0:
        s = -s
    return LinearForm(tuple(c / s for c in form.coeffs)), s


def _merge(pairs: Iterable) -> tuple:
    out: dict = {}
    for form, k in pairs:
        if k:
            out[form] = out.get(form, 0) + k
    return tuple(sorted((f, k) for f, k in out.items() if k))


@dataclass(frozen=True)
class MeroTerm:
    """``numerator * exp(exp_form) / (prod a^k * prod (1 - exp(b))^p)``.

    Linear denominators are stored primitive (integral, first entry positive)
    with the scale absorbed into the numerator; repeated factors are merged.
    """

    numerator: Poly
    exp_form: LinearForm
    linear_denoms: tuple = ()
    expden: tuple = ()

    def __post_init__(self):
        r = self.numerator.nvars
        if self.exp_form.rank != r:
            raise ValueError("exponent form rank differs from the numerator")
        num = self.numerator
        lin = []
        for form, k in self.linear_denoms:
            if form.rank != r:
                raise ValueError("denominator form has the wrong rank")
            if k < 0:
                raise ValueError("denominator multiplicities must be nonnegative")
            p, s = _primitive(form)
            if s != 1:
                num = num.scale(Fraction(1) / s ** k)
            lin.append((p, k))
        for form, k in self.expden:
            if form.rank != r:
                raise ValueError("denominator form has the wrong rank")
            if form.is_zero():
                raise ZeroDivisionError("factor 1 - exp(0) vanishes identically")
            if k < 0:
                raise ValueError("denominator multiplicities must be nonnegative")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "linear_denoms", _merge(lin))
        object.__setattr__(self, "expden", _merge(self.expden))

    @property
    def nvars(self) -> int:
        return self.numerator.nvars

    @property
    def shape(self) -> tuple:
        return (self.exp_form, self.linear_denoms, self.expden)

    def pole_order(self) -> int:
        return sum(k for _, k in self.linear_denoms) + sum(k for _, k in self.expden)

    def __mul__(self, other: "MeroTerm") -> "MeroTerm":
        return MeroTerm(self.numerator * other.numerator, self.exp_form + other.exp_form,
                        self.linear_denoms + other.linear_denoms, self.expden + other.expden)

    def with_numerator(self, num: Poly) -> "MeroTerm":
        return MeroTerm(num, self.exp_form, self.linear_denoms, self.expden)

    def substitute(self, images: Sequence[LinearForm]) -> "MeroTerm":
        lin = []
        for f, k in self.linear_denoms:
            g = f.substitute(images)
            if g.is_zero():
                raise ZeroDivisionError(f"denominator {f} vanishes identically after substitution")
            lin.append((g, k))
        exd = []
        for f, k in self.expden:
            g = f.substitute(images)
            if g.is_zero():
                raise ZeroDivisionError(f"factor 1 - exp({f}) vanishes identically after substitution")
            exd.append((g, k))
        return MeroTerm(self.numerator.substitute(images), self.exp_form.substitute(images),
                        tuple(lin), tuple(exd))

    def evaluate(self, points):
        pts = np.asarray(points, dtype=complex)
        val = self.numerator.evaluate(pts)
        lin = pts @ np.array([float(c) for c in self.exp_form.coeffs], dtype=complex) \
            if self.nvars else 0j
        val = val * np.exp(lin)
        for f, k in self.linear_denoms:
            val = val / (pts @ np.array([float(c) for c in f.coeffs])) ** k
        for f, k in self.expden:
            val = val / (1 - np.exp(pts @ np.array([float(c) for c in f.coeffs]))) ** k
        return val


class MeroFunction:
    """A finite sum of :class:`MeroTerm` in ``nvars`` variables."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: Iterable[MeroTerm] = (), nvars: int | None = None):
        terms = list(terms)
        if nvars is None:
            if not terms:
                raise ValueError("nvars is required for the empty function")
            nvars = terms[0].nvars
        if any(t.nvars != nvars for t in terms):
            raise ValueError("terms have mixed numbers of variables")
        self.nvars = nvars
        grouped: dict = {}
        for t in terms:
            key = t.shape
            grouped[key] = grouped[key] + t.numerator if key in grouped else t.numerator
        self.terms = tuple(MeroTerm(num, *key) for key, num in sorted(grouped.items(), key=_shape_key)
                           if not num.is_zero())

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "MeroFunction":
        return cls((), nvars)

    @classmethod
    def constant(cls, c, nvars: int) -> "MeroFunction":
        return cls([MeroTerm(Poly.const(c, nvars), LinearForm.zero(nvars))], nvars)

    @classmethod
    def from_poly(cls, p: Poly) -> "MeroFunction":
        return cls([MeroTerm(p, LinearForm.zero(p.nvars))], p.nvars)

    @classmethod
    def simple_fraction(cls, forms: Sequence[LinearForm]) -> "MeroFunction":
        """``1 / prod(forms)``."""
        r = forms[0].rank if forms else 0
        return cls([MeroTerm(Poly.const(1, r), LinearForm.zero(r), tuple((f, 1) for f in forms))], r)

    @classmethod
    def build(cls, nvars: int, numerator=1, exp_form=None, linear=(), expden=()) -> "MeroFunction":
        num = numerator if isinstance(numerator, Poly) else Poly.const(numerator, nvars)
        ell = LinearForm.zero(nvars) if exp_form is None else LinearForm(exp_form)
        lin = tuple((f if isinstance(f, LinearForm) else LinearForm(f), k) for f, k in linear)
        exd = tuple((f if isinstance(f, LinearForm) else LinearForm(f), k) for f, k in expden)
        return cls([MeroTerm(num, ell, lin, exd)], nvars)

    # algebra ---------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "MeroFunction") -> "MeroFunction":
        self._check(other)
        return MeroFunction(self.terms + other.terms, self.nvars)

    def __neg__(self) -> "MeroFunction":
        return self.scale(-1)

    def __sub__(self, other: "MeroFunction") -> "MeroFunction":
        return self + (-other)

    def scale(self, c) -> "MeroFunction":
        c = as_fraction(c)
        return MeroFunction((t.with_numerator(t.numerator.scale(c)) for t in self.terms), self.nvars)

    def __mul__(self, other: "MeroFunction") -> "MeroFunction":
        self._check(other)
        return MeroFunction((a * b for a in self.terms for b in other.terms), self.nvars)

    def times_exp(self, form: LinearForm) -> "MeroFunction":
        return self * MeroFunction.build(self.nvars, exp_form=form.coeffs)

    def substitute(self, images: Sequence[LinearForm]) -> "MeroFunction":
        """Compose with ``Y_j = images[j]``; raises ZeroDivisionError if a denominator dies."""
        nv = images[0].rank if images else 0
        return MeroFunction((t.substitute(images) for t in self.terms), nv)

    def _check(self, other):
        if not isinstance(other, MeroFunction) or other.nvars != self.nvars:
            raise ValueError("operands must be MeroFunctions in the same variables")

    def __eq__(self, other) -> bool:
        return isinstance(other, MeroFunction) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, self.terms))

    def __repr__(self) -> str:
        return f"MeroFunction({self.terms!r})"

    def __str__(self) -> str:
        from .expr import format_mero
        return format_mero(self)

    # inspection ------------------------------------------------------------
    def has_expden(self) -> bool:
        return any(t.expden for t in self.terms)

    def has_exponential(self) -> bool:
        return any(t.expden or not t.exp_form.is_zero() for t in self.terms)

    def denominator_forms(self) -> list:
        seen = []
        for t in self.terms:
            for f, _ in t.linear_denoms + t.expden:
                if f not in seen:
                    seen.append(f)
        return seen

    def decay_degree(self) -> int | None:
        """(min denominator degree) - (max numerator degree) over the rational part.

        Only linear denominators count; ``None`` for the zero function.
        """
        if not self.terms:
            return None
        den = min(sum(k for _, k in t.linear_denoms) for t in self.terms)
        num = max(t.numerator.degree() for t in self.terms)
        return den - num

    def evaluate(self, points):
        """Evaluate at points of shape ``(..., nvars)`` (numpy, complex)."""
        pts = np.asarray(points, dtype=complex)
        if not self.terms:
            return np.zeros(pts.shape[:-1], dtype=complex) if pts.ndim > 1 else 0j
        total = 0
        for t in self.terms:
            total = total + t.evaluate(pts)
        return total

    def constant_value(self) -> Fraction:
        """The value of a function in zero variables."""
        if self.nvars != 0:
            raise ValueError("constant_value needs a function of zero variables")
        return sum((t.numerator.constant_value() for t in self.terms), Fraction(0))


def _shape_key(item):
    (ell, lin, exd), _ = item
    return (ell.coeffs, tuple((f.coeffs, k) for f, k in lin), tuple((f.coeffs, k) for f, k in exd))


# --------------------------------------------------------------------------
# change of variables
# --------------------------------------------------------------------------

def basis_forms(tau) -> tuple:
    """Accept an ordered basis object (with ``forms``) or a sequence of forms."""
    forms = getattr(tau, "forms", tau)
    return tuple(f if isinstance(f, LinearForm) else LinearForm(f) for f in forms)


def to_basis_coordinates(tau, f: MeroFunction) -> MeroFunction:
    """Rewrite ``f`` in the variables ``Z_j = tau_j(Y)``."""
    forms = basis_forms(tau)
    r = f.nvars
    if len(forms) != r or any(a.rank != r for a in forms):
        raise ResidueError(f"an ordered basis of rank {r} needs {r} forms of rank {r}")
    a = tuple(a.coeffs for a in forms)
    try:
        a_inv = inverse(a)
    except ZeroDivisionError:
        raise ResidueError("ordered basis is singular; cannot change variables") from None
    # Y_i = sum_j (A^{-1})_{ij} Z_j
    images = [LinearForm(row) for row in a_inv]
    return f.substitute(images)


# --------------------------------------------------------------------------
# exact route 1: series towers
# --------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _factor_linear(coeffs: tuple, caps: tuple, k: int):
    return laurent.expand_linform_inverse(coeffs, caps, k)


@lru_cache(maxsize=4096)
def _factor_expden(coeffs: tuple, caps: tuple, k: int):
    return laurent.expand_one_minus_exp_inverse(coeffs, caps, k)


@lru_cache(maxsize=4096)
def _factor_exp(coeffs: tuple, caps: tuple):
    return laurent.expand_exp_linear(coeffs, caps)


def _term_factors(term: MeroTerm, caps: tuple) -> list:
    r = term.nvars
    factors = [laurent.from_poly_terms(term.numerator.terms, r)]
    for f, k in term.linear_denoms:
        factors.append(_factor_linear(f.coeffs, caps, k))
    for f, k in term.expden:
        factors.append(_factor_expden(f.coeffs, caps, k))
    if not term.exp_form.is_zero():
        factors.append(_factor_exp(term.exp_form.coeffs, caps))
    return factors


def _tower_residue_term(term: MeroTerm, caps: tuple) -> Fraction:
    r = term.nvars
    factors = _term_factors(term, caps)
    # exact factors first keeps the running product sharp
    factors.sort(key=lambda t: (t.cap is not None, len(t.terms)))
    floors = [laurent.level_floors(t) for t in factors]
    product = factors[0]
    for i in range(1, len(factors) + 1):
        remaining = [sum(fl[k] for fl in floors[i:]) for k in range(r)]
        product = laurent.truncate(product, tuple(-1 - s for s in remaining))
        if i < len(factors):
            product = laurent.mul(product, factors[i])
    return laurent.iterated_coefficient(product, [-1] * r)


def residue_in_basis_coordinates(g: MeroFunction, extra_cap: int = 0) -> Fraction:
    """``Res_{Z_1=0} ... Res_{Z_r=0} g`` for ``g`` already written in ``Z``."""
    r = g.nvars
    if r == 0:
        return g.constant_value()
    total = Fraction(0)
    for term in g.terms:
        cap = term.pole_order() + 1 + extra_cap
        while True:
            try:
                total += _tower_residue_term(term, (cap,) * r)
                break
            except PrecisionError as exc:
                cap += CAP_STEP
                if cap > MAX_CAP + extra_cap:
                    raise ResidueError(f"series truncation did not stabilize below cap {MAX_CAP}: {exc}") from None
    return total


def res_tau(tau, f: MeroFunction, method: str = "tower", extra_cap: int = 0) -> Fraction:
    """Exact iterated residue ``Res^tau(f)``, innermost (last) variable first.

    ``method`` is ``"tower"`` (nested truncated Laurent series) or
    ``"sequential"`` (one variable at a time, symbolic in the others).
    ``extra_cap`` raises the truncation window; the result must not move.
    """
    g = to_basis_coordinates(tau, f)
    if method == "tower":
        return residue_in_basis_coordinates(g, extra_cap)
    if method == "sequential":
        for k in range(g.nvars - 1, -1, -1):
            g = res_one(g, k)
        return g.constant_value()
    raise ValueError(f"unknown residue method {method!r}")


# --------------------------------------------------------------------------
# exact route 2: one variable at a time
# --------------------------------------------------------------------------

def _series_mul(a: dict, b: dict, order: int, zero) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            if i + j <= order:
                p = x * y
                out[i + j] = out[i + j] + p if i + j in out else p
    return out


def _drop(form: LinearForm, k: int) -> LinearForm:
    return LinearForm(form.coeffs[:k] + form.coeffs[k + 1:])


def _expden_taylor(beta: LinearForm, p: int, c: Fraction, order: int, nv: int) -> dict:
    """Taylor coefficients in ``Z`` of ``(1 - exp(c Z + beta))^{-p}``, ``beta`` regular."""
    series = {}
    derivs = {(0, p): Fraction(1)}  # sum coeff * e^{i x} (1 - e^x)^{-q}
    for j in range(order + 1):
        terms = [MeroTerm(Poly.const(v * c ** j / math.factorial(j), nv), beta.scale(i), (), ((beta, q),))
                 for (i, q), v in derivs.items() if v]
        series[j] = MeroFunction(terms, nv)
        nxt: dict = {}
        for (i, q), v in derivs.items():
            if i:
                nxt[(i, q)] = nxt.get((i, q), 0) + i * v
            nxt[(i + 1, q + 1)] = nxt.get((i + 1, q + 1), 0) + q * v
        derivs = nxt
    return series


def _residue_one_term(term: MeroTerm, k: int) -> MeroFunction:
    nv = term.nvars - 1
    one = MeroFunction.constant(1, nv)
    singular = {0: Fraction(1)}  # Laurent series in Z_k with rational coefficients
    regular_parts = []
    pole = 0
    for form, m in term.linear_denoms:
        c = form.coeffs[k]
        rest = _drop(form, k)
        if rest.is_zero():
            singular = {e - m: v * c ** -m for e, v in singular.items()}
            pole += m
        else:
            regular_parts.append(("lin", c, rest, m))
    for form, p in term.expden:
        c = form.coeffs[k]
        rest = _drop(form, k)
        if rest.is_zero():
            regular_parts.append(("pole_expden", c, None, p))
            pole += p
        else:
            regular_parts.append(("expden", c, rest, p))
    order = pole - 1  # highest regular Taylor order that can meet the pole
    if order < 0:
        return MeroFunction.zero(nv)
    # rational Laurent part: pure poles, including Bernoulli expansions
    for kind, c, _, p in regular_parts:
        if kind == "pole_expden":
            base = {e - 1: -laurent.bernoulli(e) / math.factorial(e) * c ** (e - 1) for e in range(order + 2)}
            for _ in range(p):
                singular = _series_mul(singular, base, order, 0)
    singular = {e: v for e, v in singular.items() if e <= -1}
    # regular part as a Taylor series with MeroFunction coefficients
    reg = {0: one}
    parts = dict(term.numerator.split_variable(k))
    num_series = {e: MeroFunction.from_poly(p) for e, p in parts.items() if e <= order}
    reg = _series_mul(reg, num_series, order, None)
    a = term.exp_form.coeffs[k]
    rest_exp = _drop(term.exp_form, k)
    exp_series = {j: MeroFunction.build(nv, Fraction(a) ** j / math.factorial(j), rest_exp.coeffs)
                  for j in range(order + 1) if a ** j or j == 0}
    reg = _series_mul(reg, exp_series, order, None)
    for kind, c, rest, m in regular_parts:
        if kind == "lin":
            ser = {j: MeroFunction.build(nv, laurent._binom_neg(m, j) * c ** j, None, ((rest, m + j),))
                   for j in range(order + 1) if c or j == 0}
        elif kind == "expden":
            ser = _expden_taylor(rest, m, c, order, nv)
        else:
            continue
        reg = _series_mul(reg, ser, order, None)
    out = MeroFunction.zero(nv)
    for j, coeff in reg.items():
        s = singular.get(-1 - j)
        if s:
            out = out + coeff.scale(s)
    return out


def res_one(f: MeroFunction, k: int) -> MeroFunction:
    """Coefficient of ``Z_k^{-1}`` in the Laurent expansion at ``Z_k = 0``.

    The other variables are generic (nonzero, much larger than ``Z_k``); the
    result is a function of them, with variable ``k`` (0-based) removed.
    """
    if not 0 <= k < f.nvars:
        raise IndexError(f"variable index {k} out of range for {f.nvars} variables")
    out = MeroFunction.zero(f.nvars - 1)
    for term in f.terms:
        out = out + _residue_one_term(term, k)
    return out


# --------------------------------------------------------------------------
# numeric oracle
# --------------------------------------------------------------------------

def res_tau_numeric(tau, f: MeroFunction, radii_base: float = 1e-1, nodes: int = 32,
                    ratio: float = 1e-2, tol: float = 1e-10, max_points: int = 2 ** 22) -> complex:
    """Nested trapezoidal contour integrals; independent of the exact routes.

    Circle ``k`` (1-based) has radius ``radii_base * ratio**(k-1)``, so the
    last variable lives on the smallest circle.  The node count per circle
    doubles from ``nodes`` until the estimate moves by less than
    ``tol * max(1, |estimate|)``.
    """
    forms = basis_forms(tau)
    r = f.nvars
    if len(forms) != r:
        raise ResidueError("basis size does not match the number of variables")
    if r == 0:
        return complex(f.constant_value())
    a = np.array([[float(c) for c in fm.coeffs] for fm in forms])
    if abs(np.linalg.det(a)) < 1e-14:
        raise ResidueError("ordered basis is singular")
    a_inv_t = np.linalg.inv(a).T
    radii = radii_base * ratio ** np.arange(r)
    prev = None
    n = nodes
    while n ** r <= max_points:
        theta = 2 * np.pi * (np.arange(n) + 0.5) / n
        circle = np.exp(1j * theta)
        grids = np.meshgrid(*([circle] * r), indexing="ij")
        z = np.stack([radii[k] * grids[k] for k in range(r)], axis=-1)
        y = z @ a_inv_t
        vals = f.evaluate(y) * np.prod(z, axis=-1)
        est = complex(np.mean(vals))
        if prev is not None and abs(est - prev) < tol * max(1.0, abs(est)):
            return est
        prev = est
        n *= 2
    raise ResidueError(f"numeric residue did not converge within {max_points} sample points")
