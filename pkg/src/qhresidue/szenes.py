"""Szenes' identity between regular lattice-point sums and iterated residues.

For a lattice ``N`` of points, ``M`` its dual lattice of forms, an arrangement
``Delta`` with a diagonal basis ``OB`` and a decaying ``f`` with poles on
``Delta``:

    sum_{n in N_reg} exp(<t, 2 pi i n>) f(2 pi i n)
        = sum_{sigma in OB} Res^sigma( f(z) F^t_sigma(-z) ),

    F^t_sigma(-z) = 1/|M/M_sigma| * sum_{m in R(t, sigma)} exp((t - m)(z)) / prod_{a in sigma} (1 - exp(a(z))).

The left side is evaluated by truncation to a box, the right side exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arrangement import Arrangement, DiagonalBasis, diagonal_basis
from .numkernel import (LatticeBasis, LinearForm, Poly, as_vector, coset_reps_in_box, natural_dual,
                        rank as mat_rank)
from .residue import MeroFunction, MeroTerm, res_tau
from .rootsystem import RootSystem, fractional_reduce

LHS_TOL_FLOOR = 1e-6
IMAG_TOL = 1e-10


class SzenesError(ValueError):
    pass


@dataclass
class SzenesCase:
    """Inputs of one instance of the identity.

    ``lattice`` holds points; ``t`` is a form (coefficients on Y).  A common
    factor ``exp(l)`` of ``f`` is moved into the character: ``t -> t + l``,
    ``f -> f exp(-l)``.  This leaves the lattice sum unchanged and keeps ``f``
    rational, which the residue side requires.
    """

    lattice: LatticeBasis
    arrangement: Arrangement
    f: MeroFunction
    t: tuple = None
    box: int = 1000
    basis: DiagonalBasis = None
    dual: LatticeBasis = field(init=False)

    def __post_init__(self):
        r = self.lattice.rank
        if self.arrangement.rank != r or self.f.nvars != r:
            raise SzenesError("lattice, arrangement and function ranks differ")
        self.t = (Fraction(0),) * r if self.t is None else as_vector(self.t)
        if len(self.t) != r:
            raise SzenesError(f"shift t needs {r} coordinates")
        if self.f.has_exponential():
            g, gamma = split_exponent(self.f)
            self.f = g
            self.t = tuple(a - b for a, b in zip(self.t, gamma))
        if self.basis is None:
            self.basis = diagonal_basis(self.arrangement)
        self.dual = natural_dual(self.lattice)

    @property
    def rank(self) -> int:
        return self.lattice.rank


def f_t_sigma(t: Sequence, sigma, m_lattice: LatticeBasis) -> MeroFunction:
    """The kernel ``F^t_sigma(-z)`` as a MeroFunction of ``z``."""
    forms = tuple(getattr(sigma, "forms", sigma))
    t = as_vector(t)
    r = len(t)
    reps = coset_reps_in_box(m_lattice, [f.coeffs for f in forms], t)
    scale = Fraction(1, reps.index)
    den = tuple((f, 1) for f in forms)
    terms = [MeroTerm(Poly.const(scale, r), LinearForm(tuple(a - b for a, b in zip(t, m))), (), den)
             for m in reps.representatives]
    return MeroFunction(terms, r)


def _rhs_block(args):
    sigma_forms, t, m_lattice, f = args
    return res_tau(sigma_forms, f * f_t_sigma(t, sigma_forms, m_lattice))


def szenes_rhs_terms(case: SzenesCase, jobs: int = 1) -> list:
    """Per-member contributions ``Res^sigma(f F^t_sigma)`` in basis order."""
    tasks = [(m.forms, case.t, case.dual, case.f) for m in case.basis.members]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_rhs_block, tasks))
    return [_rhs_block(a) for a in tasks]


def szenes_rhs(case: SzenesCase, jobs: int = 1) -> Fraction:
    return sum(szenes_rhs_terms(case, jobs), Fraction(0))


# --------------------------------------------------------------------------
# truncated lattice sum
# --------------------------------------------------------------------------

def check_lhs_function(f: MeroFunction, arrangement: Arrangement) -> None:
    """Reject functions whose lattice sum is not absolutely convergent or ill-defined."""
    r = f.nvars
    if f.has_expden():
        raise SzenesError("lattice sums need a function without (1 - exp) denominators")
    decay = f.decay_degree()
    if decay is not None and decay < r + 1:
        raise SzenesError(f"decay degree {decay} < rank + 1 = {r + 1}: the lattice sum does not converge")
    for form in f.denominator_forms():
        if not any(mat_rank((form.coeffs, a.coeffs)) == 1 for a in arrangement.forms):
            raise SzenesError(f"denominator {form} is not a hyperplane of the arrangement")


def _integer_rows(forms: Sequence[LinearForm], lattice: LatticeBasis) -> np.ndarray:
    """Forms pulled back to lattice coordinates, scaled to integer rows."""
    rows = []
    for form in forms:
        pulled = [sum((c * lattice.vectors[i][j] for i, c in enumerate(form.coeffs)), Fraction(0))
                  for j in range(lattice.rank)]
        lcm = math.lcm(*(x.denominator for x in pulled))
        rows.append([int(x * lcm) for x in pulled])
    return np.array(rows, dtype=np.int64).reshape(len(rows), lattice.rank)


def lattice_sum_shells(f: MeroFunction, lattice: LatticeBasis, t: Sequence, box: int,
                       arrangement: Arrangement, chunk: int = 1 << 20,
                       weight=None) -> np.ndarray:
    """Complex shell sums ``S_s`` over regular points with ``max |coords| = s``.

    Returns an array of length ``box + 1``.  ``weight`` optionally maps lattice
    coordinates (integer array of shape ``(k, r)``) to a boolean mask of points to
    keep, applied on top of regularity.
    """
    r = lattice.rank
    t = np.array([float(x) for x in as_vector(t)])
    basis = np.array([[float(x) for x in row] for row in lattice.vectors])
    walls = _integer_rows(arrangement.forms, lattice)
    shells = np.zeros(box + 1, dtype=complex)
    side = 2 * box + 1
    total = side ** r
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        coords = np.empty((idx.size, r), dtype=np.int64)
        rem = idx
        for k in range(r - 1, -1, -1):
            coords[:, k] = rem % side - box
            rem = rem // side
        keep = np.all(coords @ walls.T != 0, axis=1)
        if weight is not None:
            keep &= weight(coords)
        coords = coords[keep]
        if coords.size == 0:
            continue
        pts = coords.astype(float) @ basis.T
        vals = f.evaluate(2j * np.pi * pts) * np.exp(2j * np.pi * (pts @ t))
        shell = np.max(np.abs(coords), axis=1)
        shells += np.bincount(shell, weights=vals.real, minlength=box + 1) \
            + 1j * np.bincount(shell, weights=vals.imag, minlength=box + 1)
    return shells


def szenes_lhs_truncated(case: SzenesCase) -> tuple:
    """Sum over regular points with lattice coordinates in ``[-B, B]^r``.

    Returns ``(value, tail)`` where ``tail`` is the magnitude of the outermost
    shell.  The imaginary part must vanish up to roundoff.
    """
    check_lhs_function(case.f, case.arrangement)
    shells = lattice_sum_shells(case.f, case.lattice, case.t, case.box, case.arrangement)
    total = complex(np.sum(shells))
    if abs(total.imag) > IMAG_TOL * (1 + abs(total.real)):
        raise SzenesError(f"truncated sum has imaginary part {total.imag:.3e}")
    return total.real, float(abs(shells[-1]))


def szenes_lhs_extrapolated(case: SzenesCase, exponent: int = None) -> float:
    """Richardson-corrected truncated sum (an estimate of the full series).

    The remainder of a box sum of a function decaying like ``|n|^{-d}`` in
    rank ``r`` behaves like ``c / B^{d - r}``; combining the sums at ``B`` and
    ``B/2`` removes that leading term.  This is a diagnostic, not the raw
    truncation that :func:`verify_szenes` reports.
    """
    check_lhs_function(case.f, case.arrangement)
    p = (case.f.decay_degree() - case.rank) if exponent is None else exponent
    full = np.sum(lattice_sum_shells(case.f, case.lattice, case.t, case.box, case.arrangement))
    half = np.sum(lattice_sum_shells(case.f, case.lattice, case.t, case.box // 2, case.arrangement))
    ratio = (case.box / (case.box // 2)) ** p
    return float(((ratio * full - half) / (ratio - 1)).real)


@dataclass
class VerificationReport:
    rhs: Fraction
    lhs: float
    difference: float
    tail: float
    tolerance: float
    passed: bool
    box: int

    def as_dict(self) -> dict:
        from .numkernel import frac_str
        return {"rhs_exact": frac_str(self.rhs), "rhs_float": float(self.rhs), "lhs": self.lhs,
                "abs_difference": self.difference, "tail_indicator": self.tail,
                "tolerance": self.tolerance, "passed": self.passed, "box": self.box}


def verify_szenes(case: SzenesCase, jobs: int = 1) -> VerificationReport:
    """Compare the exact right side with the raw truncated left side.

    Passes iff ``|lhs - rhs| <= max(1e-6, 10 * tail)``.
    """
    rhs = szenes_rhs(case, jobs)
    lhs, tail = szenes_lhs_truncated(case)
    diff = abs(lhs - float(rhs))
    tol = max(LHS_TOL_FLOOR, 10 * tail)
    return VerificationReport(rhs, lhs, diff, tail, tol, diff <= tol, case.box)


# --------------------------------------------------------------------------
# SU(n) form
# --------------------------------------------------------------------------

def split_exponent(f: MeroFunction) -> tuple:
    """Write ``f = g * exp(-gamma)`` when all terms share one exponent."""
    forms = {t.exp_form for t in f.terms}
    if len(forms) > 1:
        raise SzenesError("terms carry different exponentials; cannot write f = g exp(-gamma)")
    r = f.nvars
    ell = forms.pop() if forms else LinearForm.zero(r)
    g = MeroFunction((MeroTerm(t.numerator, LinearForm.zero(r), t.linear_denoms, t.expden) for t in f.terms), r)
    return g, tuple(-c for c in ell.coeffs)


def _bracket(f: MeroFunction) -> MeroFunction:
    """Reduce every exponent ``-gamma`` to ``-[[gamma]]``."""
    out = []
    for t in f.terms:
        gamma = fractional_reduce(tuple(-c for c in t.exp_form.coeffs))
        out.append(MeroTerm(t.numerator, LinearForm(tuple(-c for c in gamma)), t.linear_denoms, t.expden))
    return MeroFunction(out, f.nvars)


def sun_integrand(rs: RootSystem, g: MeroFunction, gamma: Sequence) -> MeroFunction:
    """``sum_{w in W_{n-1}} [[w f]] / prod_j (exp(-Y_j) - 1)`` with ``f = g exp(-gamma)``."""
    r = rs.rank
    gamma = as_vector(gamma)
    if len(gamma) != r or g.nvars != r:
        raise SzenesError("rank mismatch between group, function and gamma")
    if g.has_exponential():
        raise SzenesError("g must be rational; put the exponential into gamma")
    if not 0 <= gamma[-1] < 1:
        raise SzenesError("need 0 <= gamma_{n-1} < 1; apply fractional_reduce to gamma first")
    f = g.times_exp(LinearForm(tuple(-c for c in gamma)))
    total = MeroFunction.zero(r)
    for w in rs.weyl_subgroup():
        total = total + _bracket(f.substitute(rs.weyl_images(w)))
    # 1 / (exp(-Y_j) - 1) = -1 / (1 - exp(-Y_j))
    den = MeroFunction.build(r, (-1) ** r, None, (), tuple((-y, 1) for y in rs.simple_roots))
    return total * den


def szenes_sun_rhs(n: int, g: MeroFunction, gamma: Sequence) -> Fraction:
    """``Res_{Y_1=0} ... Res_{Y_{n-1}=0}`` of the symmetrized SU(n) integrand."""
    rs = RootSystem(n)
    return res_tau(rs.simple_roots, sun_integrand(rs, g, gamma))


def sun_case(n: int, f: MeroFunction, t: Sequence = None, lattice: str = "weight", box: int = 1000,
             order: Sequence[int] | None = None) -> SzenesCase:
    rs = RootSystem(n)
    return SzenesCase(rs.lattice(lattice), rs.arrangement(order), f, t, box)
