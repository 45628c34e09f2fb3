"""Intersection pairings of reduced spaces from fixed-point data.

Each subgroup ``S`` of the torus is given by generators of its Lie algebra
(points of t in Y-coordinates).  Functions on ``s`` use the coordinates
``x_i`` of ``X_S = sum x_i s_i``, printed as ``Y1..Yk``.  A fixed-point
component ``F`` supplies ``mu(F)`` (a form on t), the weights of ``S`` on its
normal bundle (forms on t) and its localized contribution ``h_F`` (a function
on ``s``) or a numerator ``eta`` with ``h_F = eta / e_F``.

Three evaluators are provided:

* the residue formula, ``n1/(n0' |W|)`` times a sum of ``Res^sigma`` blocks;
* the truncated weight-lattice sum, ``k/(|W| vol(G)^2) * sum_S S_S``;
* its residue transform (Szenes' identity applied block by block).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .arrangement import Arrangement, diagonal_basis
from .numkernel import (LatticeBasis, LinearForm, Poly, as_fraction, as_vector, identity,
                        natural_dual, restrict_lattice)
from .residue import MeroFunction, res_tau, res_tau_numeric
from .rootsystem import RootSystem
from .szenes import check_lhs_function, f_t_sigma, lattice_sum_shells

ARRANGEMENT_KINDS = ("normal_weights", "restricted_simple_roots", "restricted_positive_roots")
LATTICE_KINDS = ("integer", "weight")


class PairingError(ValueError):
    pass


@dataclass(frozen=True)
class Torus:
    """An abelian group of rank ``rank``: no roots, trivial Weyl group."""

    rank: int
    name: str = "torus"

    positive_roots = ()
    simple_roots = ()
    weyl_order = 1

    @property
    def gram(self):
        return identity(self.rank)

    @property
    def integer_lattice(self) -> LatticeBasis:
        return LatticeBasis(identity(self.rank))

    weight_lattice = integer_lattice

    def rho_heights(self) -> tuple:
        return ()

    def vol_ratio(self) -> float:
        return 1.0


@dataclass
class SubgroupDatum:
    id: str
    generators: tuple
    lattice: object = "integer"
    arrangement: object = "normal_weights"
    amw_arrangement: object = "restricted_simple_roots"
    order: tuple = None

    def __post_init__(self):
        self.generators = tuple(as_vector(g) for g in self.generators)

    @property
    def rank(self) -> int:
        return len(self.generators)


@dataclass
class FixedPointDatum:
    label: str
    subgroup: str
    mu: tuple
    normal_weights: tuple = ()
    h: MeroFunction = None
    eta: MeroFunction = None

    def __post_init__(self):
        self.mu = as_vector(self.mu)
        self.normal_weights = tuple(w if isinstance(w, LinearForm) else LinearForm(w) for w in self.normal_weights)
        if (self.h is None) == (self.eta is None):
            raise PairingError(f"fixed point {self.label!r}: give exactly one of h and eta")


@dataclass
class Constants:
    n1: Fraction = Fraction(1)
    n0p: Fraction = Fraction(1)
    k: Fraction = Fraction(1)
    vol_g_squared: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("n1", "n0p", "k", "vol_g_squared"):
            v = as_fraction(getattr(self, name))
            if v == 0:
                raise PairingError(f"constant {name} must be nonzero")
            setattr(self, name, v)


@dataclass
class PairingProblem:
    group: object
    subgroups: tuple
    fixed_points: tuple
    constants: Constants = field(default_factory=Constants)
    box: int = 2000

    def __post_init__(self):
        self.subgroups = tuple(self.subgroups)
        self.fixed_points = tuple(self.fixed_points)
        ids = [s.id for s in self.subgroups]
        if len(set(ids)) != len(ids):
            raise PairingError("subgroup ids must be unique")
        for fp in self.fixed_points:
            if fp.subgroup not in ids:
                raise PairingError(f"fixed point {fp.label!r} references unknown subgroup {fp.subgroup!r}")
        self._blocks = {}

    @property
    def weyl_order(self) -> int:
        return self.group.weyl_order

    def residue_constant(self) -> Fraction:
        c = self.constants
        return c.n1 / (c.n0p * self.weyl_order)

    def amw_constant(self) -> Fraction:
        c = self.constants
        return c.k / (self.weyl_order * c.vol_g_squared)

    def rho_factor(self) -> Fraction:
        """``prod 1 / <alpha, rho>^2`` over positive roots."""
        out = Fraction(1)
        for h in self.group.rho_heights():
            out /= h * h
        return out

    def block(self, sid: str) -> "SubgroupBlock":
        if sid not in self._blocks:
            datum = next(s for s in self.subgroups if s.id == sid)
            self._blocks[sid] = SubgroupBlock(self, datum)
        return self._blocks[sid]

    def fixed_points_of(self, sid: str) -> list:
        return [fp for fp in self.fixed_points if fp.subgroup == sid]

    def subproblem(self, sid: str) -> "PairingProblem":
        """The single-block problem for subgroup ``sid``."""
        return PairingProblem(self.group, [s for s in self.subgroups if s.id == sid],
                              self.fixed_points_of(sid), self.constants, self.box)

    def constant_blocks(self) -> dict:
        """Both normalizations side by side (exact parts as Fractions)."""
        n_plus = len(self.group.positive_roots)
        return {
            "residue_formula": {"n1": self.constants.n1, "n0p": self.constants.n0p, "weyl_order": self.weyl_order,
                                "factor": self.residue_constant()},
            "amw_formula": {"k": self.constants.k, "vol_g_squared": self.constants.vol_g_squared,
                            "weyl_order": self.weyl_order, "rho_factor": self.rho_factor(),
                            "factor": self.amw_constant() * self.rho_factor(),
                            "two_pi_power": 2 * n_plus, "vol_ratio": self.group.vol_ratio()},
        }


def _restrict(form: LinearForm, gens: Sequence) -> LinearForm:
    return LinearForm(tuple(form(g) for g in gens))


def _dedupe(forms: Sequence[LinearForm]) -> tuple:
    out = []
    for f in forms:
        if not f.is_zero() and f not in out:
            out.append(f)
    return tuple(out)


class SubgroupBlock:
    """Everything about one subgroup ``S`` expressed in coordinates on ``s``."""

    def __init__(self, problem: PairingProblem, datum: SubgroupDatum):
        self.problem = problem
        self.datum = datum
        self.k = datum.rank
        group = problem.group
        for g in datum.generators:
            if len(g) != group.rank:
                raise PairingError(f"subgroup {datum.id!r}: generator {g} has the wrong length")

    def restrict(self, form: LinearForm) -> LinearForm:
        return _restrict(form, self.datum.generators)

    @cached_property
    def lattice(self) -> LatticeBasis:
        """Lattice of ``S`` in s-coordinates (generated points)."""
        choice = self.datum.lattice
        if isinstance(choice, LatticeBasis):
            return choice
        if choice not in LATTICE_KINDS:
            raise PairingError(f"unknown lattice kind {choice!r}")
        ambient = self.problem.group.integer_lattice if choice == "integer" else self.problem.group.weight_lattice
        return restrict_lattice(ambient, self.datum.generators)

    @cached_property
    def dual(self) -> LatticeBasis | None:
        return natural_dual(self.lattice) if self.k else None

    def _arrangement(self, choice) -> Arrangement:
        group = self.problem.group
        if choice == "normal_weights":
            forms = [self.restrict(w) for fp in self.problem.fixed_points_of(self.datum.id) for w in fp.normal_weights]
        elif choice == "restricted_simple_roots":
            forms = [self.restrict(a) for a in group.simple_roots]
        elif choice == "restricted_positive_roots":
            forms = [self.restrict(a) for a in group.positive_roots]
        elif isinstance(choice, str):
            raise PairingError(f"unknown arrangement kind {choice!r}")
        else:
            forms = [f if isinstance(f, LinearForm) else LinearForm(f) for f in choice]
        forms = _dedupe(forms)
        if not forms:
            raise PairingError(f"subgroup {self.datum.id!r}: arrangement is empty")
        order = self.datum.order if self.datum.order and len(self.datum.order) == len(forms) else None
        return Arrangement(forms, order)

    def _members(self, choice) -> tuple:
        """Ordered bases (as form tuples) of a diagonal basis; rank 0 gives one empty member."""
        if self.k == 0:
            return ((),)
        return tuple(m.forms for m in diagonal_basis(self._arrangement(choice)).members)

    @cached_property
    def residue_members(self) -> tuple:
        return self._members(self.datum.arrangement)

    @cached_property
    def amw_members(self) -> tuple:
        return self._members(self.datum.amw_arrangement)

    @cached_property
    def dd_squared(self) -> MeroFunction:
        p = Poly.const(1, self.k)
        for a in self.problem.group.positive_roots:
            p = p * self.restrict(a).to_poly()
        return MeroFunction.from_poly(p * p)

    def euler_class(self, fp: FixedPointDatum) -> tuple:
        ws = [self.restrict(w) for w in fp.normal_weights]
        for w, orig in zip(ws, fp.normal_weights):
            if w.is_zero():
                raise PairingError(f"fixed point {fp.label!r}: weight {orig} vanishes on the subgroup")
        return tuple(ws)

    def h(self, fp: FixedPointDatum) -> MeroFunction:
        if fp.h is not None:
            if fp.h.nvars != self.k:
                raise PairingError(f"fixed point {fp.label!r}: h must use {self.k} variables")
            return fp.h
        ws = self.euler_class(fp)
        if fp.eta.nvars != self.k:
            raise PairingError(f"fixed point {fp.label!r}: eta must use {self.k} variables")
        return fp.eta * MeroFunction.simple_fraction(ws) if ws else fp.eta

    def mu(self, fp: FixedPointDatum) -> tuple:
        return self.restrict(LinearForm(fp.mu)).coeffs

    def integrand(self, fp: FixedPointDatum) -> MeroFunction:
        """``D^2|_S * h_F`` (no normalization)."""
        self.euler_class(fp)
        return self.dd_squared * self.h(fp)

    def f_amw(self, fp: FixedPointDatum) -> MeroFunction:
        """``f_F = prod <a, X>^2 / <a, rho>^2 * h_F`` on s."""
        return self.integrand(fp).scale(self.problem.rho_factor())


def _block_value(args) -> Fraction:
    sigma, mu, dual, f = args
    if not sigma:
        return f.constant_value()
    return res_tau(sigma, f * f_t_sigma(mu, sigma, dual))


def _run(tasks, jobs: int) -> list:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_block_value, tasks))
    return [_block_value(t) for t in tasks]


@dataclass
class BlockResult:
    subgroup: str
    sigma: tuple
    fixed_point: str
    value: Fraction
    integrand: MeroFunction = field(repr=False)


def _blocks(problem: PairingProblem, which: str, jobs: int = 1) -> list:
    """Per (S, sigma, F) values ``Res^sigma(f F^{mu(F)}_sigma)`` before the global constant."""
    plan = []
    for s in problem.subgroups:
        blk = problem.block(s.id)
        members = blk.residue_members if which == "residue" else blk.amw_members
        for fp in problem.fixed_points_of(s.id):
            f = blk.integrand(fp) if which == "residue" else blk.f_amw(fp)
            mu = blk.mu(fp)
            for sigma in members:
                plan.append((s.id, sigma, fp.label, (sigma, mu, blk.dual, f)))
    values = _run([p[3] for p in plan], jobs)
    out = []
    for (sid, sigma, label, args), v in zip(plan, values):
        full = args[3] * f_t_sigma(args[1], sigma, args[2]) if sigma else args[3]
        out.append(BlockResult(sid, sigma, label, v, full))
    return out


def residue_block_value(problem: PairingProblem, sid: str, sigma: tuple, label: str, mu=None) -> Fraction:
    """One residue block, optionally with ``mu(F)`` replaced by ``mu`` (given on s)."""
    blk = problem.block(sid)
    fp = next(f for f in problem.fixed_points_of(sid) if f.label == label)
    mu = blk.mu(fp) if mu is None else as_vector(mu)
    return _block_value((sigma, mu, blk.dual, blk.integrand(fp)))


def residue_blocks(problem: PairingProblem, jobs: int = 1) -> list:
    return _blocks(problem, "residue", jobs)


def residue_pairing(problem: PairingProblem, jobs: int = 1) -> Fraction:
    """Residue formula: ``n1/(n0'|W|) * sum over (S, sigma, F)`` of the blocks."""
    total = sum((b.value for b in residue_blocks(problem, jobs)), Fraction(0))
    return problem.residue_constant() * total


def amw_residue_form(problem: PairingProblem, jobs: int = 1) -> Fraction:
    """Residue transform of the weight-lattice sum over the restricted-root arrangements."""
    total = sum((b.value for b in _blocks(problem, "amw", jobs)), Fraction(0))
    return problem.amw_constant() * total


def amw_residue_block(problem: PairingProblem, sid: str) -> Fraction:
    """The sigma-sum for one subgroup, i.e. the exact counterpart of :func:`s_sum`."""
    return sum((b.value for b in _blocks(problem, "amw") if b.subgroup == sid), Fraction(0))


def s_sum(problem: PairingProblem, sid: str, box: int | None = None) -> tuple:
    """``S_S = sum_F sum_xi exp(<mu(F), 2 pi i xi>) f_F(2 pi i xi)``, truncated.

    ``xi`` runs over regular points of the lattice of ``S`` with coordinates
    in ``[-box, box]``.  Returns ``(value, tail)``.
    """
    blk = problem.block(sid)
    box = problem.box if box is None else box
    fps = problem.fixed_points_of(sid)
    if not fps:
        return 0.0, 0.0
    if blk.k == 0:
        return float(sum((blk.f_amw(fp).constant_value() for fp in fps), Fraction(0))), 0.0
    arr = blk._arrangement(blk.datum.amw_arrangement)
    shells = np.zeros(box + 1, dtype=complex)
    for fp in fps:
        f = blk.f_amw(fp)
        check_lhs_function(f, arr)
        shells = shells + lattice_sum_shells(f, blk.lattice, blk.mu(fp), box, arr)
    total = complex(np.sum(shells))
    if abs(total.imag) > 1e-10 * (1 + abs(total.real)):
        raise PairingError(f"lattice sum for {sid!r} has imaginary part {total.imag:.3e}")
    return total.real, float(abs(shells[-1]))


def amw_lattice_sum(problem: PairingProblem, box: int | None = None) -> tuple:
    """``k/(|W| vol(G)^2) * sum_S S_S`` with the summed tail indicators."""
    value, tail = 0.0, 0.0
    for s in problem.subgroups:
        v, t = s_sum(problem, s.id, box)
        value += v
        tail += t
    c = float(problem.amw_constant())
    return c * value, abs(c) * tail


def numeric_block_check(result: BlockResult, **kwargs) -> complex:
    """Contour-integral value of one residue block (independent of the exact engine)."""
    if not result.sigma:
        return complex(result.integrand.constant_value())
    return res_tau_numeric(result.sigma, result.integrand, **kwargs)


# --------------------------------------------------------------------------
# built-in problems
# --------------------------------------------------------------------------

def su2_single_block(mu=0, h: MeroFunction | None = None, constants: Constants | None = None,
                     box: int = 10 ** 6) -> PairingProblem:
    """SU(2), ``S = T``, one component with ``mu(F)`` and ``h_F`` (default ``1/Y1^4``)."""
    rs = RootSystem(2)
    h = MeroFunction.build(1, 1, None, [((1,), 4)]) if h is None else h
    sub = SubgroupDatum("T", ((1,),), arrangement="restricted_simple_roots")
    fp = FixedPointDatum("F", "T", (mu,), (), h=h)
    return PairingProblem(rs, (sub,), (fp,), constants or Constants(), box)


def free_torus_example(rank: int = 2, value=1) -> PairingProblem:
    """A torus acting freely on ``T x T``: the reduced space is a point.

    The only subgroup is trivial and the single component contributes ``value``.
    """
    sub = SubgroupDatum("e", (), arrangement=(), amw_arrangement=())
    fp = FixedPointDatum("TxT", "e", (0,) * rank, (), h=MeroFunction.constant(value, 0))
    return PairingProblem(Torus(rank), (sub,), (fp,), Constants(), 0)


def woodward_su3_example(mus=(Fraction(1, 3), Fraction(2, 3), 0), h_power: int = 5) -> PairingProblem:
    """SU(3) with three circle subgroups generated by ``rho`` and its cyclic images.

    On each circle the restricted Euler class of the normal bundle is
    ``g1 g2 (g1 + g2) = 2 s^3``.  ``h_F = 1 / (e_F * Y1^h_power)`` is an
    illustrative localized contribution; ``mus`` are the values of ``mu(F_j)``
    on the generators.
    """
    rs = RootSystem(3)
    gens = ((1, 1), (1, -2), (-2, 1))
    subs, fps = [], []
    g1, g2 = rs.simple_roots
    for j, (gen, m) in enumerate(zip(gens, mus)):
        sid = f"U1_{j}"
        subs.append(SubgroupDatum(sid, (gen,)))
        gen_v = as_vector(gen)
        # a form on t whose value on the generator is m
        pivot = next(i for i, c in enumerate(gen_v) if c)
        mu = [Fraction(0)] * 2
        mu[pivot] = as_fraction(m) / gen_v[pivot]
        eta = MeroFunction.build(1, 1, None, [((1,), h_power)])
        fps.append(FixedPointDatum(f"F_{j}", sid, tuple(mu), (g1, g2, g1 + g2), eta=eta))
    return PairingProblem(rs, tuple(subs), tuple(fps), Constants(), 10 ** 6)
