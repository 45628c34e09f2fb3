"""Hyperplane arrangements: bases, circuits and diagonal (no-broken-circuit) bases."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .numkernel import LinearForm, det, identity, rank
from .residue import MeroFunction, res_tau


class ArrangementError(ValueError):
    pass


class CertificateError(ArrangementError, ArithmeticError):
    """The residue pairing of a constructed basis is not the identity."""


@dataclass(frozen=True)
class Arrangement:
    """Nonzero covectors with a total order (``order`` lists indices, smallest first)."""

    forms: tuple
    order: tuple = None
    labels: tuple = None

    def __post_init__(self):
        forms = tuple(f if isinstance(f, LinearForm) else LinearForm(f) for f in self.forms)
        if not forms:
            raise ArrangementError("an arrangement needs at least one form")
        r = forms[0].rank
        for i, f in enumerate(forms):
            if f.rank != r:
                raise ArrangementError(f"form {i} has rank {f.rank}, expected {r}")
            if f.is_zero():
                raise ArrangementError(f"form {i} is zero")
        if len(set(forms)) != len(forms):
            raise ArrangementError("duplicate forms in the arrangement")
        order = tuple(range(len(forms))) if self.order is None else tuple(self.order)
        if sorted(order) != list(range(len(forms))):
            raise ArrangementError("order must be a permutation of the form indices")
        labels = self.labels or tuple(str(f) for f in forms)
        object.__setattr__(self, "forms", forms)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "labels", tuple(labels))

    @property
    def rank(self) -> int:
        """Dimension of the ambient space."""
        return self.forms[0].rank

    def span_rank(self) -> int:
        return rank(tuple(f.coeffs for f in self.forms))

    def position(self, i: int) -> int:
        return self.order.index(i)

    def sort_indices(self, idx) -> tuple:
        return tuple(sorted(idx, key=self.position))

    def with_order(self, order: Sequence[int]) -> "Arrangement":
        return Arrangement(self.forms, tuple(order), self.labels)

    def proportional_pairs(self) -> list:
        """Pairs of distinct forms defining the same hyperplane."""
        out = []
        for i, j in itertools.combinations(range(len(self.forms)), 2):
            if rank((self.forms[i].coeffs, self.forms[j].coeffs)) == 1:
                out.append((i, j))
        return out


@dataclass(frozen=True)
class OrderedBasis:
    arrangement: Arrangement = field(repr=False, compare=False)
    indices: tuple

    def __post_init__(self):
        idx = tuple(self.indices)
        if len(set(idx)) != len(idx) or len(idx) != self.arrangement.rank:
            raise ArrangementError(f"an ordered basis needs {self.arrangement.rank} distinct indices")
        if det(tuple(self.arrangement.forms[i].coeffs for i in idx)) == 0:
            raise ArrangementError(f"forms {idx} are linearly dependent")
        object.__setattr__(self, "indices", idx)

    @property
    def forms(self) -> tuple:
        return tuple(self.arrangement.forms[i] for i in self.indices)

    def label(self) -> str:
        return "(" + ",".join(str(i + 1) for i in self.indices) + ")"


@dataclass(frozen=True)
class DiagonalBasis:
    members: tuple
    certificate: tuple

    def is_identity(self) -> bool:
        return self.certificate == identity(len(self.members))


def enumerate_bases(arr: Arrangement) -> list:
    """All bases, each ordered increasingly, listed lexicographically by position."""
    r = arr.rank
    by_pos = list(arr.order)
    out = []
    for combo in itertools.combinations(range(len(by_pos)), r):
        idx = tuple(by_pos[p] for p in combo)
        if r == 0 or det(tuple(arr.forms[i].coeffs for i in idx)) != 0:
            out.append(OrderedBasis(arr, idx))
    return out


def circuits(arr: Arrangement) -> list:
    """Minimal dependent subsets (as index tuples in arrangement order)."""
    n = len(arr.forms)
    found = []
    for size in range(1, min(n, arr.rank + 1) + 1):
        for combo in itertools.combinations(range(n), size):
            if any(set(c) <= set(combo) for c in found):
                continue
            vecs = tuple(arr.forms[i].coeffs for i in combo)
            if rank(vecs) < size:
                found.append(combo)
    return [arr.sort_indices(c) for c in found]


def broken_circuits(arr: Arrangement) -> list:
    return [c[1:] for c in circuits(arr)]


def simple_fraction(sigma) -> MeroFunction:
    """``phi_sigma = 1 / prod(alpha)`` over the forms of the basis."""
    forms = getattr(sigma, "forms", sigma)
    return MeroFunction.simple_fraction(tuple(forms))


def residue_matrix(members: Sequence, method: str = "tower") -> tuple:
    """``C[i][j] = Res^{tau_i}(phi_{sigma_j})``, rows indexed by tau."""
    return tuple(tuple(res_tau(tau, simple_fraction(sigma), method) for sigma in members) for tau in members)


def nbc_bases(arr: Arrangement) -> list:
    broken = [set(b) for b in broken_circuits(arr)]
    return [b for b in enumerate_bases(arr) if not any(bc <= set(b.indices) for bc in broken)]


def diagonal_basis(arr: Arrangement, check: bool = True) -> DiagonalBasis:
    """No-broken-circuit bases under the stored order, with their residue certificate.

    The certificate must be the identity matrix; anything else means the
    residue convention and the construction disagree, and is an error.
    """
    if arr.span_rank() != arr.rank:
        raise ArrangementError("the arrangement does not span the ambient dual space")
    members = tuple(nbc_bases(arr))
    cert = residue_matrix(members) if check else identity(len(members))
    ob = DiagonalBasis(members, cert)
    if not ob.is_identity():
        raise CertificateError(f"diagonality certificate is not the identity: {cert}")
    return ob


def expansion_coefficients(ob: DiagonalBasis, sigma) -> tuple:
    """Coordinates of ``phi_sigma`` in the diagonal basis: ``Res^tau(phi_sigma)``."""
    phi = simple_fraction(sigma)
    return tuple(res_tau(tau, phi) for tau in ob.members)


def extend_diagonal_basis(ob_prime: DiagonalBasis, e1: LinearForm, lift=None,
                          extra_forms: Sequence[LinearForm] = ()) -> tuple:
    """Append ``e1`` as the last (innermost) element of every member.

    ``ob_prime`` lives on a quotient of rank ``r - 1``; ``lift`` maps its forms
    into rank ``r`` (a list of ``r - 1`` rows, each a form on the big space;
    default: pad with a trailing zero).  Returns ``(arrangement, basis)`` for
    the arrangement ``lift(Delta') + {e1}``.
    """
    e1 = e1 if isinstance(e1, LinearForm) else LinearForm(e1)
    r = e1.rank
    if ob_prime.members:
        small = ob_prime.members[0].arrangement
        small_forms = list(small.forms)
    else:
        small_forms = []
    if lift is None:
        lifted = [LinearForm(f.coeffs + (Fraction(0),) * (r - f.rank)) for f in small_forms]
    else:
        images = [f if isinstance(f, LinearForm) else LinearForm(f) for f in lift]
        lifted = [LinearForm(tuple(sum((c * img.coeffs[k] for c, img in zip(f.coeffs, images)), Fraction(0))
                                   for k in range(r))) for f in small_forms]
    forms = lifted + [e1] + [f if isinstance(f, LinearForm) else LinearForm(f) for f in extra_forms]
    big = Arrangement(tuple(forms))
    e_index = len(lifted)
    if ob_prime.members:
        members = tuple(OrderedBasis(big, m.indices + (e_index,)) for m in ob_prime.members)
    else:
        members = (OrderedBasis(big, (e_index,)),)
    ob = DiagonalBasis(members, residue_matrix(members))
    if not ob.is_identity():
        raise CertificateError(f"extended basis is not diagonal: {ob.certificate}")
    return big, ob
