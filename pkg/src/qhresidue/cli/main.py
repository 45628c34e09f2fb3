"""Command-line interface.

Exit codes: 0 success, 2 parse error, 3 failed precondition, 4 computation
error, 5 verification failure.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from fractions import Fraction

from .. import __version__
from ..arrangement import (Arrangement, ArrangementError, CertificateError, OrderedBasis, circuits, diagonal_basis,
                           enumerate_bases, expansion_coefficients)
from ..expr import ExprSyntaxError, ExprValueError, format_mero, parse_mero_expression
from ..laurent import PrecisionError
from ..numkernel import LatticeError, as_vector, frac_str
from ..pairing import (PairingError, amw_lattice_sum, amw_residue_block, amw_residue_form, free_torus_example,
                       numeric_block_check, residue_blocks, s_sum, su2_single_block,
                       woodward_su3_example)
from ..residue import ResidueError, res_tau, res_tau_numeric
from ..rootsystem import RootSystem, RootSystemError, fractional_reduce
from ..szenes import (SzenesCase, SzenesError, split_exponent, szenes_lhs_extrapolated, szenes_lhs_truncated,
                      szenes_rhs, szenes_sun_rhs)
from .manifest import Manifest, ManifestError, load_manifest, load_problem, problem_to_json
from .report import write_report

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_COMPUTATION, EXIT_VERIFY = 0, 2, 3, 4, 5

BUILTIN_PROBLEMS = {
    "su2": su2_single_block,
    "woodward-su3": woodward_su3_example,
    "free-torus": free_torus_example,
}


class VerificationFailed(Exception):
    pass


def _ints(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ExprSyntaxError(f"expected comma-separated integers, got {text!r}", 0) from None


def _rationals(text: str) -> tuple:
    try:
        return as_vector(x for x in text.split(",") if x.strip())
    except (TypeError, ValueError):
        raise ExprSyntaxError(f"expected comma-separated rationals, got {text!r}", 0) from None


def _context(args) -> Manifest:
    """Arrangement context from --manifest or --group."""
    if getattr(args, "manifest", None):
        m = load_manifest(args.manifest)
    elif getattr(args, "group", None):
        rs = RootSystem.from_name(args.group)
        kind = getattr(args, "lattice", None) or "weight"
        m = Manifest(rs, rs.arrangement(), rs.lattice(kind), kind)
    else:
        raise ManifestError("give --manifest FILE or --group suN")
    if getattr(args, "order", None):
        order = [i - 1 for i in _ints(args.order)]
        m.arrangement = m.arrangement.with_order(order)
    if getattr(args, "manifest", None) and getattr(args, "lattice", None):
        if m.group is None:
            raise ManifestError("--lattice needs a group; give lattice generators in the manifest instead")
        m.lattice = m.group.lattice(args.lattice)
        m.lattice_kind = args.lattice
    return m


def _config(args) -> dict:
    skip = {"func", "report"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _emit(args, report: dict) -> None:
    report["config"] = _config(args)
    if getattr(args, "report", None):
        write_report(args.report, report)


# --------------------------------------------------------------------------
# arr
# --------------------------------------------------------------------------

def cmd_arr(args) -> dict:
    m = _context(args)
    arr = m.arrangement
    report: dict = {"command": f"arr {args.action}", "forms": [list(map(frac_str, f.coeffs)) for f in arr.forms],
                    "labels": list(arr.labels), "order": [i + 1 for i in arr.order]}
    prop = arr.proportional_pairs()
    if prop:
        report["proportional_pairs"] = [[i + 1, j + 1] for i, j in prop]
        print("note: proportional forms " + ", ".join(f"{i + 1}~{j + 1}" for i, j in prop))
    if args.action == "bases":
        bases = enumerate_bases(arr)
        for b in bases:
            print(b.label(), " ".join(arr.labels[i] for i in b.indices))
        print(f"{len(bases)} bases")
        report["bases"] = [[i + 1 for i in b.indices] for b in bases]
    elif args.action == "circuits":
        cs = circuits(arr)
        for c in cs:
            print("{" + ",".join(str(i + 1) for i in c) + "}", " ".join(arr.labels[i] for i in c))
        print(f"{len(cs)} circuits")
        report["circuits"] = [[i + 1 for i in c] for c in cs]
    elif args.action == "diagonal":
        ob = diagonal_basis(arr)
        print("members: " + ",".join(b.label() for b in ob.members))
        for b in ob.members:
            print(" ", b.label(), " ".join(arr.labels[i] for i in b.indices))
        print("certificate:")
        for row in ob.certificate:
            print("  " + " ".join(frac_str(x) for x in row))
        report["members"] = [[i + 1 for i in b.indices] for b in ob.members]
        report["certificate"] = [list(row) for row in ob.certificate]
        report["identity"] = ob.is_identity()
    elif args.action == "spanning":
        report.update(_spanning(arr, args.samples, args.seed))
        if not report["passed"]:
            _emit(args, report)
            raise VerificationFailed("spanning property violated")
    return report


def _random_regular_point(arr: Arrangement, rng: random.Random) -> tuple:
    while True:
        p = tuple(Fraction(rng.randint(-40, 40), rng.randint(1, 9)) for _ in range(arr.rank))
        if all(f(p) != 0 for f in arr.forms):
            return p


def _spanning(arr: Arrangement, samples: int, seed: int) -> dict:
    """Check ``phi_sigma = sum_tau Res^tau(phi_sigma) phi_tau`` at random rational points."""
    rng = random.Random(seed)
    ob = diagonal_basis(arr)
    points = [_random_regular_point(arr, rng) for _ in range(samples)]
    failures = []
    for sigma in enumerate_bases(arr):
        coeffs = expansion_coefficients(ob, sigma)
        for p in points:
            lhs = 1 / _prod(f(p) for f in sigma.forms)
            rhs = sum((c / _prod(f(p) for f in tau.forms) for c, tau in zip(coeffs, ob.members)), Fraction(0))
            if lhs != rhs:
                failures.append([i + 1 for i in sigma.indices])
                break
    print(f"spanning property: {len(enumerate_bases(arr))} bases x {samples} points, "
          f"{len(failures)} failures (seed {seed})")
    return {"samples": samples, "seed": seed, "failures": failures, "passed": not failures}


def _prod(xs) -> Fraction:
    out = Fraction(1)
    for x in xs:
        out *= x
    return out


# --------------------------------------------------------------------------
# res
# --------------------------------------------------------------------------

def cmd_res(args) -> dict:
    m = _context(args)
    arr = m.arrangement
    f = parse_mero_expression(args.expr, arr.rank)
    basis = OrderedBasis(arr, tuple(i - 1 for i in _ints(args.basis)))
    value = res_tau(basis, f, args.method)
    print(f"Res^{basis.label()} {format_mero(f)} = {frac_str(value)}")
    report = {"command": "res", "basis": [i + 1 for i in basis.indices], "function": format_mero(f),
              "value": value}
    if args.method == "tower":
        other = res_tau(basis, f, "sequential")
        report["sequential_value"] = other
        if other != value:
            _emit(args, report)
            raise VerificationFailed(f"exact routes disagree: {value} vs {other}")
    if args.numeric_check:
        num = res_tau_numeric(basis, f, radii_base=args.radii_base, ratio=args.ratio)
        diff = abs(num - float(value))
        ok = diff <= args.tol
        print(f"numeric oracle: {num.real:.17g}{num.imag:+.3g}j  |diff| = {diff:.3g}  "
              f"({'pass' if ok else 'FAIL'} at {args.tol:g})")
        report.update({"numeric": num, "abs_difference": diff, "tolerance": args.tol, "passed": ok})
        if not ok:
            _emit(args, report)
            raise VerificationFailed("numeric oracle disagrees with the exact residue")
    return report


# --------------------------------------------------------------------------
# szenes
# --------------------------------------------------------------------------

def cmd_szenes(args) -> dict:
    m = _context(args)
    f = parse_mero_expression(args.expr, m.rank)
    run = m.run
    t = _rationals(args.t) if args.t is not None else as_vector(run.get("t", [0] * m.rank))
    box = args.box if args.box is not None else run.get("box", 1000)
    case = SzenesCase(m.lattice, m.arrangement, f, t, box)
    start = time.perf_counter()
    rhs = szenes_rhs(case, args.jobs)
    lhs, tail = szenes_lhs_truncated(case)
    elapsed = time.perf_counter() - start
    diff = abs(lhs - float(rhs))
    tol = max(args.tol_floor, 10 * tail)
    passed = diff <= tol
    report = {"command": "szenes verify", "function": format_mero(f), "t": list(t), "box": box,
              "rhs_exact": rhs, "rhs_float": float(rhs), "lhs_truncated": lhs, "tail_indicator": tail,
              "abs_difference": diff, "tolerance": tol, "lhs_passed": passed,
              "members": [[i + 1 for i in b.indices] for b in case.basis.members]}
    print(f"RHS (residues)  = {frac_str(rhs)}  ({float(rhs):.17g})")
    print(f"LHS (box {box}) = {lhs:.17g}   tail {tail:.3g}")
    print(f"|diff| = {diff:.3g}  tolerance {tol:.3g}  -> {'pass' if passed else 'FAIL'}")
    if m.group is not None and (m.lattice_kind or "weight") == "weight" and not f.has_expden():
        g, gamma_f = split_exponent(f)
        gamma = fractional_reduce(tuple(a - b for a, b in zip(gamma_f, t)))
        sun = szenes_sun_rhs(m.group.n, g, gamma)
        report["rhs_sun_form"] = sun
        report["sun_form_agrees"] = sun == rhs
        print(f"SU(n) form       = {frac_str(sun)}  ({'agrees' if sun == rhs else 'DISAGREES'})")
        passed = passed and sun == rhs
    if args.extrapolate:
        ext = szenes_lhs_extrapolated(case)
        report["lhs_extrapolated"] = ext
        print(f"extrapolated LHS = {ext:.17g} (diagnostic, not used for pass/fail)")
    print(f"time {elapsed:.2f}s")
    report["passed"] = passed
    if not passed:
        _emit(args, report)
        raise VerificationFailed("Szenes identity check failed")
    return report


# --------------------------------------------------------------------------
# rootsys
# --------------------------------------------------------------------------

def cmd_rootsys(args) -> dict:
    rs = RootSystem.from_name(args.group)
    report: dict = {"command": f"rootsys {args.action}", "group": rs.name}
    if args.action == "dims":
        if not args.lam:
            raise ExprSyntaxError("rootsys dims needs --lambda", 0)
        lam = _rationals(args.lam)
        d = rs.weyl_dim(lam)
        print(d)
        report.update({"lambda": list(lam), "dimension": d})
    elif args.action == "rho":
        print("rho (Y-coordinates):", ",".join(frac_str(x) for x in rs.rho))
        print("rho as a form:", rs.point_to_form(rs.rho))
        report.update({"rho": list(rs.rho), "rho_form": rs.point_to_form(rs.rho)})
    elif args.action == "roots":
        rows = []
        for (j, k), g in zip(rs.positive_root_pairs, rs.positive_roots):
            print(f"gamma{j}{k} = {g}   <gamma, rho> = {frac_str(g(rs.rho))}")
            rows.append({"pair": [j, k], "form": g, "height": g(rs.rho)})
        report["positive_roots"] = rows
    elif args.action == "volratio":
        heights = rs.rho_heights()
        v = rs.vol_ratio()
        print(f"vol G / vol T = prod 1/(2 pi <a, rho>) = {v:.17g}")
        print("heights:", ",".join(frac_str(h) for h in heights))
        report.update({"vol_ratio": v, "heights": list(heights)})
    return report


# --------------------------------------------------------------------------
# pairing
# --------------------------------------------------------------------------

def _problem(args):
    if args.problem:
        p = load_problem(args.problem)
    elif args.builtin:
        p = BUILTIN_PROBLEMS[args.builtin]()
    else:
        raise ManifestError("give --problem FILE or --builtin NAME")
    if args.box is not None:
        p.box = args.box
    return p


def cmd_pairing(args) -> dict:
    p = _problem(args)
    report: dict = {"command": f"pairing {args.action}", "problem": problem_to_json(p),
                    "constants": p.constant_blocks()}
    passed = True
    if args.action in ("residue", "compare"):
        blocks = residue_blocks(p, args.jobs)
        value = p.residue_constant() * sum((b.value for b in blocks), Fraction(0))
        rows = []
        for b in blocks:
            row = {"subgroup": b.subgroup, "fixed_point": b.fixed_point,
                   "sigma": [list(map(frac_str, f.coeffs)) for f in b.sigma], "value": b.value}
            line = f"  {b.subgroup:>8} {b.fixed_point:>8}  {frac_str(b.value)}"
            if args.numeric_check:
                num = numeric_block_check(b)
                diff = abs(num - float(b.value))
                ok = diff <= args.tol
                passed &= ok
                row.update({"numeric": num, "abs_difference": diff, "passed": ok})
                line += f"   numeric {num.real:.12g} |diff| {diff:.2g} {'ok' if ok else 'FAIL'}"
            rows.append(row)
            print(line)
        print(f"residue pairing = {frac_str(value)}  ({float(value):.17g})")
        report.update({"residue_blocks": rows, "residue_pairing": value})
    if args.action in ("amw-residue", "compare"):
        v = amw_residue_form(p, args.jobs)
        print(f"AMW residue form = {frac_str(v)}  ({float(v):.17g})")
        report["amw_residue_form"] = v
    if args.action in ("amw", "compare"):
        v, tail = amw_lattice_sum(p)
        print(f"AMW lattice sum (box {p.box}) = {v:.17g}   tail {tail:.3g}")
        report.update({"amw_lattice_sum": v, "amw_tail": tail})
    if args.action == "compare":
        rows = []
        for s in p.subgroups:
            exact = amw_residue_block(p, s.id)
            approx, tail = s_sum(p, s.id)
            diff = abs(approx - float(exact))
            tol = max(args.tol_floor, 10 * tail)
            ok = diff <= tol
            passed &= ok
            print(f"  S={s.id}: residue {frac_str(exact)}  lattice {approx:.12g}  |diff| {diff:.2g}  "
                  f"tol {tol:.2g}  {'ok' if ok else 'FAIL'}")
            rows.append({"subgroup": s.id, "exact": exact, "lattice_sum": approx, "tail": tail,
                         "abs_difference": diff, "tolerance": tol, "passed": ok})
        report["transform_consistency"] = rows
    report["passed"] = passed
    if not passed:
        _emit(args, report)
        raise VerificationFailed("pairing checks failed")
    return report


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", metavar="FILE", help="write a JSON report")
    common.add_argument("--jobs", type=int, default=1, metavar="K", help="worker processes (default 1)")
    common.add_argument("--seed", type=int, default=0, metavar="S", help="seed for randomized checks")

    ctx = argparse.ArgumentParser(add_help=False)
    src = ctx.add_mutually_exclusive_group()
    src.add_argument("--manifest", metavar="FILE")
    src.add_argument("--group", metavar="suN")
    ctx.add_argument("--order", metavar="i,j,k", help="total order, 1-based form indices, smallest first")

    p = argparse.ArgumentParser(prog="qhresidue", description="Iterated residues, diagonal bases and "
                                "Szenes-type lattice sums.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    arr = sub.add_parser("arr", parents=[common, ctx], help="arrangement combinatorics")
    arr.add_argument("action", choices=["bases", "circuits", "diagonal", "spanning"])
    arr.add_argument("--samples", type=int, default=20, help="points per basis for 'spanning'")
    arr.set_defaults(func=cmd_arr)

    res = sub.add_parser("res", parents=[common, ctx], help="iterated residue of an expression")
    res.add_argument("--basis", required=True, metavar="i1,i2,...", help="1-based form indices")
    res.add_argument("--expr", required=True)
    res.add_argument("--method", choices=["tower", "sequential"], default="tower")
    res.add_argument("--numeric-check", action="store_true")
    res.add_argument("--tol", type=float, default=1e-8)
    res.add_argument("--radii-base", type=float, default=1e-1)
    res.add_argument("--ratio", type=float, default=1e-2)
    res.set_defaults(func=cmd_res)

    sz = sub.add_parser("szenes", help="Szenes identity")
    szsub = sz.add_subparsers(dest="action", required=True)
    ver = szsub.add_parser("verify", parents=[common, ctx], help="compare both sides")
    ver.add_argument("--expr", required=True)
    ver.add_argument("--t", metavar="c1,c2,...", help="shift, as a form on Y (default 0)")
    ver.add_argument("--lattice", choices=["weight", "integer"])
    ver.add_argument("--box", type=int)
    ver.add_argument("--tol-floor", type=float, default=1e-6)
    ver.add_argument("--extrapolate", action="store_true", help="also print a Richardson-corrected sum")
    ver.set_defaults(func=cmd_szenes)

    rs = sub.add_parser("rootsys", parents=[common], help="SU(n) root data")
    rs.add_argument("action", choices=["dims", "rho", "roots", "volratio"])
    rs.add_argument("--group", required=True, metavar="suN")
    rs.add_argument("--lambda", dest="lam", metavar="a1,a2,...")
    rs.set_defaults(func=cmd_rootsys)

    pr = sub.add_parser("pairing", parents=[common], help="intersection pairings from fixed-point data")
    pr.add_argument("action", choices=["amw", "residue", "amw-residue", "compare"])
    srcp = pr.add_mutually_exclusive_group()
    srcp.add_argument("--problem", metavar="FILE")
    srcp.add_argument("--builtin", choices=sorted(BUILTIN_PROBLEMS))
    pr.add_argument("--box", type=int)
    pr.add_argument("--numeric-check", action="store_true")
    pr.add_argument("--tol", type=float, default=1e-8)
    pr.add_argument("--tol-floor", type=float, default=1e-6)
    pr.set_defaults(func=cmd_pairing)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_PARSE
    try:
        report = args.func(args)
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ExprSyntaxError, ExprValueError, ManifestError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (CertificateError, ResidueError, PrecisionError, ZeroDivisionError, ArithmeticError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    except (ArrangementError, SzenesError, PairingError, RootSystemError, LatticeError, ValueError, IndexError) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    _emit(args, report)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
