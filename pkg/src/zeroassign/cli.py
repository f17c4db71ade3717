"""Command-line front end.

Exit codes: 0 success, 1 verification failed, 2 bad input, 3 unsolvable
request, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import numkit
from .assigner import (
    AssignmentRequest,
    CollisionPolicy,
    assign_zeros,
    eigenvalue_collisions,
    polynomial_from_zeros,
    verify_assignment,
)
from .errors import InputError, SolvabilityError, VerificationFailed
from .numkit import Polynomial, Tolerance
from .placement import RandomPolicy
from .sysmodel import StateSpaceSystem, controllable, eigenvalues, invariant_zeros, load_system

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_UNSOLVABLE, EXIT_INTERNAL = range(5)

_VALUE_FLAGS = ("--zeros", "--poly")


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(message)


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--system", required=True, type=Path, help="JSON system file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol-rank", type=float, default=Tolerance.rank_tol)
    common.add_argument("--tol-root", type=float, default=Tolerance.root_tol)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", type=Path, help="also write the machine report here")

    def target_flags(p, required):
        group = p.add_mutually_exclusive_group(required=required)
        group.add_argument("--poly", help='ascending coefficients, e.g. "2,3,1"')
        group.add_argument("--zeros", help='zeros, e.g. "-1,-2" or "-1+2i,-1-2i"')

    parser = _Parser(prog="zeroassign", description="Invariant zero assignment by output matrix synthesis.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("synth", parents=[common], help="synthesize H for the target zeros")
    target_flags(p, True)
    p.add_argument("--allow-eig-collision", action="store_true")
    sub.add_parser("zeros", parents=[common], help="invariant zeros of a system with H")
    p = sub.add_parser("check", parents=[common], help="solvability analysis of (A, B)")
    target_flags(p, False)
    p = sub.add_parser("verify", parents=[common], help="check H against a target")
    target_flags(p, True)
    return parser


def _join_values(argv: Sequence[str]) -> list[str]:
    # "--zeros -1,-2" would otherwise be read as an unknown option
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            out.append(f"{tok}={next(it, '')}")
        else:
            out.append(tok)
    return out


def parse_numbers(text: str, allow_complex: bool) -> list[complex]:
    values = []
    for item in text.split(","):
        item = item.strip().replace(" ", "")
        if not item:
            raise InputError(f"empty entry in {text!r}")
        try:
            v = complex(item.replace("i", "j")) if allow_complex else float(item)
        except ValueError:
            raise InputError(f"cannot parse number {item!r}") from None
        if not np.isfinite(v):
            raise InputError(f"non-finite number {item!r}")
        values.append(v)
    return values


def _target(args, tol: Tolerance) -> Polynomial | None:
    if args.poly is not None:
        p = Polynomial([v.real for v in parse_numbers(args.poly, False)])
        if p.is_zero():
            raise InputError("the target polynomial is identically zero")
        return p
    if args.zeros is not None:
        return polynomial_from_zeros(parse_numbers(args.zeros, True), tol)
    return None


def _load(args) -> StateSpaceSystem:
    try:
        text = args.system.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.system}: {exc.strerror}") from None
    return load_system(text)


def _fmt_matrix(m) -> str:
    m = np.atleast_2d(np.asarray(m, dtype=float))
    return "\n".join("  " + " ".join(f"{v:>12.6g}" for v in row) for row in m)


def _fmt_zeros(zs) -> str:
    parts = []
    for z in zs:
        if abs(z.imag) > 0:
            parts.append(f"{z.real:.6g}{z.imag:+.6g}i")
        else:
            parts.append(f"{z.real:.6g}")
    return "{" + ", ".join(parts) + "}"


def _cmd_synth(args, tol):
    sys_ = _load(args)
    psi = _target(args, tol)
    policy = CollisionPolicy.WARN if args.allow_eig_collision else CollisionPolicy.REJECT
    req = AssignmentRequest(sys_, psi, RandomPolicy(seed=args.seed), tol, policy)
    rep = assign_zeros(req)
    doc = {"status": "ok", "command": "synth", **rep.to_dict()}
    z = rep.zeros
    human = [
        "H =",
        _fmt_matrix(rep.h),
        f"path: {rep.placement.path.value}",
        f"finite zeros: {_fmt_zeros(z.finite_zeros)}",
        f"infinite zeros: {z.infinite_count}",
        f"det P(s) = {rep.verification.scalar_factor:.6g} * target",
        f"observable: {rep.observability}",
        f"rank H: {rep.rank_h}",
    ]
    human += [f"warning: {w}" for w in rep.warnings]
    return EXIT_OK, doc, human


def _cmd_zeros(args, tol):
    sys_ = _load(args)
    if sys_.h is None:
        raise InputError("the system file has no H")
    z = invariant_zeros(sys_, tol)
    doc = {"status": "ok", "command": "zeros", **z.to_dict()}
    human = [
        f"finite zeros: {_fmt_zeros(z.finite_zeros)}",
        f"finite count: {z.finite_count}",
        f"infinite count: {z.infinite_count}",
        f"zero polynomial (ascending): {[float(f'{c:.6g}') for c in z.zero_polynomial.coeffs]}",
    ]
    return EXIT_OK, doc, human


def _cmd_check(args, tol):
    sys_ = _load(args)
    psi = _target(args, tol)
    ctrl, ctrl_rank = controllable(sys_.a, sys_.b, tol)
    rank_b = numkit.rank(sys_.b, tol)
    eig = eigenvalues(sys_.a)
    reasons = []
    if not ctrl:
        reasons.append("(A, B) is not controllable")
    if rank_b < sys_.r:
        reasons.append("B does not have full column rank")
    collisions = []
    if psi is not None:
        psi = psi.normalized()
        if psi.degree > sys_.n - sys_.r:
            reasons.append(f"target degree {psi.degree} exceeds n - r = {sys_.n - sys_.r}")
        collisions = eigenvalue_collisions(sys_.a, psi, tol)
        if collisions:
            reasons.append("target zeros coincide with eigenvalues of A")
    solvable = not reasons
    doc = {
        "status": "ok",
        "command": "check",
        "controllable": ctrl,
        "controllability_rank": ctrl_rank,
        "rank_b": rank_b,
        "n": sys_.n,
        "r": sys_.r,
        "max_zeros": sys_.n - sys_.r,
        "eigenvalues": [[float(z.real), float(z.imag)] for z in eig],
        "collisions": [[z.real, z.imag] for z in collisions],
        "solvable": solvable,
        "reasons": reasons,
    }
    human = [
        f"n = {sys_.n}, r = {sys_.r}, at most {sys_.n - sys_.r} finite zeros",
        f"controllable: {ctrl} (Kalman rank {ctrl_rank})",
        f"rank B: {rank_b}",
        f"eigenvalues of A: {_fmt_zeros(eig)}",
        "verdict: solvable" if solvable else "verdict: not solvable: " + "; ".join(reasons),
    ]
    return (EXIT_OK if solvable else EXIT_UNSOLVABLE), doc, human


def _cmd_verify(args, tol):
    sys_ = _load(args)
    if sys_.h is None:
        raise InputError("the system file has no H")
    psi = _target(args, tol)
    v = verify_assignment(sys_, psi, tol)
    doc = {"status": "pass" if v.passed else "fail", "command": "verify", **v.to_dict()}
    human = [
        f"finite zeros: {_fmt_zeros(v.zeros.finite_zeros)}",
        f"infinite count: {v.zeros.infinite_count}",
        f"scalar factor: {v.scalar_factor:.6g}",
        f"coefficient residual: {v.coeff_residual:.3e}",
        "PASS" if v.passed else "FAIL",
    ]
    return (EXIT_OK if v.passed else EXIT_FAIL), doc, human


_COMMANDS = {"synth": _cmd_synth, "zeros": _cmd_zeros, "check": _cmd_check, "verify": _cmd_verify}


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, (InputError, _ArgumentError, ValueError)):
        return EXIT_INPUT
    if isinstance(exc, SolvabilityError):
        return EXIT_UNSOLVABLE
    if isinstance(exc, VerificationFailed):
        return EXIT_FAIL
    return EXIT_INTERNAL


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    machine = "--json" in argv
    try:
        args = _build_parser().parse_args(_join_values(argv))
        tol = Tolerance(rank_tol=args.tol_rank, root_tol=args.tol_root)
        code, doc, human = _COMMANDS[args.command](args, tol)
    except Exception as exc:  # every failure becomes an exit code plus one line
        code = _exit_code(exc)
        name = "UsageError" if isinstance(exc, _ArgumentError) else type(exc).__name__
        message = str(exc).replace("\n", " ")
        print(f"error: {name}: {message}", file=stderr)
        if machine:
            doc = {"status": "error", "error": name, "message": message, "exit_code": code}
            diagnostics = getattr(exc, "diagnostics", None)
            if diagnostics:
                doc["diagnostics"] = diagnostics
            print(json.dumps(doc, indent=2), file=stdout)
        return code

    text = json.dumps(doc, indent=2)
    if args.out is not None:
        args.out.write_text(text + "\n")
    if args.json:
        print(text, file=stdout)
    else:
        print("\n".join(human), file=stdout)
        if args.out is not None:
            print(f"report written to {args.out}", file=stdout)
    return code


def main() -> None:
    sys.exit(run())
