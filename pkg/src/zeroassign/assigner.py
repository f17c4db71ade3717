"""End-to-end zero assignment with independent verification."""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import numkit, placement, transform
from .errors import (
    DegreeTooHigh,
    EigenvalueCollision,
    InputError,
    RankDeficientB,
    Uncontrollable,
    VerificationFailed,
    ZeroTargetPolynomial,
)
from .numkit import DEFAULT_TOL, Polynomial, Tolerance
from .placement import PlacementResult, RandomPolicy
from .sysmodel import StateSpaceSystem, ZeroReport, controllable, invariant_zeros, observable
from .transform import TransformBundle

log = logging.getLogger(__name__)


class CollisionPolicy(str, enum.Enum):
    REJECT = "reject"
    WARN = "warn"


def polynomial_from_zeros(zeros: Sequence[complex], tol: Tolerance = DEFAULT_TOL) -> Polynomial:
    """Monic polynomial with the given zeros; complex ones must pair with their conjugates."""
    pending = [complex(z) for z in zeros]
    while pending:
        z = pending.pop(0)
        if abs(z.imag) <= tol.root_tol:
            continue
        dist = [abs(w - z.conjugate()) for w in pending]
        if not dist or min(dist) > tol.root_tol:
            raise InputError(f"zero {z} has no conjugate partner; a real H needs conjugate pairs")
        pending.pop(int(np.argmin(dist)))
    return Polynomial.from_roots(zeros)


@dataclass(frozen=True, eq=False)
class AssignmentRequest:
    system: StateSpaceSystem
    target: Polynomial | Sequence[complex]
    policy: RandomPolicy = field(default_factory=RandomPolicy)
    tol: Tolerance = DEFAULT_TOL
    eig_collision_policy: CollisionPolicy = CollisionPolicy.REJECT

    def target_polynomial(self) -> Polynomial:
        if isinstance(self.target, Polynomial):
            return self.target
        return polynomial_from_zeros(self.target, self.tol)


@dataclass(frozen=True, eq=False)
class Verification:
    zeros: ZeroReport
    scalar_factor: float
    coeff_residual: float
    root_residual: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            **self.zeros.to_dict(),
            "scalar_factor": self.scalar_factor,
            "coeff_residual": self.coeff_residual,
            "root_residual": self.root_residual,
            "passed": self.passed,
        }


def _root_residual(found, psi: Polynomial, tol: Tolerance) -> float:
    """Worst paired distance, or 0 when multiplicities make pairing meaningless.

    Double roots are compared on the square-root scale; higher multiplicities
    are left to the coefficient comparison.
    """
    wanted = numkit.poly_roots(psi) if psi.degree > 0 else np.zeros(0, complex)
    if len(found) != len(wanted):
        return float("inf")
    if wanted.size == 0:
        return 0.0
    mult = max(int(np.sum(np.abs(wanted - w) <= np.sqrt(tol.root_tol))) for w in wanted)
    if mult > 2:
        return 0.0
    dist = numkit.match_roots(found, wanted)
    return dist**2 if mult == 2 else dist


def verify_assignment(sys: StateSpaceSystem, psi: Polynomial, tol: Tolerance = DEFAULT_TOL) -> Verification:
    """Compare ``det P(s)`` of ``sys`` against ``psi`` up to a nonzero factor."""
    psi = psi.normalized()
    if psi.is_zero():
        raise ZeroTargetPolynomial("cannot verify against the zero polynomial")
    report = invariant_zeros(sys, tol)
    c = placement.scalar_factor(report.zero_polynomial, psi)
    coeff_res = numkit.coeff_distance(report.zero_polynomial, c * psi) if c != 0 else float("inf")
    root_res = _root_residual(report.finite_zeros, psi, tol)
    passed = (
        c != 0
        and report.finite_count == psi.degree
        and coeff_res <= tol.det_tol
        and root_res <= tol.root_tol
    )
    return Verification(report, c, float(coeff_res), float(root_res), bool(passed))


@dataclass(frozen=True, eq=False)
class AssignmentReport:
    h: np.ndarray
    target: Polynomial
    bundle: TransformBundle
    placement: PlacementResult
    verification: Verification
    observability: bool
    rank_h: int
    equivalence_residual: float
    warnings: list[str] = field(default_factory=list)

    @property
    def zeros(self) -> ZeroReport:
        return self.verification.zeros

    def to_dict(self) -> dict:
        return {
            "H": self.h.tolist(),
            "target": self.target.tolist(),
            "transform": self.bundle.to_dict(),
            "placement": self.placement.to_dict(),
            "verification": self.verification.to_dict(),
            "observability": self.observability,
            "rank_h": self.rank_h,
            "equivalence_residual": self.equivalence_residual,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def eigenvalue_collisions(a, psi: Polynomial, tol: Tolerance = DEFAULT_TOL) -> list[complex]:
    """Zeros of ``psi`` at which ``zI - A`` is singular."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if psi.degree <= 0:
        return []
    eig = np.linalg.eigvals(a) if n else np.zeros(0)
    hits = []
    for z in numkit.poly_roots(psi):
        near = eig.size and np.min(np.abs(eig - z)) <= tol.root_tol
        if near or numkit.rank(z * np.eye(n) - a, tol) < n:
            hits.append(complex(z))
    return hits


def assign_zeros(req: AssignmentRequest) -> AssignmentReport:
    """Synthesize ``H`` so that ``(A, B, H)`` has the requested zero polynomial."""
    sys, tol = req.system, req.tol
    a, b = sys.a, sys.b
    n, r = sys.n, sys.r
    warnings: list[str] = []

    raw = req.target_polynomial().trimmed()
    psi = raw.normalized()
    if psi.is_zero():
        raise ZeroTargetPolynomial("the target polynomial is identically zero")
    if psi.degree < raw.degree:
        warnings.append(f"target coefficients near the flush floor dropped; degree {raw.degree} -> {psi.degree}")
    mu = psi.degree
    if mu > n - r:
        raise DegreeTooHigh(f"at most n - r = {n - r} zeros can be assigned, got degree {mu}")
    if numkit.rank(b, tol) < r:
        raise RankDeficientB(f"rank B < r = {r}")

    # controllability
    ok, rk = controllable(a, b, tol)
    if not ok:
        raise Uncontrollable(f"(A, B) is not controllable (Kalman rank {rk} < {n}); no H exists")

    # targets must avoid the spectrum of A for observability
    hits = eigenvalue_collisions(a, psi, tol)
    if hits:
        msg = f"target zeros coincide with eigenvalues of A: {hits}"
        if req.eig_collision_policy is CollisionPolicy.REJECT:
            raise EigenvalueCollision(msg)
        warnings.append(msg)

    # permutation, compression, blocks
    m_perm = transform.select_permutation(b, tol)
    bundle = transform.build_transform(a, b, m_perm, tol)

    # pole placement
    if mu < n - r:
        placed = placement.place_deficient(bundle.a11_bar, bundle.a12_bar, psi, req.policy, tol)
    else:
        placed = placement.place_regular(bundle.a11_bar, bundle.a12_bar, psi, req.policy, tol)

    # back to original coordinates
    h = transform.recover_H(placed.h1_bar, placed.h2_bar, bundle)

    closed = sys.with_output(h)
    verification = verify_assignment(closed, psi, tol)
    obs = observable(a, h, tol)
    rank_h = numkit.rank(h, tol)
    det_pbar = numkit.polymat_det(transform.transformed_rosenbrock(bundle, h), n, tol)
    equiv = numkit.coeff_distance(verification.zeros.zero_polynomial, det_pbar)
    if not obs:
        warnings.append("(A, H) is not observable")

    problems = []
    if not verification.passed:
        problems.append("zero polynomial mismatch")
    if rank_h != r:
        problems.append(f"rank H = {rank_h} != {r}")
    if not obs and not hits:
        problems.append("(A, H) unobservable although no zero meets the spectrum of A")
    if problems:
        raise VerificationFailed(
            "; ".join(problems),
            {
                "A": a.tolist(),
                "B": b.tolist(),
                "H": h.tolist(),
                "target": psi.tolist(),
                "placement": placed.to_dict(),
                "transform": bundle.to_dict(),
                "verification": verification.to_dict(),
            },
        )
    log.debug("assigned %d zeros via %s path", mu, placed.path.value)
    return AssignmentReport(h, psi, bundle, placed, verification, obs, rank_h, equiv, warnings)
