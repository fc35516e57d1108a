"""Minimum-ℓ1 solutions of linear systems with an elementwise residual box.

``minimize ||y||_1  subject to  |A y - b| <= eta`` (elementwise) is solved as a
linear program over ``y = y_plus - y_minus`` with HiGHS dual simplex, so the
returned minimizer is a vertex of the feasible polytope. For ``eta = 0`` the
box collapses to equality constraints (basis pursuit).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionMismatchError, InvalidParameterError

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 50_000

#: Feasibility tolerance relative to ``1 + ||b||_inf``.
FEASIBILITY_RTOL = 1e-9

_HIGHS_TOL = 1e-10


class SolverStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True, eq=False)
class L1Problem:
    """``minimize ||y||_1  s.t.  |A y - b| <= eta``."""

    A: np.ndarray
    b: np.ndarray
    eta: float = 0.0

    def __post_init__(self) -> None:
        A = np.atleast_2d(np.asarray(self.A, dtype=np.float64))
        b = np.asarray(self.b, dtype=np.float64).ravel()
        if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
            raise InvalidParameterError(
                f"Constraint matrix must be r x m, got {A.shape}"
            )
        if b.shape[0] != A.shape[0]:
            raise DimensionMismatchError(
                f"Right-hand side of length {b.shape[0]} does not match "
                f"{A.shape[0]} rows"
            )
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise InvalidParameterError("Constraint system must be finite")
        eta = float(self.eta)
        if not np.isfinite(eta) or eta < 0:
            raise InvalidParameterError(f"Residual tolerance must be >= 0, got {eta}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "eta", eta)

    @property
    def feastol(self) -> float:
        return FEASIBILITY_RTOL * (1.0 + float(np.max(np.abs(self.b))))


@dataclass(frozen=True, eq=False)
class L1Solution:
    y: np.ndarray
    objective: float
    residual_inf: float
    status: SolverStatus
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status is SolverStatus.OPTIMAL

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "objective": self.objective,
            "residual_inf": self.residual_inf,
            "message": self.message,
        }


def _status_from_highs(code: int) -> SolverStatus:
    if code == 0:
        return SolverStatus.OPTIMAL
    if code == 2:
        return SolverStatus.INFEASIBLE
    # 1: iteration limit, 4: numerical difficulties (best iterate is kept)
    return SolverStatus.ITERATION_LIMIT


def _violation(A: np.ndarray, b: np.ndarray, eta: float, y: np.ndarray) -> float:
    """Largest distance of a residual entry outside ``[-eta, eta]``."""
    residual = A @ y - b
    return float(np.max(np.abs(residual - np.clip(residual, -eta, eta))))


def _polish(A: np.ndarray, b: np.ndarray, eta: float, y: np.ndarray) -> np.ndarray:
    """One least-squares correction on the support of ``y`` toward the box.

    Kept only if it reduces the violation.
    """
    support = np.flatnonzero(y)
    if support.size == 0:
        return y
    residual = A @ y - b
    excess = residual - np.clip(residual, -eta, eta)
    delta, *_ = np.linalg.lstsq(A[:, support], -excess, rcond=None)
    polished = y.copy()
    polished[support] += delta
    if _violation(A, b, eta, polished) < _violation(A, b, eta, y):
        logger.debug("ℓ1 solution polished back into the residual box")
        return polished
    return y


def solve_bp_box(problem: L1Problem, max_iter: int = DEFAULT_MAX_ITER) -> L1Solution:
    """Solve the box-constrained basis pursuit problem.

    Non-unique minimizers are possible; only the objective value is
    guaranteed, the returned ``y`` is whichever optimal vertex HiGHS reaches.
    """
    A, b, eta = problem.A, problem.b, problem.eta
    r, m = A.shape
    c = np.ones(2 * m)
    split = np.hstack([A, -A])
    options = {
        "maxiter": int(max_iter),
        "primal_feasibility_tolerance": _HIGHS_TOL,
        "dual_feasibility_tolerance": _HIGHS_TOL,
    }

    if eta == 0.0:
        res = linprog(
            c, A_eq=split, b_eq=b, bounds=(0, None), method="highs-ds", options=options
        )
    else:
        res = linprog(
            c,
            A_ub=np.vstack([split, -split]),
            b_ub=np.concatenate([b + eta, eta - b]),
            bounds=(0, None),
            method="highs-ds",
            options=options,
        )

    status = _status_from_highs(res.status)
    if res.x is not None:
        y = res.x[:m] - res.x[m:]
    else:
        y = np.zeros(m)
    message = str(res.message)
    if status is SolverStatus.OPTIMAL and _violation(A, b, eta, y) > problem.feastol:
        y = _polish(A, b, eta, y)
        if _violation(A, b, eta, y) > problem.feastol:
            status = SolverStatus.ITERATION_LIMIT
            message = f"{message} (solution outside the residual box)"
    residual = float(np.max(np.abs(A @ y - b))) if r else 0.0
    solution = L1Solution(
        y=y,
        objective=float(np.sum(np.abs(y))),
        residual_inf=residual,
        status=status,
        message=message,
    )
    if status is SolverStatus.ITERATION_LIMIT:
        logger.warning(f"ℓ1 solver stopped early: {message}")
    return solution


__all__ = [
    "DEFAULT_MAX_ITER",
    "FEASIBILITY_RTOL",
    "SolverStatus",
    "L1Problem",
    "L1Solution",
    "solve_bp_box",
]
