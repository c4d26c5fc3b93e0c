"""Feasibility of ``G >= 0`` subject to affine equations on its entries.

The numerical solve is delegated to cvxpy/Clarabel; every answer is then
checked against the contract here (symmetry, eigenvalue floor, residuals)
before it is reported.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence

import cvxpy as cp
import numpy as np

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
DEFAULT_ITER_CAP = 100_000
DEFAULT_DIM_CAP = 2000

# one equation: sum over upper-triangle entries (i <= j) of coeff * G[i, j] == rhs
Constraint = tuple[Mapping[tuple[int, int], float], float]


class SDPStatus(str, Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible-numerically"
    INCONCLUSIVE = "inconclusive"


class DimensionOverflow(RuntimeError):
    pass


@dataclass
class SDPResult:
    status: SDPStatus
    G: Optional[np.ndarray] = None
    # Farkas ray: A*(y) >= 0 with b.y < 0
    dual: Optional[np.ndarray] = None
    residual: float = float("nan")


def _dense(constraints: Sequence[Constraint], n: int) -> tuple[np.ndarray, np.ndarray, list[tuple[int, int]]]:
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    col = {p: k for k, p in enumerate(pairs)}
    A = np.zeros((len(constraints), len(pairs)))
    b = np.zeros(len(constraints))
    for r, (coeffs, rhs) in enumerate(constraints):
        for (i, j), v in coeffs.items():
            A[r, col[(min(i, j), max(i, j))]] += float(v)
        b[r] = float(rhs)
    return A, b, pairs


def _apply(A: np.ndarray, pairs, G: np.ndarray) -> np.ndarray:
    g = np.array([G[i, j] for i, j in pairs])
    return A @ g


def _adjoint(A: np.ndarray, pairs, y: np.ndarray, n: int) -> np.ndarray:
    """Symmetric M with <M, G> = y . A(G) for symmetric G."""
    w = A.T @ y
    M = np.zeros((n, n))
    for k, (i, j) in enumerate(pairs):
        if i == j:
            M[i, i] += w[k]
        else:
            M[i, j] += w[k] / 2
            M[j, i] += w[k] / 2
    return M


def check_feasible(constraints: Sequence[Constraint], G: np.ndarray, tol: float) -> tuple[bool, float]:
    n = G.shape[0]
    if not np.allclose(G, G.T, atol=0, rtol=0):
        return False, float("inf")
    A, b, pairs = _dense(constraints, n)
    res = float(np.max(np.abs(_apply(A, pairs, G) - b))) if len(b) else 0.0
    lam = float(np.linalg.eigvalsh(G).min()) if n else 0.0
    return res <= tol and lam >= -tol, res


def _solve(problem: cp.Problem, tol: float, iter_cap: int) -> None:
    opts = dict(max_iter=iter_cap, tol_feas=min(tol, 1e-8) * 1e-2, tol_gap_abs=1e-10, tol_gap_rel=1e-10)
    try:
        problem.solve(solver=cp.CLARABEL, **opts)
    except cp.SolverError as exc:
        log.debug("Clarabel failed (%s); retrying with SCS", exc)
        problem.solve(solver=cp.SCS, max_iters=iter_cap, eps=tol * 1e-2)


def sdp_feasibility(constraints: Sequence[Constraint], n: int, tol: float = DEFAULT_TOL,
                    iter_cap: int = DEFAULT_ITER_CAP, dim_cap: int = DEFAULT_DIM_CAP,
                    center: bool = False) -> SDPResult:
    """Search for a PSD ``G`` meeting the equations.

    With ``center=False`` the trace is minimized; with ``center=True`` the
    smallest eigenvalue is maximized under a trace budget, which gives a
    point further from the cone boundary for exact rounding.
    """
    if n > dim_cap:
        raise DimensionOverflow(f"Gram dimension {n} exceeds cap {dim_cap}")
    if n == 0:
        return SDPResult(SDPStatus.INCONCLUSIVE)
    A, b, pairs = _dense(constraints, n)
    if not constraints:
        return SDPResult(SDPStatus.FEASIBLE, np.zeros((n, n)), residual=0.0)

    z, *_ = np.linalg.lstsq(A, b, rcond=None)
    r = b - A @ z
    if float(np.abs(r).max()) > tol:
        # inconsistent equations: y = -r/|r|^2 has A^T y = 0 and b.y = -1
        return SDPResult(SDPStatus.INFEASIBLE, dual=-r / float(r @ r), residual=0.0)

    X = cp.Variable((n, n), symmetric=True)
    g = cp.hstack([X[i, j] for i, j in pairs])
    cons = [X >> 0, A @ g == b]
    if center:
        t = cp.Variable()
        base = sdp_feasibility(constraints, n, tol, iter_cap, dim_cap, center=False)
        if base.status != SDPStatus.FEASIBLE:
            return base
        budget = float(np.trace(base.G)) * 2 + 1
        prob = cp.Problem(cp.Maximize(t), [X - t * np.eye(n) >> 0, A @ g == b, cp.trace(X) <= budget])
    else:
        prob = cp.Problem(cp.Minimize(cp.trace(X)), cons)
    try:
        _solve(prob, tol, iter_cap)
    except cp.SolverError as exc:
        log.warning("SDP solve failed: %s", exc)
        return SDPResult(SDPStatus.INCONCLUSIVE)

    if prob.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) and X.value is not None:
        G = (X.value + X.value.T) / 2
        ok, res = check_feasible(constraints, G, tol)
        if ok:
            return SDPResult(SDPStatus.FEASIBLE, G, residual=res)
        # clip tiny negative eigenvalues and re-check
        w, V = np.linalg.eigh(G)
        Gc = (V * np.maximum(w, 0)) @ V.T
        ok, res = check_feasible(constraints, Gc, tol)
        if ok:
            return SDPResult(SDPStatus.FEASIBLE, Gc, residual=res)
        return SDPResult(SDPStatus.INCONCLUSIVE, G, residual=res)

    return _farkas(A, b, pairs, n, tol, iter_cap)


def _farkas(A: np.ndarray, b: np.ndarray, pairs, n: int, tol: float, iter_cap: int) -> SDPResult:
    """Look for y with A*(y) PSD and b.y = -1, which proves infeasibility."""
    y = cp.Variable(len(b))
    M = _adjoint_expr(A, pairs, y, n)
    prob = cp.Problem(cp.Minimize(cp.norm(y, 2)), [M >> 0, b @ y == -1])
    try:
        _solve(prob, tol, iter_cap)
    except cp.SolverError:
        return SDPResult(SDPStatus.INCONCLUSIVE)
    if prob.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) or y.value is None:
        return SDPResult(SDPStatus.INCONCLUSIVE)
    yv = y.value
    Mv = _adjoint(A, pairs, yv, n)
    lam = float(np.linalg.eigvalsh(Mv).min())
    res = abs(float(b @ yv) + 1)
    if lam >= -tol and res <= tol:
        return SDPResult(SDPStatus.INFEASIBLE, dual=yv, residual=max(res, -lam, 0.0))
    return SDPResult(SDPStatus.INCONCLUSIVE, residual=max(res, -lam))


def _adjoint_expr(A: np.ndarray, pairs, y, n: int):
    w = A.T @ y
    entries = [[0] * n for _ in range(n)]
    for k, (i, j) in enumerate(pairs):
        if i == j:
            entries[i][i] = w[k]
        else:
            entries[i][j] = w[k] / 2
            entries[j][i] = w[k] / 2
    return cp.bmat([[e if not isinstance(e, int) else cp.Constant(0) for e in row] for row in entries])
