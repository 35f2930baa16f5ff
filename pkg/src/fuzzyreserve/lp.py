"""Dense two-phase simplex with Bland's rule.

Sized for the small, highly degenerate programs produced by the fuzzy
regression fits.  Bounds are handled by substitution (shift, reflect, or
split into positive parts), never by a bounded-variable pivot.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import ComputationError

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-11
COST_TOL = 1e-9
FEAS_TOL = 1e-7
MAX_TINY_PIVOTS = 20


class NumericalBreakdown(ComputationError):
    pass


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass
class LpProblem:
    """``min c.x`` subject to rows ``a.x (<=|>=|=) rhs`` and per-variable bounds.

    ``bounds`` defaults to free variables; use ``None`` for an open side.
    """

    objective: Sequence[float]
    constraints: list[tuple[Sequence[float], str, float]] = field(default_factory=list)
    bounds: Optional[list[tuple[Optional[float], Optional[float]]]] = None
    names: Optional[list[str]] = None

    def __post_init__(self):
        n = len(self.objective)
        if self.bounds is None:
            self.bounds = [(None, None)] * n
        if self.names is None:
            self.names = [f"x{j}" for j in range(n)]
        if len(self.bounds) != n or len(self.names) != n:
            raise ValueError("bounds and names must match the objective length")
        for a, rel, _ in self.constraints:
            if len(a) != n:
                raise ValueError(f"constraint width {len(a)} != {n}")
            if rel not in ("<=", ">=", "="):
                raise ValueError(f"unknown relation {rel!r}")
        for lo, hi in self.bounds:
            if lo is not None and hi is not None and lo > hi:
                raise ValueError(f"bound lower {lo} > upper {hi}")

    def add(self, coeffs: Sequence[float], rel: str, rhs: float) -> None:
        self.constraints.append((list(coeffs), rel, float(rhs)))

    def max_violation(self, x: np.ndarray) -> float:
        worst = 0.0
        for a, rel, rhs in self.constraints:
            lhs = float(np.dot(a, x))
            if rel == "<=":
                worst = max(worst, lhs - rhs)
            elif rel == ">=":
                worst = max(worst, rhs - lhs)
            else:
                worst = max(worst, abs(lhs - rhs))
        for xj, (lo, hi) in zip(x, self.bounds):
            if lo is not None:
                worst = max(worst, lo - xj)
            if hi is not None:
                worst = max(worst, xj - hi)
        return worst


@dataclass
class LpSolution:
    status: Status
    x: np.ndarray
    objective_value: float
    iterations: int = 0


class _Tableau:
    """Row ``m`` of ``T`` holds reduced costs; column ``-1`` the right-hand side."""

    def __init__(self, T: np.ndarray, basis: list[int]):
        self.T = T
        self.basis = basis
        self.iterations = 0
        self.tiny_pivots = 0

    @property
    def m(self) -> int:
        return self.T.shape[0] - 1

    def pivot(self, r: int, c: int) -> None:
        T = self.T
        piv = T[r, c]
        if abs(piv) < 1e-9:
            self.tiny_pivots += 1
            if self.tiny_pivots > MAX_TINY_PIVOTS:
                raise NumericalBreakdown(f"repeated tiny pivots (last {piv:.3e})")
        T[r] /= piv
        col = T[:, c].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, c] = 0.0
        T[r, c] = 1.0
        self.basis[r] = c
        self.iterations += 1

    def run(self, n_allowed: int, max_iter: int) -> Status:
        T = self.T
        m = self.m
        while True:
            if self.iterations > max_iter:
                raise NumericalBreakdown(f"no convergence after {max_iter} pivots")
            costs = T[m, :n_allowed]
            entering = np.flatnonzero(costs < -COST_TOL)
            if entering.size == 0:
                return Status.OPTIMAL
            c = int(entering[0])
            col = T[:m, c]
            rows = np.flatnonzero(col > PIVOT_TOL)
            if rows.size == 0:
                return Status.UNBOUNDED
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            r = int(min(ties, key=lambda q: self.basis[q]))
            if logger.isEnabledFor(logging.DEBUG):
                logger.debug("pivot row %d col %d (basis %d -> %d)", r, c, self.basis[r], c)
            self.pivot(r, c)

    def dump(self) -> str:
        with np.printoptions(precision=4, suppress=True, linewidth=200):
            return f"basis={self.basis}\n{self.T}"


def _standardize(p: LpProblem):
    """Map ``x = M u + s0`` with ``u >= 0`` and fold finite upper bounds into rows."""
    n = len(p.objective)
    cols: list[tuple[int, float]] = []  # (original var, sign)
    s0 = np.zeros(n)
    extra_rows = []
    for j, (lo, hi) in enumerate(p.bounds):
        if lo is not None:
            s0[j] = lo
            cols.append((j, 1.0))
            if hi is not None:
                extra_rows.append((len(cols) - 1, hi - lo))
        elif hi is not None:
            s0[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    M = np.zeros((n, len(cols)))
    for q, (j, sgn) in enumerate(cols):
        M[j, q] = sgn
    A = np.array([a for a, _, _ in p.constraints], dtype=float).reshape(len(p.constraints), n)
    rels = [rel for _, rel, _ in p.constraints]
    b = np.array([rhs for _, _, rhs in p.constraints], dtype=float)
    Au = A @ M
    bu = b - A @ s0
    for q, ub in extra_rows:
        row = np.zeros(len(cols))
        row[q] = 1.0
        Au = np.vstack([Au, row])
        bu = np.append(bu, ub)
        rels.append("<=")
    c = np.asarray(p.objective, dtype=float)
    return Au, rels, bu, c @ M, float(c @ s0), M, s0


def solve(p: LpProblem, max_iter: int = 50_000, verbose: bool = False) -> LpSolution:
    """Solve ``p`` by the two-phase simplex method.

    Infeasible and unbounded programs are reported through ``status``;
    :class:`NumericalBreakdown` is raised only when pivoting degenerates
    numerically or an "optimal" point fails the feasibility check.
    """
    A, rels, b, cu, c0, M, s0 = _standardize(p)
    m, nu = A.shape
    n_orig = len(p.objective)

    # flip rows to make every right-hand side nonnegative
    for r in range(m):
        if b[r] < 0:
            A[r] *= -1
            b[r] *= -1
            rels[r] = {"<=": ">=", ">=": "<=", "=": "="}[rels[r]]

    n_slack = sum(rel != "=" for rel in rels)
    n_art = sum(rel != "<=" for rel in rels)
    n_real = nu + n_slack
    N = n_real + n_art
    T = np.zeros((m + 1, N + 1))
    T[:m, :nu] = A
    T[:m, -1] = b
    basis = [-1] * m
    s = nu
    a = n_real
    for r, rel in enumerate(rels):
        if rel == "<=":
            T[r, s] = 1.0
            basis[r] = s
            s += 1
        elif rel == ">=":
            T[r, s] = -1.0
            s += 1
            T[r, a] = 1.0
            basis[r] = a
            a += 1
        else:
            T[r, a] = 1.0
            basis[r] = a
            a += 1
    tab = _Tableau(T, basis)

    if n_art:
        art_rows = [r for r in range(m) if basis[r] >= n_real]
        T[m, :n_real] = -T[art_rows, :n_real].sum(axis=0)
        T[m, -1] = -T[art_rows, -1].sum()
        tab.run(N, max_iter)
        if verbose:
            logger.debug("phase 1 tableau:\n%s", tab.dump())
        if -T[m, -1] > 1e-9 * max(1.0, float(np.abs(b).max(initial=0.0))):
            return LpSolution(Status.INFEASIBLE, np.full(n_orig, np.nan), math.nan, tab.iterations)
        # drive remaining artificials out of the basis; drop redundant rows
        keep = []
        for r in range(m):
            if tab.basis[r] >= n_real:
                cand = np.flatnonzero(np.abs(T[r, :n_real]) > 1e-9)
                if cand.size:
                    tab.pivot(r, int(cand[0]))
                    keep.append(r)
            else:
                keep.append(r)
        if len(keep) < m:
            T = np.vstack([T[keep], T[m:]])
            tab.T = T
            tab.basis = [tab.basis[r] for r in keep]
            m = len(keep)
        T = np.hstack([T[:, :n_real], T[:, -1:]])
        tab.T = T

    T[m, :] = 0.0
    T[m, :nu] = cu
    for r, j in enumerate(tab.basis):
        if T[m, j] != 0.0:
            T[m] -= T[m, j] * T[r]
    status = tab.run(n_real, max_iter)
    if verbose:
        logger.debug("phase 2 tableau:\n%s", tab.dump())
    if status is Status.UNBOUNDED:
        return LpSolution(Status.UNBOUNDED, np.full(n_orig, np.nan), -math.inf, tab.iterations)

    u = np.zeros(n_real)
    for r, j in enumerate(tab.basis):
        u[j] = T[r, -1]
    x = M @ u[:nu] + s0
    viol = p.max_violation(x)
    if viol > FEAS_TOL:
        raise NumericalBreakdown(f"optimal point violates constraints by {viol:.3e}")
    return LpSolution(Status.OPTIMAL, x, float(np.dot(p.objective, x)), tab.iterations)
