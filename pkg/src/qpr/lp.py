"""Dense two-phase simplex for small standard-form LPs.

Solves ``min c.x  s.t.  A x = b, x >= 0`` on a full tableau.  The same code
runs over floats (pivot tolerance ``tol``) or over :class:`fractions.Fraction`
(``exact=True``, tolerance zero).  Bland's rule is used for both the entering
and the leaving variable, so degenerate problems cannot cycle.

When Phase I ends with a positive artificial cost the problem is infeasible
and the Phase I simplex multipliers form a Farkas witness ``y`` with
``y^T A <= 0`` and ``y^T b > 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class PivotLimitError(RuntimeError):
    """The simplex exceeded its pivot budget (numerical trouble in float mode)."""


def rationalize(x: float, tol: float = 1e-12) -> Fraction:
    """Smallest-denominator continued-fraction convergent within ``tol`` of x."""
    if isinstance(x, Fraction):
        return x
    f = Fraction(x)
    bound = 1
    while True:
        approx = f.limit_denominator(bound)
        if abs(float(approx) - x) <= tol or bound > 10**15:
            return approx
        bound *= 10


@dataclass
class LPResult:
    status: str
    x: list | None
    objective: object
    farkas: list | None
    exact: bool
    pivots: int

    @property
    def feasible(self) -> bool:
        return self.status in (OPTIMAL, UNBOUNDED)


def _zero_one(exact: bool):
    return (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)


def _as_array(rows, exact: bool) -> np.ndarray:
    if exact:
        return np.array([[Fraction(v) for v in row] for row in rows], dtype=object)
    return np.array(rows, dtype=float)


class _Tableau:
    def __init__(self, A: np.ndarray, b: np.ndarray, exact: bool, tol: float):
        self.exact = exact
        self.tol = 0 if exact else tol
        zero, one = _zero_one(exact)
        m, n = A.shape
        self.m, self.n = m, n
        self.sign = [(-1 if b[i] < 0 else 1) for i in range(m)]
        T = np.empty((m, n + m + 1), dtype=object if exact else float)
        T[:, :] = zero
        for i in range(m):
            s = self.sign[i]
            T[i, :n] = A[i] * s
            T[i, n + i] = one
            T[i, -1] = b[i] * s
        self.T = T
        self.basis = [n + i for i in range(m)]
        self.pivots = 0

    def pivot(self, r: int, j: int):
        T = self.T
        T[r] = T[r] / T[r, j]
        for i in range(self.m):
            if i != r and T[i, j] != 0:
                T[i] = T[i] - T[i, j] * T[r]
        self.basis[r] = j
        self.pivots += 1

    def reduced_costs(self, cost: np.ndarray) -> np.ndarray:
        cb = np.array([cost[k] for k in self.basis], dtype=self.T.dtype)
        return cost - cb @ self.T[:, :-1]

    def run(self, cost: np.ndarray, allowed: Sequence[bool], max_pivots: int) -> str:
        while True:
            rc = self.reduced_costs(cost)
            entering = next((j for j in range(len(rc)) if allowed[j] and rc[j] < -self.tol), None)
            if entering is None:
                return OPTIMAL
            col = self.T[:, entering]
            best, leave = None, None
            for i in range(self.m):
                if col[i] > self.tol:
                    ratio = self.T[i, -1] / col[i]
                    if (best is None or ratio < best - self.tol
                            or (abs(ratio - best) <= self.tol and self.basis[i] < self.basis[leave])):
                        best, leave = ratio, i
            if leave is None:
                return UNBOUNDED
            self.pivot(leave, entering)
            if self.pivots > max_pivots:
                raise PivotLimitError(f"no convergence after {self.pivots} pivots")


def solve_lp(A, b, c=None, *, exact: bool = False, tol: float = 1e-9,
             max_pivots: int = 50_000) -> LPResult:
    """Minimize ``c.x`` over ``{x >= 0 : A x = b}``; ``c=None`` is a pure feasibility test."""
    A = _as_array(A, exact)
    b = _as_array([b], exact)[0]
    m, n = A.shape
    zero, one = _zero_one(exact)
    tab = _Tableau(A, b, exact, tol)
    width = n + m

    phase1 = np.array([zero] * n + [one] * m, dtype=tab.T.dtype)
    tab.run(phase1, [True] * width, max_pivots)
    rc = tab.reduced_costs(phase1)
    infeas = sum(tab.T[i, -1] for i in range(m) if tab.basis[i] >= n)
    if infeas > (0 if exact else tol):
        # simplex multipliers: reduced cost of artificial i is 1 - pi_i
        pi = [one - rc[n + i] for i in range(m)]
        y = [pi[i] * tab.sign[i] for i in range(m)]
        return LPResult(INFEASIBLE, None, None, y, exact, tab.pivots)

    # drive zero-level artificials out of the basis where possible
    for r in range(m):
        if tab.basis[r] >= n:
            j = next((j for j in range(n) if abs(tab.T[r, j]) > tab.tol), None)
            if j is not None:
                tab.pivot(r, j)

    cost = np.array(list(c if c is not None else [zero] * n) + [zero] * m, dtype=tab.T.dtype)
    if exact:
        cost = np.array([Fraction(v) for v in cost], dtype=object)
    allowed = [True] * n + [False] * m
    status = tab.run(cost, allowed, max_pivots)
    x = [zero] * n
    for i, k in enumerate(tab.basis):
        if k < n:
            x[k] = tab.T[i, -1]
    if not exact:
        x = [float(v) if abs(v) > tol else 0.0 for v in x]
    obj = sum(cost[j] * x[j] for j in range(n))
    return LPResult(status, x, obj, None, exact, tab.pivots)


def check_farkas(A, b, y, *, exact: bool = True, tol: float = 1e-9) -> bool:
    """Verify y^T A <= 0 and y^T b > 0 (exactly when ``exact``)."""
    A = _as_array(A, exact)
    b = _as_array([b], exact)[0]
    y = _as_array([y], exact)[0]
    ya = y @ A
    yb = y @ b
    t = 0 if exact else tol
    return bool(all(v <= t for v in ya) and yb > t)


def check_solution(A, b, x, *, exact: bool = True, tol: float = 1e-9) -> float:
    """Max constraint residual |Ax - b| (inf if any x < -tol)."""
    A = _as_array(A, exact)
    b = _as_array([b], exact)[0]
    x = _as_array([x], exact)[0]
    if any(v < (0 if exact else -tol) for v in x):
        return float("inf")
    res = A @ x - b
    return max((abs(v) for v in res), default=0)
