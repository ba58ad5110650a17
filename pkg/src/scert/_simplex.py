"""Dense two-phase simplex method for small linear programs.

Solves   max  c.x   subject to   A x <= b,   x free (unrestricted sign).

Free variables are split as x = u - v with u, v >= 0 and slack variables
turn the inequalities into equalities.  Rows with negative right-hand side
receive an artificial variable and a phase-1 feasibility problem is solved
first.  Pivoting uses Bland's rule (lowest eligible index enters, lowest
basis index leaves on ratio ties), which precludes cycling.

The problems handled here are tiny (a handful of variables, tens of rows),
so a dense tableau is the right tool.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEASIBILITY_TOL = 1e-9
PIVOT_TOL = 1e-11
MAX_ITERATIONS = 10_000

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SimplexResult:
    status: str
    value: float | None = None
    point: np.ndarray | None = None


def _pivot(tableau: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    """Pivot the full tableau (the last row is the reduced-cost row)."""
    tableau[row] /= tableau[row, col]
    factors = tableau[:, col].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])
    basis[row] = col


def _run(tableau: np.ndarray, basis: np.ndarray, cost: np.ndarray,
         allowed: np.ndarray) -> str:
    """Run simplex iterations maximizing `cost` on a tableau whose first m
    rows are B^-1 [A | b].  A reduced-cost row is appended in place and kept
    up to date by the pivots; only columns flagged in `allowed` may enter.
    Bland's rule: lowest eligible column enters, lowest basis index leaves
    on ratio ties."""
    m = tableau.shape[0] - 1
    tableau[-1, :-1] = cost - cost[basis] @ tableau[:-1, :-1]
    tableau[-1, -1] = 0.0
    for _ in range(MAX_ITERATIONS):
        eligible = allowed & (tableau[-1, :-1] > FEASIBILITY_TOL)
        if not eligible.any():
            return OPTIMAL
        entering = int(np.argmax(eligible))  # first True: Bland's rule
        column = tableau[:m, entering]
        rows = np.flatnonzero(column > PIVOT_TOL)
        if rows.size == 0:
            return UNBOUNDED
        ratios = tableau[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12]
        leaving = ties[np.argmin(basis[ties])]
        _pivot(tableau, basis, leaving, entering)
    raise RuntimeError("simplex did not converge within the iteration cap")


def maximize(objective: np.ndarray, A: np.ndarray, b: np.ndarray) -> SimplexResult:
    """Maximize objective.x over {x : A x <= b} with x free."""
    objective = np.asarray(objective, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape if A.ndim == 2 else (0, objective.size)
    if m == 0:
        if np.all(np.abs(objective) <= PIVOT_TOL):
            return SimplexResult(OPTIMAL, 0.0, np.zeros(n))
        return SimplexResult(UNBOUNDED)

    # Standard form columns: [u (n), v (n), slacks (m), artificials (k)].
    flip = b < 0.0
    A_std = np.hstack([A, -A, np.eye(m)])
    b_std = b.copy()
    A_std[flip] *= -1.0
    b_std[flip] *= -1.0

    art_rows = np.flatnonzero(flip)
    n_core = 2 * n + m
    n_art = art_rows.size
    total = n_core + n_art

    # One extra row carries the reduced costs through the pivots.
    tableau = np.zeros((m + 1, total + 1))
    tableau[:m, :n_core] = A_std
    tableau[:m, -1] = b_std
    basis = np.empty(m, dtype=int)
    basis[:] = 2 * n + np.arange(m)  # slack of each row
    for k, r in enumerate(art_rows):
        tableau[r, n_core + k] = 1.0
        basis[r] = n_core + k

    allowed = np.ones(total, dtype=bool)
    if n_art:
        phase1 = np.zeros(total)
        phase1[n_core:] = -1.0
        _run(tableau, basis, phase1, allowed)
        residual = -(phase1[basis] @ tableau[:m, -1])
        if residual > FEASIBILITY_TOL:
            return SimplexResult(INFEASIBLE)
        # Drive leftover zero-level artificials out of the basis.
        for r in range(m):
            if basis[r] >= n_core:
                cols = np.flatnonzero(np.abs(tableau[r, :n_core]) > PIVOT_TOL)
                if cols.size:
                    _pivot(tableau, basis, r, cols[0])
        allowed[n_core:] = False

    cost = np.zeros(total)
    cost[:n] = objective
    cost[n:2 * n] = -objective
    status = _run(tableau, basis, cost, allowed)
    if status == UNBOUNDED:
        return SimplexResult(UNBOUNDED)

    solution = np.zeros(total)
    solution[basis] = tableau[:m, -1]
    x = solution[:n] - solution[n:2 * n]
    return SimplexResult(OPTIMAL, float(objective @ x), x)
