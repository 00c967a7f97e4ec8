"""Independent brute-force oracles used to cross-check the real implementations.

Everything here is deliberately naive: enumeration plus direct checks, sharing
no code path with the solvers under test.
"""

from __future__ import annotations

import itertools

import numpy as np


def point_is_feasible(lp, x, tol=1e-9):
    if (np.asarray(x)[lp.nonneg] < -tol).any():
        return False
    lhs = lp.rows @ x
    for i, rel in enumerate(lp.relations):
        err = lhs[i] - lp.rhs[i]
        if rel == "<=" and err > tol:
            return False
        if rel == ">=" and err < -tol:
            return False
        if rel == "=" and abs(err) > tol:
            return False
    return True


def brute_force_lp_best(lp, tol=1e-9):
    """Best objective over all basic feasible points of ``lp``.

    Intersects every size-``num_vars`` subset of constraint hyperplanes
    (variable bounds included), keeps the feasible ones, and takes the best
    objective. Returns ``(value, point)`` or ``(None, None)`` when no basic
    feasible point exists.
    """
    n = lp.num_vars
    planes = [(np.asarray(row), float(b)) for row, b in zip(lp.rows, lp.rhs)]
    for i in range(n):
        if lp.nonneg[i]:
            e = np.zeros(n)
            e[i] = 1.0
            planes.append((e, 0.0))

    best_val, best_x = None, None
    for combo in itertools.combinations(range(len(planes)), n):
        A = np.array([planes[i][0] for i in combo])
        b = np.array([planes[i][1] for i in combo])
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        x = np.linalg.solve(A, b)
        if not point_is_feasible(lp, x, tol):
            continue
        val = float(lp.objective @ x)
        if best_val is None or (val > best_val if lp.sense == "max" else val < best_val):
            best_val, best_x = val, x
    return best_val, best_x


def naive_grid_search(profile, metric_weights, grid_values):
    """Max cost ratio over every grid matrix, filtered by direct definition checks.

    ``metric_weights`` is the probability vector of the evaluated outcome
    (a point mass for a deterministic winner). Used only at very small sizes
    to validate the fast grid oracle.
    """
    n, m = profile.num_agents, profile.num_alternatives
    best = 0.0
    for flat in itertools.product(grid_values, repeat=n * m):
        d = np.array(flat, dtype=float).reshape(n, m)
        if not _naive_consistent(d, profile):
            continue
        if not _naive_q_metric(d):
            continue
        col_sums = d.sum(axis=0)
        denom = col_sums.min()
        if denom <= 0.0:
            continue
        best = max(best, float(metric_weights @ col_sums) / denom)
    return best


def _naive_q_metric(d, tol=1e-9):
    n, m = d.shape
    for v in range(n):
        for vp in range(n):
            for c in range(m):
                for cp in range(m):
                    if d[v, c] > d[v, cp] + d[vp, cp] + d[vp, c] + tol:
                        return False
    return True


def _naive_consistent(d, profile, tol=1e-9):
    for v, ranking in enumerate(profile.rankings):
        for t in range(len(ranking) - 1):
            if d[v, ranking[t]] > d[v, ranking[t + 1]] + tol:
                return False
    return True
