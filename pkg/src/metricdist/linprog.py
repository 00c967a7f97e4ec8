"""Dense two-phase simplex solver.

Every distortion, fairness, and instance-optimality computation in this
package reduces to small dense linear programs; this module solves them
deterministically without an external solver. The pivot loop runs Dantzig's
rule for speed and switches permanently to Bland's rule after a stall, so
termination is guaranteed even on the highly degenerate metric polytopes
this package produces.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LinearProgram",
    "LpInputError",
    "LpOutcome",
    "LpStatus",
    "SolverFailure",
    "solve",
]

DEFAULT_PIVOT_TOL = 1e-9
DEFAULT_FEAS_TOL = 1e-7
DEFAULT_MAX_PIVOTS = 1_000_000

# Consecutive pivots without objective progress tolerated under Dantzig's
# rule before switching to Bland's rule for the rest of the solve.
_STALL_LIMIT = 500

_RELATIONS = ("<=", "=", ">=")
_FLIP = {"<=": ">=", ">=": "<=", "=": "="}


class LpInputError(ValueError):
    """Malformed program: shape mismatch, unknown relation, non-finite data."""


class SolverFailure(RuntimeError):
    """Pivot cap exceeded, or the final basis failed feasibility verification."""


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LinearProgram:
    """Immutable dense LP: optimize ``objective @ x`` over rows ``A x <rel> b``.

    Args:
        sense: ``"max"`` or ``"min"``.
        objective: coefficient vector, one entry per variable.
        constraints: iterable of ``(coefficients, relation, rhs)`` with
            relation in ``{"<=", "=", ">="}``.
        nonneg: per-variable flags, default all ``True``. Variables with a
            cleared flag are free and get split internally.
    """

    __slots__ = ("sense", "objective", "rows", "relations", "rhs", "nonneg")

    def __init__(self, sense, objective, constraints=(), nonneg=None):
        if sense not in ("max", "min"):
            raise LpInputError(f"sense must be 'max' or 'min', got {sense!r}")
        self.sense = sense
        self.objective = np.asarray(objective, dtype=float)
        if self.objective.ndim != 1 or self.objective.size == 0:
            raise LpInputError("objective must be a nonempty vector")
        n = self.objective.size

        constraints = list(constraints)
        rows = np.zeros((len(constraints), n))
        rhs = np.zeros(len(constraints))
        relations = []
        for i, (coeffs, rel, b) in enumerate(constraints):
            coeffs = np.asarray(coeffs, dtype=float)
            if coeffs.shape != (n,):
                raise LpInputError(
                    f"constraint {i}: expected {n} coefficients, got {coeffs.shape}"
                )
            if rel not in _RELATIONS:
                raise LpInputError(f"constraint {i}: unknown relation {rel!r}")
            rows[i] = coeffs
            relations.append(rel)
            rhs[i] = float(b)
        self.rows = rows
        self.relations = tuple(relations)
        self.rhs = rhs

        if nonneg is None:
            self.nonneg = np.ones(n, dtype=bool)
        else:
            self.nonneg = np.asarray(nonneg, dtype=bool)
            if self.nonneg.shape != (n,):
                raise LpInputError("nonneg flags must match num_vars")

        if not (
            np.isfinite(self.objective).all()
            and np.isfinite(self.rows).all()
            and np.isfinite(self.rhs).all()
        ):
            raise LpInputError("objective, rows and rhs must all be finite")

        for arr in (self.objective, self.rows, self.rhs, self.nonneg):
            arr.setflags(write=False)

    @property
    def num_vars(self) -> int:
        return self.objective.size

    @property
    def num_constraints(self) -> int:
        return len(self.relations)

    def dump_text(self) -> str:
        """Plain-text dump, one constraint per line, for bug reports."""
        lines = [f"{self.sense} " + " ".join(repr(c) for c in self.objective)]
        free = np.flatnonzero(~self.nonneg)
        if free.size:
            lines.append("free " + " ".join(str(i) for i in free))
        for coeffs, rel, b in zip(self.rows, self.relations, self.rhs):
            lines.append(" ".join(repr(c) for c in coeffs) + f" {rel} {b!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class LpOutcome:
    """Solver verdict. ``value`` and ``assignment`` are set iff Optimal."""

    status: LpStatus
    value: float | None = None
    assignment: np.ndarray | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _PivotCounter:
    __slots__ = ("pivots", "cap")

    def __init__(self, cap):
        self.pivots = 0
        self.cap = cap

    def tick(self):
        self.pivots += 1
        if self.pivots > self.cap:
            raise SolverFailure(f"pivot cap of {self.cap} exceeded")


def _do_pivot(T, r, c):
    T[r, :] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r, :])
    T[:, c] = 0.0
    T[r, c] = 1.0


def _pivot_loop(T, basis, pivot_tol, counter) -> str:
    """Run primal simplex to optimality on a feasible tableau.

    Row ``m`` carries reduced costs for a maximization; a column enters while
    its reduced cost is below ``-pivot_tol``.
    """
    m = T.shape[0] - 1
    bland = False
    stall = 0
    while True:
        obj_row = T[m, :-1]
        if bland:
            eligible = np.flatnonzero(obj_row < -pivot_tol)
            if eligible.size == 0:
                return "optimal"
            col = int(eligible[0])
        else:
            col = int(np.argmin(obj_row))
            if obj_row[col] >= -pivot_tol:
                return "optimal"

        col_vals = T[:m, col]
        positive = col_vals > pivot_tol
        if not positive.any():
            return "unbounded"
        ratios = np.full(m, np.inf)
        ratios[positive] = T[:m, -1][positive] / col_vals[positive]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + pivot_tol)
        if bland:
            # Bland: leaving variable with the smallest index.
            row = int(ties[np.argmin(basis[ties])])
        else:
            # Prefer a large pivot element for numerical stability.
            row = int(ties[np.argmax(np.abs(col_vals[ties]))])

        before = T[m, -1]
        _do_pivot(T, row, col)
        basis[row] = col
        counter.tick()

        if not bland:
            stall = stall + 1 if T[m, -1] <= before + 1e-12 else 0
            if stall >= _STALL_LIMIT:
                bland = True


def solve(
    lp: LinearProgram,
    *,
    pivot_tol: float = DEFAULT_PIVOT_TOL,
    feas_tol: float = DEFAULT_FEAS_TOL,
    max_pivots: int = DEFAULT_MAX_PIVOTS,
) -> LpOutcome:
    """Solve ``lp`` by two-phase dense tableau simplex.

    Returns:
        LpOutcome with status Optimal (value and assignment set), Infeasible,
        or Unbounded. Same input bits always produce the same output bits.

    Raises:
        SolverFailure: pivot cap exceeded or the computed assignment fails
            feasibility verification. Distinct from an Infeasible outcome.
    """
    n_orig = lp.num_vars
    c = lp.objective if lp.sense == "max" else -lp.objective
    A = np.array(lp.rows)
    free = np.flatnonzero(~lp.nonneg)
    if free.size:
        # Split each free variable into a difference of two nonnegatives.
        A = np.hstack([A, -A[:, free]])
        c = np.concatenate([c, -c[free]])
    n_struct = c.size

    b = np.array(lp.rhs)
    relations = list(lp.relations)
    for i in range(len(b)):
        if b[i] < 0:
            A[i] *= -1.0
            b[i] *= -1.0
            relations[i] = _FLIP[relations[i]]

    m = len(b)
    n_slack = sum(1 for r in relations if r != "=")
    n_art = sum(1 for r in relations if r != "<=")
    a0 = n_struct + n_slack
    n_total = a0 + n_art

    T = np.zeros((m + 1, n_total + 1))
    T[:m, :n_struct] = A
    T[:m, -1] = b
    basis = np.zeros(m, dtype=int)
    s, a = n_struct, a0
    for i, rel in enumerate(relations):
        if rel == "<=":
            T[i, s] = 1.0
            basis[i] = s
            s += 1
        elif rel == ">=":
            T[i, s] = -1.0
            s += 1
            T[i, a] = 1.0
            basis[i] = a
            a += 1
        else:
            T[i, a] = 1.0
            basis[i] = a
            a += 1

    counter = _PivotCounter(max_pivots)

    if n_art:
        # Phase 1: maximize -(sum of artificials); feasible iff optimum is 0.
        T[m, a0:n_total] = 1.0
        for i in range(m):
            if basis[i] >= a0:
                T[m, :] -= T[i, :]
        status = _pivot_loop(T, basis, pivot_tol, counter)
        if status != "optimal":
            raise SolverFailure("phase 1 reported unbounded; numerical trouble")
        if T[m, -1] < -feas_tol:
            return LpOutcome(status=LpStatus.INFEASIBLE)

        # Pivot leftover artificials out of the basis; a row where that is
        # impossible is redundant and gets dropped.
        drop = []
        for i in range(m):
            if basis[i] >= a0:
                nonzero = np.flatnonzero(np.abs(T[i, :a0]) > pivot_tol)
                if nonzero.size == 0:
                    drop.append(i)
                else:
                    _do_pivot(T, i, int(nonzero[0]))
                    basis[i] = int(nonzero[0])
                    counter.tick()
        keep = [i for i in range(m) if i not in set(drop)]
        T = T[np.ix_(keep + [m], list(range(a0)) + [n_total])]
        basis = basis[keep]
        m = len(keep)

    # Phase 2 objective row from the original costs and the current basis.
    c2 = np.concatenate([c, np.zeros(a0 - n_struct)])
    T[m, :-1] = -c2
    T[m, -1] = 0.0
    for i in range(m):
        cb = c2[basis[i]]
        if cb != 0.0:
            T[m, :] += cb * T[i, :]

    status = _pivot_loop(T, basis, pivot_tol, counter)
    if status == "unbounded":
        return LpOutcome(status=LpStatus.UNBOUNDED)

    x_std = np.zeros(a0)
    x_std[basis] = T[:m, -1]
    x = x_std[:n_orig].copy()
    if free.size:
        x[free] -= x_std[n_orig : n_orig + free.size]

    _verify(lp, x, feas_tol)
    x[lp.nonneg & (x < 0.0)] = 0.0  # verified above to be within tolerance
    value = float(lp.objective @ x)
    x.setflags(write=False)
    return LpOutcome(status=LpStatus.OPTIMAL, value=value, assignment=x)


def _verify(lp, x, feas_tol):
    if (x[lp.nonneg] < -feas_tol).any():
        raise SolverFailure("assignment violates nonnegativity beyond tolerance")
    lhs = lp.rows @ x
    for i, rel in enumerate(lp.relations):
        err = lhs[i] - lp.rhs[i]
        ok = (
            err <= feas_tol
            if rel == "<="
            else err >= -feas_tol
            if rel == ">="
            else abs(err) <= feas_tol
        )
        if not ok:
            raise SolverFailure(
                f"assignment violates constraint {i} ({rel}) by {abs(err):.3e}"
            )
