"""Instance-optimal outcomes: best single winner, best lottery, and the
pairwise-response game value.

The best deterministic winner needs one worst-case LP per ordered pair of
alternatives. The best lottery is a minimax problem over the uncountable set
of cost-1-normalized consistent metrics; it is solved by cutting planes with
a separation oracle, or by the equivalent bisection-over-budgets reduction,
and the two modes cross-check each other.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from metricdist.distortion import MetricPolytope, _PolytopeSolver, a_det
from metricdist.linprog import LinearProgram, LpStatus, SolverFailure, solve
from metricdist.metricspace import CostMatrix

__all__ = [
    "ConvergenceError",
    "CuttingPlaneState",
    "OptDetResult",
    "OptRandResult",
    "OracleVerdict",
    "candidate_response_value",
    "opt_det",
    "opt_rand",
    "separation_oracle",
]

DEFAULT_EPS = 1e-4
DEFAULT_MAX_CUTS = 500


class ConvergenceError(RuntimeError):
    """Cutting-plane loop hit its cut cap; carries the state for debugging."""

    def __init__(self, message, state):
        super().__init__(f"{message}\n{state.summary()}")
        self.state = state


@dataclass
class OptDetResult:
    winner: int
    value: float
    matrix: np.ndarray  # worst-ratio table, entry [c, opponent]; diagonal 1


@dataclass
class OracleVerdict:
    """Outcome of one separation call at a candidate ``(x, gamma)``."""

    feasible: bool
    value: float
    opponent: int | None = None
    witness: CostMatrix | None = None
    per_opponent: dict = field(default_factory=dict)
    blocked: tuple = ()  # support columns with no preference chain to `opponent`


@dataclass
class CuttingPlaneState:
    eps: float
    mode: str
    cuts: list = field(default_factory=list)  # (column_sums, witness, violation)
    master_values: list = field(default_factory=list)
    blocked_columns: set = field(default_factory=set)
    iterations: int = 0

    def summary(self) -> str:
        return (
            f"mode={self.mode} iterations={self.iterations} "
            f"cuts={len(self.cuts)} blocked={sorted(self.blocked_columns)} "
            f"master_values={[round(v, 6) for v in self.master_values[-8:]]}"
        )


@dataclass
class OptRandResult:
    x: np.ndarray
    value: float
    state: CuttingPlaneState


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("METRICDIST_THREADS", "1")))
    except ValueError:
        return 1


def opt_det(profile) -> OptDetResult:
    """Winner minimizing the worst ratio against any opponent.

    Solves one LP per ordered pair; unreachable opponents yield infinite
    entries, which simply disqualify that row from the argmin. Ties break
    toward the smallest index.
    """
    m = profile.num_alternatives
    matrix = np.ones((m, m))
    pairs = [(c, cp) for c in range(m) for cp in range(m) if c != cp]

    def entry(pair, solver=None):
        try:
            return a_det(pair[0], pair[1], profile, solver=solver)[0]
        except SolverFailure as exc:
            raise SolverFailure(f"pair {pair}: {exc}") from exc

    threads = _thread_count()
    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(entry, pairs))
    else:
        solver = _PolytopeSolver(MetricPolytope(profile))
        values = [entry(pair, solver) for pair in pairs]
    for (c, cp), value in zip(pairs, values):
        matrix[c, cp] = value

    row_max = matrix.max(axis=1)
    winner = int(np.argmin(row_max))
    return OptDetResult(winner=winner, value=float(row_max[winner]), matrix=matrix)


def separation_oracle(x, gamma, profile, *, solver=None, viol_tol=DEFAULT_EPS / 2):
    """Either certify that ``x`` stays within budget ``gamma`` or produce a cut.

    For every opponent the oracle maximizes the expected cost of ``x`` over
    consistent metrics where that opponent has total cost exactly 1 and every
    other alternative total cost at least 1 (so the opponent is the cheapest).
    A value above ``gamma + viol_tol`` yields the most violating metric as a
    cutting plane. Support columns with no preference chain to some opponent
    make the value infinite; these come back in ``blocked`` instead of a
    witness.
    """
    if solver is None:
        solver = _PolytopeSolver(MetricPolytope(profile))
    poly = solver.polytope
    m = poly.num_alternatives
    x = np.asarray(x, dtype=float)
    support = [int(c) for c in np.flatnonzero(x > 0)]
    nm = poly.num_metric_vars

    best = (-math.inf, None, None)  # value, opponent, witness
    blocked = []
    per_opponent = {}
    for opponent in range(m):
        bad = [c for c in support if not poly.reach[c, opponent]]
        if bad:
            per_opponent[opponent] = math.inf
            blocked.extend((c, opponent) for c in bad)
            continue
        objective = np.zeros(nm)
        for c in support:
            solver.seed_column_pair(c, opponent)
            for v in range(poly.num_agents):
                objective[poly.var(v, c)] = x[c]
        extra = [(solver.normalization_row(opponent, nm), "=", 1.0)]
        for other in range(m):
            if other != opponent:
                extra.append((solver.normalization_row(other, nm), ">=", 1.0))
        value, metric, _, _ = solver.maximize(objective, extra)
        per_opponent[opponent] = value
        if value > best[0]:
            best = (value, opponent, CostMatrix(metric))

    if blocked:
        return OracleVerdict(
            feasible=False,
            value=math.inf,
            per_opponent=per_opponent,
            blocked=tuple(blocked),
        )
    value, opponent, witness = best
    if value > gamma + viol_tol:
        return OracleVerdict(
            feasible=False,
            value=value,
            opponent=opponent,
            witness=witness,
            per_opponent=per_opponent,
        )
    return OracleVerdict(feasible=True, value=value, per_opponent=per_opponent)


def opt_rand(
    profile,
    eps: float = DEFAULT_EPS,
    *,
    binary_search: bool = False,
    max_cuts: int = DEFAULT_MAX_CUTS,
) -> OptRandResult:
    """Lottery minimizing the worst-case expected cost ratio, within ``eps``.

    Default mode keeps the budget as a master-LP variable and adds one cut
    per violating metric; ``binary_search`` reproduces the reduction to
    feasibility checks over budgets in [1, 3] and must agree within ``2 *
    eps``. The oracle violation threshold is ``eps / 2`` to keep boundary
    cuts from cycling.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    m = profile.num_alternatives
    if m == 1:
        state = CuttingPlaneState(eps=eps, mode="trivial")
        return OptRandResult(x=np.ones(1), value=1.0, state=state)

    solver = _PolytopeSolver(MetricPolytope(profile))
    mode = "binary-search" if binary_search else "master"
    state = CuttingPlaneState(eps=eps, mode=mode)
    # The uniform matrix scaled to column sums one is always a valid
    # normalized consistent metric; seeding it enforces budget >= 1.
    n = profile.num_agents
    uniform = CostMatrix(np.full((n, m), 1.0 / n))
    state.cuts.append((np.ones(m), uniform, 0.0))

    if binary_search:
        return _opt_rand_bisect(profile, solver, state, eps, max_cuts)
    return _opt_rand_master(profile, solver, state, eps, max_cuts)


def _cut_rows(state, m, width_gamma):
    """Master rows from the collected cuts: cost(x) <= gamma per metric."""
    rows = []
    for sums, _, _ in state.cuts:
        row = np.zeros(m + width_gamma)
        row[:m] = sums
        if width_gamma:
            row[m] = -1.0
        rows.append(row)
    return rows


def _blocked_rows(state, m, total):
    rows = []
    for c in sorted(state.blocked_columns):
        row = np.zeros(total)
        row[c] = 1.0
        rows.append((row, "<=", 0.0))
    return rows


def _register_cut(state, verdict, gamma):
    if verdict.blocked:
        for c, _ in verdict.blocked:
            state.blocked_columns.add(c)
        return
    sums = verdict.witness.values.sum(axis=0)
    state.cuts.append((sums, verdict.witness, verdict.value - gamma))


def _opt_rand_master(profile, solver, state, eps, max_cuts):
    m = profile.num_alternatives
    simplex_row = np.concatenate([np.ones(m), [0.0]])
    while state.iterations < max_cuts:
        state.iterations += 1
        constraints = [(simplex_row, "=", 1.0)]
        constraints += [(row, "<=", 0.0) for row in _cut_rows(state, m, 1)]
        constraints += _blocked_rows(state, m, m + 1)
        objective = np.zeros(m + 1)
        objective[m] = 1.0
        out = solve(LinearProgram("min", objective, constraints))
        if out.status is not LpStatus.OPTIMAL:
            raise SolverFailure(f"master LP returned {out.status}")
        x_hat = out.assignment[:m] / out.assignment[:m].sum()
        gamma_hat = float(out.assignment[m])
        state.master_values.append(gamma_hat)

        verdict = separation_oracle(
            x_hat, gamma_hat, profile, solver=solver, viol_tol=eps / 2
        )
        if verdict.feasible:
            return OptRandResult(x=x_hat, value=verdict.value, state=state)
        _register_cut(state, verdict, gamma_hat)
    raise ConvergenceError("cut cap exceeded in master mode", state)


def _opt_rand_bisect(profile, solver, state, eps, max_cuts):
    m = profile.num_alternatives

    def feasibility(gamma):
        """Find x within budget gamma, or certify none exists."""
        while state.iterations < max_cuts:
            state.iterations += 1
            # Minimize the worst violation of the stored cuts over the simplex.
            simplex_row = np.concatenate([np.ones(m), [0.0]])
            constraints = [(simplex_row, "=", 1.0)]
            for row in _cut_rows(state, m, 1):
                constraints.append((row, "<=", gamma))
            constraints += _blocked_rows(state, m, m + 1)
            objective = np.zeros(m + 1)
            objective[m] = 1.0
            out = solve(LinearProgram("min", objective, constraints))
            if out.status is not LpStatus.OPTIMAL:
                raise SolverFailure(f"feasibility LP returned {out.status}")
            slack = float(out.value)
            if slack > eps / 2:
                return None  # even the finite cut subsystem is violated
            x_hat = out.assignment[:m] / out.assignment[:m].sum()
            verdict = separation_oracle(
                x_hat, gamma, profile, solver=solver, viol_tol=eps / 2
            )
            if verdict.feasible:
                return x_hat, verdict.value
            _register_cut(state, verdict, gamma)
        raise ConvergenceError(f"cut cap exceeded at budget {gamma}", state)

    hi = 3.0
    feasible_hi = feasibility(hi)
    if feasible_hi is None:
        raise ConvergenceError(
            "no lottery within budget 3; the normalized-opponent reading "
            "of the oracle is falsified",
            state,
        )
    lo = 1.0
    at_lo = feasibility(lo)
    if at_lo is not None:
        state.master_values.append(lo)
        return OptRandResult(x=at_lo[0], value=at_lo[1], state=state)
    while hi - lo > eps / 2:
        mid = 0.5 * (lo + hi)
        result = feasibility(mid)
        state.master_values.append(mid)
        if result is None:
            lo = mid
        else:
            hi = mid
            feasible_hi = result
    return OptRandResult(x=feasible_hi[0], value=feasible_hi[1], state=state)


def candidate_response_value(profile, *, matrix=None):
    """Best lottery when the adversary picks one opponent and a metric per draw.

    Minimizes the worst column of ``x @ A`` over the simplex, where ``A`` is
    the pairwise worst-ratio table. Candidates with any infinite row entry
    are forced out of the support.

    Returns:
        ``(x, value)``.
    """
    m = profile.num_alternatives
    if m == 1:
        return np.ones(1), 1.0
    if matrix is None:
        matrix = opt_det(profile).matrix
    usable = [c for c in range(m) if np.isfinite(matrix[c]).all()]
    if not usable:
        raise AssertionError("no candidate has an all-finite ratio row")

    # Variables: x over usable candidates, then the epigraph value t.
    k = len(usable)
    objective = np.zeros(k + 1)
    objective[k] = 1.0
    constraints = [(np.concatenate([np.ones(k), [0.0]]), "=", 1.0)]
    for opponent in range(m):
        row = np.zeros(k + 1)
        for i, c in enumerate(usable):
            row[i] = matrix[c, opponent]
        row[k] = -1.0
        constraints.append((row, "<=", 0.0))
    out = solve(LinearProgram("min", objective, constraints))
    if out.status is not LpStatus.OPTIMAL:
        raise SolverFailure(f"response-game LP returned {out.status}")
    x = np.zeros(m)
    for i, c in enumerate(usable):
        x[c] = out.assignment[i]
    return x, float(out.value)
