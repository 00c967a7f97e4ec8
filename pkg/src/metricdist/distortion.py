"""Worst-case cost ratios over ranking-consistent metrics, certified by LP.

The admissible cost matrices consistent with a profile form a polyhedral
cone; fixing an opponent's total cost to 1 turns each worst-case ratio into
a dense LP. Quadrilateral rows are generated lazily: solve a relaxation,
add the rows it violates, repeat. A run only terminates once the incumbent
satisfies the complete inequality family, so reported optima are exact up to
solver tolerances, and every report carries a feasibility-checked witness.

A ratio is infinite exactly when some positively weighted alternative has no
chain of single-agent preferences leading to the normalized opponent: along
such a chain each consistency row caps the column, and without one the
column can grow freely. That reachability test decides unboundedness before
any LP is solved.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from metricdist.linprog import LinearProgram, LpStatus, SolverFailure, solve
from metricdist.metricspace import CostMatrix, is_consistent, is_q_metric

__all__ = [
    "BudgetExceededError",
    "DistortionReport",
    "FairnessRandReport",
    "FairnessReport",
    "MetricPolytope",
    "a_det",
    "a_rand",
    "build_full_lp",
    "dist_det",
    "dist_rand",
    "fairness_det",
    "fairness_rand",
    "grid_oracle",
]

DEFAULT_FEAS_TOL = 1e-7
DEFAULT_SEP_TOL = 1e-9
WITNESS_TOL = 1e-6
# Relaxations may be unbounded before enough quadrilateral rows are present;
# a cap row keeps them solvable. Genuine optima here are tiny compared to it.
CAP_VALUE = 1e6
_SEPARATION_BATCH = 75
_MAX_ROUNDS = 1000
_DROP_THRESHOLD = 400
_DROP_SLACK = 1e-5

THREADS_ENV_VAR = "METRICDIST_THREADS"


class BudgetExceededError(ValueError):
    """Requested enumeration exceeds the stated budget; message names the need."""


class MetricPolytope:
    """Linear description of the admissible metrics consistent with a profile.

    Variables are the ``N * M`` entries ``d(v, c)`` in row-major order, all
    nonnegative. Rows are the per-agent consistency chain (adjacent ranking
    positions suffice) and the quadrilateral inequalities.
    """

    def __init__(self, profile):
        self.profile = profile
        self.num_agents = profile.num_agents
        self.num_alternatives = profile.num_alternatives
        self.num_metric_vars = self.num_agents * self.num_alternatives
        self._reach = None
        self._consistency = None

    def var(self, v: int, c: int) -> int:
        return v * self.num_alternatives + c

    @property
    def reach(self) -> np.ndarray:
        """Closure of 'some agent prefers a over b'; diagonal True."""
        if self._reach is None:
            pos = self.profile.positions
            edge = (pos[:, :, None] < pos[:, None, :]).any(axis=0)
            reach = edge.copy()
            for mid in range(self.num_alternatives):
                reach |= np.outer(reach[:, mid], reach[mid, :])
            np.fill_diagonal(reach, True)
            self._reach = reach
        return self._reach

    def consistency_rows(self) -> np.ndarray:
        if self._consistency is None:
            n, m, nm = self.num_agents, self.num_alternatives, self.num_metric_vars
            rows = np.zeros((n * (m - 1), nm))
            r = 0
            for v, ranking in enumerate(self.profile.rankings):
                for t in range(m - 1):
                    rows[r, self.var(v, ranking[t])] = 1.0
                    rows[r, self.var(v, ranking[t + 1])] = -1.0
                    r += 1
            self._consistency = rows
        return self._consistency

    def quadruple_row(self, quad) -> np.ndarray:
        v, vp, c, cp = quad
        row = np.zeros(self.num_metric_vars)
        row[self.var(v, c)] = 1.0
        row[self.var(v, cp)] -= 1.0
        row[self.var(vp, cp)] -= 1.0
        row[self.var(vp, c)] -= 1.0
        return row

    def all_quadruples(self):
        n, m = self.num_agents, self.num_alternatives
        return [
            (v, vp, c, cp)
            for v in range(n)
            for vp in range(n)
            if v != vp
            for c in range(m)
            for cp in range(m)
            if c != cp
        ]

    def violated_quadruples(self, values, tol, exclude, limit):
        """Most-violated quadrilateral inequalities at ``values``, worst first."""
        gaps = (
            values[:, None, :, None]
            - values[:, None, None, :]
            - values[None, :, None, :]
            - values[None, :, :, None]
        )
        n, m = values.shape
        gaps[np.arange(n), np.arange(n), :, :] = -np.inf
        gaps[:, :, np.arange(m), np.arange(m)] = -np.inf
        idx = np.argwhere(gaps > tol)
        if idx.size == 0:
            return []
        order = np.argsort(-gaps[tuple(idx.T)])
        out = []
        for k in order:
            quad = tuple(int(x) for x in idx[k])
            if quad not in exclude:
                out.append(quad)
                if len(out) >= limit:
                    break
        return out

    def satisfies(self, d, tol=DEFAULT_FEAS_TOL) -> bool:
        return is_q_metric(d, tol)[0] and is_consistent(d, self.profile, tol)[0]


class _PolytopeSolver:
    """Row-generating maximizer over one profile's metric polytope.

    Generated quadrilateral rows are kept across calls; they are valid for
    every LP over the same polytope, so later calls start warm.
    """

    def __init__(self, polytope, feas_tol=DEFAULT_FEAS_TOL, sep_tol=DEFAULT_SEP_TOL):
        self.polytope = polytope
        self.feas_tol = feas_tol
        self.sep_tol = sep_tol
        self.active = []
        self.active_set = set()

    def seed_column_pair(self, c, cp):
        """Preload the agent-pair quadrilaterals tying column ``c`` to ``cp``.

        These are the rows that bound an objective on column ``c`` under a
        normalization of column ``cp``; starting with them saves most
        separation rounds.
        """
        if c == cp:
            return
        n = self.polytope.num_agents
        for v in range(n):
            for vp in range(n):
                if v != vp:
                    quad = (v, vp, c, cp)
                    if quad not in self.active_set:
                        self.active.append(quad)
                        self.active_set.add(quad)

    def maximize(
        self,
        metric_objective,
        extra_rows=(),
        aux_count=0,
        cap=CAP_VALUE,
        expect_bounded=True,
    ):
        """Maximize over the polytope plus ``extra_rows``.

        Returns ``(value, metric, aux_values, cap_hit)``. ``cap_hit`` means
        the optimum sits on the safety cap, i.e. the LP without it is
        unbounded; with ``expect_bounded`` that raises instead.
        """
        poly = self.polytope
        nm = poly.num_metric_vars
        width = nm + aux_count
        objective = np.zeros(width)
        objective[:nm] = metric_objective

        base = [(_pad(row, width), "<=", 0.0) for row in poly.consistency_rows()]
        base.extend(extra_rows)
        cap_row = (objective, "<=", float(cap))
        cap_added = False
        fresh = set()

        for _ in range(_MAX_ROUNDS):
            active_rows = [
                (_pad(poly.quadruple_row(q), width), "<=", 0.0) for q in self.active
            ]
            rows = base + active_rows + ([cap_row] if cap_added else [])
            out = _solve_with_retry(
                LinearProgram("max", objective, rows), self.feas_tol
            )
            if out.status is LpStatus.UNBOUNDED:
                if cap_added:
                    raise SolverFailure("unbounded in spite of the cap row")
                cap_added = True
                continue
            if out.status is not LpStatus.OPTIMAL:
                raise SolverFailure(f"unexpected LP status {out.status}")

            metric = out.assignment[:nm].reshape(
                poly.num_agents, poly.num_alternatives
            )
            new = poly.violated_quadruples(
                metric, self.sep_tol, self.active_set, _SEPARATION_BATCH
            )
            if not new:
                cap_hit = cap_added and out.value >= cap * (1.0 - 1e-6)
                if cap_hit and expect_bounded:
                    raise SolverFailure(
                        "objective reached the safety cap on a supposedly "
                        "bounded program"
                    )
                return out.value, metric, out.assignment[nm:], cap_hit

            # Keep the working set lean: drop rows far from binding, but
            # never ones added in the previous round.
            if len(self.active) > _DROP_THRESHOLD:
                x = out.assignment[:nm]
                kept = []
                for quad in self.active:
                    if quad in fresh or poly.quadruple_row(quad) @ x > -_DROP_SLACK:
                        kept.append(quad)
                self.active = kept
                self.active_set = set(kept)

            fresh = set(new)
            for quad in new:
                self.active.append(quad)
                self.active_set.add(quad)
        raise SolverFailure("quadrilateral row generation did not converge")

    def normalization_row(self, opponent, width):
        row = np.zeros(width)
        for v in range(self.polytope.num_agents):
            row[self.polytope.var(v, opponent)] = 1.0
        return row


def _pad(row, width):
    if row.size == width:
        return row
    out = np.zeros(width)
    out[: row.size] = row
    return out


def _solve_with_retry(lp, feas_tol):
    """Solve, retrying once with a tighter pivot tolerance on numerical drift."""
    try:
        return solve(lp, feas_tol=feas_tol)
    except SolverFailure:
        return solve(lp, pivot_tol=1e-11, feas_tol=feas_tol)


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV_VAR, "1")))
    except ValueError:
        return 1


@dataclass
class DistortionReport:
    """Worst-case ratio for one outcome, with a feasibility-checked witness."""

    rule: str
    value: float
    winner: int | None = None
    distribution: np.ndarray | None = None
    opponent: int | None = None
    witness: CostMatrix | None = None
    per_opponent: dict = field(default_factory=dict)
    tie_break: list | None = None
    tolerances: dict = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        if self.witness is None:
            return
        ok, quad = is_q_metric(self.witness, WITNESS_TOL)
        if not ok:
            raise AssertionError(f"witness violates quadrilateral {quad}")
        achieved = self.evaluate_on(self.witness)
        if abs(achieved - self.value) > WITNESS_TOL:
            raise AssertionError(
                f"witness achieves {achieved}, report claims {self.value}"
            )

    def evaluate_on(self, metric: CostMatrix) -> float:
        """Cost ratio of the reported outcome under ``metric``."""
        sums = metric.values.sum(axis=0)
        if self.distribution is not None:
            num = float(self.distribution @ sums)
        else:
            num = float(sums[self.winner])
        denom = float(sums[self.opponent]) if self.opponent is not None else sums.min()
        return num / denom


def build_full_lp(winner_or_x, opponent, profile) -> LinearProgram:
    """Materialize the complete worst-ratio LP, every quadrilateral row included.

    Row generation makes this unnecessary for solving; it exists for debug
    dumps and for checking the assembled program against the solver directly
    at small sizes.
    """
    poly = MetricPolytope(profile)
    nm = poly.num_metric_vars
    weights = _outcome_weights(winner_or_x, profile.num_alternatives)
    objective = np.zeros(nm)
    for c in range(profile.num_alternatives):
        if weights[c]:
            for v in range(profile.num_agents):
                objective[poly.var(v, c)] = weights[c]
    norm = np.zeros(nm)
    for v in range(profile.num_agents):
        norm[poly.var(v, opponent)] = 1.0
    constraints = [(norm, "=", 1.0)]
    constraints += [(row, "<=", 0.0) for row in poly.consistency_rows()]
    constraints += [(poly.quadruple_row(q), "<=", 0.0) for q in poly.all_quadruples()]
    return LinearProgram("max", objective, constraints)


def a_det(c, opponent, profile, *, solver=None):
    """Worst total-cost of ``c`` against ``opponent`` normalized to cost 1.

    Returns ``(value, witness)``; the value is ``inf`` with no witness when
    the ratio is unbounded (no preference chain from ``c`` to ``opponent``).
    """
    if solver is None:
        solver = _PolytopeSolver(MetricPolytope(profile))
    poly = solver.polytope
    if not poly.reach[c, opponent]:
        return math.inf, None
    solver.seed_column_pair(c, opponent)
    nm = poly.num_metric_vars
    objective = np.zeros(nm)
    for v in range(poly.num_agents):
        objective[poly.var(v, c)] = 1.0
    extra = [(solver.normalization_row(opponent, nm), "=", 1.0)]
    value, metric, _, _ = solver.maximize(objective, extra)
    return value, CostMatrix(metric)


def a_rand(x, opponent, profile, *, solver=None):
    """Worst expected cost of distribution ``x`` against a normalized opponent."""
    x = _validated_distribution(x, profile.num_alternatives)
    if solver is None:
        solver = _PolytopeSolver(MetricPolytope(profile))
    poly = solver.polytope
    support = np.flatnonzero(x > 0)
    if not all(poly.reach[c, opponent] for c in support):
        return math.inf, None
    nm = poly.num_metric_vars
    objective = np.zeros(nm)
    for c in support:
        solver.seed_column_pair(int(c), opponent)
        for v in range(poly.num_agents):
            objective[poly.var(v, c)] = x[c]
    extra = [(solver.normalization_row(opponent, nm), "=", 1.0)]
    value, metric, _, _ = solver.maximize(objective, extra)
    return value, CostMatrix(metric)


def _validated_distribution(x, m):
    x = np.asarray(x, dtype=float)
    if x.shape != (m,) or (x < 0).any() or abs(x.sum() - 1.0) > 1e-9:
        raise ValueError("x must be a probability vector over the alternatives")
    return x


def dist_det(winner, profile, *, rule="", tie_break=None, seed=None):
    """Worst-case distortion of picking ``winner``: max over opponents of a_det."""
    return _distortion_report(
        profile,
        winner=winner,
        distribution=None,
        rule=rule,
        tie_break=tie_break,
        seed=seed,
    )


def dist_rand(x, profile, *, rule="", tie_break=None, seed=None):
    """Worst-case expected distortion of distribution ``x``."""
    x = _validated_distribution(x, profile.num_alternatives)
    return _distortion_report(
        profile, winner=None, distribution=x, rule=rule, tie_break=tie_break, seed=seed
    )


def _distortion_report(profile, *, winner, distribution, rule, tie_break, seed):
    m = profile.num_alternatives
    opponents = [c for c in range(m) if c != winner]
    tolerances = {"feas_tol": DEFAULT_FEAS_TOL, "witness_tol": WITNESS_TOL}

    def evaluate(opponent, solver=None):
        if distribution is None:
            return a_det(winner, opponent, profile, solver=solver)
        return a_rand(distribution, opponent, profile, solver=solver)

    if not opponents:
        return DistortionReport(
            rule=rule,
            value=1.0,
            winner=winner,
            distribution=distribution,
            tie_break=tie_break,
            tolerances=tolerances,
            seed=seed,
        )

    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(evaluate, opponents))
    else:
        solver = _PolytopeSolver(MetricPolytope(profile))
        results = [evaluate(opp, solver) for opp in opponents]

    per_opponent = {opp: value for opp, (value, _) in zip(opponents, results)}
    # Fixed reduction order: first opponent attaining the max wins ties.
    best_idx = max(range(len(opponents)), key=lambda i: results[i][0])
    best_value, best_witness = results[best_idx]
    return DistortionReport(
        rule=rule,
        value=best_value,
        winner=winner,
        distribution=distribution,
        opponent=opponents[best_idx] if math.isfinite(best_value) else None,
        witness=best_witness if math.isfinite(best_value) else None,
        per_opponent=per_opponent,
        tie_break=tie_break,
        tolerances=tolerances,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Fairness: ratios of sums of the k largest agent costs


@dataclass
class FairnessReport:
    winner: int
    per_k: dict
    value: float
    argmax: tuple | None = None  # (k, opponent, subset)
    witness: CostMatrix | None = None


@dataclass
class FairnessRandReport:
    distribution: np.ndarray
    per_k: dict  # k -> (lower, upper)
    exact_k: dict  # k -> bool
    value_bounds: tuple

    @property
    def exact_value(self):
        lo, hi = self.value_bounds
        return lo if all(self.exact_k.values()) else None


def _top_k_rows(poly, z, k, width):
    """Rows encoding 'sum of the k largest entries of column z is at most 1'.

    Aux variables: a threshold ``t`` and per-agent overflows ``u_v``; the
    bound is exactly ``k*t + sum_v u_v <= 1`` with ``u_v >= d(v,z) - t``.
    """
    nm = poly.num_metric_vars
    n = poly.num_agents
    t_idx, u_base = nm, nm + 1
    rows = []
    for v in range(n):
        row = np.zeros(width)
        row[poly.var(v, z)] = 1.0
        row[t_idx] = -1.0
        row[u_base + v] = -1.0
        rows.append((row, "<=", 0.0))
    bound = np.zeros(width)
    bound[t_idx] = float(k)
    bound[u_base : u_base + n] = 1.0
    rows.append((bound, "<=", 1.0))
    return rows


def fairness_det(winner, profile, k_set=None, budget=10):
    """Worst-case top-k cost ratio of ``winner`` against every opponent.

    For each opponent the k-largest bound is linearized exactly; the convex
    objective side is enumerated over all agent subsets of size k, which is
    why ``budget`` caps the number of agents.
    """
    n = profile.num_agents
    if n > budget:
        raise BudgetExceededError(
            f"subset enumeration needs budget >= {n}, got {budget}"
        )
    k_set = _validated_k_set(k_set, n)
    poly = MetricPolytope(profile)
    solver = _PolytopeSolver(poly)
    nm = poly.num_metric_vars
    width = nm + 1 + n

    per_k = {}
    best = (0.0, None, None)
    for k in k_set:
        k_best = 0.0
        for z in range(profile.num_alternatives):
            if z == winner:
                continue
            if not poly.reach[winner, z]:
                k_best = math.inf
                per_k[k] = math.inf
                best = (math.inf, (k, z, None), None)
                break
            rows = _top_k_rows(poly, z, k, width)
            for subset in itertools.combinations(range(n), k):
                objective = np.zeros(nm)
                for v in subset:
                    objective[poly.var(v, winner)] = 1.0
                value, metric, _, _ = solver.maximize(
                    objective, rows, aux_count=1 + n
                )
                k_best = max(k_best, value)
                if value > best[0]:
                    best = (value, (k, z, subset), CostMatrix(metric))
        per_k[k] = k_best
    value = max(per_k.values())
    return FairnessReport(
        winner=winner,
        per_k=per_k,
        value=value,
        argmax=best[1],
        witness=best[2],
    )


def _validated_k_set(k_set, n):
    if k_set is None:
        return list(range(1, n + 1))
    k_set = sorted(set(int(k) for k in k_set))
    if not k_set or k_set[0] < 1 or k_set[-1] > n:
        raise ValueError(f"k values must lie in 1..{n}")
    return k_set


def fairness_rand(x, profile, k_set=None, budget=20_000):
    """Expected top-k cost ratio bounds for distribution ``x``.

    Exact per k when the joint enumeration of per-candidate subset tuples
    fits in ``budget``; otherwise returns (lower, upper) where the lower
    bound is a coordinate-ascent fixpoint over subset tuples and the upper
    bound relaxes the shared metric to one optimum per candidate.
    """
    x = _validated_distribution(x, profile.num_alternatives)
    n = profile.num_agents
    k_set = _validated_k_set(k_set, n)
    support = [int(c) for c in np.flatnonzero(x > 0)]
    poly = MetricPolytope(profile)
    solver = _PolytopeSolver(poly)
    nm = poly.num_metric_vars
    width = nm + 1 + n

    per_k, exact_k = {}, {}
    for k in k_set:
        subsets = list(itertools.combinations(range(n), k))
        if len(subsets) * len(support) > budget:
            raise BudgetExceededError(
                f"per-candidate enumeration needs budget >= "
                f"{len(subsets) * len(support)}, got {budget}"
            )
        exact = len(subsets) ** len(support) <= budget
        exact_k[k] = exact
        lo_k, hi_k = 0.0, 0.0
        for z in range(profile.num_alternatives):
            if not all(poly.reach[c, z] for c in support):
                lo_k = hi_k = math.inf
                break
            rows = _top_k_rows(poly, z, k, width)

            def tuple_value(subset_by_candidate):
                objective = np.zeros(nm)
                for c, subset in zip(support, subset_by_candidate):
                    for v in subset:
                        objective[poly.var(v, c)] += x[c]
                value, metric, _, _ = solver.maximize(
                    objective, rows, aux_count=1 + n
                )
                return value, metric

            if exact:
                value = max(
                    tuple_value(combo)[0]
                    for combo in itertools.product(subsets, repeat=len(support))
                )
                lo_k, hi_k = max(lo_k, value), max(hi_k, value)
                continue

            # Upper bound: per-candidate suprema under the shared
            # normalization, summed with weights x.
            upper = 0.0
            start_tuple = []
            for c in support:
                best_c, best_subset = 0.0, subsets[0]
                for subset in subsets:
                    objective = np.zeros(nm)
                    for v in subset:
                        objective[poly.var(v, c)] = 1.0
                    value, _, _, _ = solver.maximize(objective, rows, aux_count=1 + n)
                    if value > best_c:
                        best_c, best_subset = value, subset
                upper += x[c] * best_c
                start_tuple.append(best_subset)

            # Lower bound: coordinate ascent on the subset tuple.
            current = tuple(start_tuple)
            value, metric = tuple_value(current)
            for _ in range(100):
                refreshed = tuple(
                    tuple(sorted(np.argsort(-metric[:, c], kind="stable")[:k]))
                    for c in support
                )
                if refreshed == current:
                    break
                new_value, new_metric = tuple_value(refreshed)
                if new_value <= value + 1e-12:
                    break
                current, value, metric = refreshed, new_value, new_metric
            lo_k = max(lo_k, value)
            hi_k = max(hi_k, upper)
        per_k[k] = (lo_k, hi_k)

    bounds = (max(lo for lo, _ in per_k.values()), max(hi for _, hi in per_k.values()))
    return FairnessRandReport(
        distribution=x, per_k=per_k, exact_k=exact_k, value_bounds=bounds
    )


# ---------------------------------------------------------------------------
# Independent grid-search oracle


def grid_oracle(winner_or_x, profile, grid_step=0.5, grid_max=3.0):
    """Lower bound on distortion by exhausting a finite cost grid.

    Enumerates every admissible consistent matrix with entries in
    ``{0, grid_step, ..., grid_max}`` and returns the largest cost ratio,
    skipping zero-denominator grids. Limited to ``N * M <= 9``.
    """
    n, m = profile.num_agents, profile.num_alternatives
    if n * m > 9:
        raise ValueError(f"grid oracle requires N*M <= 9, got {n * m}")
    weights = _outcome_weights(winner_or_x, m)
    if m == 1:
        return 1.0
    values = np.arange(0.0, grid_max + grid_step / 2, grid_step)

    # Per agent, only rows already consistent with the ranking can appear:
    # assign a non-decreasing tuple of grid values along the ranking.
    agent_rows = []
    for ranking in profile.rankings:
        rows = []
        for combo in itertools.combinations_with_replacement(values, m):
            row = np.empty(m)
            row[list(ranking)] = combo
            rows.append(row)
        agent_rows.append(np.array(rows))

    # The quadrilateral inequalities couple agents only pairwise, so
    # compatibility between two agents' rows can be tabulated up front.
    diff = [r[:, :, None] - r[:, None, :] for r in agent_rows]  # d(c) - d(c')
    tot = [r[:, :, None] + r[:, None, :] for r in agent_rows]  # d(c) + d(c')
    compat = {}
    for a in range(n):
        for b in range(a + 1, n):
            da = diff[a].reshape(len(agent_rows[a]), 1, -1)
            db = diff[b].reshape(1, len(agent_rows[b]), -1)
            sa = tot[a].reshape(len(agent_rows[a]), 1, -1)
            sb = tot[b].reshape(1, len(agent_rows[b]), -1)
            compat[a, b] = ((da <= sb + 1e-12) & (db <= sa + 1e-12)).all(axis=2)

    best = 0.0

    def descend(agent, partial_sum, masks):
        nonlocal best
        if agent == n - 1:
            ok = masks[agent] if n > 1 else np.ones(len(agent_rows[agent]), bool)
            rows = agent_rows[agent][ok]
            if rows.size == 0:
                return
            sums = partial_sum[None, :] + rows
            denominators = sums.min(axis=1)
            keep = denominators > 0
            if keep.any():
                ratios = (sums[keep] @ weights) / denominators[keep]
                best = max(best, float(ratios.max()))
            return
        candidates = (
            np.flatnonzero(masks[agent]) if n > 1 else range(len(agent_rows[agent]))
        )
        for i in candidates:
            new_masks = dict(masks)
            for later in range(agent + 1, n):
                new_masks[later] = masks[later] & compat[agent, later][i]
            descend(agent + 1, partial_sum + agent_rows[agent][i], new_masks)

    initial = {a: np.ones(len(agent_rows[a]), dtype=bool) for a in range(n)}
    descend(0, np.zeros(m), initial)
    return best


def _outcome_weights(winner_or_x, m):
    if np.isscalar(winner_or_x) or isinstance(winner_or_x, (int, np.integer)):
        weights = np.zeros(m)
        weights[int(winner_or_x)] = 1.0
        return weights
    return _validated_distribution(winner_or_x, m)
