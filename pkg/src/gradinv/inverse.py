"""Inverse problem: find initial weights that realise a target ranking.

Phase 1 assigns every ranking level a target degree (a minimal upper bound)
so consecutive levels cannot overlap. Phase 2 repeatedly picks an argument
and bisects on its weight until its degree hits its level's target, with
the other weights held fixed.

MB, HC and CB go through the general solver. TB is solved by the trivial
sub-0.5 weighting and IS only gets infeasibility screening plus one
heuristic attempt.
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .core import (
    AttackGraph,
    DegreeAssignment,
    Ranking,
    Semantics,
    WeightedFramework,
    ranking_matches,
)
from .errors import NonConvergenceError, UnsupportedSemanticsError, ValidationError
from .rootfind import BisectionConfig, bisect
from .semantics import IterationConfig, Kernel, evaluate

log = logging.getLogger(__name__)

SOLVABLE = (Semantics.MB, Semantics.HC, Semantics.CB)
TB_CEILING = 0.49


class Strategy(str, enum.Enum):
    S1 = "S1"  # most preferred level first
    S2 = "S2"  # least preferred level first
    S3 = "S3"  # largest relative error first
    S4 = "S4"  # smallest relative error first
    S5 = "S5"  # uniform random

    @classmethod
    def parse(cls, name: str | Strategy) -> Strategy:
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).upper())
        except ValueError:
            raise ValidationError(f"unknown strategy {name!r} (choose from s1..s5)") from None

    def __str__(self):
        return self.value


class Termination(str, enum.Enum):
    TARGETS_REACHED = "TargetsReached"
    RANKING_MATCHED_EARLY = "RankingMatchedEarly"
    BUDGET_EXCEEDED = "BudgetExceeded"
    INFEASIBLE = "Infeasible"

    @property
    def success(self) -> bool:
        return self in (Termination.TARGETS_REACHED, Termination.RANKING_MATCHED_EARLY)

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class BoundsTable:
    """Target degree per ranking level, most preferred level first."""

    targets: tuple[float, ...]

    def __post_init__(self):
        targets = tuple(float(t) for t in self.targets)
        for i, t in enumerate(targets):
            if not 0.0 < t <= 1.0:
                raise ValidationError(f"target {t} of level {i} outside (0, 1]")
            if i and not t < targets[i - 1]:
                raise ValidationError("targets must strictly decrease across levels")
        object.__setattr__(self, "targets", targets)

    def __len__(self):
        return len(self.targets)

    def __getitem__(self, level: int) -> float:
        return self.targets[level]


@dataclass(frozen=True)
class SolverConfig:
    """Phase 2 knobs; defaults are the published evaluation settings.

    ``initial_weight`` of ``None`` starts every argument at its level's
    target degree; a number starts all arguments at that weight.
    """

    zeta: float = 1.0
    rel_eps: float = 1e-3
    bisect_eps: float = 1e-3
    iterations_per_pick: int = 2000
    max_bisect_calls: int = 1000
    strategy: Strategy = Strategy.S3
    rng_seed: int = 0
    initial_weight: float | None = None
    iteration: IterationConfig = field(default_factory=IterationConfig)

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        for name in ("zeta", "rel_eps", "bisect_eps"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be > 0")
        if not self.rel_eps < 1:
            raise ValidationError("rel_eps must be < 1")
        for name in ("iterations_per_pick", "max_bisect_calls"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValidationError(f"{name} must be a positive integer")

    @property
    def match_tol(self) -> float:
        """Relative tie tolerance implied by every argument being within ``rel_eps`` of its target."""
        return 2.0 * self.rel_eps / (1.0 - self.rel_eps)


@dataclass(frozen=True)
class SolveReport:
    weights: Mapping[str, float]
    achieved: DegreeAssignment
    termination: Termination
    bisect_calls: int = 0
    total_inner_iterations: int = 0
    per_argument_visits: Mapping[str, int] = field(default_factory=dict)
    bounds: BoundsTable | None = None
    # ranking_matches(target, achieved, match_tol, relative=True) holds on success
    match_tol: float = 0.0
    detail: str = ""

    @property
    def success(self) -> bool:
        return self.termination.success


@dataclass(frozen=True)
class FeasibilityVerdict:
    infeasible: bool
    reason: str

    def __str__(self):
        return ("infeasible: " if self.infeasible else "unknown: ") + self.reason


def compute_bounds(
    levels: Ranking | Sequence[Sequence[str]],
    graph: AttackGraph,
    semantics: Semantics | str,
    zeta: float = 1.0,
) -> BoundsTable:
    """Minimal upper bound of each level, starting from an upper bound of 1."""
    sem = Semantics.parse(semantics)
    if sem not in SOLVABLE:
        raise UnsupportedSemanticsError(f"bounds are only defined for MB, HC and CB, not {sem}")
    if not zeta > 0:
        raise ValidationError("zeta must be > 0")
    level_list = levels.levels if isinstance(levels, Ranking) else levels
    counts = graph.attacker_counts
    idx = graph.index
    upper = 1.0
    targets = []
    for level in level_list:
        most = max((int(counts[idx[a]]) for a in level), default=0)
        if sem is Semantics.MB:
            lower = upper / (1.0 + upper + zeta)
        elif sem is Semantics.HC:
            lower = upper / (1.0 + most + zeta)
        else:
            lower = upper / (2.0 + most + zeta)
        targets.append(lower)
        upper = lower
    return BoundsTable(tuple(targets))


def beta_bound(semantics: Semantics | str, target: float, n_attackers: int, zeta: float = 1.0) -> float:
    """Upper bracket for the weight that yields degree ``target``."""
    sem = Semantics.parse(semantics)
    if sem is Semantics.MB:
        beta = (2.0 + zeta) * target
    elif sem is Semantics.HC:
        beta = target * (1.0 + n_attackers + zeta)
    elif sem is Semantics.CB:
        beta = (2.0 + n_attackers + zeta) * target
    else:
        raise UnsupportedSemanticsError(f"no weight bracket for {sem}")
    return min(beta, 1.0)


def relative_errors(degrees: np.ndarray, targets: np.ndarray) -> np.ndarray:
    return np.abs(degrees - targets) / targets


def select_next(
    degrees: Sequence[float],
    targets: Sequence[float],
    levels: Sequence[int],
    strategy: Strategy | str,
    rng: np.random.Generator | None = None,
    rel_eps: float = 1e-3,
) -> int | None:
    """Index of the next argument to adjust, or ``None`` if all are within ``rel_eps``.

    Ties go to the earlier-declared argument.
    """
    strategy = Strategy.parse(strategy)
    err = relative_errors(np.asarray(degrees, dtype=float), np.asarray(targets, dtype=float))
    cand = np.flatnonzero(err >= rel_eps)
    if cand.size == 0:
        return None
    lv = np.asarray(levels)[cand]
    ce = err[cand]
    # np.argmin/argmax return the first extremum, i.e. declaration order
    if strategy is Strategy.S1:
        return int(cand[np.argmin(lv)])
    if strategy is Strategy.S2:
        return int(cand[np.argmax(lv)])
    if strategy is Strategy.S3:
        return int(cand[np.argmax(ce)])
    if strategy is Strategy.S4:
        return int(cand[np.argmin(ce)])
    if rng is None:
        raise ValidationError("strategy S5 needs a random generator")
    return int(cand[rng.integers(cand.size)])


def solve(
    graph: AttackGraph,
    target: Ranking,
    semantics: Semantics | str,
    cfg: SolverConfig | None = None,
) -> SolveReport:
    """Search for weights whose degrees under ``semantics`` realise ``target``."""
    cfg = cfg or SolverConfig()
    graph = _as_graph(graph)
    sem = Semantics.parse(semantics)
    target.check_covers(graph.arguments)
    if sem is Semantics.TB:
        return solve_trivial_tb(graph, target, cfg)
    if sem is Semantics.IS:
        return _solve_is(graph, target, cfg)
    return _Phase2(graph, target, sem, cfg).run()


def _as_graph(graph):
    if isinstance(graph, WeightedFramework):
        return graph.graph
    return graph


class _Phase2:
    """Mutable search state confined to one :func:`solve` call."""

    def __init__(self, graph: AttackGraph, target: Ranking, sem: Semantics, cfg: SolverConfig):
        self.graph = graph
        self.target = target
        self.sem = sem
        self.cfg = cfg
        self.bounds = compute_bounds(target, graph, sem, cfg.zeta)
        args = graph.arguments
        self.level = np.array([target.level_of[a] for a in args], dtype=int)
        self.m = np.array(self.bounds.targets)[self.level]
        counts = graph.attacker_counts
        self.beta = np.array([beta_bound(sem, self.m[i], int(counts[i]), cfg.zeta) for i in range(len(args))])
        if cfg.initial_weight is not None and not 0.0 < cfg.initial_weight <= 1.0:
            raise ValidationError("initial_weight must lie in (0, 1]")
        if cfg.initial_weight is None:
            self.w = self.m.copy()
        else:
            self.w = np.full(len(args), float(cfg.initial_weight))
        self.kernel = Kernel(graph.adjacency, self.w, sem)
        self.rng = np.random.default_rng(cfg.rng_seed)
        self.calls = 0
        self.inner = 0
        self.visits = np.zeros(len(args), dtype=int)

    def _iterate(self, kernel, start):
        it = self.cfg.iteration
        x, _, ok = kernel.iterate(start, it.convergence_eps, it.max_iterations)
        if not ok:
            raise NonConvergenceError(f"{self.sem} evaluation did not converge in {it.max_iterations} iterations")
        return x

    def _fresh(self):
        # restart from the weights so the result matches an independent evaluate()
        return self._iterate(self.kernel.reweighted(self.w), self.w)

    def _matches(self, x):
        return ranking_matches(
            self.target, DegreeAssignment(self.graph.arguments, x), self.cfg.match_tol, relative=True
        )

    def _report(self, x, termination, detail=""):
        args = self.graph.arguments
        return SolveReport(
            weights=MappingProxyType(dict(zip(args, self.w.tolist()))),
            achieved=DegreeAssignment(args, x),
            termination=termination,
            bisect_calls=self.calls,
            total_inner_iterations=self.inner,
            per_argument_visits=MappingProxyType(dict(zip(args, self.visits.tolist()))),
            bounds=self.bounds,
            match_tol=self.cfg.match_tol,
            detail=detail,
        )

    def _pick(self, i, x):
        """One bisection call on the weight of argument ``i``; returns the new degrees."""
        m_i = self.m[i]
        w = self.w.copy()
        last = {"x": x}

        def g(value):
            w[i] = value
            y = self._iterate(self.kernel.reweighted(w), last["x"])
            last["x"] = y
            return (m_i - y[i]) / m_i

        alpha, beta = self.m[i], self.beta[i]
        if g(alpha) < 0:
            # degree already above target at the lower bracket end
            alpha = 0.0
            if g(alpha) < 0:
                return None
        if g(beta) > 0:
            return None
        out = bisect(g, alpha, beta, BisectionConfig(self.cfg.bisect_eps, self.cfg.iterations_per_pick), check_bracket=False)
        # the final probe was at out.root, so last["x"] holds its degrees
        self.w[i] = out.root
        self.inner += out.evaluations
        return last["x"]

    def run(self) -> SolveReport:
        cfg = self.cfg
        x = self._fresh()
        while True:
            err = relative_errors(x, self.m)
            if np.all(err < cfg.rel_eps):
                x = self._fresh()
                if np.all(relative_errors(x, self.m) < cfg.rel_eps):
                    if self._matches(x):
                        return self._report(x, Termination.TARGETS_REACHED)
                    return self._report(x, Termination.INFEASIBLE, "targets reached but ranking not realised")
                continue
            if self.calls >= cfg.max_bisect_calls:
                return self._report(self._fresh(), Termination.BUDGET_EXCEEDED)
            i = select_next(x, self.m, self.level, cfg.strategy, self.rng, cfg.rel_eps)
            self.calls += 1
            self.visits[i] += 1
            new = self._pick(i, x)
            if new is None:
                arg = self.graph.arguments[i]
                return self._report(self._fresh(), Termination.INFEASIBLE, f"no valid weight bracket for {arg!r}")
            x = new
            log.debug("call %d: %s -> weight %.6g", self.calls, self.graph.arguments[i], self.w[i])
            if self._matches(x):
                fresh = self._fresh()
                if self._matches(fresh):
                    return self._report(fresh, Termination.RANKING_MATCHED_EARLY)


def solve_trivial_tb(graph: AttackGraph, target: Ranking, cfg: SolverConfig | None = None) -> SolveReport:
    """Trust-based weights below 0.5 are their own degrees; space levels evenly under 0.49."""
    cfg = cfg or SolverConfig()
    graph = _as_graph(graph)
    target.check_covers(graph.arguments)
    n = len(target) - 1
    weights = {a: TB_CEILING * (n + 1 - target.level_of[a]) / (n + 1) for a in graph.arguments}
    framework = graph.with_weights(weights)
    result = evaluate(framework, Semantics.TB, cfg.iteration)
    ok = result.converged and ranking_matches(target, result.degrees, cfg.match_tol, relative=True)
    return SolveReport(
        weights=framework.weights,
        achieved=result.degrees,
        termination=Termination.TARGETS_REACHED if ok else Termination.INFEASIBLE,
        per_argument_visits=MappingProxyType({a: 0 for a in graph.arguments}),
        match_tol=cfg.match_tol,
        detail="" if ok else "trivial trust-based weighting did not reproduce the ranking",
    )


def check_is_feasibility(graph: AttackGraph, target: Ranking) -> FeasibilityVerdict:
    """Screen a target ranking against the iterative-schema semantics.

    Sound but incomplete: ``infeasible=False`` means no witness was found.
    Witnesses used: more than three levels; an unattacked argument that is
    not ranked strictly above something it attacks (it converges to 1 and
    its victim to 0); unattacked arguments spread over several levels (all
    converge to 1).
    """
    graph = _as_graph(graph)
    target.check_covers(graph.arguments)
    if len(target) > 3:
        return FeasibilityVerdict(True, f"{len(target)} levels requested but the semantics only yields 0, 1/2 and 1")
    level = target.level_of
    free = [a for a in graph.arguments if not graph.attackers(a)]
    for src, dst in graph.attacks:
        if src in free and level[src] >= level[dst]:
            return FeasibilityVerdict(
                True, f"unattacked {src!r} attacks {dst!r} and always ends above it, but the target does not rank it higher"
            )
    if len({level[a] for a in free}) > 1:
        return FeasibilityVerdict(True, "unattacked arguments all converge to 1 but are placed on different levels")
    return FeasibilityVerdict(False, "no infeasibility witness found")


def _solve_is(graph: AttackGraph, target: Ranking, cfg: SolverConfig) -> SolveReport:
    verdict = check_is_feasibility(graph, target)
    visits = MappingProxyType({a: 0 for a in graph.arguments})
    # starting points only matter through the initial iterate; try 1, 1/2, 0 by level
    anchors = (1.0, 0.5, 0.0)
    weights = {a: anchors[min(target.level_of[a], 2)] for a in graph.arguments}
    framework = graph.with_weights(weights)
    result = evaluate(framework, Semantics.IS, cfg.iteration)
    if verdict.infeasible:
        return SolveReport(framework.weights, result.degrees, Termination.INFEASIBLE, per_argument_visits=visits, detail=str(verdict))
    if result.converged and ranking_matches(target, result.degrees, cfg.match_tol, relative=True):
        return SolveReport(framework.weights, result.degrees, Termination.TARGETS_REACHED, per_argument_visits=visits, match_tol=cfg.match_tol)
    return SolveReport(
        framework.weights,
        result.degrees,
        Termination.INFEASIBLE,
        per_argument_visits=visits,
        detail="no weighting found; feasibility under the iterative schema is undecided",
    )


def is_fully_connected(graph: AttackGraph) -> bool:
    """Every ordered pair, self-attacks included, is an attack."""
    n = len(graph.arguments)
    return len(graph.attacks) == n * n


def solve_fully_connected(
    graph: AttackGraph, target: Ranking, semantics: Semantics | str, cfg: SolverConfig | None = None
) -> SolveReport:
    """Shortcut for complete graphs, where degree order equals weight order.

    Each argument gets its level's target as weight, so level-mates tie
    exactly and levels keep their order. No bisection is run.
    """
    cfg = cfg or SolverConfig()
    graph = _as_graph(graph)
    sem = Semantics.parse(semantics)
    target.check_covers(graph.arguments)
    if not is_fully_connected(graph):
        raise ValidationError("graph is not fully connected (with self-attacks)")
    bounds = compute_bounds(target, graph, sem, cfg.zeta)
    weights = {a: bounds[target.level_of[a]] for a in graph.arguments}
    framework = graph.with_weights(weights)
    result = evaluate(framework, sem, cfg.iteration)
    ok = result.converged and ranking_matches(target, result.degrees, cfg.match_tol, relative=True)
    return SolveReport(
        weights=framework.weights,
        achieved=result.degrees,
        termination=Termination.RANKING_MATCHED_EARLY if ok else Termination.INFEASIBLE,
        per_argument_visits=MappingProxyType({a: 0 for a in graph.arguments}),
        bounds=bounds,
        match_tol=cfg.match_tol,
    )
