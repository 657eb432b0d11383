"""Experiment sweeps over graph families, sizes, semantics and strategies."""

from __future__ import annotations

import csv
import io
import json
import time
from collections import defaultdict
from collections.abc import Iterable, Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .core import Semantics, ranking_matches
from .errors import AnalysisError, NonConvergenceError, ValidationError
from .graphgen import Family, GraphSpec, generate, random_ranking
from .inverse import SolverConfig, Strategy, solve
from .semantics import evaluate

CSV_COLUMNS = (
    "family",
    "n",
    "p",
    "seed",
    "semantics",
    "strategy",
    "iters_per_pick",
    "bisect_calls",
    "inner_iterations",
    "runtime_ms",
    "termination",
)


@dataclass(frozen=True)
class FamilySpec:
    family: Family
    p: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        if self.family is Family.ERDOS_RENYI:
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValidationError("Erdos-Renyi family needs p in [0, 1]")
        elif self.p is not None:
            raise ValidationError(f"p only applies to Erdos-Renyi graphs, not {self.family}")


@dataclass(frozen=True)
class ExperimentPlan:
    families: tuple[FamilySpec, ...]
    sizes: tuple[int, ...]
    seeds: tuple[int, ...]
    semantics: tuple[Semantics, ...] = (Semantics.MB, Semantics.HC, Semantics.CB)
    strategies: tuple[Strategy, ...] = (Strategy.S3,)
    iterations_per_pick: tuple[int, ...] = (2000,)
    n_levels: int = 5
    solver: SolverConfig = field(default_factory=SolverConfig)
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "families", tuple(self.families))
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "semantics", tuple(Semantics.parse(s) for s in self.semantics))
        object.__setattr__(self, "strategies", tuple(Strategy.parse(s) for s in self.strategies))
        object.__setattr__(self, "iterations_per_pick", tuple(int(k) for k in self.iterations_per_pick))
        for name in ("families", "sizes", "seeds", "semantics", "strategies", "iterations_per_pick"):
            if not getattr(self, name):
                raise ValidationError(f"plan field {name!r} must be non-empty")
        if any(n < 1 for n in self.sizes):
            raise ValidationError("sizes must be positive")
        if any(k < 1 for k in self.iterations_per_pick):
            raise ValidationError("iterations_per_pick values must be positive")
        bad = [s for s in self.semantics if s not in (Semantics.MB, Semantics.HC, Semantics.CB)]
        if bad:
            raise ValidationError(f"benchmarks run the general solver only (MB, HC, CB), got {bad}")
        if self.n_levels < 1 or self.workers < 1:
            raise ValidationError("n_levels and workers must be >= 1")

    @property
    def runs_per_size(self) -> int:
        return len(self.seeds)

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentPlan:
        """Build from the JSON plan layout (see README)."""
        data = dict(data)
        known = {
            "families", "er_probabilities", "sizes", "seeds", "runs_per_size", "base_seed", "semantics", "strategies",
            "iterations_per_pick", "n_levels", "zeta", "rel_eps", "bisect_eps", "max_bisect_calls", "workers",
        }
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError(f"unknown plan keys {unknown}")
        families = []
        for item in data.get("families", []):
            if isinstance(item, str):
                item = {"family": item}
            fam = Family.parse(item["family"])
            if fam is Family.ERDOS_RENYI and "p" not in item:
                for p in data.get("er_probabilities", [0.1, 0.3, 0.5, 0.7]):
                    families.append(FamilySpec(fam, float(p)))
            else:
                families.append(FamilySpec(fam, item.get("p")))
        if "seeds" in data:
            seeds = tuple(data["seeds"])
        else:
            base = int(data.get("base_seed", 0))
            seeds = tuple(range(base, base + int(data.get("runs_per_size", 15))))
        solver = SolverConfig(
            zeta=data.get("zeta", 1.0),
            rel_eps=data.get("rel_eps", 1e-3),
            bisect_eps=data.get("bisect_eps", 1e-3),
            max_bisect_calls=data.get("max_bisect_calls", 1000),
        )
        return cls(
            families=tuple(families),
            sizes=tuple(data.get("sizes", ())),
            seeds=seeds,
            semantics=tuple(data.get("semantics", ("mb", "hc", "cb"))),
            strategies=tuple(data.get("strategies", ("s3",))),
            iterations_per_pick=tuple(data.get("iterations_per_pick", (2000,))),
            n_levels=int(data.get("n_levels", 5)),
            solver=solver,
            workers=int(data.get("workers", 1)),
        )

    @classmethod
    def load(cls, path) -> ExperimentPlan:
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ValidationError(f"{path}: cannot read plan: {exc.strerror or exc}") from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
        if not isinstance(raw, dict):
            raise ValidationError(f"{path}: plan must be a JSON object")
        return cls.from_dict(raw)

    def trials(self) -> Iterator[TrialKey]:
        for fam in self.families:
            for n in self.sizes:
                for sem in self.semantics:
                    for strategy in self.strategies:
                        for k in self.iterations_per_pick:
                            for seed in self.seeds:
                                yield TrialKey(fam.family, n, fam.p, seed, sem, strategy, k)

    def cardinality(self) -> int:
        return (
            len(self.families) * len(self.sizes) * len(self.semantics) * len(self.strategies)
            * len(self.iterations_per_pick) * len(self.seeds)
        )


@dataclass(frozen=True)
class TrialKey:
    family: Family
    n: int
    p: float | None
    seed: int
    semantics: Semantics
    strategy: Strategy
    iters_per_pick: int

    def sort_key(self):
        return (self.family.value, -1.0 if self.p is None else self.p, self.n, self.semantics.value,
                self.strategy.value, self.iters_per_pick, self.seed)


@dataclass(frozen=True)
class TrialRecord:
    family: str
    n: int
    p: float | None
    seed: int
    semantics: str
    strategy: str
    iters_per_pick: int
    bisect_calls: int
    inner_iterations: int
    runtime_ms: float
    termination: str
    # independent re-evaluation of the returned weights realised the target; not written to CSV
    verified: bool | None = None

    def row(self) -> dict:
        d = asdict(self)
        d.pop("verified")
        d["p"] = "" if self.p is None else repr(self.p)
        d["runtime_ms"] = f"{self.runtime_ms:.3f}"
        return d


def trial_instance(key: TrialKey, n_levels: int = 5):
    """The graph and target ranking a trial runs on."""
    graph = generate(GraphSpec(key.family, key.n, key.p, seed=key.seed))
    ranking = random_ranking(graph.arguments, n_levels, seed=[key.seed, 1])
    return graph, ranking


def run_trial(key: TrialKey, solver: SolverConfig, n_levels: int = 5) -> TrialRecord:
    graph, ranking = trial_instance(key, n_levels)
    cfg = replace(solver, strategy=key.strategy, iterations_per_pick=key.iters_per_pick, rng_seed=key.seed)
    base = dict(
        family=key.family.value, n=key.n, p=key.p, seed=key.seed, semantics=key.semantics.value,
        strategy=key.strategy.value, iters_per_pick=key.iters_per_pick,
    )
    start = time.perf_counter()
    try:
        report = solve(graph, ranking, key.semantics, cfg)
    except NonConvergenceError:
        ms = (time.perf_counter() - start) * 1e3
        return TrialRecord(**base, bisect_calls=0, inner_iterations=0, runtime_ms=ms, termination="NonConvergence", verified=False)
    ms = (time.perf_counter() - start) * 1e3
    verified = None
    if report.success:
        fresh = evaluate(graph.with_weights(report.weights), key.semantics, cfg.iteration)
        verified = fresh.converged and ranking_matches(ranking, fresh.degrees, report.match_tol, relative=True)
    return TrialRecord(
        **base,
        bisect_calls=report.bisect_calls,
        inner_iterations=report.total_inner_iterations,
        runtime_ms=ms,
        termination=report.termination.value,
        verified=verified,
    )


def _run_star(args):
    return run_trial(*args)


def run_plan(plan: ExperimentPlan, workers: int | None = None, progress=None) -> list[TrialRecord]:
    """Run every grid cell; records come back sorted by grid key."""
    workers = plan.workers if workers is None else workers
    keys = sorted(plan.trials(), key=TrialKey.sort_key)
    jobs = [(k, plan.solver, plan.n_levels) for k in keys]
    records: list[TrialRecord] = []
    if workers <= 1:
        for job in jobs:
            records.append(_run_star(job))
            if progress:
                progress(len(records), len(jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for rec in pool.map(_run_star, jobs, chunksize=max(1, len(jobs) // (8 * workers))):
                records.append(rec)
                if progress:
                    progress(len(records), len(jobs))
    return records


def write_csv(records: Iterable[TrialRecord], fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow(rec.row())


def records_to_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def read_csv(fh) -> list[TrialRecord]:
    reader = csv.DictReader(fh)
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValidationError(f"unexpected CSV header {reader.fieldnames}")
    out = []
    for row in reader:
        out.append(
            TrialRecord(
                family=row["family"], n=int(row["n"]), p=float(row["p"]) if row["p"] else None,
                seed=int(row["seed"]), semantics=row["semantics"], strategy=row["strategy"],
                iters_per_pick=int(row["iters_per_pick"]), bisect_calls=int(row["bisect_calls"]),
                inner_iterations=int(row["inner_iterations"]), runtime_ms=float(row["runtime_ms"]),
                termination=row["termination"],
            )
        )
    return out


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float


def mean_calls_by_size(records: Iterable[TrialRecord]) -> dict[int, float]:
    acc = defaultdict(list)
    for rec in records:
        acc[rec.n].append(rec.bisect_calls)
    return {n: float(np.mean(v)) for n, v in sorted(acc.items())}


def fit_linear(records: Sequence[TrialRecord]) -> LinearFit:
    """OLS of per-size mean ``bisect_calls`` against ``n``.

    Callers filter to a single semantics/family/strategy first.
    """
    means = mean_calls_by_size(records)
    if len(means) < 3:
        raise AnalysisError(f"need at least 3 distinct sizes, got {len(means)}")
    x = np.array(list(means), dtype=float)
    y = np.array(list(means.values()))
    xm, ym = x.mean(), y.mean()
    slope = float(np.sum((x - xm) * (y - ym)) / np.sum((x - xm) ** 2))
    intercept = float(ym - slope * xm)
    ss_res = float(np.sum((y - (intercept + slope * x)) ** 2))
    ss_tot = float(np.sum((y - ym) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res <= 1e-12 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return LinearFit(slope, intercept, r2)


def group_records(records: Iterable[TrialRecord]) -> dict[tuple, list[TrialRecord]]:
    """Bucket by (semantics, family, p, strategy, iters_per_pick)."""
    out = defaultdict(list)
    for rec in records:
        out[(rec.semantics, rec.family, rec.p, rec.strategy, rec.iters_per_pick)].append(rec)
    return dict(out)

