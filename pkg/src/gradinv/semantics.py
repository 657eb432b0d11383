"""Fixed-point evaluation of the weighted gradual semantics.

All updates are synchronous: iterate ``i`` is computed from iterate ``i-1``
only. Empty attacker sets contribute 0 to both max and sum.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .core import DegreeAssignment, Semantics, WeightedFramework
from .errors import ArgumentIdError, ValidationError

DEFAULT_EPS = 1e-9
DEFAULT_MAX_ITERATIONS = 10_000
IS_SNAP_TOL = 1e-4
_IS_LEVELS = np.array([0.0, 0.5, 1.0])


@dataclass(frozen=True)
class IterationConfig:
    convergence_eps: float = DEFAULT_EPS
    max_iterations: int = DEFAULT_MAX_ITERATIONS

    def __post_init__(self):
        if not self.convergence_eps > 0:
            raise ValidationError("convergence_eps must be > 0")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValidationError("max_iterations must be a positive integer")


@dataclass(frozen=True)
class EvaluationResult:
    degrees: DegreeAssignment
    iterations_used: int
    converged: bool


class Kernel:
    """Vectorised one-step update for a fixed graph, weighting and semantics.

    The weight vector may be swapped with :meth:`reweighted` without
    rebuilding the adjacency data, which is what the inverse solver does on
    every bisection probe.
    """

    def __init__(self, adjacency: np.ndarray, weights: np.ndarray, semantics: Semantics):
        self.semantics = Semantics.parse(semantics)
        self.adj = adjacency
        self.attack = adjacency.astype(float)
        self.has_attackers = adjacency.any(axis=1)
        self._set_weights(np.asarray(weights, dtype=float))

    @classmethod
    def for_framework(cls, framework: WeightedFramework, semantics: Semantics) -> Kernel:
        return cls(framework.graph.adjacency, framework.weight_array, semantics)

    def _set_weights(self, w):
        self.w = w
        if self.semantics is Semantics.CB:
            star = self.attack * (w > 0.0)[None, :]
            self.star = star
            self.star_count = star.sum(axis=1)
            self.star_nonempty = self.star_count > 0
            self.star_denom = np.where(self.star_nonempty, self.star_count, 1.0)

    def reweighted(self, weights: np.ndarray) -> Kernel:
        new = object.__new__(Kernel)
        new.__dict__.update(self.__dict__)
        new._set_weights(np.asarray(weights, dtype=float))
        return new

    def _max_attacker(self, x):
        # x >= 0, so rows without attackers come out as 0
        return (self.attack * x).max(axis=1) if x.size else x

    def step(self, x: np.ndarray) -> np.ndarray:
        s = self.semantics
        w = self.w
        if s is Semantics.HC:
            return w / (1.0 + self.attack @ x)
        if s is Semantics.MB:
            return w / (1.0 + self._max_attacker(x))
        if s is Semantics.CB:
            mean = (self.star @ x) / self.star_denom
            return np.where(self.star_nonempty, w / (1.0 + self.star_count + mean), w)
        if s is Semantics.TB:
            out = 0.5 * x + 0.5 * np.minimum(w, 1.0 - self._max_attacker(x))
            return np.clip(out, 0.0, 1.0)
        if s is Semantics.IS:
            rest = 1.0 - self._max_attacker(x)
            out = (1.0 - x) * np.minimum(0.5, rest) + x * np.maximum(0.5, rest)
            return np.clip(out, 0.0, 1.0)
        raise AssertionError(s)

    def iterate(self, x0: np.ndarray, eps: float, max_iterations: int) -> tuple[np.ndarray, int, bool]:
        """Apply :meth:`step` until the L-inf change drops below ``eps``."""
        x = x0
        for i in range(1, max_iterations + 1):
            nxt = self.step(x)
            if x.size == 0 or np.max(np.abs(nxt - x)) < eps:
                return nxt, i, True
            x = nxt
        return x, max_iterations, False


def snap_is(values: np.ndarray, tol: float = IS_SNAP_TOL) -> np.ndarray:
    """Round iterative-schema degrees that sit within ``tol`` of 0, 1/2 or 1."""
    out = values.copy()
    for level in _IS_LEVELS:
        out[np.abs(out - level) <= tol] = level
    return out


def step(framework: WeightedFramework, semantics: Semantics | str, current: Mapping[str, float]) -> DegreeAssignment:
    """One synchronous update of every argument."""
    kern = Kernel.for_framework(framework, Semantics.parse(semantics))
    try:
        x = np.array([current[a] for a in framework.arguments], dtype=float)
    except KeyError as exc:
        raise ArgumentIdError(f"current degrees miss argument {exc.args[0]!r}") from None
    return DegreeAssignment(framework.arguments, kern.step(x))


def evaluate(
    framework: WeightedFramework,
    semantics: Semantics | str,
    cfg: IterationConfig | None = None,
    *,
    start: np.ndarray | None = None,
) -> EvaluationResult:
    """Iterate from the initial weights to a fixed point.

    ``start`` replaces the weights as the first iterate. Only use it for
    MB, HC and CB, whose fixed point does not depend on the starting point.
    """
    cfg = cfg or IterationConfig()
    sem = Semantics.parse(semantics)
    kern = Kernel.for_framework(framework, sem)
    x0 = framework.weight_array if start is None else np.asarray(start, dtype=float)
    x, used, ok = kern.iterate(x0, cfg.convergence_eps, cfg.max_iterations)
    if sem is Semantics.IS and ok:
        x = snap_is(x)
    return EvaluationResult(DegreeAssignment(framework.arguments, x), used, ok)
