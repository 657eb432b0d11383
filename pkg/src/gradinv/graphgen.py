"""Seeded benchmark graphs and random target rankings.

Arguments are named ``a0 .. a{n-1}``.
"""

from __future__ import annotations

import enum
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .core import AttackGraph, Ranking
from .errors import ValidationError


class Family(str, enum.Enum):
    SCALE_FREE = "sf"
    ERDOS_RENYI = "er"
    COMPLETE = "complete"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        aliases = {"scalefree": "sf", "scale-free": "sf", "erdosrenyi": "er", "erdos-renyi": "er"}
        key = str(name).lower()
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValidationError(f"unknown graph family {name!r} (choose from sf, er, complete)") from None

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class GraphSpec:
    family: Family
    n: int
    p: float | None = None
    seed: int = 0
    out_edges: int = 2  # scale-free only

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError("n must be a positive integer")
        if self.family is Family.ERDOS_RENYI:
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValidationError("Erdos-Renyi graphs need p in [0, 1]")
        if self.out_edges < 1:
            raise ValidationError("out_edges must be >= 1")


def names(n: int) -> tuple[str, ...]:
    return tuple(f"a{i}" for i in range(n))


def generate(spec: GraphSpec) -> AttackGraph:
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    if spec.family is Family.COMPLETE:
        pairs = [(i, j) for i in range(n) for j in range(n)]
    elif spec.family is Family.ERDOS_RENYI:
        hit = rng.random((n, n)) < spec.p
        pairs = list(zip(*np.nonzero(hit)))
    else:
        pairs = _preferential_attachment(n, spec.out_edges, rng)
    labels = names(n)
    return AttackGraph(labels, tuple((labels[i], labels[j]) for i, j in pairs))


def _preferential_attachment(n, out_edges, rng):
    # each newcomer attacks distinct earlier nodes, chosen with prob ~ in-degree + 1
    indeg = np.zeros(n)
    pairs = []
    for new in range(1, n):
        k = min(out_edges, new)
        weight = indeg[:new] + 1.0
        chosen = rng.choice(new, size=k, replace=False, p=weight / weight.sum())
        for old in sorted(int(c) for c in chosen):
            pairs.append((new, old))
            indeg[old] += 1
    return pairs


def random_ranking(arguments: Sequence[str], n_levels: int = 5, seed: int = 0) -> Ranking:
    """Place each argument on a uniformly drawn level; drop empty levels."""
    if n_levels < 1:
        raise ValidationError("n_levels must be >= 1")
    arguments = tuple(arguments)
    if not arguments:
        raise ValidationError("cannot rank an empty argument set")
    rng = np.random.default_rng(seed)
    draw = rng.integers(n_levels, size=len(arguments))
    levels = [tuple(a for a, d in zip(arguments, draw) if d == k) for k in range(n_levels)]
    return Ranking(tuple(level for level in levels if level))
