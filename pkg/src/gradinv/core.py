"""Domain model: attack graphs, weighted frameworks, rankings and degrees.

Every value here is immutable once built. Argument identifiers are opaque
strings and their declaration order drives iteration order everywhere
downstream, so results are reproducible run to run.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType

import numpy as np

from .errors import ArgumentIdError, ValidationError

DEFAULT_TIE_TOL = 1e-6


class Semantics(str, enum.Enum):
    """The five weighted gradual semantics."""

    TB = "TB"  # trust-based
    IS = "IS"  # iterative schema
    MB = "MB"  # weighted max-based
    CB = "CB"  # weighted card-based
    HC = "HC"  # weighted h-categorizer

    @classmethod
    def parse(cls, name: str | Semantics) -> Semantics:
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).upper())
        except ValueError:
            choices = ", ".join(s.value.lower() for s in cls)
            raise ValidationError(f"unknown semantics {name!r} (choose from {choices})") from None

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class AttackGraph:
    """Arguments plus a binary attack relation; no weights.

    Self-attacks and cycles are allowed; duplicate pairs are not.
    """

    arguments: tuple[str, ...]
    attacks: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        args = tuple(self.arguments)
        attacks = tuple((a, b) for a, b in self.attacks)
        seen = set()
        for a in args:
            if not isinstance(a, str):
                raise ArgumentIdError(f"argument identifiers must be strings, got {a!r}")
            if a in seen:
                raise ArgumentIdError(f"duplicate argument {a!r}")
            seen.add(a)
        pairs = set()
        for src, dst in attacks:
            for end in (src, dst):
                if end not in seen:
                    raise ArgumentIdError(f"attack ({src!r}, {dst!r}) references unknown argument {end!r}")
            if (src, dst) in pairs:
                raise ValidationError(f"duplicate attack ({src!r}, {dst!r})")
            pairs.add((src, dst))
        object.__setattr__(self, "arguments", args)
        object.__setattr__(self, "attacks", attacks)

    def __len__(self):
        return len(self.arguments)

    @cached_property
    def index(self) -> Mapping[str, int]:
        return MappingProxyType({a: i for i, a in enumerate(self.arguments)})

    @cached_property
    def _attacker_sets(self) -> dict[str, frozenset[str]]:
        acc: dict[str, set[str]] = {a: set() for a in self.arguments}
        for src, dst in self.attacks:
            acc[dst].add(src)
        return {a: frozenset(s) for a, s in acc.items()}

    def attackers(self, a: str) -> frozenset[str]:
        try:
            return self._attacker_sets[a]
        except KeyError:
            raise ArgumentIdError(f"unknown argument {a!r}") from None

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Boolean matrix ``M[target, attacker]``."""
        n = len(self.arguments)
        mat = np.zeros((n, n), dtype=bool)
        idx = self.index
        for src, dst in self.attacks:
            mat[idx[dst], idx[src]] = True
        mat.setflags(write=False)
        return mat

    @cached_property
    def attacker_counts(self) -> np.ndarray:
        counts = self.adjacency.sum(axis=1)
        counts.setflags(write=False)
        return counts

    def with_weights(self, weights: Mapping[str, float]) -> WeightedFramework:
        return WeightedFramework(self.arguments, self.attacks, weights)


@dataclass(frozen=True)
class WeightedFramework:
    """An attack graph whose arguments carry initial weights in [0, 1]."""

    arguments: tuple[str, ...]
    attacks: tuple[tuple[str, str], ...]
    weights: Mapping[str, float]
    graph: AttackGraph = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        graph = AttackGraph(self.arguments, self.attacks)
        weights = dict(self.weights)
        for a in weights:
            if a not in graph.index:
                raise ArgumentIdError(f"weight given for unknown argument {a!r}")
        clean = {}
        for a in graph.arguments:
            if a not in weights:
                raise ArgumentIdError(f"argument {a!r} has no weight")
            w = float(weights[a])
            if not 0.0 <= w <= 1.0:
                raise ValidationError(f"weight of {a!r} is {w}, outside [0, 1]")
            clean[a] = w
        object.__setattr__(self, "arguments", graph.arguments)
        object.__setattr__(self, "attacks", graph.attacks)
        object.__setattr__(self, "weights", MappingProxyType(clean))
        object.__setattr__(self, "graph", graph)

    @classmethod
    def from_array(cls, graph: AttackGraph, weights: Iterable[float]) -> WeightedFramework:
        return cls(graph.arguments, graph.attacks, dict(zip(graph.arguments, weights)))

    def __len__(self):
        return len(self.arguments)

    @cached_property
    def weight_array(self) -> np.ndarray:
        arr = np.array([self.weights[a] for a in self.arguments], dtype=float)
        arr.setflags(write=False)
        return arr

    def attackers(self, a: str) -> frozenset[str]:
        return self.graph.attackers(a)

    def with_weight(self, a: str, value: float) -> WeightedFramework:
        if a not in self.graph.index:
            raise ArgumentIdError(f"unknown argument {a!r}")
        weights = dict(self.weights)
        weights[a] = value
        return WeightedFramework(self.arguments, self.attacks, weights)


def attackers(framework: AttackGraph | WeightedFramework, a: str) -> frozenset[str]:
    """Return ``{b | (b, a) is an attack}``."""
    return framework.attackers(a)


class DegreeAssignment(Mapping):
    """Read-only map from argument to acceptability degree."""

    __slots__ = ("_arguments", "_values", "_index")

    def __init__(self, arguments: Iterable[str], values: Iterable[float]):
        args = tuple(arguments)
        vals = np.array(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
        if vals.shape != (len(args),):
            raise ValidationError(f"expected {len(args)} degrees, got shape {vals.shape}")
        if len(set(args)) != len(args):
            raise ArgumentIdError("duplicate argument in degree assignment")
        if np.any(~np.isfinite(vals)) or np.any(vals < 0.0) or np.any(vals > 1.0):
            raise ValidationError("degrees must lie in [0, 1]")
        vals = vals.copy()
        vals.setflags(write=False)
        self._arguments = args
        self._values = vals
        self._index = {a: i for i, a in enumerate(args)}

    @classmethod
    def from_mapping(cls, degrees: Mapping[str, float]) -> DegreeAssignment:
        return cls(list(degrees), [degrees[a] for a in degrees])

    @property
    def arguments(self) -> tuple[str, ...]:
        return self._arguments

    def as_array(self) -> np.ndarray:
        return self._values

    def __getitem__(self, a):
        try:
            return float(self._values[self._index[a]])
        except KeyError:
            raise ArgumentIdError(f"unknown argument {a!r}") from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._arguments)

    def __len__(self):
        return len(self._arguments)

    def __eq__(self, other):
        if isinstance(other, DegreeAssignment):
            return self._arguments == other._arguments and np.array_equal(self._values, other._values)
        return Mapping.__eq__(self, other)

    __hash__ = None

    def __repr__(self):
        inner = ", ".join(f"{a}={v:.6g}" for a, v in zip(self._arguments, self._values))
        return f"DegreeAssignment({inner})"


@dataclass(frozen=True)
class Ranking:
    """Ordered partition of arguments, most preferred level first."""

    levels: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        levels = tuple(tuple(level) for level in self.levels)
        if not levels:
            raise ValidationError("a ranking needs at least one level")
        seen = set()
        for i, level in enumerate(levels):
            if not level:
                raise ValidationError(f"level {i} is empty")
            for a in level:
                if a in seen:
                    raise ArgumentIdError(f"argument {a!r} appears more than once in the ranking")
                seen.add(a)
        object.__setattr__(self, "levels", levels)

    def __len__(self):
        return len(self.levels)

    @cached_property
    def level_of(self) -> Mapping[str, int]:
        return MappingProxyType({a: i for i, level in enumerate(self.levels) for a in level})

    @property
    def arguments(self) -> frozenset[str]:
        return frozenset(self.level_of)

    def check_covers(self, arguments: Iterable[str]) -> None:
        """Raise unless the ranking partitions exactly ``arguments``."""
        expected = set(arguments)
        have = set(self.level_of)
        if have != expected:
            missing = sorted(expected - have)
            extra = sorted(have - expected)
            parts = []
            if missing:
                parts.append(f"missing {missing}")
            if extra:
                parts.append(f"unknown {extra}")
            raise ArgumentIdError("ranking does not match the argument set: " + "; ".join(parts))

    def __str__(self):
        return " > ".join("{" + ", ".join(level) + "}" for level in self.levels)


def induced_ranking(degrees: Mapping[str, float], tol: float = DEFAULT_TIE_TOL) -> Ranking:
    """Group arguments into levels by descending degree.

    Sorted neighbours whose degrees differ by at most ``tol`` share a level
    (single linkage), ties in position broken by declaration order.
    """
    if tol < 0:
        raise ValidationError("tol must be non-negative")
    args = list(degrees)
    if not args:
        raise ValidationError("cannot rank an empty degree assignment")
    # stable sort keeps declaration order among equal degrees
    order = sorted(range(len(args)), key=lambda i: -degrees[args[i]])
    levels = [[args[order[0]]]]
    prev = degrees[args[order[0]]]
    for i in order[1:]:
        d = degrees[args[i]]
        if prev - d > tol:
            levels.append([])
        levels[-1].append(args[i])
        prev = d
    return Ranking(tuple(tuple(level) for level in levels))


def ranking_matches(
    target: Ranking, degrees: Mapping[str, float], tol: float = DEFAULT_TIE_TOL, *, relative: bool = False
) -> bool:
    """Whether ``degrees`` realise ``target``.

    Absolute mode: same-level degrees differ by at most ``tol``; an argument
    on a higher level beats every lower one by more than ``tol``.
    Relative mode scales ``tol`` by the larger of the two degrees compared.
    """
    target.check_covers(degrees)
    lows = []
    highs = []
    for level in target.levels:
        vals = [degrees[a] for a in level]
        lo, hi = min(vals), max(vals)
        slack = tol * hi if relative else tol
        if hi - lo > slack:
            return False
        lows.append(lo)
        highs.append(hi)
    # compare each level's weakest member with the strongest member below it
    below = -np.inf
    for lo, hi in zip(reversed(lows), reversed(highs)):
        if below != -np.inf:
            slack = tol * max(lo, below) if relative else tol
            if not lo > below + slack:
                return False
        below = max(below, hi)
    return True
