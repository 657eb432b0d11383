"""JSON file formats for frameworks and rankings.

Framework::

    {"arguments": ["a", "b"], "attacks": [["a", "b"]], "weights": {"a": 0.5, "b": 1}}

Ranking::

    {"levels": [["b"], ["a"]]}

Errors carry the line of the offending token where it can be located.
"""

from __future__ import annotations

import json
import math
import re
from collections.abc import Iterable
from pathlib import Path

from .core import AttackGraph, Ranking, WeightedFramework
from .errors import FormatError


class _Doc:
    """Raw text plus a parsed JSON value, for locating tokens by line."""

    def __init__(self, text: str, path=None):
        self.text = text
        self.path = path
        try:
            self.data = json.loads(text, object_pairs_hook=self._pairs)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None

    def _pairs(self, pairs):
        out = {}
        for key, value in pairs:
            if key in out:
                raise self.error(f"duplicate key {key!r}", self.line_of(json.dumps(key), nth=2))
            out[key] = value
        return out

    def line_of(self, pattern: str, *, after: str | None = None, nth: int = 1, regex: bool = False) -> int | None:
        start = 0
        if after is not None:
            hit = self.text.find(json.dumps(after))
            if hit < 0:
                return None
            start = hit
        rx = re.compile(pattern if regex else re.escape(pattern))
        for k, m in enumerate(rx.finditer(self.text, start), 1):
            if k == nth:
                return self.text.count("\n", 0, m.start()) + 1
        return None

    def error(self, message, line=None):
        return FormatError(message, self.path, line)


def _read(source) -> _Doc:
    if isinstance(source, (str, Path)) and not (isinstance(source, str) and source.lstrip().startswith("{")):
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise FormatError(f"cannot read file: {exc.strerror or exc}", path) from None
        return _Doc(text, path)
    return _Doc(str(source))


def _pair_pattern(src, dst):
    return r"\[\s*" + re.escape(json.dumps(src)) + r"\s*,\s*" + re.escape(json.dumps(dst)) + r"\s*\]"


def _parse_graph(doc: _Doc) -> tuple[list[str], list[tuple[str, str]]]:
    data = doc.data
    if not isinstance(data, dict):
        raise doc.error("top level must be a JSON object", 1)
    for key in data:
        if key not in ("arguments", "attacks", "weights"):
            raise doc.error(f"unexpected key {key!r}", doc.line_of(json.dumps(key)))
    if "arguments" not in data:
        raise doc.error('missing "arguments"')
    args = data["arguments"]
    if not isinstance(args, list):
        raise doc.error('"arguments" must be an array', doc.line_of('"arguments"'))
    seen: dict[str, int] = {}
    for a in args:
        if not isinstance(a, str):
            raise doc.error(f"argument identifiers must be strings, got {a!r}", doc.line_of('"arguments"'))
        seen[a] = seen.get(a, 0) + 1
        if seen[a] > 1:
            line = doc.line_of(json.dumps(a), after="arguments", nth=2)
            raise doc.error(f"duplicate argument {a!r}", line)
    attacks = data.get("attacks", [])
    if not isinstance(attacks, list):
        raise doc.error('"attacks" must be an array', doc.line_of('"attacks"'))
    pairs: list[tuple[str, str]] = []
    counts: dict[tuple[str, str], int] = {}
    for item in attacks:
        if not (isinstance(item, list) and len(item) == 2 and all(isinstance(x, str) for x in item)):
            raise doc.error(f"each attack must be a 2-element array of strings, got {item!r}", doc.line_of('"attacks"'))
        src, dst = item
        for end in (src, dst):
            if end not in seen:
                line = doc.line_of(_pair_pattern(src, dst), regex=True, after="attacks")
                raise doc.error(f"attack [{src!r}, {dst!r}] uses unknown argument {end!r}", line)
        counts[(src, dst)] = counts.get((src, dst), 0) + 1
        if counts[(src, dst)] > 1:
            line = doc.line_of(_pair_pattern(src, dst), regex=True, after="attacks", nth=2)
            raise doc.error(f"duplicate attack [{src!r}, {dst!r}]", line)
        pairs.append((src, dst))
    return args, pairs


def _parse_weights(doc: _Doc, args: list[str]) -> dict[str, float]:
    weights = doc.data.get("weights")
    if not isinstance(weights, dict):
        raise doc.error('"weights" must be an object mapping argument to number', doc.line_of('"weights"'))
    known = set(args)
    out = {}
    for a, w in weights.items():
        line = doc.line_of(json.dumps(a), after="weights")
        if a not in known:
            raise doc.error(f"weight given for unknown argument {a!r}", line)
        if isinstance(w, bool) or not isinstance(w, (int, float)) or not math.isfinite(w):
            raise doc.error(f"weight of {a!r} must be a number, got {w!r}", line)
        if not 0.0 <= w <= 1.0:
            raise doc.error(f"weight of {a!r} is {w}, outside [0, 1]", line)
        out[a] = float(w)
    missing = [a for a in args if a not in out]
    if missing:
        raise doc.error(f"no weight for argument(s) {missing}", doc.line_of('"weights"'))
    return out


def load_framework(source) -> WeightedFramework:
    """Parse a weighted framework from a path or a JSON string."""
    doc = _read(source)
    args, pairs = _parse_graph(doc)
    if "weights" not in doc.data:
        raise doc.error('missing "weights"')
    return WeightedFramework(tuple(args), tuple(pairs), _parse_weights(doc, args))


def load_graph(source) -> AttackGraph:
    """Parse only the attack structure; weights, if present, are validated then dropped."""
    doc = _read(source)
    args, pairs = _parse_graph(doc)
    if "weights" in doc.data:
        _parse_weights(doc, args)
    return AttackGraph(tuple(args), tuple(pairs))


def load_ranking(source, arguments: Iterable[str] | None = None) -> Ranking:
    """Parse a ranking; if ``arguments`` is given it must be covered exactly."""
    doc = _read(source)
    data = doc.data
    if not isinstance(data, dict) or "levels" not in data:
        raise doc.error('ranking must be an object with a "levels" array', 1)
    for key in data:
        if key != "levels":
            raise doc.error(f"unexpected key {key!r}", doc.line_of(json.dumps(key)))
    levels = data["levels"]
    if not isinstance(levels, list) or not levels:
        raise doc.error('"levels" must be a non-empty array of arrays', doc.line_of('"levels"'))
    known = None if arguments is None else set(arguments)
    seen: dict[str, int] = {}
    for i, level in enumerate(levels):
        if not isinstance(level, list) or not level:
            raise doc.error(f"level {i} must be a non-empty array", doc.line_of('"levels"'))
        for a in level:
            if not isinstance(a, str):
                raise doc.error(f"argument identifiers must be strings, got {a!r}", doc.line_of('"levels"'))
            seen[a] = seen.get(a, 0) + 1
            if seen[a] > 1:
                raise doc.error(f"argument {a!r} appears in more than one place", doc.line_of(json.dumps(a), nth=2))
            if known is not None and a not in known:
                raise doc.error(f"unknown argument {a!r}", doc.line_of(json.dumps(a)))
    if known is not None:
        missing = [a for a in arguments if a not in seen]
        if missing:
            raise doc.error(f"ranking omits argument(s) {missing}", doc.line_of('"levels"'))
    return Ranking(tuple(tuple(level) for level in levels))


def framework_to_dict(framework: WeightedFramework | AttackGraph, weights=None) -> dict:
    if weights is None:
        weights = getattr(framework, "weights", None)
    doc = {
        "arguments": list(framework.arguments),
        "attacks": [list(p) for p in framework.attacks],
    }
    if weights is not None:
        doc["weights"] = {a: float(weights[a]) for a in framework.arguments}
    return doc


def dumps_framework(framework, weights=None) -> str:
    # one attack per line keeps error line numbers meaningful on re-read
    doc = framework_to_dict(framework, weights)
    lines = ["{", '  "arguments": ' + json.dumps(doc["arguments"]) + ","]
    attacks = doc["attacks"]
    if attacks:
        lines.append('  "attacks": [')
        lines.extend("    " + json.dumps(p) + ("," if k < len(attacks) - 1 else "") for k, p in enumerate(attacks))
        lines.append("  ]" + ("," if "weights" in doc else ""))
    else:
        lines.append('  "attacks": []' + ("," if "weights" in doc else ""))
    if "weights" in doc:
        items = list(doc["weights"].items())
        lines.append('  "weights": {')
        lines.extend(
            f"    {json.dumps(a)}: {json.dumps(w)}" + ("," if k < len(items) - 1 else "") for k, (a, w) in enumerate(items)
        )
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps_ranking(ranking: Ranking) -> str:
    body = ",\n".join("    " + json.dumps(list(level)) for level in ranking.levels)
    return '{\n  "levels": [\n' + body + "\n  ]\n}\n"


def write_text(path, text: str) -> None:
    Path(path).write_text(text)
