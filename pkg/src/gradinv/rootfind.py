"""Bracketing bisection for a decreasing scalar function."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

from .errors import BracketError, ValidationError


@dataclass(frozen=True)
class BisectionConfig:
    """Stopping rules.

    ``eps`` bounds ``|f(mid)|``. When ``width_eps`` is set the function value
    is ignored and halving stops once the bracket is no wider than it.
    """

    eps: float = 1e-3
    max_depth: int = 200
    width_eps: float | None = None

    def __post_init__(self):
        if not self.eps > 0:
            raise ValidationError("eps must be > 0")
        if int(self.max_depth) != self.max_depth or self.max_depth < 1:
            raise ValidationError("max_depth must be a positive integer")
        if self.width_eps is not None and not self.width_eps > 0:
            raise ValidationError("width_eps must be > 0")


@dataclass(frozen=True)
class BisectionOutcome:
    root: float
    evaluations: int  # midpoint evaluations; bracket checks not counted
    converged: bool


def bisect(
    f: Callable[[float], float],
    alpha: float,
    beta: float,
    cfg: BisectionConfig | None = None,
    *,
    check_bracket: bool = True,
    on_probe: Callable[[float, float], None] | None = None,
) -> BisectionOutcome:
    """Find a root of ``f`` on ``[alpha, beta]`` with ``f(alpha) >= 0 >= f(beta)``.

    Increasing functions must be negated by the caller. ``on_probe`` sees
    every ``(mid, f(mid))`` pair in evaluation order.

    >>> bisect(lambda x: 0.5 - x, 0.0, 1.0).root
    0.5
    """
    cfg = cfg or BisectionConfig()
    if alpha > beta:
        raise BracketError(f"alpha={alpha} exceeds beta={beta}")
    if check_bracket:
        fa, fb = f(alpha), f(beta)
        if fa < 0 or fb > 0:
            raise BracketError(f"need f(alpha) >= 0 >= f(beta), got f({alpha})={fa}, f({beta})={fb}")

    lo, hi = alpha, beta
    width = beta - alpha
    mid = 0.5 * (lo + hi)
    if cfg.width_eps is not None and width <= cfg.width_eps:
        return BisectionOutcome(mid, 0, True)
    for depth in range(1, cfg.max_depth + 1):
        mid = 0.5 * (lo + hi)
        if cfg.width_eps is not None:
            # width-driven mode: halve, keep the sign-correct half
            fm = f(mid)
            if on_probe is not None:
                on_probe(mid, fm)
            if fm > 0:
                lo = mid
            else:
                hi = mid
            width *= 0.5
            if width <= cfg.width_eps:
                return BisectionOutcome(0.5 * (lo + hi), depth, True)
            continue
        fm = f(mid)
        if on_probe is not None:
            on_probe(mid, fm)
        if abs(fm) < cfg.eps:
            return BisectionOutcome(mid, depth, True)
        if fm > 0:
            lo = mid
        else:
            hi = mid
    return BisectionOutcome(mid, cfg.max_depth, False)

