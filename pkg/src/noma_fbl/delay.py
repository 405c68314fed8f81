"""Queuing delay-violation probability driven by effective capacity.

Pr{D > D_max} ≈ Pr{q(∞) > 0} · e^{-θ · EC · D_max}.  D_max is counted in
the same channel-use-normalized blocks the EC convention uses (no
wall-clock mapping), and the non-empty-buffer probability defaults to 1,
the conservative bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp

from .errors import DomainError
from .effective_capacity import ECEstimate
from .rate import FblParams

__all__ = ["DelayTarget", "delay_violation", "delay_floor"]


@dataclass(frozen=True)
class DelayTarget:
    """Delay threshold and the probability the queue is non-empty."""

    d_max: float
    nonempty_prob: float = 1.0

    def __post_init__(self) -> None:
        if not self.d_max > 0.0:
            raise DomainError(f"d_max must be > 0, got {self.d_max}")
        if not 0.0 < self.nonempty_prob <= 1.0:
            raise DomainError(f"nonempty_prob must be in (0, 1], got {self.nonempty_prob}")


def delay_violation(ec: ECEstimate, theta: float, target: DelayTarget) -> float:
    """Pr{delay > d_max}, clamped to [0, 1]."""
    if not theta > 0.0:
        raise DomainError(f"theta must be > 0, got {theta}")
    if ec.value < 0.0:
        raise DomainError(f"effective capacity must be >= 0, got {ec.value}")
    out = target.nonempty_prob * exp(-theta * ec.value * target.d_max)
    return min(max(out, 0.0), 1.0)


def delay_floor(fp: FblParams, d_max: float) -> float:
    """ε^{d_max/n}: the θ-independent floor of the violation bound.

    θ·EC ≤ -ln(ε)/n for every θ (the inner expectation never drops below
    ε), so with a full buffer the exponential bound can never improve past
    this value no matter how stringent the delay exponent becomes.
    d_max = 0 is admitted and gives the trivial floor 1.
    """
    if d_max < 0.0:
        raise DomainError(f"d_max must be >= 0, got {d_max}")
    eps = fp.error_prob
    if eps == 1.0 or d_max == 0.0:
        return 1.0
    return eps ** (d_max / fp.blocklength)
