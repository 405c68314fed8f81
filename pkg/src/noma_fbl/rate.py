"""Finite-blocklength rate model under a two-user NOMA power split.

The strong user cancels the weak user's signal before decoding, so it sees
SNR = α_u γ; the weak user treats the strong user's signal as noise and
sees SINR = α_t γ / (α_u γ + 1).  The achievable rate per channel use is
the Shannon term minus a dispersion penalty scaled by Q^{-1}(ε)/√n.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, sqrt

import numpy as np

from .errors import DomainError
from .special_functions import gaussian_q_inv

__all__ = ["PairPower", "FblParams", "sinr_strong", "sinr_weak", "dispersion", "fbl_rate"]

LN2 = log(2.0)


@dataclass(frozen=True)
class PairPower:
    """Power-allocation fractions (α_weak, α_strong) with unit sum.

    The unit sum is load-bearing: the weak user's closed-form algebra uses
    1 + SINR_weak = (γ+1)/(α_strong γ+1), which holds only when the split
    is exhaustive.
    """

    alpha_weak: float
    alpha_strong: float

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha_strong < self.alpha_weak < 1.0:
            raise DomainError(
                f"need 0 < alpha_strong < alpha_weak < 1, got ({self.alpha_weak}, {self.alpha_strong})"
            )
        if abs(self.alpha_weak + self.alpha_strong - 1.0) > 1e-12:
            raise DomainError(
                f"power fractions must sum to 1, got {self.alpha_weak + self.alpha_strong}"
            )


@dataclass(frozen=True)
class FblParams:
    """Blocklength n (channel uses) and transmission error probability ε.

    ε = 1 is admitted as the degenerate no-reliability limit: every
    effective-capacity evaluator returns exactly 0 there without ever
    evaluating Q^{-1}(1).
    """

    blocklength: int
    error_prob: float

    def __post_init__(self) -> None:
        if self.blocklength < 1 or self.blocklength != int(self.blocklength):
            raise DomainError(f"blocklength must be a positive integer, got {self.blocklength}")
        if not 0.0 < self.error_prob <= 1.0:
            raise DomainError(f"error_prob must be in (0, 1], got {self.error_prob}")

    @property
    def q_inv_eps(self) -> float:
        return gaussian_q_inv(self.error_prob)


def sinr_strong(gamma_u, p: PairPower):
    """Post-cancellation SNR of the strong user: α_strong · γ."""
    return p.alpha_strong * np.asarray(gamma_u, dtype=float)


def sinr_weak(gamma_t, p: PairPower):
    """SINR of the weak user: α_weak γ / (α_strong γ + 1).

    Increasing in γ and bounded above by α_weak/α_strong.
    """
    g = np.asarray(gamma_t, dtype=float)
    return p.alpha_weak * g / (p.alpha_strong * g + 1.0)


def dispersion(x):
    """Channel dispersion factor √(1 - (1+x)^{-2}) ∈ [0, 1).

    Written as √(x(x+2))/(1+x) to avoid cancellation at small x.
    """
    v = np.asarray(x, dtype=float)
    if np.any(v < 0.0):
        raise DomainError("dispersion requires x >= 0")
    return np.sqrt(v * (v + 2.0)) / (v + 1.0)


def fbl_rate(x, fp: FblParams):
    """Achievable rate log2(1+x) - (δ(x)/√n)·Q^{-1}(ε), bits per channel use.

    May be negative at low SINR; no clamping — the closed-form expectation
    integrates over all γ ≥ 0, and the Monte-Carlo path must match it.
    The penalty vanishes at ε = 0.5 and flips sign above it.
    """
    v = np.asarray(x, dtype=float)
    return np.log1p(v) / LN2 - dispersion(v) / sqrt(fp.blocklength) * fp.q_inv_eps
