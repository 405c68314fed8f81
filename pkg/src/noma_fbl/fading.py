"""Rayleigh block-fading channel model with ordered statistics.

Instantaneous received SNRs are γ = ρ|h|² with |h|² exponential of unit
mean (unit-variance Rayleigh amplitude), so γ is exponential with mean ρ.
Sorting V independent draws ascending gives the ordered gains the NOMA
rank structure is built on.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, exp

import numpy as np
from scipy.special import betainc

from .errors import DomainError
from .special_functions import QuadratureSettings, DEFAULT_QUADRATURE, integrate_semi_infinite

__all__ = [
    "FadingConfig",
    "OrderedGainSample",
    "rank_weight",
    "ordered_pdf",
    "ordered_cdf",
    "sample_ordered",
    "sample_ordered_block",
    "spawn_streams",
    "ordered_gain_expectation",
]


@dataclass(frozen=True)
class FadingConfig:
    """Number of users V and mean received SNR ρ (linear, not dB)."""

    num_users: int
    mean_snr: float

    def __post_init__(self) -> None:
        if self.num_users < 1:
            raise DomainError(f"num_users must be >= 1, got {self.num_users}")
        if not self.mean_snr > 0.0:
            raise DomainError(f"mean_snr must be > 0, got {self.mean_snr}")


@dataclass(frozen=True)
class OrderedGainSample:
    """One draw of the V instantaneous SNRs, sorted ascending."""

    gamma: np.ndarray

    def __post_init__(self) -> None:
        g = np.asarray(self.gamma, dtype=float)
        if g.ndim != 1 or g.size < 1:
            raise DomainError("gamma must be a non-empty 1-D vector")
        if np.any(g < 0.0) or np.any(np.diff(g) < 0.0):
            raise DomainError("gamma must be non-negative and sorted ascending")
        object.__setattr__(self, "gamma", g)


def _check_rank(rank: int, v: int) -> None:
    if not 1 <= rank <= v:
        raise DomainError(f"rank must be in 1..{v}, got {rank}")


def rank_weight(rank: int, num_users: int) -> float:
    """Order-statistics weight ξ_i = 1/B(i, V-i+1) = V!/((i-1)!(V-i)!).

    Equal to i·C(V, i), computed in exact integer arithmetic.
    """
    _check_rank(rank, num_users)
    return float(rank * comb(num_users, rank))


def ordered_pdf(rank: int, cfg: FadingConfig, gamma):
    """Density of the rank-th smallest of V exponential(mean ρ) gains.

    ξ_i f(γ) F(γ)^{i-1} (1-F(γ))^{V-i} with f(γ) = e^{-γ/ρ}/ρ and
    F(γ) = 1 - e^{-γ/ρ}.  Accepts scalars or arrays.
    """
    v, rho = cfg.num_users, cfg.mean_snr
    _check_rank(rank, v)
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0.0):
        raise DomainError("gamma must be >= 0")
    x = g / rho
    sf = np.exp(-x)
    cdf = -np.expm1(-x)
    out = rank_weight(rank, v) / rho * sf ** (v - rank + 1) * cdf ** (rank - 1)
    return out if out.ndim else float(out)


def ordered_cdf(rank: int, cfg: FadingConfig, gamma):
    """CDF of the rank-th ordered gain: regularized incomplete beta of F(γ)."""
    v, rho = cfg.num_users, cfg.mean_snr
    _check_rank(rank, v)
    g = np.asarray(gamma, dtype=float)
    u = -np.expm1(-g / rho)
    out = betainc(rank, v - rank + 1, u)
    return out if np.ndim(out) else float(out)


def spawn_streams(seed, count: int) -> list[np.random.Generator]:
    """Independent child generators from one root seed.

    SeedSequence spawning is the documented splitting mechanism: children
    never collide, so parallel workers stay reproducible for a fixed root.
    """
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.default_rng(child) for child in root.spawn(count)]


def sample_ordered_block(cfg: FadingConfig, rng: np.random.Generator, count: int) -> np.ndarray:
    """(count, V) array of ordered gains; rows sorted ascending."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    g = rng.exponential(scale=cfg.mean_snr, size=(count, cfg.num_users))
    g.sort(axis=1)
    return g


def sample_ordered(cfg: FadingConfig, rng: np.random.Generator) -> OrderedGainSample:
    """One ordered draw of all V instantaneous SNRs."""
    return OrderedGainSample(sample_ordered_block(cfg, rng, 1)[0])


def ordered_gain_expectation(
    fn,
    rank: int,
    cfg: FadingConfig,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> float:
    """E[fn(γ_rank)] under the ordered-gain density, by adaptive quadrature.

    Integrates in the normalized variable x = γ/ρ, where the kernel
    ξ e^{-(V-rank+1)x}(1-e^{-x})^{rank-1} is scale-free.
    """
    v, rho = cfg.num_users, cfg.mean_snr
    _check_rank(rank, v)
    weight = rank_weight(rank, v)
    tail_pow = v - rank + 1

    def f(x: float) -> float:
        if x <= 0.0:
            return 0.0
        ex = tail_pow * x
        if ex > 700.0:
            return 0.0
        kern = exp(-ex) * (-np.expm1(-x)) ** (rank - 1)
        return fn(rho * x) * kern

    return weight * integrate_semi_infinite(f, q, scan_lo=1e-9, scan_hi=1e4)
