"""Multi-pair NOMA: per-pair rates and ECs under 2/V time sharing.

V users are split into V/2 pairs; pairs share the frame through TDMA, so
every pair's rates carry a 2/V factor on the whole finite-blocklength
bracket.  Total effective capacity of a pairing set is the sum of its
members' ECs, and the pairing search enumerates all (V-1)!! perfect
matchings.

Because each user's EC depends only on its own ordered-gain marginal and
the (fixed) power split, all C(V,2) candidate pairs can be priced from a
single table of per-rank inner means computed on one shared sample set —
which is also the strongest possible form of common random numbers when
pairing sets are compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum, log, sqrt
from typing import Iterator, Optional

from .errors import DomainError
from .effective_capacity import (
    ECEstimate,
    McRequest,
    SeriesSettings,
    DEFAULT_SERIES,
    ec_strong_closed,
    ec_weak_closed,
    mc_inner_moments,
)
from .fading import FadingConfig
from .rate import FblParams, PairPower, fbl_rate, sinr_strong, sinr_weak
from .special_functions import DEFAULT_QUADRATURE, QuadratureSettings

__all__ = [
    "DEFAULT_PAIR_POWER",
    "NomaPair",
    "PairingSet",
    "enumerate_pairings",
    "pair_rates",
    "pair_ec",
    "pair_ec_closed",
    "PairEcTable",
    "total_ec",
    "best_pairing",
]

# The two-user study's split, reused for every pair: no per-pair rule is
# modeled, so pair EC decomposes over ranks.
DEFAULT_PAIR_POWER = PairPower(alpha_weak=0.8, alpha_strong=0.2)

MAX_EXHAUSTIVE_USERS = 12


@dataclass(frozen=True)
class NomaPair:
    """A (weak-rank, strong-rank) pair with its power split."""

    weak_rank: int
    strong_rank: int
    power: PairPower = DEFAULT_PAIR_POWER

    def __post_init__(self) -> None:
        if not 1 <= self.weak_rank < self.strong_rank:
            raise DomainError(
                f"need weak_rank < strong_rank with weak_rank >= 1, "
                f"got ({self.weak_rank}, {self.strong_rank})"
            )


@dataclass(frozen=True)
class PairingSet:
    """A perfect matching of ranks 1..V into V/2 pairs."""

    pairs: tuple[NomaPair, ...]

    def __post_init__(self) -> None:
        if not self.pairs:
            raise DomainError("pairing set must contain at least one pair")
        ranks = sorted(r for pr in self.pairs for r in (pr.weak_rank, pr.strong_rank))
        v = 2 * len(self.pairs)
        if ranks != list(range(1, v + 1)):
            raise DomainError(f"pairs must cover every rank 1..{v} exactly once, got {ranks}")

    @property
    def num_users(self) -> int:
        return 2 * len(self.pairs)

    def key(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted((p.weak_rank, p.strong_rank) for p in self.pairs))


def enumerate_pairings(v: int, power: PairPower = DEFAULT_PAIR_POWER) -> list[PairingSet]:
    """All (V-1)!! perfect matchings of ranks 1..V, lexicographic order."""
    if v < 2 or v % 2 != 0:
        raise DomainError(f"V must be a positive even integer, got {v}")

    def rec(avail: tuple[int, ...]) -> Iterator[list[tuple[int, int]]]:
        if not avail:
            yield []
            return
        first = avail[0]
        for partner in avail[1:]:
            rest = tuple(x for x in avail[1:] if x != partner)
            for tail in rec(rest):
                yield [(first, partner)] + tail

    out = []
    for combo in rec(tuple(range(1, v + 1))):
        out.append(PairingSet(tuple(NomaPair(a, b, power) for a, b in combo)))
    return out


def pair_rates(pair: NomaPair, gamma_t: float, gamma_u: float, v: int, fp: FblParams):
    """(weak, strong) instantaneous rates of a pair inside a V-user frame.

    The 2/V TDMA share scales the whole finite-blocklength bracket,
    dispersion penalty included.
    """
    if v < 2 or v % 2 != 0:
        raise DomainError(f"V must be a positive even integer, got {v}")
    if gamma_t < 0.0 or gamma_u < 0.0:
        raise DomainError("gains must be >= 0")
    share = 2.0 / v
    r_weak = share * float(fbl_rate(sinr_weak(gamma_t, pair.power), fp))
    r_strong = share * float(fbl_rate(sinr_strong(gamma_u, pair.power), fp))
    return r_weak, r_strong


def pair_ec(
    pair: NomaPair,
    v: int,
    fp: FblParams,
    theta_weak: float,
    theta_strong: float,
    rho: float,
    n_samples: int,
    seed,
) -> tuple[ECEstimate, ECEstimate]:
    """Monte-Carlo (weak, strong) ECs of one pair, ranks indexing the
    global V-user ordered sample."""
    if v % 2 != 0:
        raise DomainError(f"V must be even, got {v}")
    if pair.strong_rank > v:
        raise DomainError(f"pair ranks must lie within 1..{v}")
    if fp.error_prob == 1.0:
        z = ECEstimate(0.0, "mc", ci_half_width=0.0, samples=n_samples)
        return z, z
    cfg = FadingConfig(num_users=v, mean_snr=rho)
    share = 2.0 / v
    reqs = [
        McRequest(pair.weak_rank, "weak", theta_weak, share),
        McRequest(pair.strong_rank, "strong", theta_strong, share),
    ]
    moments = mc_inner_moments(reqs, pair.power, fp, cfg, n_samples, seed)
    out = []
    for (mean, var), theta in zip(moments, (theta_weak, theta_strong)):
        theta_n = theta * fp.blocklength
        half = 1.96 * sqrt(var / n_samples) / (mean * theta_n)
        out.append(ECEstimate(-log(mean) / theta_n, "mc", ci_half_width=half, samples=n_samples))
    return out[0], out[1]


def pair_ec_closed(
    pair: NomaPair,
    v: int,
    fp: FblParams,
    theta_weak: float,
    theta_strong: float,
    rho: float,
    series: SeriesSettings = DEFAULT_SERIES,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> tuple[ECEstimate, ECEstimate]:
    """Closed-form (weak, strong) pair ECs.

    The 2/V rate share is absorbed into the exponent: with θ' = 2θ/V the
    pair's inner expectation equals the two-user one, so each pair EC is
    (2/V) times the two-user closed form evaluated at θ'.
    """
    if v % 2 != 0:
        raise DomainError(f"V must be even, got {v}")
    share = 2.0 / v
    w = ec_weak_closed(pair.weak_rank, v, pair.power, fp, share * theta_weak, rho, series, q)
    s = ec_strong_closed(pair.strong_rank, v, pair.power, fp, share * theta_strong, rho, q)
    return (
        ECEstimate(share * w.value, "closed"),
        ECEstimate(share * s.value, "closed"),
    )


class PairEcTable:
    """Per-rank Monte-Carlo ECs on one shared sample set.

    Prices every (weak t, strong u) pair for a fixed (V, θ, ρ, seed); any
    two pairing sets totaled from the same table are compared under common
    random numbers.
    """

    def __init__(
        self,
        v: int,
        fp: FblParams,
        theta: float,
        rho: float,
        n_samples: int,
        seed,
        power: PairPower = DEFAULT_PAIR_POWER,
    ):
        if v < 2 or v % 2 != 0:
            raise DomainError(f"V must be a positive even integer, got {v}")
        self.v = v
        self.theta = theta
        self.n_samples = n_samples
        cfg = FadingConfig(num_users=v, mean_snr=rho)
        share = 2.0 / v
        reqs = [McRequest(rank, "weak", theta, share) for rank in range(1, v)]
        reqs += [McRequest(rank, "strong", theta, share) for rank in range(2, v + 1)]
        if fp.error_prob == 1.0:
            moments = [(1.0, 0.0)] * len(reqs)
        else:
            moments = mc_inner_moments(reqs, power, fp, cfg, n_samples, seed)
        theta_n = theta * fp.blocklength
        self.weak_ec: dict[int, ECEstimate] = {}
        self.strong_ec: dict[int, ECEstimate] = {}
        for req, (mean, var) in zip(reqs, moments):
            half = 1.96 * sqrt(var / n_samples) / (mean * theta_n) if mean > 0 else 0.0
            est = ECEstimate(-log(mean) / theta_n, "mc", ci_half_width=half, samples=n_samples)
            (self.weak_ec if req.role == "weak" else self.strong_ec)[req.rank] = est

    def total(self, ps: PairingSet) -> float:
        if ps.num_users != self.v:
            raise DomainError(f"pairing set covers {ps.num_users} users, table built for {self.v}")
        # exact summation: totals are invariant to pair order, and pairings
        # with identical rank partitions tie exactly instead of by rounding
        return fsum(
            self.weak_ec[p.weak_rank].value + self.strong_ec[p.strong_rank].value
            for p in ps.pairs
        )

    def total_ci_half_width(self, ps: PairingSet) -> float:
        # independent-sum bound; with shared samples the members are
        # positively correlated, so this overstates the uncertainty.
        return sqrt(
            sum(
                self.weak_ec[p.weak_rank].ci_half_width ** 2
                + self.strong_ec[p.strong_rank].ci_half_width ** 2
                for p in ps.pairs
            )
        )


def total_ec(
    ps: PairingSet,
    v: int,
    fp: FblParams,
    theta: float,
    rho: float,
    n_samples: int,
    seed,
    table: Optional[PairEcTable] = None,
) -> float:
    """Total EC of a pairing set: Σ over pairs of (weak EC + strong EC).

    Calls with the same seed price their pairs from identical draws, so
    competing pairing sets are compared under common random numbers; pass
    a prebuilt ``table`` to amortize sampling across many comparisons.
    """
    if ps.num_users != v:
        raise DomainError(f"pairing set covers {ps.num_users} users, expected {v}")
    if table is None:
        table = PairEcTable(v, fp, theta, rho, n_samples, seed)
    return table.total(ps)


def _separation_profile(ps: PairingSet) -> tuple[int, ...]:
    return tuple(sorted((p.strong_rank - p.weak_rank for p in ps.pairs), reverse=True))


def best_pairing(
    v: int,
    fp: FblParams,
    theta: float,
    rho: float,
    n_samples: int,
    seed,
    power: PairPower = DEFAULT_PAIR_POWER,
) -> tuple[PairingSet, float]:
    """Exhaustive argmax of total EC over all perfect matchings of 1..V.

    With a shared power split, every matching that assigns the same ranks
    to the weak and strong roles has exactly the same total, so the argmax
    is degenerate within a rank partition.  Exact ties are broken toward
    the largest rank-separation profile (most-distinct channel conditions
    paired together), then lexicographically; the result is deterministic
    for a fixed seed.
    """
    if v > MAX_EXHAUSTIVE_USERS:
        raise DomainError(f"exhaustive search limited to V <= {MAX_EXHAUSTIVE_USERS}, got {v}")
    table = PairEcTable(v, fp, theta, rho, n_samples, seed, power)
    best: Optional[tuple[float, tuple[int, ...], PairingSet]] = None
    for ps in enumerate_pairings(v, power):
        cand = (table.total(ps), _separation_profile(ps), ps)
        if best is None or cand[0] > best[0] or (cand[0] == best[0] and cand[1] > best[1]):
            best = cand
    assert best is not None
    return best[2], best[0]
