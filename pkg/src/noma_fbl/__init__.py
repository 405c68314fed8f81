"""Effective capacity of finite-blocklength NOMA downlinks over Rayleigh fading.

Library layout:

* ``special_functions`` — Gaussian Q/Q^{-1}, gamma/beta, exponential
  integral, U(a,b,z) by adaptive quadrature, Laplace-transform helpers;
* ``fading``             — ordered-statistics density and reproducible
  sampling of the V ordered instantaneous SNRs;
* ``rate``               — NOMA SNR/SINR split and the finite-blocklength
  achievable rate;
* ``effective_capacity`` — Monte-Carlo, closed-form, high-SNR and
  asymptotic EC evaluators for the strong and weak users;
* ``pairing``            — multi-pair rates/ECs under 2/V time sharing and
  exhaustive matching search;
* ``delay``              — queuing delay-violation probability and its
  error-probability floor;
* ``harness`` / ``cli``  — JSON config ingestion, sweeps, figure presets,
  CSV emission.
"""

from .errors import DomainError, LogArgumentError, QuadratureError, SeriesDivergenceError
from .special_functions import (
    DEFAULT_QUADRATURE,
    QuadratureSettings,
    beta,
    exp_integral_ei,
    exp_scaled_ei,
    gaussian_q,
    gaussian_q_inv,
    gen_binom,
    hyp_u,
    hyp_u_alternating_sum,
    ln_gamma,
)
from .fading import (
    FadingConfig,
    OrderedGainSample,
    ordered_cdf,
    ordered_gain_expectation,
    ordered_pdf,
    rank_weight,
    sample_ordered,
    sample_ordered_block,
    spawn_streams,
)
from .rate import FblParams, PairPower, dispersion, fbl_rate, sinr_strong, sinr_weak
from .effective_capacity import (
    DEFAULT_SERIES,
    ClosedFormContext,
    ECEstimate,
    SeriesSettings,
    UserQoS,
    ec_monte_carlo,
    ec_strong_asymptote,
    ec_strong_closed,
    ec_strong_high_snr,
    ec_strong_quadrature,
    ec_upper_bound,
    ec_weak_asymptote,
    ec_weak_closed,
    ec_weak_high_snr,
    ec_weak_quadrature,
)
from .pairing import (
    DEFAULT_PAIR_POWER,
    NomaPair,
    PairEcTable,
    PairingSet,
    best_pairing,
    enumerate_pairings,
    pair_ec,
    pair_ec_closed,
    pair_rates,
    total_ec,
)
from .delay import DelayTarget, delay_floor, delay_violation
from .harness import SEED_ENV_VAR, SweepSpec, SystemConfig, run_figure, run_sweep

__version__ = "0.1.0"
