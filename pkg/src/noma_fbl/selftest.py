"""Fast built-in invariant checks behind the `noma-fbl selftest` command.

A trimmed version of the full pytest suite: each check prints one
PASS/FAIL line and the runner returns a nonzero exit code if anything
failed.  Total runtime is a few seconds.
"""

from __future__ import annotations

import traceback
from math import exp, isclose

import numpy as np

from .effective_capacity import (
    ec_monte_carlo,
    ec_strong_asymptote,
    ec_strong_closed,
    ec_upper_bound,
    ec_weak_asymptote,
    ec_weak_closed,
    UserQoS,
)
from .delay import DelayTarget, delay_floor, delay_violation
from .fading import FadingConfig, ordered_gain_expectation, ordered_pdf, rank_weight
from .rate import FblParams, PairPower, fbl_rate
from .special_functions import beta, exp_integral_ei, gaussian_q, gaussian_q_inv, hyp_u


def _checks():
    yield "gaussian Q/Q^-1 round trip on [-6, 6]", lambda: max(
        abs(gaussian_q_inv(gaussian_q(x)) - x) for x in np.arange(-6.0, 6.0 + 1e-9, 0.1)
    ) <= 1e-8

    yield "U(1,2,z)·z = 1 for z in {0.1,1,10,100}", lambda: all(
        isclose(hyp_u(1.0, 2.0, z) * z, 1.0, rel_tol=1e-10) for z in (0.1, 1.0, 10.0, 100.0)
    )

    def u11_vs_ei():
        return isclose(hyp_u(1.0, 1.0, 1.0), -exp(1.0) * exp_integral_ei(-1.0), rel_tol=1e-9)

    yield "U(1,1,1) = e·E1(1)", u11_vs_ei

    yield "beta symmetry/positivity", lambda: all(
        beta(a, b) == beta(b, a) and beta(a, b) > 0.0
        for a in (0.5, 1.0, 3.5, 8.0) for b in (0.5, 2.0, 11.0)
    )

    def pdf_normalized():
        cfg = FadingConfig(10, 10.0)
        val = ordered_gain_expectation(lambda g: 1.0, 8, cfg)
        return abs(val - 1.0) <= 1e-8

    yield "ordered pdf integrates to 1 (rank 8 of 10)", pdf_normalized

    def pdf_sum_identity():
        cfg = FadingConfig(7, 3.0)
        for g in (0.01, 0.5, 2.0, 10.0):
            total = sum(ordered_pdf(i, cfg, g) for i in range(1, 8))
            parent = 7.0 / cfg.mean_snr * exp(-g / cfg.mean_snr)
            if abs(total - parent) > 1e-9 * parent:
                return False
        return True

    yield "ordered pdf rank-sum identity", pdf_sum_identity

    def eps_one_zero():
        fp = FblParams(400, 1.0)
        p = PairPower(0.8, 0.2)
        vals = [
            ec_strong_asymptote(fp, 0.01).value,
            ec_weak_asymptote(p, fp, 0.01).value,
            ec_strong_closed(8, 10, p, fp, 0.01, 10.0).value,
            ec_weak_closed(2, 10, p, fp, 0.01, 10.0).value,
            ec_monte_carlo(UserQoS(0.01, 8, "strong"), p, fp, FadingConfig(10, 10.0), 10, 1).value,
        ]
        return all(v == 0.0 for v in vals)

    yield "every evaluator returns exactly 0 at eps=1", eps_one_zero

    def mc_deterministic():
        p = PairPower(0.8, 0.2)
        fp = FblParams(400, 1e-5)
        cfg = FadingConfig(10, 31.6227766)
        user = UserQoS(0.01, 8, "strong")
        a = ec_monte_carlo(user, p, fp, cfg, 20_000, 7)
        b = ec_monte_carlo(user, p, fp, cfg, 20_000, 7)
        return a.value == b.value and a.ci_half_width == b.ci_half_width

    yield "Monte-Carlo reproducibility for a fixed seed", mc_deterministic

    def cap_and_floor():
        p = PairPower(0.8, 0.2)
        fp = FblParams(400, 1e-6)
        cap = ec_upper_bound(fp, 1.0)
        target = DelayTarget(400.0)
        floor = delay_floor(fp, 400.0)
        for theta in np.logspace(-3, 0, 10):
            ec = ec_strong_closed(8, 10, p, fp, float(theta), 100.0)
            if ec.value > ec_upper_bound(fp, float(theta)) + 1e-9:
                return False
            if delay_violation(ec, float(theta), target) < floor - 1e-12:
                return False
        return cap > 0.0

    yield "EC cap and delay-violation floor across theta", cap_and_floor

    def rate_penalty_sign():
        fp = FblParams(400, 1e-5)
        xs = np.linspace(0.0, 50.0, 21)
        return bool(np.all(fbl_rate(xs, fp) <= np.log2(1.0 + xs) + 1e-15))

    yield "rate penalty non-negative below eps=0.5", rate_penalty_sign

    def rank_weight_value():
        return isclose(rank_weight(8, 10), 360.0, rel_tol=1e-12)

    yield "rank weight xi_8 (V=10) = 360", rank_weight_value


def run_selftest() -> int:
    failures = 0
    for name, check in _checks():
        try:
            ok = bool(check())
        except Exception:
            ok = False
            traceback.print_exc()
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failures += 0 if ok else 1
    if failures:
        print(f"{failures} selftest check(s) failed")
        return 1
    print("all selftest checks passed")
    return 0
