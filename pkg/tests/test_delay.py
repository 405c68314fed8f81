import math

import numpy as np
import pytest

from noma_fbl import (
    DelayTarget,
    DomainError,
    ECEstimate,
    FblParams,
    PairPower,
    delay_floor,
    delay_violation,
    ec_strong_closed,
    ec_weak_closed,
)


class TestDelayViolation:
    def test_zero_capacity_gives_nonempty_prob(self):
        target = DelayTarget(d_max=100.0, nonempty_prob=0.7)
        assert delay_violation(ECEstimate(0.0, "closed"), 0.01, target) == 0.7

    def test_asymptote_point_recovers_eps(self):
        # θ·EC·D_max = -ln(eps) when EC sits exactly at the cap and D_max = n
        target = DelayTarget(d_max=400.0)
        ec = ECEstimate(-math.log(1e-5) / 4.0, "asymptotic")
        assert delay_violation(ec, 0.01, target) == pytest.approx(1e-5, rel=1e-10)

    def test_large_dmax_limit(self):
        assert delay_violation(ECEstimate(1.0, "closed"), 0.01, DelayTarget(1e9)) == 0.0

    def test_monotone_in_dmax_and_capacity(self):
        vals = [
            delay_violation(ECEstimate(1.2, "closed"), 0.01, DelayTarget(d))
            for d in (10.0, 100.0, 1000.0)
        ]
        assert vals[0] > vals[1] > vals[2]
        vals = [
            delay_violation(ECEstimate(ec, "closed"), 0.01, DelayTarget(200.0))
            for ec in (0.1, 1.0, 2.5)
        ]
        assert vals[0] > vals[1] > vals[2]

    def test_validation(self):
        with pytest.raises(DomainError):
            DelayTarget(0.0)
        with pytest.raises(DomainError):
            DelayTarget(10.0, nonempty_prob=0.0)
        with pytest.raises(DomainError):
            delay_violation(ECEstimate(-0.1, "closed"), 0.01, DelayTarget(10.0))
        with pytest.raises(DomainError):
            delay_violation(ECEstimate(1.0, "closed"), 0.0, DelayTarget(10.0))


class TestDelayFloor:
    def test_unit_exponent(self):
        assert delay_floor(FblParams(400, 1e-6), 400.0) == 1e-6

    def test_eps_one(self):
        assert delay_floor(FblParams(400, 1.0), 123.0) == 1.0

    def test_zero_threshold(self):
        assert delay_floor(FblParams(400, 1e-6), 0.0) == 1.0

    def test_general_exponent(self):
        assert delay_floor(FblParams(100, 1e-4), 50.0) == pytest.approx(1e-2, rel=1e-12)


class TestFloorHolds:
    @pytest.mark.parametrize("role", ["strong", "weak"])
    def test_violation_never_below_floor(self, power, role):
        # the bound with a full buffer cannot beat eps^{d_max/n} at any θ
        fp = FblParams(400, 1e-6)
        target = DelayTarget(d_max=400.0)
        floor = delay_floor(fp, target.d_max)
        rho = 100.0
        for theta in np.logspace(-3, 0, 20):
            theta = float(theta)
            if role == "strong":
                ec = ec_strong_closed(8, 10, power, fp, theta, rho)
            else:
                ec = ec_weak_closed(2, 10, power, fp, theta, rho)
            assert delay_violation(ec, theta, target) >= floor - 1e-12
