import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from noma_fbl import FadingConfig, FblParams, PairPower


@pytest.fixture(scope="session")
def power():
    return PairPower(alpha_weak=0.8, alpha_strong=0.2)


@pytest.fixture(scope="session")
def fbl():
    return FblParams(blocklength=400, error_prob=1e-5)


@pytest.fixture(scope="session")
def fading15():
    # 15 dB mean SNR, ten users: the baseline study configuration
    return FadingConfig(num_users=10, mean_snr=10.0 ** 1.5)
