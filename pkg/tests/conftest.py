import pytest

from ulik.channel import ChannelParams, PowerControl


@pytest.fixture
def params():
    """3GPP-style defaults used throughout: A=103.8 dB, alpha=20.9 dB/decade."""
    return ChannelParams(a_db=103.8, alpha=20.9, sigma_shad_sq=100.0)


@pytest.fixture
def pc():
    return PowerControl(p0_dbm=-76.0, eta=0.8)
