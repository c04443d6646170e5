import numpy as np
import pytest

from uavnet.config import Environment, NetworkConfig


@pytest.fixture(scope="session")
def cfg_default():
    """Urban reference scenario (m = 1, downtilted omni array)."""
    return NetworkConfig()


@pytest.fixture(scope="session")
def cfg_dense():
    """Denser relay field: small sampling windows, fast empirical tests."""
    return NetworkConfig(lambda_d=1e-6)


@pytest.fixture(scope="session")
def cfg_nlos_rich():
    """Synthetic scenario with a substantial NLoS association share.

    The named environments make NLoS service vanishingly rare (the LoS
    competitor wins by orders of magnitude), so the NLoS branch of the
    serving law needs this setup to be exercised at all.
    """
    return NetworkConfig(
        lambda_d=1e-6,
        h_d_min=30.0,
        h_d_max=90.0,
        alpha_los=2.2,
        alpha_nlos=2.4,
        env=Environment(c1=27.23, c2=0.08, eta_los_db=0.0, eta_nlos_db=1.0),
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
