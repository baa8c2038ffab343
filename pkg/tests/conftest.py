from datetime import date

import numpy as np
import pytest

from src.domain.entities.network import RiverNetwork
from src.domain.value_objects.hydro_values import CovarianceParams
from src.infrastructure.geostatistics.covariance_model import SpatioTemporalCovariance
from src.infrastructure.geostatistics.trend_basis import BSplineTrendService
from src.infrastructure.geostatistics.universal_kriging import UniversalKrigingService

from .factories import edge, node


def chain(mid_kind="gauge-site"):
    """source -> mid -> mouth, trechos de 10 e 20 km"""
    return RiverNetwork.create(
        [node("S", 30.0, 0.0, "source", "B1"), node("M", 20.0, 0.0, mid_kind, "B1"), node("O", 0.0, 0.0, "mouth", "B1")],
        [edge("e1", "S", "M", 10.0, 1.0), edge("e2", "M", "O", 20.0, 1.0)],
    )


@pytest.fixture
def chain_network():
    return chain()


@pytest.fixture
def dammed_chain_network():
    return chain("dam")


@pytest.fixture
def y_network():
    """Dois afluentes (pesos 1 e 3) numa confluência J com trecho de jusante de peso 4"""
    return RiverNetwork.create(
        [
            node("A", -10.0, 10.0, "source", "SU"),
            node("B", -10.0, -10.0, "source", "SU"),
            node("J", 0.0, 0.0, "confluence", "SM"),
            node("O", 10.0, 0.0, "mouth", "SM"),
        ],
        [
            edge("a", "A", "J", 10.0, 1.0, river_id="ra", trib_class="major-tributary"),
            edge("b", "B", "J", 10.0, 3.0),
            edge("c", "J", "O", 10.0, 4.0),
        ],
    )


@pytest.fixture
def basin_network():
    """Centróides de sub-bacia em (3, 4) e (0, 0)"""
    return RiverNetwork.create(
        [node("S", 3.0, 4.0, "source", "B2"), node("M", 0.0, 0.0, "gauge-site", "B1"), node("O", 0.0, 0.0, "mouth", "B1")],
        [edge("e1", "S", "M", 5.0, 1.0), edge("e2", "M", "O", 1.0, 1.0)],
    )


@pytest.fixture
def long_river():
    """Um único rio de 300 km num único trecho"""
    return RiverNetwork.create(
        [node("S", 300.0, 0.0, "source", "B1"), node("O", 0.0, 0.0, "mouth", "B1")],
        [edge("e", "S", "O", 300.0, 1.0)],
    )


@pytest.fixture
def params():
    return CovarianceParams(
        sigma2_river=1.0, rho_river=20.0, sigma2_basin=0.25, rho_basin=50.0, tau=10.0, nugget=0.04,
    )


@pytest.fixture
def covariance():
    return SpatioTemporalCovariance()


@pytest.fixture
def trend():
    return BSplineTrendService()


@pytest.fixture
def kriging(covariance, trend):
    return UniversalKrigingService(covariance, trend)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def day0():
    return date(2010, 1, 1)
