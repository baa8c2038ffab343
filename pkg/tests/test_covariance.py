import math
from datetime import date, timedelta

import numpy as np
import pytest

from src.domain.value_objects.hydro_values import CovarianceParams, NetworkLocation, OrbitClass
from src.infrastructure.geostatistics.covariance_model import SpatioTemporalCovariance
from src.infrastructure.simulation.synthetic_generator import SyntheticGenerator

from .factories import observation, random_network


def test_temporal_cov(covariance):
    params = CovarianceParams(tau=10.0)
    assert covariance.temporal_cov(0, params) == 1.0
    assert covariance.temporal_cov(10, params) == pytest.approx(math.exp(-1))
    assert covariance.temporal_cov(-5, params) == pytest.approx(0.6065306597)


def test_spatial_cov_at_zero_lag(covariance, chain_network, params):
    a = NetworkLocation("e2", 5.0)
    assert covariance.spatial_cov(chain_network, a, a, params) == pytest.approx(params.sill)


def test_unconnected_pair_in_same_sub_basin_is_basin_only(covariance, y_network, params):
    a, b = NetworkLocation("a", 3.0), NetworkLocation("b", 7.0)
    assert covariance.spatial_cov(y_network, a, b, params) == pytest.approx(params.sigma2_basin)


def test_tail_up_weight_across_confluence(covariance, y_network):
    params = CovarianceParams(sigma2_river=2.0, rho_river=20.0, sigma2_basin=0.5, rho_basin=30.0)
    upstream = NetworkLocation("a", 0.0)
    downstream = NetworkLocation("c", 10.0)
    assert y_network.river_distance(upstream, downstream) == pytest.approx(20.0)
    basin = params.sigma2_basin * math.exp(-y_network.basin_distance(upstream, downstream) / params.rho_basin)
    expected = params.sigma2_river * 0.5 * math.exp(-1) + basin
    assert covariance.spatial_cov(y_network, upstream, downstream, params) == pytest.approx(expected)
    assert covariance.spatial_cov(y_network, downstream, upstream, params) == pytest.approx(expected)


def test_st_cov_coincident_points_add_nugget(covariance, chain_network, params):
    point = (NetworkLocation("e1", 2.0), date(2010, 5, 1))
    assert covariance.st_cov(chain_network, point, point, params) == pytest.approx(params.sill + params.nugget)


def test_st_cov_is_separable(covariance, y_network, params):
    a = (NetworkLocation("a", 4.0), date(2010, 5, 1))
    b = (NetworkLocation("c", 6.0), date(2010, 5, 8))
    expected = covariance.spatial_cov(y_network, a[0], b[0], params) * covariance.temporal_cov(7, params)
    assert covariance.st_cov(y_network, a, b, params) == pytest.approx(expected)


def test_st_cov_vanishes_with_spatial_part(covariance, y_network):
    params = CovarianceParams(sigma2_river=1.0, sigma2_basin=0.0)
    a, b = NetworkLocation("a", 3.0), NetworkLocation("b", 7.0)
    for dt in (0, 4, 90):
        assert covariance.st_cov(y_network, (a, date(2010, 1, 1)), (b, date(2010, 1, 1) + timedelta(days=dt)),
                                 params) == 0.0


def test_single_observation_matrices(covariance, chain_network, params, day0):
    sigma_u, sigma_alti = covariance.build_matrices(chain_network, [observation("e2", 3.0, day0, 1.0)], params)
    assert sigma_u == pytest.approx(np.array([[params.sill]]))
    assert sigma_alti == pytest.approx(np.array([[params.nugget]]))


def test_duplicate_observations_are_separated_by_the_error_term(covariance, chain_network, params, day0):
    pair = [observation("e2", 3.0, day0, 1.0), observation("e2", 3.0, day0, 1.2, mission="B")]
    sigma_u, sigma_alti = covariance.build_matrices(chain_network, pair, params)
    assert np.linalg.matrix_rank(sigma_u) == 1
    assert np.allclose(sigma_u, params.sill)
    assert np.allclose(sigma_alti, np.eye(2) * params.nugget)


def test_matrices_match_pointwise_covariance(covariance, y_network, params, rng, day0):
    edges = ["a", "b", "c"]
    observations = [
        observation(edges[k % 3], float(rng.uniform(0, 10)), day0 + timedelta(days=3 * k), 1.0)
        for k in range(5)
    ]
    sigma_u, _ = covariance.build_matrices(y_network, observations, params)
    for i, a in enumerate(observations):
        for j, b in enumerate(observations):
            expected = covariance.spatial_cov(y_network, a.location, b.location, params) * covariance.temporal_cov(
                (a.epoch - b.epoch).days, params
            )
            assert sigma_u[i, j] == pytest.approx(expected)


def test_process_covariance_is_positive_semidefinite(covariance, y_network, params, rng, day0):
    observations = [
        observation(["a", "b", "c"][k % 3], float(rng.uniform(0, 10)), day0 + timedelta(days=int(rng.integers(0, 60))), 0.0)
        for k in range(40)
    ]
    sigma_u, _ = covariance.build_matrices(y_network, observations, params)
    assert np.allclose(sigma_u, sigma_u.T)
    assert np.linalg.eigvalsh(sigma_u).min() > -1e-9


def test_error_factors_combine_tributary_quality_and_mission(y_network, day0):
    covariance = SpatioTemporalCovariance({"B": 1.5})
    params = CovarianceParams(nugget=0.1, trib_factor_major=2.0)
    observations = [
        observation("a", 1.0, day0, 0.0, quality=2.0, mission="B", orbit=OrbitClass.LONG_REPEAT),
        observation("c", 1.0, day0, 0.0),
    ]
    assert covariance.error_factors(y_network, observations, params) == pytest.approx([6.0, 1.0])


def test_mission_factor_below_one_is_rejected():
    with pytest.raises(ValueError):
        SpatioTemporalCovariance({"A": 0.5})


def random_observations(network, rng, day0, count):
    locations = SyntheticGenerator.random_locations(network, count, rng)
    return [observation(loc.edge_id, loc.offset_km, day0 + timedelta(days=int(rng.integers(0, 90))), 0.0)
            for loc in locations]


def test_process_covariance_is_positive_semidefinite_on_random_networks(covariance, params, rng, day0):
    for _ in range(100):
        network = random_network(rng)
        sigma_u, _ = covariance.build_matrices(network, random_observations(network, rng, day0, 30), params)
        eigenvalues = np.linalg.eigvalsh(sigma_u)
        assert np.allclose(sigma_u, sigma_u.T)
        assert eigenvalues.min() >= -1e-9 * eigenvalues.max()


def test_tributary_errors_are_not_below_main_stem_errors(covariance, params, rng, day0):
    for _ in range(20):
        network = random_network(rng)
        observations = random_observations(network, rng, day0, 40)
        _, sigma_alti = covariance.build_matrices(network, observations, params)
        variances = np.diag(sigma_alti)
        on_main = np.array([network.edge(o.location.edge_id).river_id == "main" for o in observations])
        if on_main.all() or not on_main.any():
            continue
        assert variances[~on_main].min() >= variances[on_main].max()
