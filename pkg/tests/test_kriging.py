from datetime import date, timedelta

import numpy as np
import pytest

from src.domain.entities.network import RiverNetwork
from src.domain.entities.trend_basis import TrendBasis
from src.domain.exceptions import KrigingSystemError
from src.domain.value_objects.hydro_values import CovarianceParams, NeighborhoodSpec, NetworkLocation, SeriesFlag
from src.infrastructure.geostatistics.universal_kriging import identifiable_trend, series_epochs

from .factories import edge, node, observation


def bordered_weights(sigma, F, c, f):
    n, p = F.shape
    system = np.zeros((n + p, n + p))
    system[:n, :n] = sigma
    system[:n, n:] = F
    system[n:, :n] = F.T
    return np.linalg.solve(system, np.concatenate([c, f]))[:n]


def test_single_observation_constant_basis_gets_unit_weight(kriging):
    weights = kriging.solve_weights(np.array([[2.0]]), np.array([[0.1]]), np.array([[1.0]]), np.array([0.7]),
                                    np.array([1.0]))
    assert weights == pytest.approx([1.0])


@pytest.mark.parametrize("n", [3, 7, 12])
def test_weights_match_bordered_system(kriging, rng, n):
    A = rng.normal(size=(n, n))
    sigma_u = A @ A.T + n * np.eye(n)
    sigma_alti = np.diag(rng.uniform(0.01, 0.5, size=n))
    F = np.column_stack([np.ones(n), rng.normal(size=n)])
    c = rng.normal(size=n)
    f = np.array([1.0, rng.normal()])
    weights = kriging.solve_weights(sigma_u, sigma_alti, F, c, f)
    expected = bordered_weights(sigma_u + sigma_alti, F, c, f)
    assert np.allclose(weights, expected, rtol=1e-7, atol=1e-10)


def test_rank_deficient_trend_is_reported(kriging):
    F = np.ones((3, 2))
    with pytest.raises(KrigingSystemError):
        kriging.solve_weights(np.eye(3), np.eye(3) * 0.1, F, np.ones(3), np.ones(2))


def test_prediction_reproduces_a_noise_free_observation(kriging, chain_network, day0):
    params = CovarianceParams(sigma2_river=1.0, rho_river=20.0, sigma2_basin=0.2, rho_basin=50.0, tau=10.0, nugget=0.0)
    observations = [
        observation("e1", 2.0, day0, 11.0),
        observation("e2", 5.0, day0, 9.5),
        observation("e2", 15.0, day0, 8.0),
    ]
    prediction = kriging.predict(chain_network, TrendBasis.constant(), params, observations,
                                 NetworkLocation("e2", 5.0), day0, NeighborhoodSpec())
    assert prediction.height_m == pytest.approx(9.5)
    assert prediction.weights == pytest.approx([0.0, 1.0, 0.0], abs=1e-8)
    assert prediction.variance_m2 == pytest.approx(0.0, abs=1e-8)


def test_weights_reproduce_the_trend_at_the_target(kriging, trend, long_river, params, day0):
    basis = trend.build_basis(long_river, 100.0)
    offsets = np.linspace(2.0, 298.0, 20)
    observations = [observation("e", float(x), day0 + timedelta(days=k % 4), 1.0) for k, x in enumerate(offsets)]
    target = NetworkLocation("e", 137.0)
    prediction = kriging.predict(long_river, basis, params, observations, target, day0,
                                 NeighborhoodSpec(max_river_km=400.0))
    F, f = trend.design_matrices(long_river, basis, observations, target)
    assert prediction.n_obs == len(observations)
    assert F.T @ prediction.weights == pytest.approx(f, abs=1e-8)


def test_noise_free_trend_is_recovered_exactly(kriging, trend, long_river, params, day0):
    basis = trend.build_basis(long_river, 100.0)
    beta = np.array([2.0, 3.5, 1.0, -1.0, 4.0, 0.5])
    offsets = np.linspace(0.0, 300.0, 31)
    locations = [NetworkLocation("e", float(x)) for x in offsets]
    heights = trend.basis_matrix(long_river, basis, locations) @ beta
    observations = [observation("e", float(x), day0 + timedelta(days=k), float(h))
                    for k, (x, h) in enumerate(zip(offsets, heights))]
    estimate = kriging.gls_trend(long_river, basis, observations, params.with_updates(nugget=0.01))
    assert estimate == pytest.approx(beta, abs=1e-8)


def test_identity_covariance_reduces_to_least_squares(kriging, trend, long_river, rng, day0):
    # sem correlação espacial ou temporal: Sigma_tot = nugget * I
    params = CovarianceParams(sigma2_river=0.0, sigma2_basin=0.0, nugget=1.0)
    basis = trend.build_basis(long_river, 100.0)
    offsets = rng.uniform(0.0, 300.0, size=40)
    observations = [observation("e", float(x), day0, float(rng.normal(5.0, 1.0))) for x in offsets]
    F = trend.basis_matrix(long_river, basis, [o.location for o in observations])
    z = np.array([o.height_m for o in observations])
    expected, *_ = np.linalg.lstsq(F, z, rcond=None)
    assert kriging.gls_trend(long_river, basis, observations, params) == pytest.approx(expected, abs=1e-8)


def test_no_observations_in_the_neighbourhood_is_no_data(kriging, chain_network, params, day0):
    far_in_time = [observation("e2", 3.0, day0 + timedelta(days=100), 1.0)]
    prediction = kriging.predict(chain_network, TrendBasis.constant(), params, far_in_time,
                                 NetworkLocation("e2", 3.0), day0, NeighborhoodSpec(max_lag_days=45.0))
    assert prediction.flag == SeriesFlag.NODATA
    assert prediction.height_m is None
    assert prediction.sigma_m is None


def test_neighbourhood_is_capped_by_covariance(kriging, chain_network, params, day0):
    observations = [observation("e2", float(x), day0, 1.0) for x in range(0, 20, 2)]
    target = NetworkLocation("e2", 0.0)
    prediction = kriging.predict(chain_network, TrendBasis.constant(), params, observations, target, day0,
                                 NeighborhoodSpec(max_count=3))
    assert prediction.n_obs == 3
    assert prediction.height_m == pytest.approx(1.0)


def test_series_over_empty_data_is_all_no_data(kriging, chain_network, params):
    series = kriging.interpolate_series(chain_network, TrendBasis.constant(), params, [], NetworkLocation("e1", 1.0),
                                        (date(2010, 1, 1), date(2010, 1, 31)), 5, NeighborhoodSpec(), "T")
    assert len(series.predictions) == 7
    assert series.count_flag(SeriesFlag.NODATA) == 7
    assert series.to_frame()["flag"].tolist() == ["nodata"] * 7


def test_fence_post_epoch_counts():
    assert len(series_epochs((date(2010, 1, 1), date(2010, 1, 31)), 5)) == 7
    assert len(series_epochs((date(2010, 6, 1), date(2010, 11, 30)), 5)) == 37


def test_invalid_window_is_rejected():
    with pytest.raises(ValueError):
        series_epochs((date(2010, 2, 1), date(2010, 1, 1)), 5)
    with pytest.raises(ValueError):
        series_epochs((date(2010, 1, 1), date(2010, 2, 1)), 0)


def test_dense_noise_free_sampling_tracks_a_smooth_field(kriging, long_river, day0):
    params = CovarianceParams(sigma2_river=4.0, rho_river=150.0, sigma2_basin=0.01, rho_basin=100.0, tau=60.0,
                              nugget=1e-4)

    def truth(chainage, day):
        return 0.05 * chainage + np.sin(day / 20.0)

    observations = []
    for day in range(0, 60, 3):
        for x in np.linspace(0.0, 300.0, 16):
            chainage = 300.0 - x
            observations.append(observation("e", float(x), day0 + timedelta(days=day), float(truth(chainage, day))))
    target = NetworkLocation("e", 95.0)
    epoch = day0 + timedelta(days=31)
    prediction = kriging.predict(long_river, TrendBasis.constant(), params, observations, target, epoch,
                                 NeighborhoodSpec(max_river_km=400.0))
    assert prediction.height_m == pytest.approx(truth(205.0, 31), abs=0.2)


def forked_river():
    """Rio principal de 150 + 150 km com um afluente maior de 100 km na confluência J"""
    return RiverNetwork.create(
        [
            node("S", 300.0, 0.0, "source", "B1"),
            node("T", 150.0, 100.0, "source", "B2"),
            node("J", 150.0, 0.0, "confluence", "B3"),
            node("O", 0.0, 0.0, "mouth", "B3"),
        ],
        [
            edge("m1", "S", "J", 150.0, 150.0),
            edge("t", "T", "J", 100.0, 100.0, river_id="trib", trib_class="major-tributary"),
            edge("m2", "J", "O", 150.0, 250.0),
        ],
    )


def test_sparse_tributary_does_not_blank_a_main_stem_target(kriging, trend, params, day0):
    network = forked_river()
    basis = trend.build_basis(network, 50.0)
    main_stem = [observation(edge_id, float(x), day0, 5.0)
                 for edge_id in ("m1", "m2") for x in np.linspace(1.0, 149.0, 25)]
    neighborhood = NeighborhoodSpec(max_river_km=400.0, max_basin_km=400.0)
    target = NetworkLocation("m2", 10.0)

    alone = kriging.predict(network, basis, params, main_stem, target, day0, neighborhood)
    with_tributary = kriging.predict(network, basis, params, main_stem + [observation("t", 95.0, day0, 9.0)],
                                     target, day0, neighborhood)

    assert alone.flag == SeriesFlag.OK
    assert alone.height_m == pytest.approx(5.0)
    assert with_tributary.flag == SeriesFlag.OK
    assert with_tributary.height_m == pytest.approx(5.0)
    assert with_tributary.n_obs == 50
    assert with_tributary.dropped_columns


def test_identifiable_trend_drops_rank_one_nuisance_columns():
    F = np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.5, 0.5, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.6, 0.4],
    ])
    rows, columns = identifiable_trend(F, np.array([0.5, 0.5, 0.0, 0.0]))
    assert rows.tolist() == [True, True, True, False]
    assert columns.tolist() == [True, True, False, False]


def test_target_trend_without_support_is_not_identifiable():
    F = np.array([[1.0, 0.0], [1.0, 0.0]])
    assert identifiable_trend(F, np.array([0.0, 1.0])) is None


def test_weights_match_bordered_system_over_random_instances(kriging, rng):
    for _ in range(500):
        n = int(rng.integers(1, 13))
        p = int(rng.integers(1, min(n, 3) + 1))
        A = rng.normal(size=(n, n))
        sigma_u = A @ A.T + n * np.eye(n)
        sigma_alti = np.diag(rng.uniform(0.01, 0.5, size=n))
        F = np.column_stack([np.ones(n)] + [rng.normal(size=n) for _ in range(p - 1)])
        c = rng.normal(size=n)
        f = np.concatenate([[1.0], rng.normal(size=p - 1)])
        weights = kriging.solve_weights(sigma_u, sigma_alti, F, c, f)
        expected = bordered_weights(sigma_u + sigma_alti, F, c, f)
        assert np.allclose(weights, expected, rtol=1e-7, atol=1e-9)


def random_noise_free_case(rng, day0):
    params = CovarianceParams(sigma2_river=float(rng.uniform(0.5, 2.0)), rho_river=float(rng.uniform(10.0, 60.0)),
                              sigma2_basin=float(rng.uniform(0.0, 0.3)), rho_basin=50.0,
                              tau=float(rng.uniform(5.0, 30.0)), nugget=0.0)
    n = int(rng.integers(2, 12))
    offsets = rng.choice(np.arange(0.0, 300.0, 5.0), size=n, replace=False)
    observations = [observation("e", float(x), day0 + timedelta(days=int(rng.integers(0, 30))),
                                float(rng.normal(5.0, 2.0))) for x in offsets]
    return params, observations


def test_noise_free_observations_are_reproduced_exactly(kriging, long_river, rng, day0):
    for _ in range(200):
        params, observations = random_noise_free_case(rng, day0)
        chosen = observations[int(rng.integers(0, len(observations)))]
        prediction = kriging.predict(long_river, TrendBasis.constant(), params, observations, chosen.location,
                                     chosen.epoch, NeighborhoodSpec(max_river_km=400.0))
        assert prediction.height_m == pytest.approx(chosen.height_m, rel=1e-8, abs=1e-8)


def test_removing_a_zero_weight_observation_keeps_the_prediction(kriging, long_river, rng, day0):
    for _ in range(50):
        params, observations = random_noise_free_case(rng, day0)
        chosen = observations[0]
        neighborhood = NeighborhoodSpec(max_river_km=400.0)
        full = kriging.predict(long_river, TrendBasis.constant(), params, observations, chosen.location,
                               chosen.epoch, neighborhood)
        # interpolação exata: todo o peso no ponto observado
        assert np.sort(np.abs(full.weights))[:-1] == pytest.approx(0.0, abs=1e-8)
        reduced = kriging.predict(long_river, TrendBasis.constant(), params, observations[:-1], chosen.location,
                                  chosen.epoch, neighborhood)
        assert reduced.height_m == pytest.approx(full.height_m, abs=1e-8)


def test_variance_does_not_grow_as_observations_are_added(kriging, long_river, params, rng, day0):
    for _ in range(20):
        observations = [observation("e", float(x), day0 + timedelta(days=int(rng.integers(0, 20))), 1.0)
                        for x in rng.uniform(0.0, 300.0, size=15)]
        target = NetworkLocation("e", float(rng.uniform(0.0, 300.0)))
        variances = [
            kriging.predict(long_river, TrendBasis.constant(), params, observations[:k], target, day0,
                            NeighborhoodSpec(max_river_km=400.0)).variance_m2
            for k in range(1, len(observations) + 1)
        ]
        assert all(later <= earlier + 1e-9 for earlier, later in zip(variances, variances[1:]))
