from datetime import date, timedelta

import numpy as np
import pytest

from src.application.use_cases.simulate_scenario import gauge_sites
from src.domain.exceptions import NetworkValidationError
from src.domain.value_objects.hydro_values import CovarianceParams, NetworkLocation, NodeKind, OrbitClass
from src.domain.value_objects.simulation_values import FloodEvent, MeanProfile, MissionConfig, TruthConfig
from src.infrastructure.simulation.network_layout import NetworkLayout, SiteLayout, TributaryLayout, generate_network
from src.infrastructure.simulation.synthetic_generator import SyntheticGenerator

ERA = (date(2010, 1, 1), date(2010, 1, 1) + timedelta(days=350))


@pytest.fixture
def generator(covariance):
    return SyntheticGenerator(covariance)


@pytest.fixture
def quiet_truth():
    return TruthConfig(default_profile=MeanProfile(0.0, 0.05), seasonal_amplitude_m=0.0)


def short_repeat(name="S", noise=0.0, **changes):
    return MissionConfig(name=name, orbit_class=OrbitClass.SHORT_REPEAT, repeat_days=35, noise_std_m=noise,
                         vs_locations=(NetworkLocation("e", 150.0),), **changes)


def test_short_repeat_schedule_count(generator, long_river, quiet_truth):
    observations = generator.sample_missions(long_river, quiet_truth, [short_repeat()], ERA, seed=1)
    assert len(observations) == 10
    assert observations[-1].epoch == ERA[0] + timedelta(days=315)


def test_noise_free_heights_equal_truth(generator, long_river):
    truth = TruthConfig(seasonal_amplitude_m=2.0, outlier_rate=0.0)
    observations = generator.sample_missions(long_river, truth, [short_repeat()], ERA, seed=3)
    for obs in observations:
        assert obs.height_m == pytest.approx(generator.truth_level(long_river, truth, obs.location, obs.epoch), abs=1e-12)


def test_same_seed_gives_identical_observations(generator, long_river):
    truth = TruthConfig(outlier_rate=0.05)
    missions = [
        short_repeat(noise=0.3),
        MissionConfig("L", OrbitClass.LONG_REPEAT, 35, noise_std_m=0.5, crossings_per_cycle=12),
        MissionConfig("N", OrbitClass.NON_REPEAT, None, noise_std_m=0.5, crossings_per_cycle=40),
    ]
    first = generator.sample_missions(long_river, truth, missions, ERA, seed=42)
    second = generator.sample_missions(long_river, truth, missions, ERA, seed=42)
    other = generator.sample_missions(long_river, truth, missions, ERA, seed=43)
    assert first == second
    assert first != other


def test_mission_outside_the_era_is_empty(generator, long_river, quiet_truth):
    late = short_repeat(start=date(2012, 1, 1))
    assert generator.sample_missions(long_river, quiet_truth, [late], ERA, seed=1) == []


def test_bias_is_added_to_every_height(generator, long_river, quiet_truth):
    biased = generator.sample_missions(long_river, quiet_truth, [short_repeat(bias_m=0.42)], ERA, seed=1)
    for obs in biased:
        assert obs.height_m == pytest.approx(generator.truth_level(long_river, quiet_truth, obs.location, obs.epoch) + 0.42)


def test_truth_at_the_seasonal_peak(generator, long_river):
    truth = TruthConfig(default_profile=MeanProfile(1.0, 0.05), seasonal_amplitude_m=3.0, seasonal_peak_doy=244)
    peak = date(2010, 1, 1) + timedelta(days=243)
    level = generator.truth_level(long_river, truth, NetworkLocation("e", 100.0), peak)
    assert level == pytest.approx(1.0 + 0.05 * 200.0 + 3.0)


def test_flood_pulse_peak_at_origin(generator, long_river, quiet_truth):
    origin = NetworkLocation("e", 0.0)
    event = FloodEvent(year=2010, amplitude_m=3.0, onset_doy=100, duration_days=10.0, origin=origin)
    truth = TruthConfig(default_profile=quiet_truth.default_profile, seasonal_amplitude_m=0.0, events=(event,))
    peak = date(2010, 1, 1) + timedelta(days=99 + 5)
    assert generator.truth_level(long_river, truth, origin, peak) == pytest.approx(0.05 * 300.0 + 3.0)


def test_flood_pulse_travels_downstream(generator, long_river):
    origin = NetworkLocation("e", 0.0)
    event = FloodEvent(year=2010, amplitude_m=3.0, onset_doy=100, duration_days=10.0, origin=origin,
                       celerity_km_per_day=50.0)
    truth = TruthConfig(default_profile=MeanProfile(0.0, 0.0), seasonal_amplitude_m=0.0, events=(event,))
    epochs = [date(2010, 4, 1) + timedelta(days=k) for k in range(40)]
    at_origin = generator.truth_levels(long_river, truth, origin, epochs)
    downstream = generator.truth_levels(long_river, truth, NetworkLocation("e", 100.0), epochs)
    assert int(np.argmax(downstream)) - int(np.argmax(at_origin)) == 2
    assert at_origin.max() == pytest.approx(3.0)


def test_flood_pulse_does_not_reach_upstream(generator, long_river):
    event = FloodEvent(year=2010, amplitude_m=3.0, onset_doy=100, duration_days=10.0, origin=NetworkLocation("e", 100.0))
    truth = TruthConfig(default_profile=MeanProfile(0.0, 0.0), seasonal_amplitude_m=0.0, events=(event,))
    epochs = [date(2010, 4, 1) + timedelta(days=k) for k in range(40)]
    assert np.all(generator.truth_levels(long_river, truth, NetworkLocation("e", 50.0), epochs) == 0.0)


def test_gauges_are_daily_over_the_era(generator, long_river, quiet_truth):
    sites = {"G1": NetworkLocation("e", 200.0)}
    gauges = generator.simulate_gauges(long_river, quiet_truth, sites, ERA, seed=5)
    [gauge] = gauges
    assert len(gauge.epochs) == 350
    assert gauge.epochs[0] == ERA[0]
    assert gauge.epochs[-1] == ERA[1] - timedelta(days=1)


def test_truth_table_covers_sampled_points(generator, long_river, quiet_truth):
    observations = generator.sample_missions(long_river, quiet_truth, [short_repeat()], ERA, seed=1)
    table = generator.truth_table(long_river, quiet_truth, observations)
    assert list(table.columns) == ["edge_id", "offset_km", "date", "height_m"]
    assert len(table) == len(observations)
    assert table["height_m"].tolist() == pytest.approx([o.height_m for o in observations])


def test_residual_field_is_deterministic(generator, chain_network):
    locations = [NetworkLocation("e2", float(k)) for k in range(10)]
    epochs = [date(2010, 1, 1) + timedelta(days=k) for k in range(10)]
    params = CovarianceParams()
    first = generator.simulate_residual_field(chain_network, params, locations, epochs, seed=9)
    second = generator.simulate_residual_field(chain_network, params, locations, epochs, seed=9)
    assert first.shape == (10,)
    assert np.array_equal(first, second)


def test_generated_layout_is_a_valid_network():
    layout = NetworkLayout(
        main_length_km=300.0,
        tributaries=(TributaryLayout("trib", 150.0, 100.0),),
        sites=(SiteLayout("main", 50.0, NodeKind.GAUGE_SITE, "G1"), SiteLayout("trib", 200.0, NodeKind.DAM)),
    )
    network = generate_network(layout)
    assert network.distance_to_mouth["main-source"] == pytest.approx(300.0)
    assert network.distance_to_mouth["trib-source"] == pytest.approx(250.0)
    assert gauge_sites(network) == {"G1": network.location_of_node("G1")}
    assert not network.has_dam_free_outlet("trib-01")
    assert network.has_dam_free_outlet("trib-00")


def test_site_on_unknown_river_is_rejected():
    layout = NetworkLayout(main_length_km=100.0, sites=(SiteLayout("nowhere", 10.0),))
    with pytest.raises(NetworkValidationError):
        generate_network(layout)
