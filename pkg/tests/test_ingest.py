from datetime import date, timedelta

import numpy as np
import pytest

from src.domain.value_objects.hydro_values import OrbitClass
from src.infrastructure.ingest.altimetry_screening import AltimetryScreeningService
from src.infrastructure.ingest.mission_alignment import MissionAlignmentService

from .factories import observation

LONG = OrbitClass.LONG_REPEAT


@pytest.fixture
def screening():
    return AltimetryScreeningService(threshold_m=3.0, vicinity_km=20.0, vicinity_days=10.0)


@pytest.fixture
def alignment():
    return MissionAlignmentService(cell_km=10.0, cell_doy=10)


def test_equal_stds_keep_everything(screening, day0):
    observations = [observation("e2", float(k), day0, 1.0, std=0.3) for k in range(6)]
    assert screening.screen_along_track(observations, 3.0) == observations


def test_large_along_track_std_is_removed(screening, day0):
    observations = [observation("e2", float(k), day0, 1.0, std=0.3) for k in range(5)]
    noisy = observation("e2", 9.0, day0, 1.0, std=3.0)
    kept = screening.screen_along_track(observations + [noisy], 3.0)
    assert kept == observations


def test_along_track_median_is_per_mission(screening, day0):
    precise = [observation("e2", float(k), day0, 1.0, std=0.1, mission="A") for k in range(5)]
    coarse = [observation("e2", float(k), day0, 1.0, std=1.0, mission="B") for k in range(5)]
    assert len(screening.screen_along_track(precise + coarse, 3.0)) == 10


def test_along_track_screening_is_idempotent(screening, day0):
    stds = [0.3, 0.3, 0.3, 0.3, 1.0, 2.0, 9.0]
    observations = [observation("e2", float(k), day0, 1.0, std=s) for k, s in enumerate(stds)]
    once = screening.screen_along_track(observations, 3.0)
    assert screening.screen_along_track(once, 3.0) == once


def test_isolated_observation_is_kept(screening, chain_network, day0):
    lonely = [observation("e2", 5.0, day0, 100.0, orbit=LONG)]
    assert screening.screen_annual_repeat(chain_network, lonely) == lonely


def test_spike_in_a_track_triplet_is_removed(screening, chain_network, day0):
    passes = [
        observation("e2", 5.0, day0 + timedelta(days=35 * k), height, orbit=LONG, mission="E", track="T7")
        for k, height in enumerate([10.0, 20.0, 10.0])
    ]
    kept = screening.screen_annual_repeat(chain_network, passes)
    assert kept == [passes[0], passes[2]]


def test_spike_is_compared_with_connected_neighbours(screening, chain_network, day0):
    spike = observation("e2", 5.0, day0, 15.0, orbit=LONG, mission="E", track="T1")
    neighbours = [
        observation("e2", 8.0, day0 + timedelta(days=2), 10.0, mission="S", track="VS1"),
        observation("e1", 5.0, day0 - timedelta(days=3), 10.2, mission="S", track="VS2"),
    ]
    kept = screening.screen_annual_repeat(chain_network, [spike] + neighbours)
    assert kept == neighbours


def test_short_repeat_data_is_never_screened(screening, chain_network, day0):
    passes = [observation("e2", 5.0, day0 + timedelta(days=k), h) for k, h in enumerate([10.0, 20.0, 10.0])]
    assert screening.screen_annual_repeat(chain_network, passes) == passes


def test_annual_repeat_screening_is_idempotent(screening, chain_network, day0, rng):
    observations = [
        observation("e2", float(rng.uniform(0, 20)), day0 + timedelta(days=int(rng.integers(0, 60))),
                    float(10 + rng.normal(0, 0.3) + (8.0 if k % 9 == 0 else 0.0)), orbit=LONG, track=f"T{k % 4}")
        for k in range(60)
    ]
    once = screening.screen_annual_repeat(chain_network, observations)
    assert screening.screen_annual_repeat(chain_network, once) == once


def test_invalid_thresholds_are_rejected():
    with pytest.raises(ValueError):
        AltimetryScreeningService(threshold_m=0.0)


def _repeat_series(mission, start, bias=0.0, edge_id="e2"):
    return [
        observation(edge_id, 5.0, start + timedelta(days=10 * k), 10.0 + 0.01 * k + bias, mission=mission)
        for k in range(30)
    ]


def test_identical_mission_has_zero_offset(alignment):
    reference = _repeat_series("A", date(2010, 1, 1))
    twin = _repeat_series("B", date(2010, 1, 1))
    offsets = alignment.estimate_mission_offsets(reference + twin, "A")
    assert offsets == {"A": 0.0, "B": 0.0}


def test_injected_bias_is_recovered(alignment):
    reference = _repeat_series("A", date(2010, 1, 1))
    biased = _repeat_series("B", date(2010, 1, 1), bias=0.42)
    offsets = alignment.estimate_mission_offsets(reference + biased, "A")
    assert offsets["B"] == pytest.approx(0.42, abs=0.01)
    aligned = alignment.apply_offsets(reference + biased, offsets)
    assert [o.height_m for o in aligned[30:]] == pytest.approx([o.height_m for o in reference])


def test_disjoint_years_share_day_of_year_cells(alignment):
    reference = _repeat_series("A", date(2010, 1, 1))
    others = _repeat_series("B", date(2011, 1, 1), bias=1.0) + _repeat_series("C", date(2012, 1, 1), bias=-0.5)
    offsets = alignment.estimate_mission_offsets(reference + others, "A")
    assert all(value is not None for value in offsets.values())


def test_mission_without_co_location_is_excluded(alignment):
    reference = _repeat_series("A", date(2010, 1, 1))
    elsewhere = _repeat_series("B", date(2010, 1, 1), edge_id="e1")
    offsets = alignment.estimate_mission_offsets(reference + elsewhere, "A")
    assert offsets["B"] is None
    assert alignment.apply_offsets(reference + elsewhere, offsets) == reference


def test_unknown_reference_mission_is_rejected(alignment):
    with pytest.raises(ValueError):
        alignment.estimate_mission_offsets(_repeat_series("A", date(2010, 1, 1)), "Z")


def test_along_track_screening_repeats_until_the_median_bound_holds(screening, day0):
    stds = [1.0, 1.0, 1.0, 1.0, 5.0, 5.0, 5.0, 100.0, 100.0]
    observations = [observation("e2", float(k), day0, 1.0, std=s) for k, s in enumerate(stds)]
    kept = screening.screen_along_track(observations, 3.0)
    # a primeira passada só remove os 100 m; a mediana cai para 1 e os 5 m saem na seguinte
    assert kept == observations[:4]


def test_along_track_contamination_is_removed(screening, rng, day0):
    n = 2000
    contaminated = rng.random(n) < 0.05
    stds = 0.3 * np.exp(rng.normal(0.0, 0.2, size=n))
    stds[contaminated] *= 20.0
    observations = [observation("e2", float(k % 20), day0, 1.0, std=float(s)) for k, s in enumerate(stds)]

    kept = set(map(id, screening.screen_along_track(observations, 3.0)))
    removed = np.array([id(obs) not in kept for obs in observations])

    assert removed[contaminated].mean() >= 0.95
    assert removed[~contaminated].mean() <= 0.01


def test_annual_repeat_spikes_are_removed(screening, chain_network, rng, day0):
    observations = []
    for track, offset in enumerate((3.0, 8.0, 13.0, 18.0)):
        for k in range(32):
            day = 35 * k + 2 * track
            height = 10.0 + 2.0 * np.sin(2 * np.pi * day / 365.0) + rng.normal(0.0, 0.2)
            observations.append(observation("e2", offset, day0 + timedelta(days=day), float(height),
                                            orbit=LONG, mission="E", track=f"T{track}"))
    spikes = set(rng.choice(len(observations), size=8, replace=False).tolist())
    observations = [obs.with_height(obs.height_m + 5.0) if i in spikes else obs
                    for i, obs in enumerate(observations)]

    kept = set(map(id, screening.screen_annual_repeat(chain_network, observations)))
    removed = np.array([id(obs) not in kept for obs in observations])
    is_spike = np.array([i in spikes for i in range(len(observations))])

    assert removed[is_spike].mean() >= 0.9
    assert removed[~is_spike].mean() <= 0.02


def test_day_of_year_cells_wrap_around_new_year(alignment):
    december = [observation("e2", 5.0, date(2010, 12, 24) + timedelta(days=k), 10.0, mission="A")
                for k in range(5)]
    january = [observation("e2", 5.0, date(2011, 1, 2) + timedelta(days=k), 10.5, mission="B")
               for k in range(3)]
    offsets = alignment.estimate_mission_offsets(december + january, "A")
    assert offsets["B"] == pytest.approx(0.5)


def test_offsets_are_a_fixed_point_after_alignment(alignment):
    reference = _repeat_series("A", date(2010, 1, 1))
    biased = _repeat_series("B", date(2010, 1, 4), bias=0.37)
    aligned = alignment.apply_offsets(reference + biased, alignment.estimate_mission_offsets(reference + biased, "A"))
    again = alignment.estimate_mission_offsets(aligned, "A")
    assert abs(again["B"]) <= 1e-9


def test_non_repeat_data_is_never_screened(screening, chain_network, day0):
    passes = [observation("e2", 5.0, day0 + timedelta(days=k), h, orbit=OrbitClass.NON_REPEAT, track=f"N{k}")
              for k, h in enumerate([10.0, 20.0, 10.0])]
    assert screening.screen_annual_repeat(chain_network, passes) == passes
