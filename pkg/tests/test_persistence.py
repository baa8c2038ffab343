import json
import math
from datetime import date

import numpy as np
import pytest

from src.domain.entities.observation import GaugeSeries, PredictionTarget
from src.domain.exceptions import ConfigurationError, NetworkValidationError, ObservationFormatError
from src.domain.value_objects.hydro_values import CovarianceParams, NetworkLocation, OrbitClass
from src.infrastructure.persistence.csv_repository import OBSERVATION_COLUMNS, CsvRiverDataRepository
from src.infrastructure.persistence.json_documents import JsonDocumentRepository

from .factories import observation

HEADER = ",".join(OBSERVATION_COLUMNS)


@pytest.fixture
def repository():
    return CsvRiverDataRepository()


@pytest.fixture
def documents():
    return JsonDocumentRepository()


def write(path, *lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_header_only_file_is_an_empty_set(repository, tmp_path):
    result = repository.load_observations(write(tmp_path / "obs.csv", HEADER))
    assert result.observations == []
    assert result.rejected_count == 0


def test_bad_rows_are_rejected_with_their_line(repository, chain_network, tmp_path):
    path = write(
        tmp_path / "obs.csv",
        HEADER,
        "A,short-repeat,T1,e2,5.0,2010-01-01,10.5,0.2,1.0",
        "A,short-repeat,T1,e2,5.0,2010-01-11,nan,0.2,1.0",
        "A,short-repeat,T1,e9,5.0,2010-01-21,10.1,,",
        "A,sideways,T1,e2,5.0,2010-01-31,10.1,,",
        "A,short-repeat,T1,e2,5.0,2010-02-30,10.1,,",
    )
    result = repository.load_observations(path, chain_network)
    assert len(result.observations) == 1
    assert [r.line for r in result.rejections] == [3, 4, 5, 6]


def test_era_bounds_reject_dates(tmp_path):
    repository = CsvRiverDataRepository(era=(date(2010, 1, 1), date(2010, 12, 31)))
    path = write(tmp_path / "obs.csv", HEADER, "A,short-repeat,T1,e2,5.0,2011-01-01,10.5,,")
    [rejection] = repository.load_observations(path).rejections
    assert rejection.line == 2
    assert "2011-01-01" in rejection.reason


def test_unknown_column_is_a_format_error(repository, tmp_path):
    path = write(tmp_path / "obs.csv", HEADER + ",colour", "A,short-repeat,T1,e2,5.0,2010-01-01,10.5,,,red")
    with pytest.raises(ObservationFormatError):
        repository.load_observations(path)


def test_missing_file_is_a_format_error(repository, tmp_path):
    with pytest.raises(ObservationFormatError):
        repository.load_observations(tmp_path / "absent.csv")


def test_observations_survive_a_save_and_load(repository, chain_network, tmp_path, day0):
    observations = [
        observation("e2", 5.123456789, day0, 10.987654321, std=0.25),
        observation("e1", 1.0, day0, 11.0, mission="B", orbit=OrbitClass.NON_REPEAT, track="P3", std=None,
                    quality=2.0),
    ]
    path = tmp_path / "obs.csv"
    repository.save_observations(observations, path)
    loaded = repository.load_observations(path, chain_network)
    assert loaded.rejected_count == 0
    assert loaded.observations == observations


def test_network_survives_a_save_and_load(repository, y_network, tmp_path):
    repository.save_network(y_network, tmp_path / "net")
    loaded = repository.load_network(tmp_path / "net")
    assert loaded.distance_to_mouth == pytest.approx(y_network.distance_to_mouth)
    assert loaded.connectivity[0] == y_network.connectivity[0]
    assert np.array_equal(loaded.connectivity[1], y_network.connectivity[1])


def test_broken_network_files_are_a_network_error(repository, tmp_path):
    directory = tmp_path / "net"
    directory.mkdir()
    write(directory / "nodes.csv", "node_id,x_km,y_km,kind,sub_basin_id", "S,0,0,source,B1")
    with pytest.raises(NetworkValidationError):
        repository.load_network(directory)


def test_gauges_are_grouped_and_sorted(repository, tmp_path):
    path = write(
        tmp_path / "gauges.csv",
        "gauge_id,edge_id,offset_km,date,height_m",
        "G1,e2,0.0,2010-01-02,5.5",
        "G1,e2,0.0,2010-01-01,5.0",
        "G2,e1,3.0,2010-01-01,7.0",
        "G2,e1,3.0,not-a-date,7.0",
    )
    gauges = repository.load_gauges(path)
    assert sorted(gauges) == ["G1", "G2"]
    assert gauges["G1"].epochs == (date(2010, 1, 1), date(2010, 1, 2))
    assert gauges["G1"].heights_m == (5.0, 5.5)
    assert gauges["G2"].location == NetworkLocation("e1", 3.0)


def test_gauge_with_two_locations_is_rejected(repository, tmp_path):
    path = write(
        tmp_path / "gauges.csv",
        "gauge_id,edge_id,offset_km,date,height_m",
        "G1,e2,0.0,2010-01-01,5.0",
        "G1,e1,0.0,2010-01-02,5.0",
    )
    with pytest.raises(ObservationFormatError):
        repository.load_gauges(path)


def test_gauges_survive_a_save_and_load(repository, tmp_path):
    gauge = GaugeSeries("G1", NetworkLocation("e2", 0.0), (date(2010, 1, 1), date(2010, 1, 2)), (1.25, 1.5))
    repository.save_gauges([gauge], tmp_path / "gauges.csv")
    assert repository.load_gauges(tmp_path / "gauges.csv") == {"G1": gauge}


def test_duplicate_target_is_rejected(repository, tmp_path):
    path = write(tmp_path / "targets.csv", "target_id,edge_id,offset_km", "T1,e2,1.0", "T1,e2,2.0")
    with pytest.raises(ObservationFormatError):
        repository.load_targets(path)


def test_targets_survive_a_save_and_load(repository, tmp_path):
    targets = [PredictionTarget("T1", NetworkLocation("e2", 1.5)), PredictionTarget("T2", NetworkLocation("e1", 0.0))]
    repository.save_targets(targets, tmp_path / "targets.csv")
    assert repository.load_targets(tmp_path / "targets.csv") == targets


def test_series_directory_reads_no_data_as_nan(repository, tmp_path):
    directory = tmp_path / "uk"
    directory.mkdir()
    write(
        directory / "G1.csv",
        "date,height_m,sigma_m,n_obs,flag",
        "2010-01-01,10.0000,0.3000,4,ok",
        "2010-01-06,,,0,nodata",
        "2010-01-11,10.5000,0.3500,3,ok",
    )
    series = repository.load_series_directory(directory)["G1"]
    assert series.iloc[0] == 10.0
    assert math.isnan(series.iloc[1])
    assert series.index[2].date() == date(2010, 1, 11)


def test_missing_series_directory_is_a_format_error(repository, tmp_path):
    with pytest.raises(ObservationFormatError):
        repository.load_series_directory(tmp_path / "absent")


def test_params_survive_a_save_and_load(documents, tmp_path):
    params = CovarianceParams(sigma2_river=1.5, rho_river=120.0, sigma2_basin=0.4, rho_basin=250.0, tau=25.0,
                              nugget=0.1)
    documents.save_params(params, tmp_path / "params.json")
    assert documents.load_params(tmp_path / "params.json") == params


def _params_document(**changes):
    document = {"sigma2_river": 1.0, "rho_river": 150.0, "sigma2_basin": 0.25, "rho_basin": 200.0, "tau": 30.0,
                "nugget": 0.09}
    document.update(changes)
    return document


def test_unknown_params_key_is_named(documents, tmp_path):
    path = tmp_path / "params.json"
    path.write_text(json.dumps(_params_document(sill=2.0)), encoding="utf-8")
    with pytest.raises(ConfigurationError) as error:
        documents.load_params(path)
    assert error.value.key == "sill"
    assert "chave desconhecida" in str(error.value)


def test_missing_params_key_is_named(documents, tmp_path):
    document = _params_document()
    del document["tau"]
    path = tmp_path / "params.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    with pytest.raises(ConfigurationError) as error:
        documents.load_params(path)
    assert error.value.key == "tau"


def test_negative_variance_is_invalid(documents, tmp_path):
    path = tmp_path / "params.json"
    path.write_text(json.dumps(_params_document(nugget=-1.0)), encoding="utf-8")
    with pytest.raises(ConfigurationError) as error:
        documents.load_params(path)
    assert error.value.key == "nugget"
