"""
Repositório de arquivos CSV (rede, observações, réguas, alvos, séries e
relatórios) usando pandas
"""

import logging
import math
from datetime import date
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from ...application.interfaces.repositories import IRiverDataRepository
from ...domain.entities.flood_report import FloodReport
from ...domain.entities.network import RiverNetwork
from ...domain.entities.observation import (
    GaugeSeries,
    Observation,
    ObservationLoadResult,
    PredictionTarget,
    RowRejection,
)
from ...domain.entities.prediction import SERIES_COLUMNS, PredictedSeries
from ...domain.exceptions import NetworkValidationError, ObservationFormatError
from ...domain.value_objects.hydro_values import NetworkLocation, OrbitClass, SeriesFlag
from .json_documents import write_json

logger = logging.getLogger(__name__)

NODE_COLUMNS = ["node_id", "x_km", "y_km", "kind", "sub_basin_id"]
EDGE_COLUMNS = ["edge_id", "up_node", "down_node", "length_km", "river_id", "trib_class", "catchment_weight"]
OBSERVATION_COLUMNS = [
    "mission", "orbit_class", "track_id", "edge_id", "offset_km", "date", "height_m",
    "along_track_std_m", "quality_factor",
]
GAUGE_COLUMNS = ["gauge_id", "edge_id", "offset_km", "date", "height_m"]
TARGET_COLUMNS = ["target_id", "edge_id", "offset_km"]
TRUTH_COLUMNS = ["edge_id", "offset_km", "date", "height_m"]
REPORT_COLUMNS = ["location", "year", "source", "index_m", "class"]
METRICS_COLUMNS = ["location", "source", "rmse_m", "r2", "nse", "n_common"]

SERIES_FLOAT_FORMAT = "%.4f"


def _read_table(path: Path, required: Sequence[str], optional: Sequence[str] = ()) -> pd.DataFrame:
    """
    Lê um CSV como texto e confere o cabeçalho

    Raises:
        ObservationFormatError: arquivo ilegível, cabeçalho sem colunas
            obrigatórias ou com colunas desconhecidas
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except FileNotFoundError:
        raise ObservationFormatError(f"Arquivo não encontrado: {path}")
    except pd.errors.EmptyDataError:
        raise ObservationFormatError(f"Arquivo vazio (sem cabeçalho): {path}")
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise ObservationFormatError(f"Arquivo ilegível {path}: {e}")

    columns = [c.strip() for c in frame.columns]
    frame.columns = columns
    missing = [c for c in required if c not in columns]
    unknown = [c for c in columns if c not in required and c not in optional]
    if missing or unknown:
        raise ObservationFormatError(
            f"Cabeçalho inválido em {path}: faltando {missing}, desconhecidas {unknown}"
        )
    return frame


def _parse_float(text: str, name: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"{name} não numérico: {text!r}")
    if not math.isfinite(value):
        raise ValueError(f"{name} não finito: {text!r}")
    return value


def _parse_date(text: str) -> date:
    try:
        return date.fromisoformat(text.strip())
    except ValueError:
        raise ValueError(f"data inválida: {text!r}")


def _optional(text: str) -> Optional[str]:
    text = text.strip()
    return text or None


def _line_of(index: int) -> int:
    """Número da linha no arquivo (cabeçalho na linha 1)"""
    return int(index) + 2


class CsvRiverDataRepository(IRiverDataRepository):
    """
    Repositório CSV.

    Linhas inválidas nunca abortam a leitura: são coletadas como
    RowRejection com o número da linha.
    """

    def __init__(self, era: Optional[Tuple[date, date]] = None):
        """
        Args:
            era: intervalo [início, fim] aceito para datas de observação
        """
        self.era = era

    # Rede

    def load_network(self, directory: Path) -> RiverNetwork:
        directory = Path(directory)
        try:
            nodes = _read_table(directory / "nodes.csv", NODE_COLUMNS)
            edges = _read_table(directory / "edges.csv", EDGE_COLUMNS)
        except ObservationFormatError as e:
            raise NetworkValidationError(str(e))
        try:
            return RiverNetwork.create(nodes.to_dict("records"), edges.to_dict("records"))
        except NetworkValidationError:
            raise
        except (KeyError, ValueError) as e:
            raise NetworkValidationError(f"Rede inválida em {directory}: {e}")

    def save_network(self, network: RiverNetwork, directory: Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        node_rows, edge_rows = network.to_records()
        self._write(pd.DataFrame(node_rows, columns=NODE_COLUMNS), directory / "nodes.csv")
        self._write(pd.DataFrame(edge_rows, columns=EDGE_COLUMNS), directory / "edges.csv")
        logger.info(f"Rede gravada em {directory}")

    # Observações

    def load_observations(self, path: Path, network: Optional[RiverNetwork] = None) -> ObservationLoadResult:
        """
        Lê observations.csv

        Args:
            path: arquivo
            network: rede para validar as localizações (opcional)

        Returns:
            Observações válidas e rejeições numeradas por linha

        Raises:
            ObservationFormatError: cabeçalho malformado ou arquivo ilegível
        """
        frame = _read_table(path, OBSERVATION_COLUMNS[:7], OBSERVATION_COLUMNS[7:])
        result = ObservationLoadResult()
        for index, row in frame.iterrows():
            try:
                result.observations.append(self._row_to_observation(row, network))
            except ValueError as e:
                result.rejections.append(RowRejection(_line_of(index), str(e)))

        for rejection in result.rejections[:20]:
            logger.warning(f"{path}:{rejection.line}: linha rejeitada ({rejection.reason})")
        if result.rejected_count > 20:
            logger.warning(f"{path}: mais {result.rejected_count - 20} linhas rejeitadas")
        logger.info(f"Observações lidas de {path}: {len(result.observations)} válidas, {result.rejected_count} rejeitadas")
        return result

    def _row_to_observation(self, row: pd.Series, network: Optional[RiverNetwork]) -> Observation:
        location = NetworkLocation(row["edge_id"].strip(), _parse_float(row["offset_km"], "offset_km"))
        if network is not None and not network.is_valid_location(location):
            raise ValueError(f"localização fora da rede: {location.edge_id}@{location.offset_km}")
        epoch = _parse_date(row["date"])
        if self.era is not None and not self.era[0] <= epoch <= self.era[1]:
            raise ValueError(f"data fora da era: {epoch}")
        std_text = _optional(row.get("along_track_std_m", ""))
        quality_text = _optional(row.get("quality_factor", ""))
        return Observation(
            location=location,
            epoch=epoch,
            height_m=_parse_float(row["height_m"], "height_m"),
            mission=row["mission"].strip(),
            orbit_class=OrbitClass.from_text(row["orbit_class"]),
            track_id=row["track_id"].strip(),
            along_track_std_m=_parse_float(std_text, "along_track_std_m") if std_text else None,
            quality_factor=_parse_float(quality_text, "quality_factor") if quality_text else 1.0,
        )

    def save_observations(self, observations: Sequence[Observation], path: Path) -> None:
        rows = [
            {
                "mission": o.mission,
                "orbit_class": o.orbit_class.value,
                "track_id": o.track_id,
                "edge_id": o.location.edge_id,
                "offset_km": o.location.offset_km,
                "date": o.epoch.isoformat(),
                "height_m": o.height_m,
                "along_track_std_m": o.along_track_std_m,
                "quality_factor": o.quality_factor,
            }
            for o in sorted(
                observations,
                key=lambda o: (o.mission, o.epoch, o.location.edge_id, o.location.offset_km, o.track_id),
            )
        ]
        self._write(pd.DataFrame(rows, columns=OBSERVATION_COLUMNS), path)
        logger.info(f"{len(rows)} observações gravadas em {path}")

    # Réguas e alvos

    def load_gauges(self, path: Path) -> Dict[str, GaugeSeries]:
        """Séries de régua por gauge_id; linhas inválidas são descartadas com aviso"""
        frame = _read_table(path, GAUGE_COLUMNS)
        rows: Dict[str, List[Tuple[date, float, NetworkLocation]]] = {}
        rejected = 0
        for index, row in frame.iterrows():
            try:
                location = NetworkLocation(row["edge_id"].strip(), _parse_float(row["offset_km"], "offset_km"))
                rows.setdefault(row["gauge_id"].strip(), []).append(
                    (_parse_date(row["date"]), _parse_float(row["height_m"], "height_m"), location)
                )
            except ValueError as e:
                rejected += 1
                logger.warning(f"{path}:{_line_of(index)}: linha rejeitada ({e})")

        gauges: Dict[str, GaugeSeries] = {}
        for gauge_id, items in sorted(rows.items()):
            items.sort(key=lambda item: item[0])
            locations = {item[2] for item in items}
            if len(locations) > 1:
                raise ObservationFormatError(f"Régua {gauge_id} com mais de uma localização em {path}")
            try:
                gauges[gauge_id] = GaugeSeries(
                    gauge_id=gauge_id,
                    location=items[0][2],
                    epochs=tuple(item[0] for item in items),
                    heights_m=tuple(item[1] for item in items),
                )
            except ValueError as e:
                raise ObservationFormatError(f"{path}: {e}")
        logger.info(f"Réguas lidas de {path}: {len(gauges)} ({rejected} linhas rejeitadas)")
        return gauges

    def save_gauges(self, gauges: Sequence[GaugeSeries], path: Path) -> None:
        rows = [
            {
                "gauge_id": g.gauge_id,
                "edge_id": g.location.edge_id,
                "offset_km": g.location.offset_km,
                "date": epoch.isoformat(),
                "height_m": height,
            }
            for g in sorted(gauges, key=lambda g: g.gauge_id)
            for epoch, height in zip(g.epochs, g.heights_m)
        ]
        self._write(pd.DataFrame(rows, columns=GAUGE_COLUMNS), path)
        logger.info(f"Réguas gravadas em {path}")

    def load_targets(self, path: Path) -> List[PredictionTarget]:
        frame = _read_table(path, TARGET_COLUMNS)
        targets = []
        seen = set()
        for index, row in frame.iterrows():
            target_id = row["target_id"].strip()
            if not target_id or target_id in seen:
                raise ObservationFormatError(f"{path}:{_line_of(index)}: target_id vazio ou duplicado")
            seen.add(target_id)
            try:
                location = NetworkLocation(row["edge_id"].strip(), _parse_float(row["offset_km"], "offset_km"))
            except ValueError as e:
                raise ObservationFormatError(f"{path}:{_line_of(index)}: {e}")
            targets.append(PredictionTarget(target_id, location))
        return targets

    def save_targets(self, targets: Sequence[PredictionTarget], path: Path) -> None:
        rows = [
            {"target_id": t.target_id, "edge_id": t.location.edge_id, "offset_km": t.location.offset_km}
            for t in sorted(targets, key=lambda t: t.target_id)
        ]
        self._write(pd.DataFrame(rows, columns=TARGET_COLUMNS), path)

    def save_truth(self, truth: pd.DataFrame, path: Path) -> None:
        self._write(truth[TRUTH_COLUMNS], path)
        logger.info(f"Verdade gravada em {path} ({len(truth)} linhas)")

    # Séries e relatórios

    def save_series(self, series: PredictedSeries, directory: Path) -> Path:
        path = Path(directory) / f"{series.target_id}.csv"
        self._write(series.to_frame(), path, float_format=SERIES_FLOAT_FORMAT)
        return path

    def load_series_directory(self, directory: Path) -> Dict[str, pd.Series]:
        """
        Lê todas as séries `<alvo>.csv` de um diretório

        Raises:
            ObservationFormatError: diretório ausente ou série com cabeçalho inválido
        """
        directory = Path(directory)
        if not directory.is_dir():
            raise ObservationFormatError(f"Diretório de séries não encontrado: {directory}")
        result: Dict[str, pd.Series] = {}
        for path in sorted(directory.glob("*.csv")):
            frame = _read_table(path, SERIES_COLUMNS)
            values = [
                float("nan") if row["flag"].strip() == SeriesFlag.NODATA.value or not row["height_m"].strip()
                else _parse_float(row["height_m"], "height_m")
                for _, row in frame.iterrows()
            ]
            index = pd.DatetimeIndex(pd.to_datetime(frame["date"], format="%Y-%m-%d"), name="date")
            result[path.stem] = pd.Series(values, index=index, dtype=float, name=path.stem)
        logger.info(f"{len(result)} séries lidas de {directory}")
        return result

    def save_report(self, report: FloodReport, directory: Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        cells = sorted(report.cells, key=lambda c: (c.location, c.year, c.source))
        frame = pd.DataFrame(
            [
                {
                    "location": c.location,
                    "year": c.year,
                    "source": c.source,
                    "index_m": c.index_m,
                    "class": c.event_class.value if c.event_class else "",
                }
                for c in cells
            ],
            columns=REPORT_COLUMNS,
        )
        self._write(frame, directory / "report.csv", float_format=SERIES_FLOAT_FORMAT)
        metrics = pd.DataFrame(
            [
                {"location": m.location, "source": m.source, "rmse_m": m.rmse_m, "r2": m.r2, "nse": m.nse,
                 "n_common": m.n_common}
                for m in sorted(report.metrics, key=lambda m: (m.location, m.source))
            ],
            columns=METRICS_COLUMNS,
        )
        self._write(metrics, directory / "metrics.csv", float_format=SERIES_FLOAT_FORMAT)
        write_json(report.summary(), directory / "summary.json")
        logger.info(f"Relatório gravado em {directory}")

    @staticmethod
    def _write(frame: pd.DataFrame, path: Path, float_format: Optional[str] = None) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=float_format, lineterminator="\n")

