"""
Índice de cheia por (local, ano), classificação de eventos, PoD/FAR e
relatório por fonte
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ...application.interfaces.services import IFloodAnalysisService
from ...domain.entities.flood_report import EVENT_KINDS, Contingency, FloodCell, FloodReport, SeriesMetrics
from ...domain.entities.observation import GaugeSeries
from ...domain.exceptions import InsufficientDataError
from ...domain.value_objects.hydro_values import EventClass
from .skill_metrics import common_epochs, r_squared, series_skill

logger = logging.getLogger(__name__)

GAUGE_SOURCE = "gauge"
MIN_CLIMATOLOGY_YEARS = 2
_LEAP_DAY = "02-29"


def month_day(index: pd.DatetimeIndex) -> pd.Index:
    return pd.Index(index.strftime("%m-%d"))


def in_window(days: pd.Index, window: Tuple[str, str]) -> np.ndarray:
    """Máscara dos dias 'MM-DD' dentro da janela (que pode virar o ano)"""
    start, end = window
    values = np.asarray(days, dtype=str)
    if start <= end:
        mask = (values >= start) & (values <= end)
    else:
        mask = (values >= start) | (values <= end)
    return mask & (values != _LEAP_DAY)


class FloodAnalysisService(IFloodAnalysisService):
    """
    Índices de cheia com a climatologia da régua (ou da própria série, no
    modo sem régua) e contingência por tipo de evento.
    """

    def __init__(self, season: Tuple[str, str] = ("06-01", "11-30"), flood_threshold: float = 0.5,
                 drought_threshold: float = -0.5, align_datum: bool = True, altimetry_climatology: bool = False):
        if drought_threshold > flood_threshold:
            raise ValueError("Limiar de seca acima do limiar de cheia")
        self.season = season
        self.flood_threshold = flood_threshold
        self.drought_threshold = drought_threshold
        self.align_datum = align_datum
        self.altimetry_climatology = altimetry_climatology

    def climatology(self, gauge: pd.Series, window: Tuple[str, str]) -> pd.Series:
        """
        Média de longo prazo por dia do ano dentro da janela

        Args:
            gauge: série com DatetimeIndex
            window: ('MM-DD', 'MM-DD')

        Returns:
            Série indexada por 'MM-DD'

        Raises:
            InsufficientDataError: menos de 2 anos com dados na janela
        """
        data = gauge.dropna()
        days = month_day(pd.DatetimeIndex(data.index))
        mask = in_window(days, window)
        data, days = data[mask], days[mask]
        years = pd.DatetimeIndex(data.index).year
        if len(set(years)) < MIN_CLIMATOLOGY_YEARS:
            raise InsufficientDataError(
                f"Climatologia exige {MIN_CLIMATOLOGY_YEARS} anos na janela {window[0]}..{window[1]}; "
                f"encontrados {len(set(years))}"
            )
        frame = pd.DataFrame({"day": days, "year": years, "value": data.to_numpy(dtype=float)})
        grouped = frame.groupby("day")
        n_years = grouped["year"].nunique()
        climatology = grouped["value"].mean()[n_years >= MIN_CLIMATOLOGY_YEARS]
        if len(climatology) < len(n_years):
            logger.warning(f"{len(n_years) - len(climatology)} dias da janela com menos de 2 anos descartados")
        if climatology.empty:
            raise InsufficientDataError("Nenhum dia da janela com 2 anos de dados")
        climatology.index.name = "day"
        return climatology

    def flood_index(self, series: pd.Series, climatology: pd.Series, year: int) -> float:
        """
        Média de (série - climatologia) nas épocas com dados do ano

        Raises:
            InsufficientDataError: nenhuma época utilizável (N = 0)
        """
        data = series.dropna()
        index = pd.DatetimeIndex(data.index)
        data = data[index.year == year]
        days = month_day(pd.DatetimeIndex(data.index))
        usable = np.asarray(days.isin(climatology.index))
        if not usable.any():
            raise InsufficientDataError(f"Índice de cheia sem épocas em {year}")
        deviations = data.to_numpy(dtype=float)[usable] - climatology.loc[days[usable]].to_numpy(dtype=float)
        return float(np.mean(deviations))

    def classify_events(self, indices: Sequence[float], flood_threshold: float = 0.5,
                        drought_threshold: float = -0.5) -> List[EventClass]:
        """Cheia se f > limiar de cheia; seca se f < limiar de seca (comparações estritas)"""
        classes = []
        for value in indices:
            if value > flood_threshold:
                classes.append(EventClass.FLOOD)
            elif value < drought_threshold:
                classes.append(EventClass.DROUGHT)
            else:
                classes.append(EventClass.NORMAL)
        return classes

    def pod_far(self, predicted: Sequence[EventClass], truth: Sequence[EventClass]) -> Dict[EventClass, Contingency]:
        """Contingência por tipo de evento entre células alinhadas"""
        if len(predicted) != len(truth):
            raise ValueError("Eventos previstos e observados desalinhados")
        tables = {kind: Contingency() for kind in EVENT_KINDS}
        for p, t in zip(predicted, truth):
            for kind, table in tables.items():
                table.add(p == kind, t == kind)
        return tables

    def series_metrics(self, altimetry: pd.Series, gauge: pd.Series) -> Tuple[float, Optional[float], Optional[float]]:
        rmse_m, r2, nse_value, _ = series_skill(altimetry, gauge)
        return rmse_m, r2, nse_value

    # Relatório

    def datum_shift(self, series: pd.Series, gauge: pd.Series) -> Optional[float]:
        """Mediana de (régua - série) nas épocas comuns; None sem sobreposição"""
        sim, obs = common_epochs(series, gauge)
        if len(sim) == 0:
            return None
        return float(np.median(obs - sim))

    def _index_or_none(self, series: pd.Series, climatology: Optional[pd.Series], year: int) -> Optional[float]:
        if climatology is None:
            return None
        try:
            return self.flood_index(series, climatology, year)
        except InsufficientDataError:
            return None

    def _classify(self, value: Optional[float]) -> Optional[EventClass]:
        if value is None or not math.isfinite(value):
            return None
        return self.classify_events([value], self.flood_threshold, self.drought_threshold)[0]

    def _altimetry_climatology(self, series: pd.Series) -> Optional[pd.Series]:
        daily = series.dropna()
        if daily.empty:
            return None
        daily = daily.resample("D").mean().interpolate(method="time", limit_area="inside")
        try:
            return self.climatology(daily, self.season)
        except InsufficientDataError as e:
            logger.warning(f"Climatologia altimétrica indisponível para {series.name}: {e}")
            return None

    def build_report(self, series_by_source: Dict[str, Dict[str, pd.Series]], gauges: Dict[str, GaugeSeries],
                     years: Sequence[int]) -> FloodReport:
        """
        Índices, classes, contingências e métricas de todas as fontes

        Args:
            series_by_source: fonte -> (local -> série com DatetimeIndex)
            gauges: réguas por local
            years: anos avaliados (vazio: anos presentes nas réguas)

        Raises:
            InsufficientDataError: nenhuma série com épocas em comum com uma régua
        """
        report = FloodReport()
        gauge_series = {location: g.to_series() for location, g in gauges.items()}
        if not years:
            years = sorted({int(y) for s in gauge_series.values() for y in pd.DatetimeIndex(s.index).year})

        climatologies: Dict[str, Optional[pd.Series]] = {}
        for location, series in sorted(gauge_series.items()):
            try:
                climatologies[location] = self.climatology(series, self.season)
            except InsufficientDataError as e:
                logger.warning(f"Régua {location} sem climatologia: {e}")
                climatologies[location] = None

        sources = sorted(series_by_source)
        gauge_classes: Dict[Tuple[str, int], Optional[EventClass]] = {}
        gauge_values: Dict[Tuple[str, int], Optional[float]] = {}
        # classes da régua nas suas próprias épocas, iguais para todas as fontes
        for location, gauge in sorted(gauge_series.items()):
            for year in years:
                value = self._index_or_none(gauge, climatologies[location], year)
                gauge_values[(location, year)] = value
                gauge_classes[(location, year)] = self._classify(value)
                report.cells.append(FloodCell(location, year, GAUGE_SOURCE, value, gauge_classes[(location, year)]))

        overlapping = 0
        for source in sources:
            report.contingency[source] = {kind: Contingency() for kind in EVENT_KINDS}
            report.station_contingency[source] = {}
            pairs: List[Tuple[float, float]] = []
            for location, series in sorted(series_by_source[source].items()):
                gauge = gauge_series.get(location)
                adjusted = series
                if gauge is not None:
                    shift = self.datum_shift(series, gauge)
                    if shift is None:
                        logger.warning(f"{source}/{location}: nenhuma época em comum com a régua")
                    else:
                        overlapping += 1
                        if self.align_datum:
                            adjusted = series + shift
                        self._append_metrics(report, location, source, adjusted, gauge)

                if self.altimetry_climatology or gauge is None:
                    climatology = self._altimetry_climatology(adjusted)
                else:
                    climatology = climatologies.get(location)

                stations = report.station_contingency[source].setdefault(
                    location, {kind: Contingency() for kind in EVENT_KINDS}
                )
                for year in years:
                    value = self._index_or_none(adjusted, climatology, year)
                    predicted = self._classify(value)
                    report.cells.append(FloodCell(location, year, source, value, predicted))
                    observed = gauge_classes.get((location, year))
                    if predicted is None or observed is None:
                        continue
                    for kind in EVENT_KINDS:
                        report.contingency[source][kind].add(predicted == kind, observed == kind)
                        stations[kind].add(predicted == kind, observed == kind)
                    pairs.append((value, gauge_values[(location, year)]))

            report.index_r2[source] = r_squared([p[0] for p in pairs], [p[1] for p in pairs]) if len(pairs) >= 3 else None
            flood = report.contingency[source][EventClass.FLOOD]
            logger.info(f"Fonte {source}: PoD cheia={flood.pod}, FAR cheia={flood.far}, R² índices={report.index_r2[source]}")

        if sources and gauge_series and overlapping == 0:
            raise InsufficientDataError("Nenhuma série com épocas em comum com as réguas")
        return report

    @staticmethod
    def _append_metrics(report: FloodReport, location: str, source: str, series: pd.Series,
                        gauge: pd.Series) -> None:
        try:
            rmse_m, r2, nse_value, n_common = series_skill(series, gauge)
        except InsufficientDataError as e:
            logger.warning(f"{source}/{location}: métricas indisponíveis ({e})")
            return
        report.metrics.append(SeriesMetrics(location, source, rmse_m, r2, nse_value, n_common))
