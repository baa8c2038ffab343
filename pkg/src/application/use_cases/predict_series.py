"""
Use Case de predição de séries: krigagem universal com todas as missões ou
krigagem ordinária de referência só com as estações virtuais
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ...domain.entities.network import RiverNetwork
from ...domain.entities.observation import Observation, PredictionTarget
from ...domain.entities.prediction import PredictedSeries
from ...domain.entities.trend_basis import TrendBasis
from ...domain.exceptions import ConfigurationError
from ...domain.value_objects.hydro_values import CovarianceParams, NeighborhoodSpec, NetworkLocation, OrbitClass
from ..interfaces.repositories import IRiverDataRepository
from ..interfaces.services import IKrigingService, ITrendService

logger = logging.getLogger(__name__)


class PredictionMode(Enum):
    UK = "uk"
    OK_BASELINE = "ok"

    @classmethod
    def from_text(cls, text: str) -> 'PredictionMode':
        text = text.strip().lower()
        if text == "ok-baseline":
            return cls.OK_BASELINE
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"Modo de predição desconhecido: {text!r}")


@dataclass
class PredictionResult:
    series: List[PredictedSeries] = field(default_factory=list)
    written: List[Path] = field(default_factory=list)
    n_observations: int = 0
    processing_time_ms: int = 0


def season_windows(window: Tuple[date, date], season: Tuple[str, str]) -> List[Tuple[date, date]]:
    """
    Janelas da estação ('MM-DD', 'MM-DD') de cada ano, recortadas a `window`

    Uma estação que vira o ano (início > fim) termina no ano seguinte.
    """
    start, end = window
    first, last = season
    wraps = first > last
    windows = []
    for year in range(start.year - 1, end.year + 1):
        season_start = date.fromisoformat(f"{year:04d}-{first}")
        season_end = date.fromisoformat(f"{year + 1 if wraps else year:04d}-{last}")
        clipped = (max(season_start, start), min(season_end, end))
        if clipped[0] <= clipped[1]:
            windows.append(clipped)
    return windows


def remove_station_means(observations: Sequence[Observation]) -> List[Observation]:
    """Subtrai de cada observação a média da sua estação virtual (mesmo local)"""
    heights: Dict[NetworkLocation, List[float]] = {}
    for obs in observations:
        heights.setdefault(obs.location, []).append(obs.height_m)
    means = {location: float(np.mean(values)) for location, values in heights.items()}
    return [obs.with_height(obs.height_m - means[obs.location]) for obs in observations]


class PredictSeriesUseCase:
    """Use Case do comando predict"""

    def __init__(self, repository: IRiverDataRepository, trend: ITrendService, kriging: IKrigingService):
        self.repository = repository
        self.trend = trend
        self.kriging = kriging

    def _inputs(self, network: RiverNetwork, observations: Sequence[Observation], mode: PredictionMode,
                knot_spacing_km: float) -> Tuple[List[Observation], TrendBasis]:
        if mode == PredictionMode.OK_BASELINE:
            short_repeat = [obs for obs in observations if obs.orbit_class == OrbitClass.SHORT_REPEAT]
            logger.info(f"Referência OK: {len(short_repeat)} observações de repetição curta")
            return remove_station_means(short_repeat), TrendBasis.constant()
        return list(observations), self.trend.build_basis(network, knot_spacing_km)

    def execute(
        self,
        network: RiverNetwork,
        observations: Sequence[Observation],
        params: CovarianceParams,
        targets: Sequence[PredictionTarget],
        window: Tuple[date, date],
        step_days: int = 5,
        mode: PredictionMode = PredictionMode.UK,
        knot_spacing_km: float = 100.0,
        neighborhood: NeighborhoodSpec = NeighborhoodSpec(),
        season: Optional[Tuple[str, str]] = None,
        max_workers: int = 1,
        out_dir: Optional[Path] = None,
    ) -> PredictionResult:
        """
        Executa a predição em todos os alvos

        Args:
            network: rede fluvial
            observations: observações preparadas
            params: parâmetros de covariância
            targets: alvos (vazio: nada é gravado)
            window: [início, fim] inclusive
            step_days: passo das épocas
            mode: uk ou referência ok
            knot_spacing_km: espaçamento da base (modo uk)
            neighborhood: vizinhança local
            season: se dada, prediz só as janelas da estação de cada ano
            max_workers: threads sobre os alvos
            out_dir: diretório das séries `<target_id>.csv`

        Returns:
            Séries ordenadas por target_id
        """
        start_time = time.time()
        result = PredictionResult()
        if not targets:
            logger.info("Nenhum alvo: nada a predizer")
            return result

        for target in targets:
            if not network.is_valid_location(target.location):
                raise ConfigurationError(f"Alvo {target.target_id} fora da rede: {target.location}", target.target_id)
        used, basis = self._inputs(network, observations, mode, knot_spacing_km)
        result.n_observations = len(used)
        windows = season_windows(window, season) if season else [window]

        def run(target: PredictionTarget) -> PredictedSeries:
            return self.kriging.interpolate_windows(
                network, basis, params, used, target.location, windows, step_days, neighborhood, target.target_id
            )

        ordered = sorted(targets, key=lambda t: t.target_id)
        if max_workers > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as executor:
                result.series = list(executor.map(run, ordered))
        else:
            result.series = [run(target) for target in ordered]

        if out_dir is not None:
            Path(out_dir).mkdir(parents=True, exist_ok=True)
            result.written = [self.repository.save_series(series, Path(out_dir)) for series in result.series]

        result.processing_time_ms = int((time.time() - start_time) * 1000)
        logger.info(f"Predição {mode.value}: {len(result.series)} séries em {result.processing_time_ms} ms")
        return result
