"""
Interfaces de Repositórios
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from ...domain.entities.covariance import CovarianceFit
from ...domain.entities.flood_report import FloodReport
from ...domain.entities.network import RiverNetwork
from ...domain.entities.observation import GaugeSeries, Observation, ObservationLoadResult, PredictionTarget
from ...domain.entities.prediction import PredictedSeries
from ...domain.entities.trend_basis import TrendBasis
from ...domain.value_objects.hydro_values import CovarianceParams


class IRiverDataRepository(ABC):
    """
    Interface para os arquivos tabulares (rede, observações, réguas, séries)
    """

    @abstractmethod
    def load_network(self, directory: Path) -> RiverNetwork:
        """Lê nodes.csv e edges.csv"""
        pass

    @abstractmethod
    def save_network(self, network: RiverNetwork, directory: Path) -> None:
        pass

    @abstractmethod
    def load_observations(self, path: Path, network: Optional[RiverNetwork] = None) -> ObservationLoadResult:
        """Lê observations.csv rejeitando linhas inválidas com número de linha"""
        pass

    @abstractmethod
    def save_observations(self, observations: Sequence[Observation], path: Path) -> None:
        pass

    @abstractmethod
    def load_gauges(self, path: Path) -> Dict[str, GaugeSeries]:
        pass

    @abstractmethod
    def save_gauges(self, gauges: Sequence[GaugeSeries], path: Path) -> None:
        pass

    @abstractmethod
    def load_targets(self, path: Path) -> List[PredictionTarget]:
        pass

    @abstractmethod
    def save_targets(self, targets: Sequence[PredictionTarget], path: Path) -> None:
        pass

    @abstractmethod
    def save_truth(self, truth: pd.DataFrame, path: Path) -> None:
        pass

    @abstractmethod
    def save_series(self, series: PredictedSeries, directory: Path) -> Path:
        pass

    @abstractmethod
    def load_series_directory(self, directory: Path) -> Dict[str, pd.Series]:
        """Séries por alvo (altura indexada por data, NaN nas épocas sem dados)"""
        pass

    @abstractmethod
    def save_report(self, report: FloodReport, directory: Path) -> None:
        """Grava report.csv, metrics.csv e summary.json"""
        pass


class IDocumentRepository(ABC):
    """
    Interface para documentos JSON (parâmetros, base, relatório de ajuste)
    """

    @abstractmethod
    def load_params(self, path: Path) -> CovarianceParams:
        pass

    @abstractmethod
    def save_params(self, params: CovarianceParams, path: Path) -> None:
        pass

    @abstractmethod
    def save_fit_report(self, fit: CovarianceFit, path: Path) -> None:
        pass

    @abstractmethod
    def save_basis(self, basis: TrendBasis, path: Path) -> None:
        pass
