"""
Interfaces de serviços da aplicação
"""

from abc import ABC, abstractmethod
from datetime import date
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ...domain.entities.covariance import CovarianceFit, EmpiricalCovariance
from ...domain.entities.flood_report import Contingency, FloodReport
from ...domain.entities.network import RiverNetwork
from ...domain.entities.observation import GaugeSeries, Observation
from ...domain.entities.prediction import KrigingPrediction, PredictedSeries
from ...domain.entities.trend_basis import TrendBasis
from ...domain.value_objects.hydro_values import (
    CovarianceParams,
    EventClass,
    NeighborhoodSpec,
    NetworkLocation,
)
from ...domain.value_objects.simulation_values import MissionConfig, TruthConfig


class ICovarianceService(ABC):
    """Interface do modelo de covariância espaço-temporal"""

    @abstractmethod
    def temporal_cov(self, dt_days: float, params: CovarianceParams) -> float:
        pass

    @abstractmethod
    def spatial_cov(self, network: RiverNetwork, a: NetworkLocation, b: NetworkLocation,
                    params: CovarianceParams) -> float:
        pass

    @abstractmethod
    def st_cov(self, network: RiverNetwork, a: Tuple[NetworkLocation, date], b: Tuple[NetworkLocation, date],
               params: CovarianceParams) -> float:
        pass

    @abstractmethod
    def build_matrices(self, network: RiverNetwork, observations: Sequence[Observation],
                       params: CovarianceParams) -> Tuple[np.ndarray, np.ndarray]:
        """Retorna (Sigma_U, Sigma_alti)"""
        pass


class ICovarianceFittingService(ABC):
    """Interface de estimação dos parâmetros de covariância"""

    @abstractmethod
    def empirical_covariance(self, network: RiverNetwork, residuals: Sequence[Observation],
                             space_edges_km: Sequence[float], time_edges_days: Sequence[float]) -> EmpiricalCovariance:
        pass

    @abstractmethod
    def fit_params(self, empirical: EmpiricalCovariance, initial: CovarianceParams) -> CovarianceFit:
        pass


class ITrendService(ABC):
    """Interface da base de tendência (B-splines sobre a distância à foz)"""

    @abstractmethod
    def build_basis(self, network: RiverNetwork, knot_spacing_km: float) -> TrendBasis:
        pass

    @abstractmethod
    def eval_basis(self, network: RiverNetwork, basis: TrendBasis, location: NetworkLocation) -> np.ndarray:
        pass

    @abstractmethod
    def design_matrices(self, network: RiverNetwork, basis: TrendBasis, observations: Sequence[Observation],
                        target: NetworkLocation) -> Tuple[np.ndarray, np.ndarray]:
        """Retorna (F, f)"""
        pass


class IKrigingService(ABC):
    """Interface do preditor de krigagem universal"""

    @abstractmethod
    def gls_trend(self, network: RiverNetwork, basis: TrendBasis, observations: Sequence[Observation],
                  params: CovarianceParams) -> np.ndarray:
        pass

    @abstractmethod
    def solve_weights(self, sigma_u: np.ndarray, sigma_alti: np.ndarray, F: np.ndarray, c_u: np.ndarray,
                      f: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def predict(self, network: RiverNetwork, basis: TrendBasis, params: CovarianceParams,
                observations: Sequence[Observation], target: NetworkLocation, epoch: date,
                neighborhood: NeighborhoodSpec) -> KrigingPrediction:
        pass

    @abstractmethod
    def interpolate_series(self, network: RiverNetwork, basis: TrendBasis, params: CovarianceParams,
                           observations: Sequence[Observation], target: NetworkLocation,
                           window: Tuple[date, date], step_days: int, neighborhood: NeighborhoodSpec,
                           target_id: str = "") -> PredictedSeries:
        pass

    @abstractmethod
    def interpolate_windows(self, network: RiverNetwork, basis: TrendBasis, params: CovarianceParams,
                            observations: Sequence[Observation], target: NetworkLocation,
                            windows: Sequence[Tuple[date, date]], step_days: int, neighborhood: NeighborhoodSpec,
                            target_id: str = "") -> PredictedSeries:
        pass


class IScreeningService(ABC):
    """Interface de triagem de outliers"""

    @abstractmethod
    def screen_along_track(self, observations: Sequence[Observation], k_sigma: float) -> List[Observation]:
        pass

    @abstractmethod
    def screen_annual_repeat(self, network: RiverNetwork, observations: Sequence[Observation]) -> List[Observation]:
        pass


class IMissionAlignmentService(ABC):
    """Interface de alinhamento de datum entre missões"""

    @abstractmethod
    def estimate_mission_offsets(self, observations: Sequence[Observation],
                                 reference_mission: str) -> Dict[str, Optional[float]]:
        pass

    @abstractmethod
    def apply_offsets(self, observations: Sequence[Observation],
                      offsets: Dict[str, Optional[float]]) -> List[Observation]:
        pass


class ISimulationService(ABC):
    """Interface do simulador sintético"""

    @abstractmethod
    def truth_level(self, network: RiverNetwork, config: TruthConfig, location: NetworkLocation, epoch: date) -> float:
        pass

    @abstractmethod
    def sample_missions(self, network: RiverNetwork, config: TruthConfig, missions: Sequence[MissionConfig],
                        era: Tuple[date, date], seed: int) -> List[Observation]:
        pass

    @abstractmethod
    def simulate_gauges(self, network: RiverNetwork, config: TruthConfig, sites: Dict[str, NetworkLocation],
                        era: Tuple[date, date], seed: int) -> List[GaugeSeries]:
        pass

    @abstractmethod
    def truth_table(self, network: RiverNetwork, config: TruthConfig, observations: Sequence[Observation],
                    gauges: Sequence[GaugeSeries] = ()) -> pd.DataFrame:
        """Tabela edge_id, offset_km, date, height_m da verdade sem ruído"""
        pass


class IFloodAnalysisService(ABC):
    """Interface de índices de cheia e métricas de validação"""

    @abstractmethod
    def climatology(self, gauge: pd.Series, window: Tuple[str, str]) -> pd.Series:
        pass

    @abstractmethod
    def flood_index(self, series: pd.Series, climatology: pd.Series, year: int) -> float:
        pass

    @abstractmethod
    def classify_events(self, indices: Sequence[float], flood_threshold: float,
                        drought_threshold: float) -> List[EventClass]:
        pass

    @abstractmethod
    def pod_far(self, predicted: Sequence[EventClass], truth: Sequence[EventClass]) -> Dict[EventClass, Contingency]:
        pass

    @abstractmethod
    def series_metrics(self, altimetry: pd.Series, gauge: pd.Series) -> Tuple[float, Optional[float], Optional[float]]:
        pass

    @abstractmethod
    def build_report(self, series_by_source: Dict[str, Dict[str, pd.Series]], gauges: Dict[str, GaugeSeries],
                     years: Sequence[int]) -> FloodReport:
        pass
