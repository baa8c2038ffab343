"""
Use Case de ajuste do modelo de covariância: tendência GLS preliminar,
covariância empírica dos resíduos e mínimos quadrados ponderados
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from ...domain.entities.covariance import CovarianceFit, EmpiricalCovariance
from ...domain.entities.network import RiverNetwork
from ...domain.entities.observation import Observation
from ...domain.entities.trend_basis import TrendBasis
from ...domain.exceptions import InsufficientDataError
from ...domain.value_objects.hydro_values import CovarianceParams
from ..interfaces.repositories import IDocumentRepository
from ..interfaces.services import ICovarianceFittingService, IKrigingService, ITrendService

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BinLayout:
    """Bordas uniformes dos bins empíricos"""
    space_step_km: float = 25.0
    max_space_km: float = 400.0
    time_step_days: float = 10.0
    max_time_days: float = 120.0

    def __post_init__(self):
        if min(self.space_step_km, self.max_space_km, self.time_step_days, self.max_time_days) <= 0:
            raise ValueError("Dimensões dos bins devem ser positivas")
        if self.space_step_km > self.max_space_km or self.time_step_days > self.max_time_days:
            raise ValueError("Passo de bin maior que o lag máximo")

    @staticmethod
    def _edges(step: float, maximum: float) -> List[float]:
        n = int(np.floor(maximum / step + 1e-9))
        return [k * step for k in range(n + 1)]

    @property
    def space_edges_km(self) -> List[float]:
        return self._edges(self.space_step_km, self.max_space_km)

    @property
    def time_edges_days(self) -> List[float]:
        return self._edges(self.time_step_days, self.max_time_days)


@dataclass
class FitExecutionResult:
    fit: CovarianceFit
    basis: TrendBasis
    empirical: EmpiricalCovariance
    n_trend_observations: int = 0
    written: List[Path] = field(default_factory=list)
    processing_time_ms: int = 0


def evenly_spaced(observations: Sequence[Observation], limit: int) -> List[Observation]:
    """Subamostra determinística em ordem de época (todas, se couberem)"""
    ordered = sorted(observations, key=lambda o: (o.epoch, o.location.edge_id, o.location.offset_km, o.mission))
    if len(ordered) <= limit:
        return ordered
    index = np.unique(np.linspace(0, len(ordered) - 1, limit).round().astype(int))
    return [ordered[i] for i in index]


class FitCovarianceUseCase:
    """
    Use Case do comando fit.

    A tendência preliminar é estimada com os parâmetros iniciais; os
    resíduos alimentam a covariância empírica.
    """

    def __init__(self, trend: ITrendService, kriging: IKrigingService, fitting: ICovarianceFittingService,
                 documents: IDocumentRepository, max_trend_observations: int = 2000):
        self.trend = trend
        self.kriging = kriging
        self.fitting = fitting
        self.documents = documents
        self.max_trend_observations = max_trend_observations

    def residuals(self, network: RiverNetwork, basis: TrendBasis, observations: Sequence[Observation],
                  initial: CovarianceParams) -> List[Observation]:
        """
        Observações com altura substituída pelo resíduo da tendência GLS

        Raises:
            KrigingSystemError: matriz normal singular
        """
        sample = evenly_spaced(observations, self.max_trend_observations)
        if len(sample) < len(observations):
            logger.info(f"Tendência preliminar estimada com {len(sample)} de {len(observations)} observações")
        beta = self.kriging.gls_trend(network, basis, sample, initial)
        F, _ = self.trend.design_matrices(network, basis, observations, observations[0].location)

        unsupported = np.isnan(beta)
        usable = ~np.any(F[:, unsupported] > 0, axis=1)
        trend = F[:, ~unsupported] @ beta[~unsupported]
        residuals = [
            obs.with_height(obs.height_m - float(level))
            for obs, level, keep in zip(observations, trend, usable)
            if keep
        ]
        if len(residuals) < len(observations):
            logger.warning(f"{len(observations) - len(residuals)} observações fora do suporte da tendência")
        return residuals

    def execute(
        self,
        network: RiverNetwork,
        observations: Sequence[Observation],
        initial: CovarianceParams,
        knot_spacing_km: float,
        bins: BinLayout = BinLayout(),
        out_dir: Optional[Path] = None,
    ) -> FitExecutionResult:
        """
        Executa o ajuste

        Args:
            network: rede fluvial
            observations: observações preparadas (já filtradas pelo cenário)
            initial: chute inicial e fatores de tributário
            knot_spacing_km: espaçamento dos nós da base de tendência
            bins: bordas da covariância empírica
            out_dir: se dado, grava params.json, fit_report.json e basis.json

        Returns:
            Ajuste, base e covariância empírica

        Raises:
            InsufficientDataError: nenhuma observação
            UnderdeterminedFitError: bins insuficientes
        """
        start_time = time.time()
        observations = list(observations)
        if not observations:
            raise InsufficientDataError("Nenhuma observação para o ajuste de covariância")

        basis = self.trend.build_basis(network, knot_spacing_km)
        residuals = self.residuals(network, basis, observations, initial)
        empirical = self.fitting.empirical_covariance(network, residuals, bins.space_edges_km, bins.time_edges_days)
        fit = self.fitting.fit_params(empirical, initial)

        result = FitExecutionResult(
            fit=fit,
            basis=basis,
            empirical=empirical,
            n_trend_observations=min(len(observations), self.max_trend_observations),
        )
        if out_dir is not None:
            out_dir = Path(out_dir)
            self.documents.save_params(fit.params, out_dir / "params.json")
            self.documents.save_fit_report(fit, out_dir / "fit_report.json")
            self.documents.save_basis(basis, out_dir / "basis.json")
            result.written = [out_dir / "params.json", out_dir / "fit_report.json", out_dir / "basis.json"]

        result.processing_time_ms = int((time.time() - start_time) * 1000)
        return result
