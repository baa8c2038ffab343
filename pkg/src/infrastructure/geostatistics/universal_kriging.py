"""
Krigagem universal local com tendência B-spline e erro de observação
heterogêneo (Sigma_alti)
"""

import logging
import warnings
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, LinAlgWarning, cho_factor, cho_solve, lu_factor, lu_solve

from ...application.interfaces.services import IKrigingService
from ...domain.entities.network import RiverNetwork
from ...domain.entities.observation import Observation
from ...domain.entities.prediction import KrigingPrediction, PredictedSeries
from ...domain.entities.trend_basis import TrendBasis
from ...domain.exceptions import KrigingSystemError
from ...domain.value_objects.hydro_values import CovarianceParams, NeighborhoodSpec, NetworkLocation, SeriesFlag
from .covariance_model import LocationArrays, SpatioTemporalCovariance
from .trend_basis import BSplineTrendService

logger = logging.getLogger(__name__)

_COLUMN_TOL = 1e-12
_VARIANCE_TOL = 1e-9
_TREND_COND_LIMIT = 1e12
_RANK_RTOL = 1e-8


@dataclass(frozen=True)
class ObservationTable:
    """Observações vetorizadas, preparadas uma vez por conjunto de dados"""
    observations: Tuple[Observation, ...]
    locations: LocationArrays
    days: np.ndarray
    heights: np.ndarray
    error_factors: np.ndarray
    design: np.ndarray

    def __len__(self) -> int:
        return len(self.observations)


@dataclass(frozen=True)
class _Solution:
    weights: np.ndarray
    variance: float
    condition: float


def _factorize(matrix: np.ndarray) -> Tuple[Callable[[np.ndarray], np.ndarray], float]:
    """
    Fatoração de Sigma_tot: Cholesky, com LU pivotada como alternativa

    Returns:
        (função de resolução, estimativa do número de condição)
    """
    try:
        factor = cho_factor(matrix, lower=True, check_finite=False)
        diag = np.abs(np.diag(factor[0]))
        return (lambda b: cho_solve(factor, b, check_finite=False)), float((diag.max() / diag.min()) ** 2)
    except LinAlgError:
        logger.debug("Cholesky falhou; usando LU pivotada")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(matrix, check_finite=False)
    diag = np.abs(np.diag(lu))
    if diag.size == 0 or diag.min() <= np.finfo(float).eps * max(diag.max(), 1.0) * len(diag):
        raise KrigingSystemError("Sigma_tot singular")
    return (lambda b: lu_solve((lu, piv), b, check_finite=False)), float(diag.max() / diag.min())


def _full_column_rank(matrix: np.ndarray) -> bool:
    if matrix.shape[1] == 0:
        return True
    if matrix.shape[0] < matrix.shape[1]:
        return False
    singular = np.linalg.svd(matrix, compute_uv=False)
    return bool(singular[-1] > _RANK_RTOL * singular[0])


def identifiable_trend(F: np.ndarray, f: np.ndarray) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """
    Linhas e colunas de F que identificam a tendência no alvo

    Colunas com f_j != 0 são sempre mantidas. Colunas com f_j = 0 que não
    aumentam o posto são descartadas junto com as observações que as tocam,
    até o F restante ter posto completo.

    Returns:
        (máscara de linhas, máscara de colunas), ou None se a tendência do
        próprio alvo não for identificável
    """
    rows = np.ones(F.shape[0], dtype=bool)
    used = np.abs(f) > _COLUMN_TOL
    while rows.any():
        sub = F[rows]
        supported = np.linalg.norm(sub, axis=0) > _COLUMN_TOL
        if np.any(used & ~supported):
            return None
        kept = [int(j) for j in np.flatnonzero(used)]
        if not _full_column_rank(sub[:, kept]):
            return None
        nuisance = np.flatnonzero(supported & ~used)
        support = np.count_nonzero(np.abs(sub[:, nuisance]) > _COLUMN_TOL, axis=0)
        unidentified = []
        for j in nuisance[np.argsort(-support, kind="stable")]:
            if _full_column_rank(sub[:, kept + [int(j)]]):
                kept.append(int(j))
            else:
                unidentified.append(int(j))
        if not unidentified:
            columns = np.zeros(F.shape[1], dtype=bool)
            columns[kept] = True
            return rows, columns
        rows &= ~np.any(np.abs(F[:, unidentified]) > _COLUMN_TOL, axis=1)
    return None


def _solve_system(sigma_tot: np.ndarray, F: np.ndarray, c_u: np.ndarray, f: np.ndarray, c0: float) -> _Solution:
    solve, condition = _factorize(sigma_tot)
    sigma_inv_c = solve(c_u)
    sigma_inv_F = solve(F)
    normal = F.T @ sigma_inv_F
    if not np.all(np.isfinite(normal)) or np.linalg.cond(normal) > _TREND_COND_LIMIT:
        raise KrigingSystemError("F de posto incompleto: (F^T Sigma^-1 F) singular")
    residual = f - F.T @ sigma_inv_c
    correction = np.linalg.solve(normal, residual)
    weights = sigma_inv_c + sigma_inv_F @ correction
    variance = c0 - float(c_u @ sigma_inv_c) + float(residual @ correction)
    return _Solution(weights, variance, condition)


class UniversalKrigingService(IKrigingService):
    """
    Preditor de krigagem universal.

    Usa Sigma_tot = Sigma_U + Sigma_alti tanto na correção de tendência quanto
    na inversa final, o que garante F^T lambda = f.
    """

    def __init__(self, covariance: SpatioTemporalCovariance, trend: BSplineTrendService):
        self.covariance = covariance
        self.trend = trend

    def prepare(self, network: RiverNetwork, basis: TrendBasis, params: CovarianceParams,
                observations: Sequence[Observation]) -> ObservationTable:
        """Vetoriza as observações (localização, época, fatores de erro, linha de F)"""
        observations = tuple(observations)
        locations = [obs.location for obs in observations]
        return ObservationTable(
            observations=observations,
            locations=LocationArrays.from_locations(network, locations),
            days=np.array([obs.day_number for obs in observations], dtype=float),
            heights=np.array([obs.height_m for obs in observations], dtype=float),
            error_factors=self.covariance.error_factors(network, observations, params),
            design=self.trend.basis_matrix(network, basis, locations),
        )

    def gls_trend(self, network: RiverNetwork, basis: TrendBasis, observations: Sequence[Observation],
                  params: CovarianceParams) -> np.ndarray:
        """
        Estimativa GLS dos coeficientes de tendência

        Returns:
            beta com NaN nas colunas sem suporte nos dados

        Raises:
            KrigingSystemError: matriz normal singular (informa colunas descartadas)
        """
        if not observations:
            raise KrigingSystemError("Nenhuma observação para a tendência")
        sigma_u, sigma_alti = self.covariance.build_matrices(network, observations, params)
        F = self.trend.basis_matrix(network, basis, [obs.location for obs in observations])
        z = np.array([obs.height_m for obs in observations], dtype=float)

        supported = np.linalg.norm(F, axis=0) > _COLUMN_TOL
        dropped = [int(j) for j in np.flatnonzero(~supported)]
        if dropped:
            logger.warning(f"Funções de tendência sem suporte descartadas: {dropped}")
        F_used = F[:, supported]

        solve, _ = _factorize(sigma_u + sigma_alti)
        sigma_inv_F = solve(F_used)
        normal = F_used.T @ sigma_inv_F
        if np.linalg.matrix_rank(normal) < F_used.shape[1]:
            raise KrigingSystemError("Matriz normal da tendência singular", dropped)
        beta_used = np.linalg.solve(normal, sigma_inv_F.T @ z)

        beta = np.full(basis.size, np.nan)
        beta[supported] = beta_used
        return beta

    def solve_weights(self, sigma_u: np.ndarray, sigma_alti: np.ndarray, F: np.ndarray, c_u: np.ndarray,
                      f: np.ndarray) -> np.ndarray:
        """
        Pesos de krigagem universal

        Raises:
            KrigingSystemError: Sigma_tot singular ou F de posto incompleto
        """
        F = np.asarray(F, dtype=float).reshape(len(c_u), -1)
        return _solve_system(sigma_u + sigma_alti, F, np.asarray(c_u, float), np.asarray(f, float), 0.0).weights

    def select_neighborhood(self, network: RiverNetwork, table: ObservationTable, target: LocationArrays,
                            epoch_day: float, params: CovarianceParams, neighborhood: NeighborhoodSpec) -> np.ndarray:
        """Índices (crescentes) das observações usadas para o alvo"""
        if len(table) == 0:
            return np.zeros(0, dtype=np.intp)
        _, connectivity = network.connectivity
        in_time = np.abs(table.days - epoch_day) <= neighborhood.max_lag_days
        connected = connectivity[table.locations.edge_index, target.edge_index[0]]
        near_river = connected & (np.abs(table.locations.chainage - target.chainage[0]) <= neighborhood.max_river_km)
        same_basin = table.locations.basin_index == target.basin_index[0]
        basin_dist = np.where(same_basin, 0.0, np.linalg.norm(table.locations.basin_xy - target.basin_xy[0], axis=1))
        near_basin = basin_dist <= neighborhood.max_basin_km
        index = np.flatnonzero(in_time & (near_river | near_basin))

        if len(index) > neighborhood.max_count:
            c = self.covariance.process_matrix(
                network, table.locations.subset(index), table.days[index], target, np.array([epoch_day]), params
            )[:, 0]
            order = np.argsort(-c, kind="stable")[: neighborhood.max_count]
            index = np.sort(index[order])
        return index

    def predict_from_table(self, network: RiverNetwork, table: ObservationTable, params: CovarianceParams,
                           basis: TrendBasis, target: NetworkLocation, epoch: date,
                           neighborhood: NeighborhoodSpec) -> KrigingPrediction:
        target_arrays = LocationArrays.from_locations(network, [target])
        epoch_day = float(epoch.toordinal())
        index = self.select_neighborhood(network, table, target_arrays, epoch_day, params, neighborhood)
        if len(index) == 0:
            return KrigingPrediction.no_data(epoch)

        f = self.trend.eval_basis(network, basis, target)
        reduced = identifiable_trend(table.design[index], f)
        if reduced is None:
            logger.debug(f"{epoch}: tendência do alvo não identificável na vizinhança ({len(index)} obs)")
            return KrigingPrediction.no_data(epoch, n_obs=len(index))
        rows, columns = reduced
        if not rows.all():
            logger.debug(f"{epoch}: {int((~rows).sum())} observações fora das colunas identificáveis")
        index = index[rows]
        dropped = tuple(int(j) for j in np.flatnonzero(~columns))
        F, f = table.design[index][:, columns], f[columns]

        locations = table.locations.subset(index)
        days = table.days[index]
        sigma_u = self.covariance.process_matrix(network, locations, days, locations, days, params)
        sigma_alti = np.diag(params.nugget * table.error_factors[index])
        c_u = self.covariance.process_matrix(network, locations, days, target_arrays, np.array([epoch_day]), params)[:, 0]

        solution = _solve_system(sigma_u + sigma_alti, F, c_u, f, params.sill)
        height = float(solution.weights @ table.heights[index])

        flag = SeriesFlag.OK
        variance = solution.variance
        if variance < 0:
            if variance < -_VARIANCE_TOL * max(1.0, params.sill):
                logger.warning(f"{epoch}: variância negativa {variance:.3e} recortada")
            variance = 0.0
            flag = SeriesFlag.CLIPPED_VARIANCE

        return KrigingPrediction(
            epoch=epoch,
            height_m=height,
            variance_m2=variance,
            weights=solution.weights,
            n_obs=len(index),
            condition=solution.condition,
            flag=flag,
            dropped_columns=dropped,
        )

    def predict(self, network: RiverNetwork, basis: TrendBasis, params: CovarianceParams,
                observations: Sequence[Observation], target: NetworkLocation, epoch: date,
                neighborhood: NeighborhoodSpec) -> KrigingPrediction:
        """
        Predição de krigagem universal num ponto e época

        Args:
            network: rede fluvial
            basis: base de tendência
            params: parâmetros de covariância
            observations: observações mascaradas, triadas e alinhadas
            target: local de interpolação
            epoch: data de interpolação
            neighborhood: limites da vizinhança local

        Returns:
            Predição, ou marcador sem dados se a vizinhança estiver vazia
        """
        table = self.prepare(network, basis, params, observations)
        return self.predict_from_table(network, table, params, basis, target, epoch, neighborhood)

    def interpolate_series(self, network: RiverNetwork, basis: TrendBasis, params: CovarianceParams,
                           observations: Sequence[Observation], target: NetworkLocation,
                           window: Tuple[date, date], step_days: int, neighborhood: NeighborhoodSpec,
                           target_id: str = "") -> PredictedSeries:
        return self.interpolate_windows(network, basis, params, observations, target, [window], step_days,
                                        neighborhood, target_id)

    def interpolate_windows(self, network: RiverNetwork, basis: TrendBasis, params: CovarianceParams,
                            observations: Sequence[Observation], target: NetworkLocation,
                            windows: Sequence[Tuple[date, date]], step_days: int, neighborhood: NeighborhoodSpec,
                            target_id: str = "") -> PredictedSeries:
        """Série única com as épocas de várias janelas (por exemplo, uma estação de cheia por ano)"""
        table = self.prepare(network, basis, params, observations)
        return self.interpolate_from_table(network, table, params, basis, target, windows, step_days,
                                           neighborhood, target_id)

    def interpolate_from_table(self, network: RiverNetwork, table: ObservationTable, params: CovarianceParams,
                               basis: TrendBasis, target: NetworkLocation, windows: Sequence[Tuple[date, date]],
                               step_days: int, neighborhood: NeighborhoodSpec,
                               target_id: str = "") -> PredictedSeries:
        series = PredictedSeries(target_id=target_id, location=target)
        epochs = sorted({epoch for window in windows for epoch in series_epochs(window, step_days)})
        for epoch in epochs:
            try:
                prediction = self.predict_from_table(network, table, params, basis, target, epoch, neighborhood)
            except KrigingSystemError as e:
                logger.warning(f"{target_id} {epoch}: sistema de krigagem falhou ({e}); época sem dados")
                prediction = KrigingPrediction.no_data(epoch)
            series.add(prediction)
        logger.info(
            f"Série {target_id}: {len(series.predictions)} épocas, "
            f"{series.count_flag(SeriesFlag.NODATA)} sem dados"
        )
        return series


def series_epochs(window: Tuple[date, date], step_days: int) -> List[date]:
    """Épocas start, start+step, ... até end (inclusive)"""
    start, end = window
    if step_days <= 0:
        raise ValueError("step_days deve ser > 0")
    if end < start:
        raise ValueError(f"Janela inválida: {start} > {end}")
    n = (end - start).days // step_days + 1
    return [start + timedelta(days=k * step_days) for k in range(n)]
