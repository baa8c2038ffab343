"""
Covariância empírica binada e ajuste dos parâmetros por mínimos quadrados
ponderados pelo número de pares
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from ...application.interfaces.services import ICovarianceFittingService
from ...domain.entities.covariance import (
    BASIN_COMPONENT,
    RIVER_COMPONENT,
    CovarianceBin,
    CovarianceFit,
    EmpiricalCovariance,
)
from ...domain.entities.network import RiverNetwork
from ...domain.entities.observation import Observation
from ...domain.exceptions import InsufficientDataError, UnderdeterminedFitError
from ...domain.value_objects.hydro_values import CovarianceParams
from .covariance_model import LocationArrays

logger = logging.getLogger(__name__)

MIN_BINS = 6
MIN_COMPONENT_BINS = 2
_RANGE_BOUND_FACTOR = 10.0
_BOUND_RTOL = 1e-2
_ZERO_VARIANCE = 1e-10
NUGGET_FLOOR_SHARE = 0.01
_PAIR_CHUNK_ROWS = 512

_PARAM_NAMES = ("sigma2_river", "rho_river", "sigma2_basin", "rho_basin", "tau")


def _check_edges(edges: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(edges, dtype=float)
    if arr.ndim != 1 or len(arr) < 2:
        raise ValueError(f"{name}: são necessárias ao menos duas bordas")
    if arr[0] < 0 or np.any(np.diff(arr) <= 0):
        raise ValueError(f"{name}: bordas devem ser não negativas e estritamente crescentes")
    return arr


def _bin_of(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Índice do bin [e_k, e_k+1) de cada valor; a última borda é inclusiva; -1 fora"""
    index = np.searchsorted(edges, values, side="right") - 1
    index = np.where(values == edges[-1], len(edges) - 2, index)
    return np.where((index >= 0) & (index < len(edges) - 1), index, -1)


def model_curve(component: str, space_lag_km: float, basin_lag_km: float, time_lag_days: float, weight: float,
                params: CovarianceParams) -> float:
    """Valor do modelo para um bin a partir dos seus lags médios"""
    temporal = np.exp(-time_lag_days / params.tau)
    basin = params.sigma2_basin * np.exp(-basin_lag_km / params.rho_basin)
    if component == RIVER_COMPONENT:
        flow = params.sigma2_river * weight * np.exp(-space_lag_km / params.rho_river)
        return float((flow + basin) * temporal)
    return float(basin * temporal)


def estimate_nugget(empirical: EmpiricalCovariance, sill: float) -> Tuple[float, bool]:
    """
    Nugget como excesso da variância amostral sobre o patamar ajustado

    O piso é a mediana do quadrado do desvio ao longo do traço (quando há) ou
    uma fração da variância amostral, e nunca é zero; Sigma_tot permanece
    definida positiva mesmo com observações coincidentes.

    Returns:
        (nugget, True se o piso foi aplicado)
    """
    floor = max(empirical.noise_variance or 0.0, NUGGET_FLOOR_SHARE * abs(empirical.variance), _ZERO_VARIANCE)
    excess = empirical.variance - sill
    if excess >= floor:
        return float(excess), False
    return float(floor), True


@dataclass
class _BinArrays:
    is_river: np.ndarray
    space: np.ndarray
    basin: np.ndarray
    time: np.ndarray
    weight: np.ndarray
    value: np.ndarray
    count: np.ndarray

    @classmethod
    def from_bins(cls, bins: Sequence[CovarianceBin], scale: float) -> '_BinArrays':
        return cls(
            is_river=np.array([b.component == RIVER_COMPONENT for b in bins]),
            space=np.array([b.space_lag_km for b in bins], dtype=float),
            basin=np.array([b.basin_lag_km for b in bins], dtype=float),
            time=np.array([b.time_lag_days for b in bins], dtype=float),
            weight=np.array([b.weight for b in bins], dtype=float),
            value=np.array([b.mean_product for b in bins], dtype=float) / scale,
            count=np.array([b.count for b in bins], dtype=float),
        )

    def model(self, theta: np.ndarray) -> np.ndarray:
        s2r, rho_r, s2b, rho_b, tau = theta
        temporal = np.exp(-self.time / tau)
        basin = s2b * np.exp(-self.basin / rho_b)
        flow = np.where(self.is_river, s2r * self.weight * np.exp(-self.space / rho_r), 0.0)
        return (flow + basin) * temporal


class CovarianceFittingService(ICovarianceFittingService):
    """
    Estimação dos parâmetros do modelo de covariância.

    Pares conectados por fluxo vão para bins "river" (distância ao longo do
    rio); os demais para bins "basin" (distância entre sub-bacias).
    """

    def __init__(self, max_nfev: int = 2000):
        self.max_nfev = max_nfev

    def empirical_covariance(self, network: RiverNetwork, residuals: Sequence[Observation],
                             space_edges_km: Sequence[float], time_edges_days: Sequence[float]) -> EmpiricalCovariance:
        """
        Covariância empírica dos resíduos por (lag espacial, lag temporal)

        Args:
            network: rede fluvial
            residuals: observações cuja altura é o resíduo da tendência
            space_edges_km: bordas dos bins espaciais (rio e bacia)
            time_edges_days: bordas dos bins temporais

        Raises:
            InsufficientDataError: nenhum resíduo
        """
        if not residuals:
            raise InsufficientDataError("Covariância empírica sem resíduos")
        space_edges = _check_edges(space_edges_km, "space_edges_km")
        time_edges = _check_edges(time_edges_days, "time_edges_days")
        n_space, n_time = len(space_edges) - 1, len(time_edges) - 1
        n_flat = 2 * n_space * n_time

        days = np.array([obs.day_number for obs in residuals], dtype=float)
        order = np.argsort(days, kind="stable")
        days = days[order]
        z = np.array([residuals[i].height_m for i in order], dtype=float)
        arrays = LocationArrays.from_locations(network, [residuals[i].location for i in order])
        _, connectivity = network.connectivity

        sums = {key: np.zeros(n_flat) for key in ("count", "product", "space", "basin", "time", "weight")}
        upper = np.searchsorted(days, days + time_edges[-1], side="right")
        n = len(z)
        for start in range(0, n, _PAIR_CHUNK_ROWS):
            rows = np.arange(start, min(n, start + _PAIR_CHUNK_ROWS))
            counts = upper[rows] - rows - 1
            total = int(counts.sum())
            if total == 0:
                continue
            i = np.repeat(rows, counts)
            j = np.repeat(rows + 1, counts) + (np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts))

            connected = connectivity[arrays.edge_index[i], arrays.edge_index[j]]
            d_river = np.abs(arrays.chainage[i] - arrays.chainage[j])
            same_basin = arrays.basin_index[i] == arrays.basin_index[j]
            d_basin = np.where(same_basin, 0.0, np.linalg.norm(arrays.basin_xy[i] - arrays.basin_xy[j], axis=1))
            dt = days[j] - days[i]
            i_up = arrays.chainage[i] >= arrays.chainage[j]
            w_up = np.where(i_up, arrays.weight[i], arrays.weight[j])
            w_down = np.where(i_up, arrays.weight[j], arrays.weight[i])
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(w_down > 0, np.minimum(w_up / w_down, 1.0), np.where(w_up > 0, 0.0, 1.0))

            space_bin = _bin_of(np.where(connected, d_river, d_basin), space_edges)
            time_bin = _bin_of(dt, time_edges)
            valid = (space_bin >= 0) & (time_bin >= 0)
            flat = (np.where(connected, 0, 1) * n_space + space_bin) * n_time + time_bin
            flat = flat[valid]

            def accumulate(key: str, values: np.ndarray) -> None:
                sums[key] += np.bincount(flat, weights=values[valid], minlength=n_flat)

            accumulate("count", np.ones(total))
            accumulate("product", z[i] * z[j])
            accumulate("space", d_river)
            accumulate("basin", d_basin)
            accumulate("time", dt)
            accumulate("weight", np.sqrt(ratio))

        bins: List[CovarianceBin] = []
        for component_index, component in enumerate((RIVER_COMPONENT, BASIN_COMPONENT)):
            for s in range(n_space):
                for t in range(n_time):
                    k = (component_index * n_space + s) * n_time + t
                    count = int(sums["count"][k])
                    if count == 0:
                        mid_space = 0.5 * (space_edges[s] + space_edges[s + 1])
                        mid_time = 0.5 * (time_edges[t] + time_edges[t + 1])
                        bins.append(CovarianceBin(
                            component,
                            mid_space if component == RIVER_COMPONENT else 0.0,
                            0.0 if component == RIVER_COMPONENT else mid_space,
                            mid_time, 1.0, 0.0, 0,
                        ))
                        continue
                    bins.append(CovarianceBin(
                        component=component,
                        space_lag_km=float(sums["space"][k] / count),
                        basin_lag_km=float(sums["basin"][k] / count),
                        time_lag_days=float(sums["time"][k] / count),
                        weight=float(sums["weight"][k] / count),
                        mean_product=float(sums["product"][k] / count),
                        count=count,
                    ))

        stds = [obs.along_track_std_m for obs in residuals if obs.along_track_std_m is not None]
        empirical = EmpiricalCovariance(
            bins=bins,
            variance=float(np.mean(z * z)),
            n_residuals=n,
            space_edges_km=tuple(float(e) for e in space_edges),
            time_edges_days=tuple(float(e) for e in time_edges),
            noise_variance=float(np.median(np.square(stds))) if stds else None,
        )
        logger.info(
            f"Covariância empírica: {n} resíduos, {len(empirical.non_empty(RIVER_COMPONENT))} bins de rio, "
            f"{len(empirical.non_empty(BASIN_COMPONENT))} bins de bacia"
        )
        return empirical

    def fit_params(self, empirical: EmpiricalCovariance, initial: CovarianceParams) -> CovarianceFit:
        """
        Ajusta sigma2/alcances/tau aos bins e estima o nugget

        Args:
            empirical: covariância empírica
            initial: chute inicial (alcances e tau) e fatores de tributário

        Returns:
            Parâmetros ajustados e diagnóstico

        Raises:
            UnderdeterminedFitError: menos de 6 bins não vazios
        """
        bins = empirical.non_empty()
        if len(bins) < MIN_BINS:
            raise UnderdeterminedFitError(
                f"Ajuste sub-determinado: {len(bins)} bins não vazios (mínimo {MIN_BINS})"
            )
        n_river = len(empirical.non_empty(RIVER_COMPONENT))
        n_basin = len(empirical.non_empty(BASIN_COMPONENT))

        scale = max(float(np.max(np.abs([b.mean_product for b in bins]))), abs(empirical.variance))
        if scale <= 0:
            raise UnderdeterminedFitError("Covariância empírica identicamente nula")
        data = _BinArrays.from_bins(bins, scale)

        max_space = float(max(max(b.space_lag_km, b.basin_lag_km) for b in bins))
        max_space = max(max_space, empirical.space_edges_km[-1] if empirical.space_edges_km else 0.0, 1.0)
        max_time = max(float(max(b.time_lag_days for b in bins)),
                       empirical.time_edges_days[-1] if empirical.time_edges_days else 0.0, 1.0)
        lower = np.array([0.0, 1e-3, 0.0, 1e-3, 1e-3])
        upper = np.array([np.inf, _RANGE_BOUND_FACTOR * max_space, np.inf,
                          _RANGE_BOUND_FACTOR * max_space, _RANGE_BOUND_FACTOR * max_time])

        sill = initial.sill
        share_river = initial.sigma2_river / sill if sill > 0 else 0.5
        start = np.array([share_river, initial.rho_river, 1.0 - share_river, initial.rho_basin, initial.tau])

        fixed: List[int] = []
        notes: List[str] = []
        if n_river < MIN_COMPONENT_BINS:
            fixed += [0, 1]
            start[0] = initial.sigma2_river / scale
            notes.append("componente de rio sem bins: sigma2_river e rho_river mantidos")
        if n_basin < MIN_COMPONENT_BINS:
            fixed.append(3)
            notes.append("componente de bacia sem bins: rho_basin mantido")

        theta, result = self._solve(data, start, lower, upper, fixed)
        for variance_index, range_index, name in ((0, 1, "sigma2_river"), (2, 3, "sigma2_basin")):
            if variance_index not in fixed and theta[variance_index] <= _ZERO_VARIANCE:
                logger.info(f"{name} recortado em 0; reajustando sem o componente")
                notes.append(f"{name} recortado em 0")
                start = theta.copy()
                start[variance_index] = 0.0
                start[range_index] = np.clip(getattr(initial, _PARAM_NAMES[range_index]), lower[range_index],
                                             upper[range_index])
                fixed = sorted(set(fixed) | {variance_index, range_index})
                theta, result = self._solve(data, start, lower, upper, fixed)

        at_upper = tuple(
            _PARAM_NAMES[k] for k in (1, 3, 4)
            if k not in fixed and theta[k] >= upper[k] * (1.0 - _BOUND_RTOL)
        )
        converged = bool(result is None or result.status > 0) and not at_upper

        fitted = CovarianceParams(
            sigma2_river=float(theta[0] * scale),
            rho_river=float(theta[1]),
            sigma2_basin=float(theta[2] * scale),
            rho_basin=float(theta[3]),
            tau=float(theta[4]),
            nugget=initial.nugget,
            trib_factor_major=initial.trib_factor_major,
            trib_factor_minor=initial.trib_factor_minor,
        )
        if empirical.n_residuals > 0:
            nugget, floored = estimate_nugget(empirical, fitted.sill)
            if floored:
                logger.warning(f"Excesso no lag zero abaixo do piso; nugget fixado em {nugget:.4g}")
                notes.append("nugget no piso")
            fitted = fitted.with_updates(nugget=nugget)

        cost = float(result.cost) * scale * scale if result is not None else 0.0
        message = "; ".join(notes + ([result.message] if result is not None else []))
        if at_upper:
            logger.warning(f"Ajuste no limite superior: {', '.join(at_upper)}")
        if not converged:
            logger.warning(f"Ajuste de covariância não convergiu: {message}")
        logger.info(
            f"Parâmetros ajustados: sigma2_river={fitted.sigma2_river:.4g}, rho_river={fitted.rho_river:.4g}, "
            f"sigma2_basin={fitted.sigma2_basin:.4g}, rho_basin={fitted.rho_basin:.4g}, "
            f"tau={fitted.tau:.4g}, nugget={fitted.nugget:.4g}"
        )
        return CovarianceFit(
            params=fitted,
            converged=converged,
            at_upper_bound=at_upper,
            cost=cost,
            n_bins=len(bins),
            message=message,
        )

    def _solve(self, data: _BinArrays, start: np.ndarray, lower: np.ndarray, upper: np.ndarray,
               fixed: Sequence[int]) -> Tuple[np.ndarray, Optional[object]]:
        free = [k for k in range(len(start)) if k not in fixed]
        theta = np.clip(start.astype(float), lower, upper)
        if not free:
            return theta, None
        sqrt_count = np.sqrt(data.count)

        def residuals(x: np.ndarray) -> np.ndarray:
            full = theta.copy()
            full[free] = x
            return sqrt_count * (data.model(full) - data.value)

        lb, ub = lower[free], upper[free]
        span = np.where(np.isfinite(ub), ub - lb, 1.0)
        x0 = np.clip(theta[free], lb + 1e-6 * span, np.where(np.isfinite(ub), ub - 1e-6 * span, np.inf))
        result = least_squares(
            residuals, x0, bounds=(lb, ub), method="trf", x_scale="jac",
            ftol=1e-12, xtol=1e-12, gtol=1e-12, max_nfev=self.max_nfev,
        )
        theta[free] = result.x
        return theta, result
