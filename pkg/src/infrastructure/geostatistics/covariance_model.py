"""
Modelo de covariância espaço-temporal separável e não estacionário

C((a,t_a),(b,t_b)) = [C_flow(a,b) + C_basin(a,b)] * exp(-|t_a - t_b| / tau)

C_flow usa ponderação tail-up sqrt(W_montante / W_jusante) e só existe para
pares conectados por fluxo; C_basin relaciona os centróides das sub-bacias.
"""

import logging
import math
from dataclasses import dataclass
from datetime import date
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from ...application.interfaces.services import ICovarianceService
from ...domain.entities.network import RiverNetwork
from ...domain.entities.observation import Observation
from ...domain.value_objects.hydro_values import CovarianceParams, NetworkLocation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LocationArrays:
    """Localizações vetorizadas para montagem de matrizes"""
    edge_index: np.ndarray
    chainage: np.ndarray
    weight: np.ndarray
    basin_index: np.ndarray
    basin_xy: np.ndarray

    @classmethod
    def from_locations(cls, network: RiverNetwork, locations: Sequence[NetworkLocation]) -> 'LocationArrays':
        edge_lookup, _ = network.connectivity
        basin_lookup, centroids = network.basin_index
        n = len(locations)
        edge_index = np.empty(n, dtype=np.intp)
        chainage = np.empty(n, dtype=float)
        weight = np.empty(n, dtype=float)
        basin_index = np.empty(n, dtype=np.intp)
        for i, location in enumerate(locations):
            edge = network.edge(location.edge_id)
            edge_index[i] = edge_lookup[edge.id]
            chainage[i] = network.chainage(location)
            weight[i] = edge.catchment_weight
            basin_index[i] = basin_lookup[edge.sub_basin_id]
        return cls(edge_index, chainage, weight, basin_index, centroids[basin_index].reshape(n, 2))

    def __len__(self) -> int:
        return len(self.chainage)

    def subset(self, index: np.ndarray) -> 'LocationArrays':
        return LocationArrays(
            self.edge_index[index],
            self.chainage[index],
            self.weight[index],
            self.basin_index[index],
            self.basin_xy[index],
        )


def _tail_up_weight(chainage_a: float, weight_a: float, chainage_b: float, weight_b: float) -> float:
    w_up, w_down = (weight_a, weight_b) if chainage_a >= chainage_b else (weight_b, weight_a)
    if w_down <= 0:
        return 1.0 if w_up <= 0 else 0.0
    return math.sqrt(min(w_up / w_down, 1.0))


class SpatioTemporalCovariance(ICovarianceService):
    """
    Implementação do modelo de covariância.

    As versões escalares (spatial_cov, st_cov) seguem as consultas da rede
    ponto a ponto; as versões matriciais usam a matriz de conectividade de
    trechos pré-calculada.
    """

    def __init__(self, mission_factors: Optional[Dict[str, float]] = None):
        """
        Args:
            mission_factors: fator de qualidade por missão aplicado à diagonal
                de Sigma_alti (padrão 1 para todas)
        """
        self.mission_factors = dict(mission_factors or {})
        for mission, factor in self.mission_factors.items():
            if factor < 1:
                raise ValueError(f"Fator da missão {mission} deve ser >= 1")

    def temporal_cov(self, dt_days: float, params: CovarianceParams) -> float:
        return math.exp(-abs(dt_days) / params.tau)

    def spatial_cov(self, network: RiverNetwork, a: NetworkLocation, b: NetworkLocation,
                    params: CovarianceParams) -> float:
        flow = 0.0
        d_river = network.river_distance(a, b)
        if d_river is not None:
            w = _tail_up_weight(
                network.chainage(a), network.catchment_weight(a),
                network.chainage(b), network.catchment_weight(b),
            )
            flow = params.sigma2_river * w * math.exp(-d_river / params.rho_river)
        d_basin = network.basin_distance(a, b)
        basin = params.sigma2_basin * math.exp(-d_basin / params.rho_basin)
        return flow + basin

    def st_cov(self, network: RiverNetwork, a: Tuple[NetworkLocation, date], b: Tuple[NetworkLocation, date],
               params: CovarianceParams) -> float:
        (loc_a, t_a), (loc_b, t_b) = a, b
        value = self.spatial_cov(network, loc_a, loc_b, params) * self.temporal_cov((t_a - t_b).days, params)
        if loc_a == loc_b and t_a == t_b:
            value += params.nugget
        return value

    # Versões matriciais

    def spatial_matrix(self, network: RiverNetwork, A: LocationArrays, B: LocationArrays,
                       params: CovarianceParams) -> np.ndarray:
        _, connectivity = network.connectivity
        connected = connectivity[np.ix_(A.edge_index, B.edge_index)]
        d_river = np.abs(A.chainage[:, None] - B.chainage[None, :])

        a_upstream = A.chainage[:, None] >= B.chainage[None, :]
        w_up = np.where(a_upstream, A.weight[:, None], B.weight[None, :])
        w_down = np.where(a_upstream, B.weight[None, :], A.weight[:, None])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(w_down > 0, np.minimum(w_up / w_down, 1.0), np.where(w_up > 0, 0.0, 1.0))
        flow = np.where(connected, params.sigma2_river * np.sqrt(ratio) * np.exp(-d_river / params.rho_river), 0.0)

        same_basin = A.basin_index[:, None] == B.basin_index[None, :]
        d_basin = np.where(same_basin, 0.0, cdist(A.basin_xy, B.basin_xy))
        basin = params.sigma2_basin * np.exp(-d_basin / params.rho_basin)
        return flow + basin

    def temporal_matrix(self, t_a: np.ndarray, t_b: np.ndarray, params: CovarianceParams) -> np.ndarray:
        return np.exp(-np.abs(np.asarray(t_a, dtype=float)[:, None] - np.asarray(t_b, dtype=float)[None, :]) / params.tau)

    def process_matrix(self, network: RiverNetwork, A: LocationArrays, t_a: np.ndarray, B: LocationArrays,
                       t_b: np.ndarray, params: CovarianceParams) -> np.ndarray:
        """Covariância do processo (sem nugget) entre dois conjuntos de pontos"""
        return self.spatial_matrix(network, A, B, params) * self.temporal_matrix(t_a, t_b, params)

    def error_factors(self, network: RiverNetwork, observations: Sequence[Observation],
                      params: CovarianceParams) -> np.ndarray:
        """Fator multiplicativo do nugget por observação (tributário x qualidade x missão)"""
        return np.array(
            [
                params.tributary_factor(network.edge(obs.location.edge_id).trib_class)
                * obs.quality_factor
                * self.mission_factors.get(obs.mission, 1.0)
                for obs in observations
            ],
            dtype=float,
        )

    def build_matrices(self, network: RiverNetwork, observations: Sequence[Observation],
                       params: CovarianceParams) -> Tuple[np.ndarray, np.ndarray]:
        """
        Monta Sigma_U (processo) e Sigma_alti (erro de observação, diagonal)

        Args:
            network: rede fluvial
            observations: observações já mascaradas e triadas
            params: parâmetros do modelo

        Returns:
            (Sigma_U, Sigma_alti)
        """
        arrays = LocationArrays.from_locations(network, [obs.location for obs in observations])
        days = np.array([obs.day_number for obs in observations], dtype=float)
        sigma_u = self.process_matrix(network, arrays, days, arrays, days, params)
        sigma_alti = np.diag(params.nugget * self.error_factors(network, observations, params))
        return sigma_u, sigma_alti
