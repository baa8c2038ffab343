"""
Base de tendência da krigagem universal: B-splines cúbicas por rio sobre a
distância à foz, sem acoplamento nas confluências
"""

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np
from scipy.interpolate import BSpline

from ...application.interfaces.services import ITrendService
from ...domain.entities.network import RiverNetwork
from ...domain.entities.observation import Observation
from ...domain.entities.trend_basis import SPLINE_DEGREE, RiverBasis, TrendBasis
from ...domain.value_objects.hydro_values import NetworkLocation

logger = logging.getLogger(__name__)


def clamped_uniform_knots(lower: float, upper: float, n_spans: int, degree: int = SPLINE_DEGREE) -> Tuple[float, ...]:
    """Vetor de nós uniforme com extremidades de multiplicidade degree+1"""
    interior = [lower + (upper - lower) * i / n_spans for i in range(1, n_spans)]
    return tuple([lower] * (degree + 1) + interior + [upper] * (degree + 1))


class BSplineTrendService(ITrendService):
    """
    Serviço de base B-spline.

    A avaliação usa `BSpline.design_matrix` do scipy; a soma das funções de um
    rio é 1 em qualquer ponto do seu intervalo de distância à foz.
    """

    def build_basis(self, network: RiverNetwork, knot_spacing_km: float) -> TrendBasis:
        """
        Constrói uma base por rio

        Args:
            network: rede fluvial
            knot_spacing_km: espaçamento nominal dos nós

        Returns:
            Base global ordenada por river_id
        """
        if not knot_spacing_km > 0:
            raise ValueError(f"Espaçamento de nós deve ser > 0 (recebido {knot_spacing_km})")

        rivers: List[RiverBasis] = []
        offset = 0
        for river_id in network.river_ids:
            lower, upper = network.river_chainage_range(river_id)
            length = upper - lower
            if length < knot_spacing_km:
                logger.info(f"Rio {river_id} ({length:.1f} km) mais curto que o espaçamento: base constante")
                river = RiverBasis(river_id, (), 0, 1, offset, lower, upper)
            else:
                n_spans = max(1, int(math.floor(length / knot_spacing_km + 0.5)))
                knots = clamped_uniform_knots(lower, upper, n_spans)
                river = RiverBasis(river_id, knots, SPLINE_DEGREE, n_spans + SPLINE_DEGREE, offset, lower, upper)
            rivers.append(river)
            offset += river.count

        basis = TrendBasis(tuple(rivers), float(knot_spacing_km))
        logger.info(f"Base de tendência: {basis.size} funções em {len(rivers)} rios")
        return basis

    def basis_matrix(self, network: RiverNetwork, basis: TrendBasis,
                     locations: Sequence[NetworkLocation]) -> np.ndarray:
        """Avalia todas as funções em vários pontos (n x P)"""
        matrix = np.zeros((len(locations), basis.size))
        by_river: dict = {}
        for row, location in enumerate(locations):
            river_id = network.edge(location.edge_id).river_id
            by_river.setdefault(river_id, []).append((row, network.chainage(location)))

        for river_id, items in by_river.items():
            river = basis.for_river(river_id)
            rows = np.array([r for r, _ in items], dtype=np.intp)
            if river.is_constant:
                matrix[rows, river.offset] = 1.0
                continue
            x = np.clip(np.array([c for _, c in items], dtype=float), river.lower_km, river.upper_km)
            values = BSpline.design_matrix(x, np.asarray(river.knots), river.degree).toarray()
            matrix[np.ix_(rows, np.asarray(river.columns))] = values
        return matrix

    def eval_basis(self, network: RiverNetwork, basis: TrendBasis, location: NetworkLocation) -> np.ndarray:
        return self.basis_matrix(network, basis, [location])[0]

    def design_matrices(self, network: RiverNetwork, basis: TrendBasis, observations: Sequence[Observation],
                        target: NetworkLocation) -> Tuple[np.ndarray, np.ndarray]:
        """
        Matrizes de projeto F (observações x funções) e f (alvo)
        """
        F = self.basis_matrix(network, basis, [obs.location for obs in observations])
        f = self.eval_basis(network, basis, target)
        return F, f
