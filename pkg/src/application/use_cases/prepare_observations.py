"""
Use Case de preparação das observações: leitura, mascaramento de
barragens, triagem, alinhamento entre missões e filtro de cenário
"""

import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from ...domain.entities.network import RiverNetwork
from ...domain.entities.observation import Observation
from ...domain.value_objects.hydro_values import Scenario
from ..interfaces.repositories import IRiverDataRepository
from ..interfaces.services import IMissionAlignmentService, IScreeningService

logger = logging.getLogger(__name__)


@dataclass
class PreparedObservations:
    observations: List[Observation]
    loaded: int = 0
    rejected_rows: int = 0
    removed_by_dams: int = 0
    removed_along_track: int = 0
    removed_annual_repeat: int = 0
    removed_by_scenario: int = 0
    reference_mission: Optional[str] = None
    offsets: Dict[str, Optional[float]] = field(default_factory=dict)
    processing_time_ms: int = 0


def default_reference_mission(observations: Sequence[Observation]) -> str:
    """Missão com mais observações (empate: ordem alfabética)"""
    counts = Counter(obs.mission for obs in observations)
    return min(counts, key=lambda mission: (-counts[mission], mission))


def filter_scenario(network: RiverNetwork, observations: Sequence[Observation],
                    scenario: Scenario) -> List[Observation]:
    """Mantém as observações cujo trecho pertence a uma classe do cenário"""
    allowed = scenario.allowed_classes()
    return [obs for obs in observations if network.edges[obs.location.edge_id].trib_class in allowed]


class PrepareObservationsUseCase:
    """
    Use Case que transforma observations.csv no conjunto pronto para
    ajuste e krigagem
    """

    def __init__(self, repository: IRiverDataRepository, screening: IScreeningService,
                 alignment: IMissionAlignmentService):
        self.repository = repository
        self.screening = screening
        self.alignment = alignment

    def execute(
        self,
        network: RiverNetwork,
        observations_path: Path,
        scenario: Scenario = Scenario.S_I,
        k_sigma: float = 3.0,
        reference_mission: Optional[str] = None,
    ) -> PreparedObservations:
        """
        Executa a preparação

        Args:
            network: rede fluvial
            observations_path: arquivo de observações
            scenario: cenário de seleção por classe de tributário
            k_sigma: fator da triagem ao longo do traço
            reference_mission: missão de referência do datum (padrão: a mais amostrada)

        Returns:
            Observações preparadas e contagens de cada etapa
        """
        start_time = time.time()
        loaded = self.repository.load_observations(observations_path, network)
        result = PreparedObservations(
            observations=[],
            loaded=len(loaded.observations),
            rejected_rows=loaded.rejected_count,
        )

        observations = network.mask_upstream_of_dams(loaded.observations)
        result.removed_by_dams = result.loaded - len(observations)

        screened = self.screening.screen_along_track(observations, k_sigma)
        result.removed_along_track = len(observations) - len(screened)
        observations = self.screening.screen_annual_repeat(network, screened)
        result.removed_annual_repeat = len(screened) - len(observations)

        if observations:
            reference = reference_mission or default_reference_mission(observations)
            result.reference_mission = reference
            result.offsets = self.alignment.estimate_mission_offsets(observations, reference)
            observations = self.alignment.apply_offsets(observations, result.offsets)

        selected = filter_scenario(network, observations, scenario)
        result.removed_by_scenario = len(observations) - len(selected)
        result.observations = selected
        result.processing_time_ms = int((time.time() - start_time) * 1000)

        logger.info(
            f"Observações preparadas ({scenario.value}): {len(selected)} de {result.loaded} "
            f"(barragens -{result.removed_by_dams}, ao longo do traço -{result.removed_along_track}, "
            f"repetição anual -{result.removed_annual_repeat}, cenário -{result.removed_by_scenario})"
        )
        return result
