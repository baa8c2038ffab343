"""
Alinhamento de datum entre missões por medianas em células de co-localização
"""

import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ...application.interfaces.services import IMissionAlignmentService
from ...domain.entities.observation import Observation

logger = logging.getLogger(__name__)

_YEAR_DAYS = 365
_CELL_KEYS = ["edge_id", "chainage_bin", "doy"]


class MissionAlignmentService(IMissionAlignmentService):
    """
    Células: mesmo trecho, faixa de `cell_km` de offset e janela circular de
    dia do ano de ± `cell_doy` dias em torno de cada dia observado pela missão.
    """

    def __init__(self, cell_km: float = 10.0, cell_doy: int = 10):
        if cell_km <= 0 or cell_doy <= 0:
            raise ValueError("Dimensões de célula devem ser positivas")
        self.cell_km = cell_km
        self.cell_doy = cell_doy

    def _frame(self, observations: Sequence[Observation]) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "mission": [obs.mission for obs in observations],
                "edge_id": [obs.location.edge_id for obs in observations],
                "chainage_bin": [math.floor(obs.location.offset_km / self.cell_km) for obs in observations],
                "doy": [obs.epoch.timetuple().tm_yday for obs in observations],
                "height_m": [obs.height_m for obs in observations],
            }
        )

    def _window_medians(self, anchors: pd.DataFrame, members: pd.DataFrame) -> pd.Series:
        """Mediana das alturas de `members` na janela circular de cada âncora"""
        pairs = anchors.merge(members[["edge_id", "chainage_bin", "doy", "height_m"]],
                              on=["edge_id", "chainage_bin"], suffixes=("", "_obs"))
        gap = (pairs["doy"] - pairs["doy_obs"]).abs()
        # dias do ano em anel: 31/12 e 01/01 estão a 1 dia
        gap = np.minimum(gap, _YEAR_DAYS - gap)
        pairs = pairs[gap <= self.cell_doy]
        return pairs.groupby(_CELL_KEYS)["height_m"].median()

    def _mission_differences(self, frame: pd.DataFrame, mission: str, reference_mission: str) -> pd.Series:
        own = frame[frame["mission"] == mission]
        reference = frame[frame["mission"] == reference_mission]
        anchors = own[_CELL_KEYS].drop_duplicates()
        own_medians = self._window_medians(anchors, own)
        reference_medians = self._window_medians(anchors, reference)
        common = own_medians.index.intersection(reference_medians.index)
        return own_medians.loc[common] - reference_medians.loc[common]

    def estimate_mission_offsets(self, observations: Sequence[Observation],
                                 reference_mission: str) -> Dict[str, Optional[float]]:
        """
        Offset de cada missão em relação à missão de referência

        Args:
            observations: observações de todas as missões
            reference_mission: missão de referência (offset 0)

        Returns:
            Offset em metros por missão; None para missões sem co-localização
        """
        missions = sorted({obs.mission for obs in observations})
        if reference_mission not in missions:
            raise ValueError(f"Missão de referência ausente: {reference_mission}")
        frame = self._frame(observations)

        offsets: Dict[str, Optional[float]] = {reference_mission: 0.0}
        for mission in missions:
            if mission == reference_mission:
                continue
            difference = self._mission_differences(frame, mission, reference_mission)
            if difference.empty:
                logger.warning(f"Missão {mission} sem células em comum com {reference_mission}; será excluída")
                offsets[mission] = None
                continue
            offsets[mission] = float(np.median(difference.to_numpy()))
            logger.info(f"Offset da missão {mission}: {offsets[mission]:+.3f} m ({len(difference)} células)")
        return offsets

    def apply_offsets(self, observations: Sequence[Observation],
                      offsets: Dict[str, Optional[float]]) -> List[Observation]:
        """Subtrai o offset de cada missão; missões sem offset são excluídas"""
        aligned: List[Observation] = []
        excluded: Dict[str, int] = {}
        for obs in observations:
            offset = offsets.get(obs.mission)
            if offset is None:
                excluded[obs.mission] = excluded.get(obs.mission, 0) + 1
                continue
            aligned.append(obs if offset == 0.0 else obs.with_height(obs.height_m - offset))
        for mission, count in sorted(excluded.items()):
            logger.warning(f"Missão {mission} excluída: {count} observações sem offset definido")
        return aligned
