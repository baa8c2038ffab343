"""
Triagem de outliers altimétricos: desvio ao longo do traço e comparação com
passagens de repetição anual / vizinhas
"""

import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from ...application.interfaces.services import IScreeningService
from ...domain.entities.network import RiverNetwork
from ...domain.entities.observation import Observation
from ...domain.value_objects.hydro_values import OrbitClass

logger = logging.getLogger(__name__)

_MAX_PASSES = 50


class AltimetryScreeningService(IScreeningService):
    """
    Regras de remoção de linhas; nenhuma regra altera alturas.

    As duas regras são iteradas até um ponto fixo, o que as torna idempotentes.
    """

    def __init__(self, threshold_m: float = 3.0, vicinity_km: float = 20.0, vicinity_days: float = 10.0):
        if threshold_m <= 0 or vicinity_km < 0 or vicinity_days < 0:
            raise ValueError("Limiares de triagem inválidos")
        self.threshold_m = threshold_m
        self.vicinity_km = vicinity_km
        self.vicinity_days = vicinity_days

    def screen_along_track(self, observations: Sequence[Observation], k_sigma: float = 3.0) -> List[Observation]:
        """
        Remove observações com desvio ao longo do traço acima de k vezes a
        mediana da missão

        Args:
            observations: observações
            k_sigma: multiplicador da mediana

        Returns:
            Observações mantidas, na ordem original
        """
        if k_sigma <= 0:
            raise ValueError("k_sigma deve ser > 0")
        kept = list(observations)
        for _ in range(_MAX_PASSES):
            if not kept:
                break
            frame = pd.DataFrame(
                {
                    "mission": [obs.mission for obs in kept],
                    "std": [np.nan if obs.along_track_std_m is None else obs.along_track_std_m for obs in kept],
                }
            )
            median = frame.groupby("mission")["std"].transform("median")
            flagged = (frame["std"] > k_sigma * median) & (median > 0)
            if not flagged.any():
                break
            kept = [obs for obs, bad in zip(kept, flagged.to_numpy()) if not bad]
        removed = len(observations) - len(kept)
        logger.info(f"Triagem ao longo do traço (k={k_sigma}): {removed} de {len(observations)} removidas")
        return kept

    def screen_annual_repeat(self, network: RiverNetwork, observations: Sequence[Observation]) -> List[Observation]:
        """
        Remove observações de repetição longa que desviam mais que o limiar da
        mediana do seu grupo de comparação

        O grupo é formado pelas passagens anterior e seguinte do mesmo traço e
        pelas observações conectadas por fluxo dentro da vizinhança espacial e
        temporal; a mediana inclui a própria observação. Sem grupo, a
        observação é mantida.
        """
        alive = np.ones(len(observations), dtype=bool)
        if not observations:
            return []
        days = np.array([obs.day_number for obs in observations], dtype=float)
        heights = np.array([obs.height_m for obs in observations], dtype=float)
        chainage = np.array([network.chainage(obs.location) for obs in observations], dtype=float)
        edge_lookup, connectivity = network.connectivity
        edge_index = np.array([edge_lookup[obs.location.edge_id] for obs in observations], dtype=np.intp)
        candidates = [i for i, obs in enumerate(observations) if obs.orbit_class == OrbitClass.LONG_REPEAT]
        tracks = self._track_passes(observations, days)

        order = np.argsort(days, kind="stable")
        sorted_days = days[order]

        for _ in range(len(candidates) + 1):
            deviation: Dict[int, float] = {}
            groups: Dict[int, List[int]] = {}
            for i in candidates:
                if not alive[i]:
                    continue
                lo = np.searchsorted(sorted_days, days[i] - self.vicinity_days, side="left")
                hi = np.searchsorted(sorted_days, days[i] + self.vicinity_days, side="right")
                window = order[lo:hi]
                window = window[(window != i) & alive[window]]
                near = window[
                    connectivity[edge_index[window], edge_index[i]]
                    & (np.abs(chainage[window] - chainage[i]) <= self.vicinity_km)
                ]
                group = set(near.tolist()) | set(self._adjacent_passes(tracks, observations[i], i, alive))
                if not group:
                    continue
                median = float(np.median(np.append(heights[sorted(group)], heights[i])))
                if abs(heights[i] - median) > self.threshold_m:
                    deviation[i] = abs(heights[i] - median)
                    groups[i] = sorted(group)
            if not deviation:
                break
            # sai só quem desvia ao menos tanto quanto os sinalizados do seu grupo
            flagged = [
                i for i, value in deviation.items()
                if all(value >= deviation.get(k, 0.0) for k in groups[i])
            ]
            alive[flagged] = False

        kept = [obs for obs, keep in zip(observations, alive) if keep]
        logger.info(
            f"Triagem de repetição anual (limiar {self.threshold_m} m): "
            f"{len(observations) - len(kept)} de {len(candidates)} candidatas removidas"
        )
        return kept

    @staticmethod
    def _track_passes(observations: Sequence[Observation], days: np.ndarray) -> Dict[Tuple[str, str, str], List[int]]:
        tracks: Dict[Tuple[str, str, str], List[int]] = {}
        for i, obs in enumerate(observations):
            if obs.orbit_class == OrbitClass.LONG_REPEAT:
                tracks.setdefault((obs.mission, obs.track_id, obs.location.edge_id), []).append(i)
        for members in tracks.values():
            members.sort(key=lambda k: (days[k], k))
        return tracks

    @staticmethod
    def _adjacent_passes(tracks: Dict[Tuple[str, str, str], List[int]], obs: Observation, i: int,
                         alive: np.ndarray) -> List[int]:
        """Passagens vivas imediatamente anterior e seguinte do mesmo traço"""
        members = [k for k in tracks[(obs.mission, obs.track_id, obs.location.edge_id)] if alive[k] or k == i]
        position = members.index(i)
        adjacent = []
        if position > 0:
            adjacent.append(members[position - 1])
        if position + 1 < len(members):
            adjacent.append(members[position + 1])
        return adjacent
