from dataclasses import dataclass, field, replace
from datetime import date
from typing import List, Optional, Tuple
import math

import pandas as pd

from ..value_objects.hydro_values import NetworkLocation, OrbitClass


@dataclass(frozen=True)
class Observation:
    """Uma medição altimétrica de nível d'água já retracked"""
    location: NetworkLocation
    epoch: date
    height_m: float
    mission: str
    orbit_class: OrbitClass
    track_id: str
    along_track_std_m: Optional[float] = None
    quality_factor: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.height_m):
            raise ValueError(f"Altura não finita: {self.height_m}")
        if not math.isfinite(self.quality_factor) or self.quality_factor < 1:
            raise ValueError(f"quality_factor deve ser >= 1 (recebido {self.quality_factor})")
        if self.along_track_std_m is not None and (
            not math.isfinite(self.along_track_std_m) or self.along_track_std_m < 0
        ):
            raise ValueError(f"Desvio ao longo do traço inválido: {self.along_track_std_m}")
        if not self.mission:
            raise ValueError("Missão é obrigatória")

    @property
    def day_number(self) -> int:
        return self.epoch.toordinal()

    def with_height(self, height_m: float) -> 'Observation':
        return replace(self, height_m=height_m)

    def with_mission(self, mission: str) -> 'Observation':
        return replace(self, mission=mission)


@dataclass(frozen=True)
class RowRejection:
    """Linha rejeitada na leitura de um arquivo"""
    line: int
    reason: str


@dataclass
class ObservationLoadResult:
    observations: List[Observation] = field(default_factory=list)
    rejections: List[RowRejection] = field(default_factory=list)

    @property
    def rejected_count(self) -> int:
        return len(self.rejections)


@dataclass(frozen=True)
class GaugeSeries:
    """Série diária de uma régua linimétrica"""
    gauge_id: str
    location: NetworkLocation
    epochs: Tuple[date, ...]
    heights_m: Tuple[float, ...]

    def __post_init__(self):
        if len(self.epochs) != len(self.heights_m):
            raise ValueError(f"Régua {self.gauge_id}: datas e alturas com tamanhos diferentes")
        for previous, current in zip(self.epochs, self.epochs[1:]):
            if current <= previous:
                raise ValueError(f"Régua {self.gauge_id}: datas não estritamente crescentes em {current}")

    def to_series(self) -> pd.Series:
        index = pd.DatetimeIndex(pd.to_datetime(list(self.epochs)), name="date")
        return pd.Series(list(self.heights_m), index=index, dtype=float, name=self.gauge_id)


@dataclass(frozen=True)
class PredictionTarget:
    """Ponto de interpolação nomeado"""
    target_id: str
    location: NetworkLocation
