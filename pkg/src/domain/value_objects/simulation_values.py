"""
Value Objects da simulação sintética (verdade de campo e missões)
"""

from dataclasses import dataclass, field
from datetime import date
from typing import Dict, Optional, Tuple

from .hydro_values import EventClass, NetworkLocation, OrbitClass


@dataclass(frozen=True)
class MeanProfile:
    """Perfil médio (topografia): nível = intercept + slope * distância à foz"""
    intercept_m: float = 0.0
    slope_m_per_km: float = 0.05

    def level_at(self, chainage_km: float) -> float:
        return self.intercept_m + self.slope_m_per_km * chainage_km


@dataclass(frozen=True)
class FloodEvent:
    """
    Pulso de cheia (ou seca) que se propaga para jusante sem deformação.

    O pulso é meia senoide de duração `duration_days` iniciando em
    `onset_doy` no ano `year`, deslocada pela distância à origem / celeridade.
    """
    year: int
    amplitude_m: float
    onset_doy: int
    duration_days: float
    origin: NetworkLocation
    celerity_km_per_day: float = 50.0
    kind: EventClass = EventClass.FLOOD
    attenuation_km: Optional[float] = None

    def __post_init__(self):
        if self.amplitude_m < 0:
            raise ValueError("Amplitude do evento deve ser >= 0")
        if self.celerity_km_per_day <= 0:
            raise ValueError("Celeridade deve ser > 0")
        if self.duration_days <= 0:
            raise ValueError("Duração deve ser > 0")
        if self.kind == EventClass.NORMAL:
            raise ValueError("Evento deve ser flood ou drought")
        if self.attenuation_km is not None and self.attenuation_km <= 0:
            raise ValueError("attenuation_km deve ser > 0")

    @property
    def sign(self) -> float:
        return -1.0 if self.kind == EventClass.DROUGHT else 1.0


@dataclass(frozen=True)
class TruthConfig:
    """Configuração do campo verdade de nível d'água"""
    default_profile: MeanProfile = field(default_factory=MeanProfile)
    edge_profiles: Dict[str, MeanProfile] = field(default_factory=dict)
    seasonal_amplitude_m: float = 3.0
    seasonal_peak_doy: int = 244
    events: Tuple[FloodEvent, ...] = ()
    outlier_rate: float = 0.0
    outlier_magnitude_m: float = 5.0
    outlier_std_factor: float = 20.0
    gauge_noise_std_m: float = 0.02
    attenuation_km: Optional[float] = None

    def __post_init__(self):
        if self.seasonal_amplitude_m < 0 or self.outlier_magnitude_m < 0:
            raise ValueError("Amplitudes devem ser >= 0")
        if not 0.0 <= self.outlier_rate <= 1.0:
            raise ValueError("outlier_rate deve estar entre 0 e 1")
        if self.gauge_noise_std_m < 0:
            raise ValueError("gauge_noise_std_m deve ser >= 0")

    def profile_for(self, edge_id: str) -> MeanProfile:
        return self.edge_profiles.get(edge_id, self.default_profile)


@dataclass(frozen=True)
class MissionConfig:
    """
    Configuração de amostragem de uma missão.

    Missões de repetição curta amostram estações virtuais fixas; missões de
    repetição longa repetem o mesmo padrão de cruzamentos a cada ciclo; missões
    sem repetição sorteiam cruzamentos novos a cada ciclo nominal de 365 dias.
    """
    name: str
    orbit_class: OrbitClass
    repeat_days: Optional[int]
    noise_std_m: float = 0.3
    start: Optional[date] = None
    end: Optional[date] = None
    vs_locations: Tuple[NetworkLocation, ...] = ()
    vs_spacing_km: Optional[float] = None
    crossings_per_cycle: int = 0
    phase_day: int = 0
    bias_m: float = 0.0
    quality_factor: float = 1.0

    def __post_init__(self):
        if not self.name:
            raise ValueError("Nome da missão é obrigatório")
        if self.repeat_days is not None and self.repeat_days <= 0:
            raise ValueError("repeat_days deve ser positivo ou None")
        if self.orbit_class != OrbitClass.NON_REPEAT and self.repeat_days is None:
            raise ValueError(f"Missão {self.name}: órbita {self.orbit_class.value} exige repeat_days")
        if self.orbit_class == OrbitClass.NON_REPEAT and self.repeat_days is not None:
            raise ValueError(f"Missão {self.name}: órbita sem repetição não aceita repeat_days")
        if self.noise_std_m < 0:
            raise ValueError("noise_std_m deve ser >= 0")
        if self.quality_factor < 1:
            raise ValueError("quality_factor deve ser >= 1")
        if self.crossings_per_cycle < 0:
            raise ValueError("crossings_per_cycle deve ser >= 0")
