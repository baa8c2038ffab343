"""
Value Objects - Objetos de valor imutáveis da rede fluvial e do modelo de covariância
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import FrozenSet


class NodeKind(Enum):
    """Tipos de nó da rede"""
    SOURCE = "source"
    CONFLUENCE = "confluence"
    MOUTH = "mouth"
    DAM = "dam"
    GAUGE_SITE = "gauge-site"

    @classmethod
    def from_text(cls, text: str) -> 'NodeKind':
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"Tipo de nó desconhecido: {text!r}")


class TributaryClass(Enum):
    """Classe hidrológica de um trecho"""
    MAIN_STEM = "main-stem"
    MAJOR = "major-tributary"
    MINOR = "minor-tributary"

    @classmethod
    def from_text(cls, text: str) -> 'TributaryClass':
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"Classe de tributário desconhecida: {text!r}")


class OrbitClass(Enum):
    """Classe de órbita da missão altimétrica"""
    SHORT_REPEAT = "short-repeat"
    LONG_REPEAT = "long-repeat"
    NON_REPEAT = "non-repeat"

    @classmethod
    def from_text(cls, text: str) -> 'OrbitClass':
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"Classe de órbita desconhecida: {text!r}")


class EventClass(Enum):
    FLOOD = "flood"
    DROUGHT = "drought"
    NORMAL = "normal"


class SeriesFlag(Enum):
    OK = "ok"
    NODATA = "nodata"
    CLIPPED_VARIANCE = "clipped-variance"


class Scenario(Enum):
    """Cenários de seleção de dados por classe de tributário"""
    S_I = "S-I"
    S_II = "S-II"
    S_III = "S-III"

    def allowed_classes(self) -> FrozenSet[TributaryClass]:
        """Classes de tributário mantidas pelo cenário"""
        if self == Scenario.S_II:
            return frozenset({TributaryClass.MAIN_STEM})
        if self == Scenario.S_III:
            return frozenset({TributaryClass.MAIN_STEM, TributaryClass.MAJOR})
        return frozenset(TributaryClass)


@dataclass(frozen=True)
class NetworkLocation:
    """Posição na rede: trecho + distância a partir do nó de montante (km)"""
    edge_id: str
    offset_km: float

    def __post_init__(self):
        if not self.edge_id:
            raise ValueError("edge_id não pode ser vazio")
        if not math.isfinite(self.offset_km) or self.offset_km < 0:
            raise ValueError(f"Offset inválido: {self.offset_km}")


@dataclass(frozen=True)
class CovarianceParams:
    """
    Parâmetros da covariância espaço-temporal separável.

    Variâncias em m², alcances em km, tau em dias. Os fatores de tributário
    inflacionam o erro de observação de trechos não principais.
    """
    sigma2_river: float = 1.0
    rho_river: float = 150.0
    sigma2_basin: float = 0.25
    rho_basin: float = 200.0
    tau: float = 30.0
    nugget: float = 0.09
    trib_factor_major: float = 2.0
    trib_factor_minor: float = 4.0

    def __post_init__(self):
        for name in ("sigma2_river", "sigma2_basin", "nugget"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} deve ser >= 0 (recebido {value})")
        for name in ("rho_river", "rho_basin", "tau"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} deve ser > 0 (recebido {value})")
        for name in ("trib_factor_major", "trib_factor_minor"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 1:
                raise ValueError(f"{name} deve ser >= 1 (recebido {value})")

    @property
    def sill(self) -> float:
        """Variância do processo no lag zero (sem nugget)"""
        return self.sigma2_river + self.sigma2_basin

    def tributary_factor(self, trib_class: TributaryClass) -> float:
        if trib_class == TributaryClass.MAJOR:
            return self.trib_factor_major
        if trib_class == TributaryClass.MINOR:
            return self.trib_factor_minor
        return 1.0

    def with_updates(self, **changes) -> 'CovarianceParams':
        return replace(self, **changes)


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Vizinhança local usada em cada sistema de krigagem"""
    max_river_km: float = 200.0
    max_basin_km: float = 200.0
    max_lag_days: float = 45.0
    max_count: int = 300

    def __post_init__(self):
        if min(self.max_river_km, self.max_basin_km, self.max_lag_days) <= 0 or self.max_count <= 0:
            raise ValueError("Todos os limites da vizinhança devem ser positivos")
