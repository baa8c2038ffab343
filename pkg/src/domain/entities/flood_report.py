from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..value_objects.hydro_values import EventClass

EVENT_KINDS = (EventClass.FLOOD, EventClass.DROUGHT)


@dataclass(frozen=True)
class FloodCell:
    """Índice de cheia de um par (local, ano) para uma fonte"""
    location: str
    year: int
    source: str
    index_m: Optional[float]
    event_class: Optional[EventClass]


@dataclass
class Contingency:
    """Tabela de contingência de um tipo de evento"""
    hits: int = 0
    misses: int = 0
    false_alarms: int = 0
    correct_negatives: int = 0

    def add(self, predicted: bool, observed: bool) -> None:
        if predicted and observed:
            self.hits += 1
        elif observed:
            self.misses += 1
        elif predicted:
            self.false_alarms += 1
        else:
            self.correct_negatives += 1

    def merge(self, other: 'Contingency') -> 'Contingency':
        return Contingency(
            self.hits + other.hits,
            self.misses + other.misses,
            self.false_alarms + other.false_alarms,
            self.correct_negatives + other.correct_negatives,
        )

    @property
    def total(self) -> int:
        return self.hits + self.misses + self.false_alarms + self.correct_negatives

    @property
    def pod(self) -> Optional[float]:
        """Probabilidade de detecção; None quando não há eventos observados"""
        denominator = self.hits + self.misses
        return self.hits / denominator if denominator else None

    @property
    def far(self) -> Optional[float]:
        """Razão de falsos alarmes; None quando não há eventos previstos"""
        denominator = self.hits + self.false_alarms
        return self.false_alarms / denominator if denominator else None

    def to_dict(self) -> Dict[str, object]:
        return {
            "hits": self.hits,
            "misses": self.misses,
            "false_alarms": self.false_alarms,
            "correct_negatives": self.correct_negatives,
            "pod": self.pod,
            "far": self.far,
        }


@dataclass(frozen=True)
class SeriesMetrics:
    location: str
    source: str
    rmse_m: float
    r2: Optional[float]
    nse: Optional[float]
    n_common: int


@dataclass
class FloodReport:
    """
    Relatório de eventos: índices por (local, ano, fonte), contingências por
    fonte e tipo de evento, e R² entre os índices da fonte e os da régua.
    """
    cells: List[FloodCell] = field(default_factory=list)
    contingency: Dict[str, Dict[EventClass, Contingency]] = field(default_factory=dict)
    station_contingency: Dict[str, Dict[str, Dict[EventClass, Contingency]]] = field(default_factory=dict)
    index_r2: Dict[str, Optional[float]] = field(default_factory=dict)
    metrics: List[SeriesMetrics] = field(default_factory=list)

    def cells_for(self, source: str) -> List[FloodCell]:
        return [c for c in self.cells if c.source == source]

    def summary(self) -> Dict[str, object]:
        sources = {}
        for source in sorted(self.contingency):
            sources[source] = {
                "events": {kind.value: table.to_dict() for kind, table in self.contingency[source].items()},
                "index_r2": self.index_r2.get(source),
                "stations": {
                    location: {kind.value: table.to_dict() for kind, table in tables.items()}
                    for location, tables in sorted(self.station_contingency.get(source, {}).items())
                },
            }
        return {"sources": sources}
