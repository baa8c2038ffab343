from dataclasses import dataclass
from typing import Dict, List, Tuple

SPLINE_DEGREE = 3
SHARED_RIVER = "*"


@dataclass(frozen=True)
class RiverBasis:
    """
    Base B-spline de um rio sobre a distância à foz.

    Um rio mais curto que o espaçamento de nós recebe uma única função
    constante (knots vazio, degree 0).
    """
    river_id: str
    knots: Tuple[float, ...]
    degree: int
    count: int
    offset: int
    lower_km: float
    upper_km: float

    def __post_init__(self):
        if any(b < a for a, b in zip(self.knots, self.knots[1:])):
            raise ValueError(f"Nós não crescentes no rio {self.river_id}")
        if self.count < 1:
            raise ValueError(f"Rio {self.river_id} sem funções de base")

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    @property
    def columns(self) -> range:
        return range(self.offset, self.offset + self.count)


@dataclass(frozen=True)
class TrendBasis:
    """Conjunto global ordenado das funções f_j, bloco a bloco por rio"""
    rivers: Tuple[RiverBasis, ...]
    spacing_km: float

    @property
    def size(self) -> int:
        return sum(r.count for r in self.rivers)

    @classmethod
    def constant(cls) -> 'TrendBasis':
        """Média constante única para toda a rede (krigagem ordinária)"""
        return cls((RiverBasis(SHARED_RIVER, (), 0, 1, 0, 0.0, 0.0),), float("inf"))

    def for_river(self, river_id: str) -> RiverBasis:
        for river in self.rivers:
            if river.river_id == river_id:
                return river
        if len(self.rivers) == 1 and self.rivers[0].river_id == SHARED_RIVER:
            return self.rivers[0]
        raise KeyError(f"Rio sem base de tendência: {river_id}")

    def summary(self) -> List[Dict[str, object]]:
        return [
            {"river_id": r.river_id, "knots": list(r.knots), "count": r.count, "degree": r.degree}
            for r in self.rivers
        ]
