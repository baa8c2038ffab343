from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..value_objects.hydro_values import CovarianceParams

RIVER_COMPONENT = "river"
BASIN_COMPONENT = "basin"


@dataclass(frozen=True)
class CovarianceBin:
    """
    Bin (lag espacial, lag temporal) da covariância empírica.

    Bins do componente "river" agrupam pares conectados por fluxo pela
    distância ao longo do rio; bins "basin" agrupam pares não conectados pela
    distância entre sub-bacias. Os lags guardados são médias dos pares do bin.
    """
    component: str
    space_lag_km: float
    basin_lag_km: float
    time_lag_days: float
    weight: float
    mean_product: float
    count: int


@dataclass
class EmpiricalCovariance:
    bins: List[CovarianceBin] = field(default_factory=list)
    variance: float = 0.0
    n_residuals: int = 0
    space_edges_km: Tuple[float, ...] = ()
    time_edges_days: Tuple[float, ...] = ()
    noise_variance: Optional[float] = None

    def non_empty(self, component: str | None = None) -> List[CovarianceBin]:
        return [b for b in self.bins if b.count > 0 and (component is None or b.component == component)]

    def scaled(self, factor: float) -> 'EmpiricalCovariance':
        """Cópia com todos os valores multiplicados por `factor`"""
        return EmpiricalCovariance(
            bins=[
                CovarianceBin(b.component, b.space_lag_km, b.basin_lag_km, b.time_lag_days, b.weight,
                              b.mean_product * factor, b.count)
                for b in self.bins
            ],
            variance=self.variance * factor,
            n_residuals=self.n_residuals,
            space_edges_km=self.space_edges_km,
            time_edges_days=self.time_edges_days,
            noise_variance=None if self.noise_variance is None else self.noise_variance * factor,
        )


@dataclass(frozen=True)
class CovarianceFit:
    """Parâmetros ajustados e diagnóstico do ajuste"""
    params: CovarianceParams
    converged: bool
    at_upper_bound: Tuple[str, ...] = ()
    cost: float = 0.0
    n_bins: int = 0
    message: str = ""

    def report(self) -> Dict[str, object]:
        return {
            "converged": self.converged,
            "at_upper_bound": list(self.at_upper_bound),
            "cost": self.cost,
            "n_bins": self.n_bins,
            "message": self.message,
        }
