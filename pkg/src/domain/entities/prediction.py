from dataclasses import dataclass, field
from datetime import date
from typing import List, Optional, Tuple
import math

import numpy as np
import pandas as pd

from ..value_objects.hydro_values import NetworkLocation, SeriesFlag

SERIES_COLUMNS = ["date", "height_m", "sigma_m", "n_obs", "flag"]


@dataclass
class KrigingPrediction:
    """
    Resultado de um sistema de krigagem universal num ponto e época.

    Uma época sem dados na vizinhança é um marcador explícito (height_m None),
    nunca um valor fabricado.
    """
    epoch: date
    height_m: Optional[float]
    variance_m2: Optional[float]
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    n_obs: int = 0
    condition: float = float("nan")
    flag: SeriesFlag = SeriesFlag.OK
    dropped_columns: Tuple[int, ...] = ()

    @classmethod
    def no_data(cls, epoch: date, n_obs: int = 0) -> 'KrigingPrediction':
        return cls(epoch=epoch, height_m=None, variance_m2=None, n_obs=n_obs, flag=SeriesFlag.NODATA)

    @property
    def has_data(self) -> bool:
        return self.flag != SeriesFlag.NODATA

    @property
    def sigma_m(self) -> Optional[float]:
        if self.variance_m2 is None:
            return None
        return math.sqrt(max(self.variance_m2, 0.0))


@dataclass
class PredictedSeries:
    """Série temporal interpolada num alvo"""
    target_id: str
    location: NetworkLocation
    predictions: List[KrigingPrediction] = field(default_factory=list)

    def add(self, prediction: KrigingPrediction) -> None:
        self.predictions.append(prediction)

    @property
    def epochs(self) -> List[date]:
        return [p.epoch for p in self.predictions]

    def count_flag(self, flag: SeriesFlag) -> int:
        return sum(1 for p in self.predictions if p.flag == flag)

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "date": p.epoch.isoformat(),
                "height_m": p.height_m,
                "sigma_m": p.sigma_m,
                "n_obs": p.n_obs,
                "flag": p.flag.value,
            }
            for p in self.predictions
        ]
        return pd.DataFrame(rows, columns=SERIES_COLUMNS)

    def heights(self) -> pd.Series:
        """Alturas indexadas por data; épocas sem dados como NaN"""
        index = pd.DatetimeIndex(pd.to_datetime([p.epoch for p in self.predictions]), name="date")
        values = [np.nan if p.height_m is None else p.height_m for p in self.predictions]
        return pd.Series(values, index=index, dtype=float, name=self.target_id)
