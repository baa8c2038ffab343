"""
Métricas de concordância entre séries altimétricas e réguas
(RMSE, R² de Pearson, eficiência de Nash-Sutcliffe)
"""

from typing import Optional, Tuple

import numpy as np
import pandas as pd

from ...domain.exceptions import InsufficientDataError

MIN_COMMON_EPOCHS = 3


def common_epochs(altimetry: pd.Series, gauge: pd.Series) -> Tuple[np.ndarray, np.ndarray]:
    """Valores das duas séries nas datas em que ambas têm dados"""
    joined = pd.concat([altimetry.rename("altimetry"), gauge.rename("gauge")], axis=1, join="inner").dropna()
    return joined["altimetry"].to_numpy(dtype=float), joined["gauge"].to_numpy(dtype=float)


def rmse(sim: np.ndarray, obs: np.ndarray) -> float:
    return float(np.sqrt(np.mean((np.asarray(obs, float) - np.asarray(sim, float)) ** 2)))


def r_squared(sim: np.ndarray, obs: np.ndarray) -> Optional[float]:
    """Quadrado do coeficiente de correlação de Pearson; None sem variância"""
    sim, obs = np.asarray(sim, float), np.asarray(obs, float)
    if len(sim) < 2 or np.ptp(sim) == 0 or np.ptp(obs) == 0:
        return None
    r = np.corrcoef(sim, obs)[0, 1]
    return float(r * r)


def nse(sim: np.ndarray, obs: np.ndarray) -> Optional[float]:
    """
    Eficiência de Nash-Sutcliffe

    1 para séries idênticas, 0 quando a série não é melhor que a média da
    régua. None quando a régua não tem variância.
    """
    sim, obs = np.asarray(sim, float), np.asarray(obs, float)
    denominator = np.sum((obs - np.mean(obs)) ** 2)
    if denominator == 0:
        return None
    return float(1.0 - np.sum((obs - sim) ** 2) / denominator)


def series_skill(altimetry: pd.Series, gauge: pd.Series) -> Tuple[float, Optional[float], Optional[float], int]:
    """
    RMSE, R² e NSE nas épocas comuns

    Raises:
        InsufficientDataError: menos de 3 épocas comuns
    """
    sim, obs = common_epochs(altimetry, gauge)
    if len(sim) < MIN_COMMON_EPOCHS:
        raise InsufficientDataError(
            f"Épocas comuns insuficientes: {len(sim)} (mínimo {MIN_COMMON_EPOCHS})"
        )
    return rmse(sim, obs), r_squared(sim, obs), nse(sim, obs), len(sim)
