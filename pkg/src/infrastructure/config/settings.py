"""
Configuração carregada de variáveis de ambiente (e de um arquivo .env)
"""

import logging
import os
from datetime import date
from functools import lru_cache
from typing import Dict, Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ...domain.exceptions import ConfigurationError
from ...domain.value_objects.hydro_values import NeighborhoodSpec

logger = logging.getLogger(__name__)

ENV_PREFIX = "RIVERKRIGE_"


class Settings(BaseModel):
    """Parâmetros padrão dos comandos; flags da CLI têm precedência"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    knot_spacing_km: float = Field(100.0, gt=0)
    max_river_km: float = Field(200.0, gt=0)
    max_basin_km: float = Field(200.0, gt=0)
    max_lag_days: float = Field(45.0, gt=0)
    max_obs: int = Field(300, gt=0)
    step_days: int = Field(5, gt=0)
    along_track_k: float = Field(3.0, gt=0)
    repeat_threshold_m: float = Field(3.0, gt=0)
    vicinity_km: float = Field(20.0, ge=0)
    vicinity_days: float = Field(10.0, ge=0)
    cell_km: float = Field(10.0, gt=0)
    cell_doy: int = Field(10, gt=0)
    flood_threshold: float = 0.5
    drought_threshold: float = -0.5
    season_start: str = "06-01"
    season_end: str = "11-30"
    era_start: Optional[date] = None
    era_end: Optional[date] = None
    max_workers: int = Field(1, gt=0)
    log_level: str = "INFO"

    @field_validator("season_start", "season_end")
    @classmethod
    def _month_day(cls, value: str) -> str:
        try:
            date.fromisoformat(f"2001-{value}")
        except ValueError:
            raise ValueError(f"esperado MM-DD, recebido {value!r}")
        return value

    @field_validator("log_level")
    @classmethod
    def _level(cls, value: str) -> str:
        value = value.upper()
        if value not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"nível de log desconhecido: {value}")
        return value

    @model_validator(mode="after")
    def _ranges(self) -> 'Settings':
        if self.drought_threshold > self.flood_threshold:
            raise ValueError("drought_threshold acima de flood_threshold")
        if (self.era_start is None) != (self.era_end is None):
            raise ValueError("era_start e era_end devem ser definidos juntos")
        if self.era_start is not None and self.era_end < self.era_start:
            raise ValueError("era_end anterior a era_start")
        return self

    @property
    def neighborhood(self) -> NeighborhoodSpec:
        return NeighborhoodSpec(self.max_river_km, self.max_basin_km, self.max_lag_days, self.max_obs)

    @property
    def season(self) -> Tuple[str, str]:
        return self.season_start, self.season_end

    @property
    def era(self) -> Optional[Tuple[date, date]]:
        if self.era_start is None:
            return None
        return self.era_start, self.era_end

    @classmethod
    def from_environment(cls, environ: Optional[Dict[str, str]] = None) -> 'Settings':
        """
        Lê RIVERKRIGE_<CAMPO> do ambiente

        Args:
            environ: mapeamento de variáveis (padrão: os.environ)

        Raises:
            ConfigurationError: valor inválido (nomeia a variável)
        """
        environ = os.environ if environ is None else environ
        values = {}
        for name in cls.model_fields:
            raw = environ.get(ENV_PREFIX + name.upper())
            if raw is not None and raw.strip() != "":
                values[name] = raw.strip()
        try:
            return cls.model_validate(values)
        except ValidationError as e:
            first = e.errors()[0]
            loc = first.get("loc", ())
            key = ENV_PREFIX + str(loc[0]).upper() if loc else None
            raise ConfigurationError(f"Configuração inválida em {key or 'ambiente'}: {first.get('msg', '')}", key)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Settings do processo (carrega .env uma vez)"""
    load_dotenv()
    settings = Settings.from_environment()
    logger.debug(f"Configuração carregada: {settings.model_dump()}")
    return settings
