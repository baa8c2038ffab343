"""
Documentos JSON (parâmetros de covariância, relatório de ajuste, base de
tendência) validados com Pydantic
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Type, TypeVar

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ...application.interfaces.repositories import IDocumentRepository
from ...domain.entities.covariance import CovarianceFit
from ...domain.entities.trend_basis import TrendBasis
from ...domain.exceptions import ConfigurationError
from ...domain.value_objects.hydro_values import CovarianceParams

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)


class StrictModel(BaseModel):
    """Base dos documentos: chaves desconhecidas são rejeitadas"""
    model_config = ConfigDict(extra="forbid")


class CovarianceParamsDocument(StrictModel):
    sigma2_river: float = Field(..., ge=0)
    rho_river: float = Field(..., gt=0)
    sigma2_basin: float = Field(..., ge=0)
    rho_basin: float = Field(..., gt=0)
    tau: float = Field(..., gt=0)
    nugget: float = Field(..., ge=0)
    trib_factor_major: float = Field(2.0, ge=1)
    trib_factor_minor: float = Field(4.0, ge=1)

    @classmethod
    def from_domain(cls, params: CovarianceParams) -> 'CovarianceParamsDocument':
        return cls(**{name: getattr(params, name) for name in cls.model_fields})

    def to_domain(self) -> CovarianceParams:
        return CovarianceParams(**self.model_dump())


class FitReportDocument(StrictModel):
    params: CovarianceParamsDocument
    converged: bool
    at_upper_bound: List[str]
    cost: float
    n_bins: int
    message: str


class RiverBasisDocument(StrictModel):
    river_id: str
    knots: List[float]
    count: int
    degree: int


class BasisDocument(StrictModel):
    spacing_km: float
    size: int
    rivers: List[RiverBasisDocument]


def configuration_error(error: ValidationError, source: str) -> ConfigurationError:
    """Converte o primeiro erro de validação numa ConfigurationError que nomeia a chave"""
    first = error.errors()[0]
    key = ".".join(str(part) for part in first.get("loc", ())) or None
    kind = first.get("type", "")
    if kind == "missing":
        message = f"{source}: chave obrigatória ausente: {key}"
    elif kind == "extra_forbidden":
        message = f"{source}: chave desconhecida: {key}"
    else:
        message = f"{source}: valor inválido em {key}: {first.get('msg', '')}"
    return ConfigurationError(message, key)


def read_document(path: Path, model: Type[M]) -> M:
    """
    Lê e valida um documento JSON

    Raises:
        ConfigurationError: arquivo ausente, JSON inválido ou documento fora do esquema
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigurationError(f"Arquivo não encontrado: {path}", str(path))
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{path}: JSON inválido ({e})", str(path))
    try:
        return model.model_validate(raw)
    except ValidationError as e:
        raise configuration_error(e, str(path)) from e


def write_json(payload: Dict[str, Any], path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


class JsonDocumentRepository(IDocumentRepository):
    """Repositório de documentos JSON em disco"""

    def load_params(self, path: Path) -> CovarianceParams:
        document = read_document(path, CovarianceParamsDocument)
        try:
            return document.to_domain()
        except ValueError as e:
            raise ConfigurationError(f"{path}: {e}")

    def save_params(self, params: CovarianceParams, path: Path) -> None:
        write_json(CovarianceParamsDocument.from_domain(params).model_dump(), path)
        logger.info(f"Parâmetros gravados em {path}")

    def save_fit_report(self, fit: CovarianceFit, path: Path) -> None:
        document = FitReportDocument(
            params=CovarianceParamsDocument.from_domain(fit.params),
            **fit.report(),
        )
        write_json(document.model_dump(), path)
        logger.info(f"Relatório de ajuste gravado em {path}")

    def save_basis(self, basis: TrendBasis, path: Path) -> None:
        document = BasisDocument(
            spacing_km=basis.spacing_km,
            size=basis.size,
            rivers=[RiverBasisDocument(**entry) for entry in basis.summary()],
        )
        write_json(document.model_dump(), path)
        logger.info(f"Base de tendência gravada em {path}")

