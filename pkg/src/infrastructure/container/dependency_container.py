import logging
from typing import Optional, Tuple

from ..analysis.flood_analysis import FloodAnalysisService
from ..config.settings import Settings, get_settings
from ..geostatistics.covariance_fitting import CovarianceFittingService
from ..geostatistics.covariance_model import SpatioTemporalCovariance
from ..geostatistics.trend_basis import BSplineTrendService
from ..geostatistics.universal_kriging import UniversalKrigingService
from ..ingest.altimetry_screening import AltimetryScreeningService
from ..ingest.mission_alignment import MissionAlignmentService
from ..persistence.csv_repository import CsvRiverDataRepository
from ..persistence.json_documents import JsonDocumentRepository
from ..simulation.synthetic_generator import SyntheticGenerator
from ...application.interfaces.repositories import IDocumentRepository, IRiverDataRepository
from ...application.use_cases.fit_covariance import FitCovarianceUseCase
from ...application.use_cases.predict_series import PredictSeriesUseCase
from ...application.use_cases.prepare_observations import PrepareObservationsUseCase
from ...application.use_cases.simulate_scenario import SimulateScenarioUseCase
from ...application.use_cases.validate_series import ValidateSeriesUseCase

logger = logging.getLogger(__name__)


class DependencyContainer:
    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self._repository: Optional[IRiverDataRepository] = None
        self._documents: Optional[IDocumentRepository] = None
        self._covariance: Optional[SpatioTemporalCovariance] = None
        self._trend: Optional[BSplineTrendService] = None
        self._kriging: Optional[UniversalKrigingService] = None
        self._prepare_use_case: Optional[PrepareObservationsUseCase] = None
        self._simulate_use_case: Optional[SimulateScenarioUseCase] = None
        self._fit_use_case: Optional[FitCovarianceUseCase] = None
        self._predict_use_case: Optional[PredictSeriesUseCase] = None

    def initialize(self) -> None:
        logger.info("Inicializando container...")
        self._setup_repositories()
        self._setup_services()
        self._setup_use_cases()
        logger.info("Container inicializado")

    def _setup_repositories(self) -> None:
        self._repository = CsvRiverDataRepository(era=self.settings.era)
        self._documents = JsonDocumentRepository()

    def _setup_services(self) -> None:
        self._covariance = SpatioTemporalCovariance()
        self._trend = BSplineTrendService()
        self._kriging = UniversalKrigingService(self._covariance, self._trend)

    def _setup_use_cases(self) -> None:
        """Configura use cases da aplicação"""
        if not self._repository or not self._documents:
            raise RuntimeError("Repositórios não foram inicializados")
        if not self._kriging:
            raise RuntimeError("Serviços de krigagem não foram inicializados")

        settings = self.settings
        self._prepare_use_case = PrepareObservationsUseCase(
            repository=self._repository,
            screening=AltimetryScreeningService(
                threshold_m=settings.repeat_threshold_m,
                vicinity_km=settings.vicinity_km,
                vicinity_days=settings.vicinity_days,
            ),
            alignment=MissionAlignmentService(cell_km=settings.cell_km, cell_doy=settings.cell_doy),
        )
        self._simulate_use_case = SimulateScenarioUseCase(self._repository, SyntheticGenerator(self._covariance))
        self._fit_use_case = FitCovarianceUseCase(
            trend=self._trend,
            kriging=self._kriging,
            fitting=CovarianceFittingService(),
            documents=self._documents,
        )
        self._predict_use_case = PredictSeriesUseCase(self._repository, self._trend, self._kriging)

    def cleanup(self) -> None:
        """Limpa recursos"""
        self._repository = None
        self._documents = None
        self._kriging = None
        logger.info("Container limpo")

    # Getters para dependências

    def get_repository(self) -> IRiverDataRepository:
        if not self._repository:
            raise RuntimeError("Repository não foi inicializado")
        return self._repository

    def get_documents(self) -> IDocumentRepository:
        if not self._documents:
            raise RuntimeError("Repositório de documentos não foi inicializado")
        return self._documents

    def get_prepare_use_case(self) -> PrepareObservationsUseCase:
        if not self._prepare_use_case:
            raise RuntimeError("Prepare use case não foi inicializado")
        return self._prepare_use_case

    def get_simulate_use_case(self) -> SimulateScenarioUseCase:
        if not self._simulate_use_case:
            raise RuntimeError("Simulate use case não foi inicializado")
        return self._simulate_use_case

    def get_fit_use_case(self) -> FitCovarianceUseCase:
        if not self._fit_use_case:
            raise RuntimeError("Fit use case não foi inicializado")
        return self._fit_use_case

    def get_predict_use_case(self) -> PredictSeriesUseCase:
        if not self._predict_use_case:
            raise RuntimeError("Predict use case não foi inicializado")
        return self._predict_use_case

    def create_validate_use_case(
        self,
        season: Optional[Tuple[str, str]] = None,
        flood_threshold: Optional[float] = None,
        drought_threshold: Optional[float] = None,
        align_datum: bool = True,
        altimetry_climatology: bool = False,
    ) -> ValidateSeriesUseCase:
        """
        Use case de validação com os limiares da invocação

        Valores None usam a configuração do ambiente.
        """
        settings = self.settings
        analysis = FloodAnalysisService(
            season=season or settings.season,
            flood_threshold=settings.flood_threshold if flood_threshold is None else flood_threshold,
            drought_threshold=settings.drought_threshold if drought_threshold is None else drought_threshold,
            align_datum=align_datum,
            altimetry_climatology=altimetry_climatology,
        )
        return ValidateSeriesUseCase(self.get_repository(), analysis)


# Instância global do container
_container: Optional[DependencyContainer] = None


def get_container(settings: Optional[Settings] = None) -> DependencyContainer:
    """
    Retorna instância do container (singleton)

    Args:
        settings: configuração explícita (só usada na primeira chamada)

    Returns:
        Container inicializado
    """
    global _container

    if _container is None:
        _container = DependencyContainer(settings)
        _container.initialize()

    return _container


def cleanup_container() -> None:
    """Limpa o container global"""
    global _container

    if _container:
        _container.cleanup()
        _container = None
