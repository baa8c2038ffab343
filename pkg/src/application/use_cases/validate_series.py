"""
Use Case de validação: índices de cheia, PoD/FAR e métricas por fonte
"""

import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence

from ...domain.entities.flood_report import FloodReport
from ..interfaces.repositories import IRiverDataRepository
from ..interfaces.services import IFloodAnalysisService

logger = logging.getLogger(__name__)


@dataclass
class ValidationResult:
    report: FloodReport
    n_series: int = 0
    processing_time_ms: int = 0


class ValidateSeriesUseCase:
    def __init__(self, repository: IRiverDataRepository, analysis: IFloodAnalysisService):
        self.repository = repository
        self.analysis = analysis

    def execute(
        self,
        series_dirs: Dict[str, Path],
        gauges_path: Path,
        years: Sequence[int] = (),
        out_dir: Optional[Path] = None,
    ) -> ValidationResult:
        """
        Executa a validação

        Args:
            series_dirs: fonte -> diretório com `<local>.csv`
            gauges_path: gauges.csv (gauge_id igual ao nome das séries)
            years: anos avaliados (vazio: anos das réguas)
            out_dir: se dado, grava report.csv, metrics.csv e summary.json

        Raises:
            InsufficientDataError: nenhuma série com épocas em comum com as réguas
        """
        start_time = time.time()
        series_by_source = {source: self.repository.load_series_directory(path)
                            for source, path in sorted(series_dirs.items())}
        gauges = self.repository.load_gauges(gauges_path)

        report = self.analysis.build_report(series_by_source, gauges, years)
        if out_dir is not None:
            self.repository.save_report(report, Path(out_dir))

        result = ValidationResult(
            report=report,
            n_series=sum(len(series) for series in series_by_source.values()),
            processing_time_ms=int((time.time() - start_time) * 1000),
        )
        logger.info(f"Validação: {result.n_series} séries de {len(series_by_source)} fontes, {len(gauges)} réguas")
        return result
