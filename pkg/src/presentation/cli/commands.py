"""
Comandos da CLI: simulate, fit, predict, validate
"""

import argparse
import logging
from datetime import date
from pathlib import Path
from typing import Callable, Dict, List, Optional

from ...application.use_cases.fit_covariance import BinLayout
from ...application.use_cases.predict_series import PredictionMode
from ...domain.exceptions import ConfigurationError, RiverKrigingError
from ...domain.value_objects.hydro_values import CovarianceParams, Scenario
from ...infrastructure.container.dependency_container import DependencyContainer
from ...infrastructure.persistence.json_documents import read_document
from .models import SimulationConfig

logger = logging.getLogger(__name__)


def _iso_date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"data inválida (esperado AAAA-MM-DD): {text}")


def _scenario(text: str) -> Scenario:
    try:
        return Scenario(text.strip().upper())
    except ValueError:
        raise argparse.ArgumentTypeError(f"cenário desconhecido: {text} (S-I, S-II ou S-III)")


def _mode(text: str) -> PredictionMode:
    try:
        return PredictionMode.from_text(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _month_day(text: str) -> str:
    try:
        date.fromisoformat(f"2001-{text}")
    except ValueError:
        raise argparse.ArgumentTypeError(f"esperado MM-DD: {text}")
    return text


def _source_dir(text: str) -> tuple:
    source, sep, directory = text.partition("=")
    if not sep or not source or not directory:
        raise argparse.ArgumentTypeError(f"esperado FONTE=DIRETÓRIO: {text}")
    return source, Path(directory)


def _add_preparation_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--network", type=Path, required=True, help="diretório com nodes.csv e edges.csv")
    parser.add_argument("--obs", type=Path, required=True, help="observations.csv")
    parser.add_argument("--scenario", type=_scenario, default=Scenario.S_I, help="S-I, S-II ou S-III")
    parser.add_argument("--along-track-k", type=float, default=None, help="fator k da triagem ao longo do traço")
    parser.add_argument("--reference-mission", default=None, help="missão de referência do datum")
    parser.add_argument("--knot-spacing-km", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riverkrige",
        description="Krigagem universal de níveis d'água multi-missão em redes fluviais",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING...")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="gera rede, observações, réguas e verdade sintéticas")
    simulate.add_argument("--config", type=Path, required=True, help="documento JSON da simulação")
    simulate.add_argument("--seed", type=int, required=True)
    simulate.add_argument("--out", type=Path, required=True)

    fit = commands.add_parser("fit", help="ajusta os parâmetros de covariância")
    _add_preparation_flags(fit)
    fit.add_argument("--initial", type=Path, default=None, help="params.json com o chute inicial")
    fit.add_argument("--space-bin-km", type=float, default=25.0)
    fit.add_argument("--max-space-km", type=float, default=400.0)
    fit.add_argument("--time-bin-days", type=float, default=10.0)
    fit.add_argument("--max-time-days", type=float, default=120.0)
    fit.add_argument("--out", type=Path, required=True)

    predict = commands.add_parser("predict", help="interpola séries nos alvos")
    _add_preparation_flags(predict)
    predict.add_argument("--params", type=Path, required=True)
    predict.add_argument("--targets", type=Path, required=True)
    predict.add_argument("--from", dest="start", type=_iso_date, required=True)
    predict.add_argument("--to", dest="end", type=_iso_date, required=True)
    predict.add_argument("--step-days", type=int, default=None)
    predict.add_argument("--mode", type=_mode, default=PredictionMode.UK, help="uk ou ok")
    predict.add_argument("--season-only", action="store_true", help="só as janelas da estação de cheia")
    predict.add_argument("--workers", type=int, default=None)
    predict.add_argument("--out", type=Path, required=True)

    validate = commands.add_parser("validate", help="índices de cheia, PoD/FAR e métricas")
    validate.add_argument("--series", type=_source_dir, action="append", required=True,
                          help="FONTE=DIRETÓRIO (repetível)")
    validate.add_argument("--gauges", type=Path, required=True)
    validate.add_argument("--years", type=int, nargs="*", default=[])
    validate.add_argument("--flood-threshold", type=float, default=None)
    validate.add_argument("--drought-threshold", type=float, default=None)
    validate.add_argument("--season-start", type=_month_day, default=None)
    validate.add_argument("--season-end", type=_month_day, default=None)
    validate.add_argument("--no-datum-alignment", action="store_true")
    validate.add_argument("--altimetry-climatology", action="store_true")
    validate.add_argument("--out", type=Path, required=True)
    return parser


def _prepare(container: DependencyContainer, args: argparse.Namespace):
    network = container.get_repository().load_network(args.network)
    k_sigma = args.along_track_k if args.along_track_k is not None else container.settings.along_track_k
    prepared = container.get_prepare_use_case().execute(
        network, args.obs, scenario=args.scenario, k_sigma=k_sigma, reference_mission=args.reference_mission
    )
    return network, prepared


def _knot_spacing(container: DependencyContainer, args: argparse.Namespace) -> float:
    return args.knot_spacing_km if args.knot_spacing_km is not None else container.settings.knot_spacing_km


def cmd_simulate(container: DependencyContainer, args: argparse.Namespace) -> int:
    config = read_document(args.config, SimulationConfig)
    try:
        plan = config.to_plan()
    except RiverKrigingError:
        raise
    except (KeyError, ValueError) as e:
        raise ConfigurationError(f"{args.config}: {e}")
    container.get_simulate_use_case().execute(plan, args.seed, args.out)
    return 0


def cmd_fit(container: DependencyContainer, args: argparse.Namespace) -> int:
    network, prepared = _prepare(container, args)
    initial = container.get_documents().load_params(args.initial) if args.initial else CovarianceParams()
    try:
        bins = BinLayout(args.space_bin_km, args.max_space_km, args.time_bin_days, args.max_time_days)
    except ValueError as e:
        raise ConfigurationError(str(e))
    result = container.get_fit_use_case().execute(
        network, prepared.observations, initial, _knot_spacing(container, args), bins, args.out
    )
    if not result.fit.converged:
        logger.warning(f"Ajuste gravado sem convergência: {result.fit.message}")
    return 0


def cmd_predict(container: DependencyContainer, args: argparse.Namespace) -> int:
    settings = container.settings
    if args.end < args.start:
        raise ConfigurationError(f"Janela inválida: --from {args.start} > --to {args.end}", "--to")
    step_days = args.step_days if args.step_days is not None else settings.step_days
    workers = args.workers if args.workers is not None else settings.max_workers
    if step_days <= 0 or workers <= 0:
        raise ConfigurationError("--step-days e --workers devem ser positivos")

    repository = container.get_repository()
    targets = repository.load_targets(args.targets)
    params = container.get_documents().load_params(args.params)
    network, prepared = _prepare(container, args)
    container.get_predict_use_case().execute(
        network,
        prepared.observations,
        params,
        targets,
        (args.start, args.end),
        step_days=step_days,
        mode=args.mode,
        knot_spacing_km=_knot_spacing(container, args),
        neighborhood=settings.neighborhood,
        season=settings.season if args.season_only else None,
        max_workers=workers,
        out_dir=args.out,
    )
    return 0


def cmd_validate(container: DependencyContainer, args: argparse.Namespace) -> int:
    series_dirs: Dict[str, Path] = {}
    for source, directory in args.series:
        if source in series_dirs:
            raise ConfigurationError(f"Fonte repetida em --series: {source}", "--series")
        series_dirs[source] = directory
    settings = container.settings
    season = (args.season_start or settings.season_start, args.season_end or settings.season_end)
    try:
        use_case = container.create_validate_use_case(
            season=season,
            flood_threshold=args.flood_threshold,
            drought_threshold=args.drought_threshold,
            align_datum=not args.no_datum_alignment,
            altimetry_climatology=args.altimetry_climatology,
        )
    except ValueError as e:
        raise ConfigurationError(str(e))
    use_case.execute(series_dirs, args.gauges, args.years, args.out)
    return 0


COMMANDS: Dict[str, Callable[[DependencyContainer, argparse.Namespace], int]] = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "validate": cmd_validate,
}


def run_command(container: DependencyContainer, args: argparse.Namespace) -> int:
    return COMMANDS[args.command](container, args)


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)
