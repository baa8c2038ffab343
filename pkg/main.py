import logging
import sys
from typing import List, Optional

from src.domain.exceptions import RiverKrigingError
from src.infrastructure.config.settings import get_settings
from src.infrastructure.container.dependency_container import cleanup_container, get_container
from src.presentation.cli.commands import parse_args, run_command

logger = logging.getLogger(__name__)


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """
    Ponto de entrada da CLI

    Returns:
        0 em sucesso, 1 para erros do domínio, 2 para erros inesperados
    """
    args = parse_args(argv)
    try:
        settings = get_settings()
        configure_logging(args.log_level or settings.log_level)
        logger.info(f"Iniciando comando {args.command}...")
        container = get_container(settings)
        code = run_command(container, args)
        logger.info(f"Comando {args.command} finalizado")
        return code
    except RiverKrigingError as e:
        logger.error(f"Erro: {e}")
        print(f"erro: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.exception(f"Erro inesperado: {e}")
        return 2
    finally:
        cleanup_container()


if __name__ == "__main__":
    sys.exit(main())
