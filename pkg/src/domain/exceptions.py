"""
Exceções de domínio
"""


class RiverKrigingError(Exception):
    """Erro base do sistema"""


class NetworkValidationError(RiverKrigingError, ValueError):
    """Rede fluvial inválida (ciclo, múltiplas fozes, pesos não aditivos...)"""

    def __init__(self, message: str, node_id: str | None = None):
        super().__init__(message)
        self.node_id = node_id


class ObservationFormatError(RiverKrigingError, ValueError):
    """Arquivo de observações ilegível ou com cabeçalho inválido"""


class ConfigurationError(RiverKrigingError, ValueError):
    """Configuração ausente ou inválida"""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class UnderdeterminedFitError(RiverKrigingError, ValueError):
    """Bins empíricos insuficientes para o ajuste"""


class KrigingSystemError(RiverKrigingError, ArithmeticError):
    """Sistema de krigagem singular ou com F de posto incompleto"""

    def __init__(self, message: str, dropped_columns: list[int] | None = None):
        super().__init__(message)
        self.dropped_columns = dropped_columns or []


class InsufficientDataError(RiverKrigingError, ValueError):
    """Dados insuficientes para a estatística pedida"""
