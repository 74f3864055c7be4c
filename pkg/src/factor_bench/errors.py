"""Exception types shared across the library."""


class FactorBenchError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FactorBenchError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class IngestionError(FactorBenchError, ValueError):
    """Malformed or internally inconsistent input data."""


class EstimationError(FactorBenchError, ValueError):
    """A regression cannot be fit (degenerate design, bad dimensions, ...)."""


class EvaluationError(FactorBenchError, ValueError):
    """A model-comparison harness was invoked on unusable inputs."""


class ConfigError(FactorBenchError, ValueError):
    """An invalid run or generator configuration."""
