"""Domain exceptions and their command-line exit codes."""


class BragError(Exception):
    """Base error for the pipeline."""

    exit_code: int = 2

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class UsageError(BragError):
    """Bad command line (unknown subcommand, missing flag)."""

    exit_code = 1

    def __init__(self, detail: str, usage: str = ""):
        super().__init__(detail)
        self.usage = usage


# ===== DATA ERRORS (exit 2) =====

class DataError(BragError):
    """Input data or configuration is invalid."""

    exit_code = 2


class CorpusError(DataError):
    """Corpus or chunk file could not be loaded."""

    def __init__(self, detail: str, line: int | None = None):
        if line is not None:
            detail = f"line {line}: {detail}"
        super().__init__(detail)
        self.line = line


class ConfigError(DataError):
    """Pipeline configuration is missing or invalid."""


class ScoringError(DataError):
    """Probability out of range or misaligned scoring inputs."""


class IndexBuildError(DataError):
    """Vector index could not be built."""


class PromptError(DataError):
    """Prompt could not be rendered from the given evidence."""


# ===== PROVIDER ERRORS (exit 3) =====

class ProviderError(BragError):
    """Chat or embedding provider failed."""

    exit_code = 3


class AuthenticationError(ProviderError):
    """Credential missing or rejected."""


class ProviderTransportError(ProviderError):
    """Transport failure that persisted after retry."""


class EmptyResponseError(ProviderError):
    """Provider answered with no text."""
