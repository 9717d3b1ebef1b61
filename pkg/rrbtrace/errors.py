import sys


class RrbError(Exception):
    """Base class for toolkit errors with a context label and automatic kind labeling."""

    exit_code = 2

    def __init__(self, message: str, context: str = "rrbtrace"):
        self.message = message
        self.context = context
        error_type = self.__class__.__name__.replace("Error", " Error")
        self.formatted = f"[{context}] {error_type} | {message}"
        super().__init__(self.formatted)

    def __str__(self) -> str:
        return self.formatted


class ConfigurationError(RrbError): pass
class LogIntegrityError(RrbError): pass
class NotFoundError(RrbError): pass
class EmptyDataError(RrbError): pass
class DegenerateTraceError(EmptyDataError): pass
class UndefinedCorrelationError(RrbError): pass
class StratificationError(RrbError): pass
class DimensionError(RrbError): pass
class OutputError(RrbError): pass


def handle_error(error: RrbError) -> None:
    """Print a toolkit error in red and exit with its code."""
    print(f"\033[31m{error}\033[0m", file=sys.stderr)
    sys.exit(error.exit_code)
