"""Exception types shared across the package."""


class GndSearchError(Exception):
    """Base class for all errors raised by this package."""


class GraphFormatError(GndSearchError):
    """Malformed graph text file. Carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphValidationError(GndSearchError):
    """Structurally valid input that violates a graph invariant."""


class UnknownVertexError(GndSearchError):
    """Vertex id not present in the graph."""


class UnknownKeywordError(GndSearchError):
    """Keyword without an embedding vector."""


class DimensionMismatchError(GndSearchError):
    """Embedding/MBR operands of different dimensionality."""


class MappingError(GndSearchError):
    """Vertex mapping is not total/injective or is inconsistent with its arguments."""


class OracleCapError(GndSearchError):
    """Brute-force enumeration refused: data graph above the configured cap."""


class IndexFormatError(GndSearchError):
    """Corrupt, truncated, or wrong-version index file."""


class FingerprintMismatchError(GndSearchError):
    """Index was built against a different graph or embedding table."""
