"""Exception types shared across the package."""


class BipcoreError(Exception):
    """Base class for package-specific errors."""


class GraphFormatError(BipcoreError, ValueError):
    """Raised when an edge-list file cannot be parsed or validated."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DegenerateGraphError(BipcoreError, ValueError):
    """Raised when an operation needs both sides of the graph nonempty."""


class SizeCapError(BipcoreError):
    """Raised when an exact computation would exceed its instance-size cap."""


class NotTwoLinkedError(BipcoreError, ValueError):
    """Raised when a vertex set is not a valid polymer (not 2-linked)."""


class ClusterBudgetError(BipcoreError):
    """Raised when cluster enumeration exceeds its resource budget.

    The enumeration never truncates silently; callers may catch this and
    retry with a smaller truncation depth.
    """

    def __init__(self, message: str, clusters_seen: int = 0):
        super().__init__(message)
        self.clusters_seen = clusters_seen


class CertificationError(BipcoreError):
    """Raised when a computation refuses to run without a valid convergence
    certificate (or, for complex regions, when the region condition fails)."""


class StructuralMismatchError(BipcoreError, ValueError):
    """Raised when a graph does not match the structural hypothesis of the
    requested special-case condition check."""
