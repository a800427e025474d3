"""
Exception hierarchy for the F3DC kernel library
"""


class F3DCError(Exception):
    """Base class for every error raised by the library."""
    pass


class ShapeError(F3DCError):
    """Operand extents do not match what the operation requires."""
    pass


class GeometryError(F3DCError):
    """Invalid (i, k, s, p) combination."""
    pass


class PhaseError(F3DCError):
    """The layer's padding phase is not the one the transform set was built for."""
    pass


class TransformSetError(F3DCError):
    """Malformed or inconsistent transform set."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TensorFormatError(F3DCError):
    """F3DT tensor file could not be parsed."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (at byte offset {offset})")


class QuantizationError(F3DCError):
    """Width violation, non-divisible pre-shift value or accumulator overflow."""
    pass


class ExactnessError(F3DCError):
    """An integer computation could not be carried out exactly."""
    pass


class ConfigError(F3DCError):
    """Bench/verify configuration, settings or run flags are invalid."""
    pass
