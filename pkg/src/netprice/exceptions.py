"""Exception hierarchy shared by every stage of the pipeline."""


class NetPriceError(Exception):
    """Base class for errors raised by this package."""


class SchemaError(NetPriceError):
    """Column layout is inconsistent (duplicates, missing columns, kind clashes)."""


class RowError(NetPriceError):
    """A data row could not be read; carries the 1-based line number."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class EmptyLabelError(NetPriceError):
    """No row carries a usable net-price label."""


class FitError(NetPriceError):
    """A transform or model could not be fitted on the given rows."""


class SplitError(NetPriceError):
    """A partition of the rows would be empty or the ratio is invalid."""


class GridError(NetPriceError):
    """A parameter grid or parameter map is malformed."""


class ShapeError(NetPriceError, ValueError):
    """Array lengths or widths do not match."""


class DegenerateVarianceError(NetPriceError, ValueError):
    """R² is undefined because the labels are constant."""


class ConfigError(NetPriceError):
    """The run spec is invalid."""
