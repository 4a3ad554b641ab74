"""Exception types shared across the package."""


class ExtractionError(ValueError):
    """Closed-form parameter extraction failed (bad denominator or a
    non-positive parameter). Never leaves a partially valid result."""

    def __init__(self, which_parameter: str, reason: str):
        self.which_parameter = which_parameter
        self.reason = reason
        super().__init__(f"cannot extract {which_parameter}: {reason}")


class SelectionError(ValueError):
    """Spectrum does not support a valid four-frequency selection."""


class SettlingError(ValueError):
    """Waveform frame too short for filter settling plus measurement."""


class SignalError(ValueError):
    """Current channel carries no usable fundamental."""


class SizeError(ValueError):
    """Too few rows, or a split would leave an empty part."""


class RankError(ValueError):
    """Design matrix is rank-deficient or a feature column is constant."""


class UnknownCellError(ValueError):
    """A requested cell id is absent from the rows."""


class ParseError(ValueError):
    """Malformed data file; message carries the offending line number."""


class SchemaError(ValueError):
    """File is missing required columns."""


class VersionError(ValueError):
    """Persisted artifact has an unknown schema_version."""


class EmptyTableError(ValueError):
    """A feature table ended up with zero rows."""


class RangeError(ValueError):
    """Requested SoH lies outside the aging-trend anchor span."""
