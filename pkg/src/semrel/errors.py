"""Shared exception types."""


class DataError(ValueError):
    """Malformed or inconsistent input data (corpora, tables, datasets, model files)."""


class ParseError(DataError):
    """A text input could not be parsed; messages name the offending line."""
