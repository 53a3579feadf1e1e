"""Exception types shared across the package."""


class SchemaError(ValueError):
    """The schema is malformed, or a data file does not match it."""


class DataError(ValueError):
    """A cell could not be encoded under the schema."""


class UndefinedMetricError(ValueError):
    """A metric was requested on an empty dataset."""


class DegenerateClassError(ValueError):
    """A ROC quantity was requested on data containing a single class."""
