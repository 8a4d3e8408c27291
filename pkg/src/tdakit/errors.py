"""Exception types shared across the toolkit."""


class TdakitError(Exception):
    """Base class for all toolkit errors."""


class ParseError(TdakitError):
    """A tabular cell or structured-text field could not be parsed."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)


class EmptyInputError(TdakitError):
    """An input stream yielded no records."""


class CapacityError(TdakitError):
    """A filtration would exceed the configured simplex budget."""


class IncomparableBarcodesError(TdakitError):
    """Two barcodes were built with different simplex-dimension caps."""


class UnclassifiableRecordError(TdakitError):
    """Records could not be assigned to any partition."""

    def __init__(self, indices: list[int]):
        self.indices = list(indices)
        shown = ", ".join(str(i) for i in self.indices[:10])
        more = "" if len(self.indices) <= 10 else f" (+{len(self.indices) - 10} more)"
        super().__init__(f"records with no temperature and index below the damage "
                         f"threshold cannot be classified: indices {shown}{more}")


class TooSmallError(TdakitError):
    """An operation needs more points than the input provides."""


class ConfigError(TdakitError):
    """A rules or run configuration document is invalid."""
