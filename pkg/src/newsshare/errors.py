class ValidationError(ValueError):
    """An argument or record lies outside its allowed domain."""


class DataError(ValueError):
    """A tabulated input file could not be parsed."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class FitError(RuntimeError):
    """The least-squares problem is not identifiable as posed."""
