class InputError(ValueError):
    """Malformed or inconsistent input (bad states, sizes, file syntax)."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" if column is None else f"line {line}, column {column}"
            message = f"{where}: {message}"
        super().__init__(message)


class ResourceError(RuntimeError):
    """A configured size or memory budget would be exceeded."""

    def __init__(self, message, progress=None):
        self.progress = progress
        super().__init__(message)
