"""Exception types shared across the package."""


class GembedError(Exception):
    """Base class for errors raised by gembed."""


class ParseError(GembedError):
    """A malformed input file. Carries the offending location when known."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"line {line}: "
        super().__init__(where + message)
