"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside an operation's documented domain."""


class SetFormatError(ValueError):
    """A set file is malformed; carries the offending line number."""

    def __init__(self, path: str, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no
