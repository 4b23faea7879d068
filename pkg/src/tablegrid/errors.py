"""Exception hierarchy shared by every stage of the pipeline."""


class TableGridError(Exception):
    """Base class for all errors raised by tablegrid."""


class InvalidInputError(TableGridError, ValueError):
    """An argument violates a documented precondition."""


class FormatError(TableGridError, ValueError):
    """A file or text payload does not follow the expected format."""


class OcrEngineError(TableGridError, RuntimeError):
    """The external OCR process failed."""

    def __init__(self, message: str, returncode: int | None = None, stderr: str = ""):
        super().__init__(message)
        self.returncode = returncode
        self.stderr = stderr
