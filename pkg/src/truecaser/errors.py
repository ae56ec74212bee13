"""Exception hierarchy shared by the library and the command line."""


class TruecaserError(Exception):
    """Base class for every error raised by this package."""


class DataError(TruecaserError):
    """Bad input data: corpora, sentences, hypothesis/reference pairs."""


class EmptyLine(DataError):
    pass


class MalformedLine(DataError):
    def __init__(self, lineno, message="empty line"):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class EmptyCorpus(DataError):
    pass


class LengthMismatch(DataError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


class TokenMismatch(DataError):
    def __init__(self, line, position, hyp, ref):
        super().__init__(
            f"line {line}, token {position}: hypothesis {hyp!r} does not "
            f"case-fold to reference {ref!r}")
        self.line = line
        self.position = position


class DimensionMismatch(TruecaserError, ValueError):
    pass


class NonFiniteLoss(TruecaserError, FloatingPointError):
    pass


class ModelFormatError(TruecaserError):
    pass
