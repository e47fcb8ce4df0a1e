"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class QmlSttError(Exception):
    """Base class for every error raised by this package."""


class IllTyped(QmlSttError):
    def __init__(self, position: str, expected: object, found: object, message: str = ""):
        self.position = position
        self.expected = expected
        self.found = found
        detail = f": {message}" if message else ""
        super().__init__(f"ill-typed at {position or '<root>'}: expected {expected}, found {found}{detail}")


class ParseError(QmlSttError):
    """Concrete-syntax error with a 1-based source location."""

    def __init__(self, line: int, col: int, message: str):
        self.line = line
        self.col = col
        self.message = message
        super().__init__(f"{line}:{col}: {message}")


class UnknownSymbol(QmlSttError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown symbol {name!r}")


class ArityMismatch(QmlSttError):
    def __init__(self, symbol: str, expected: int, found: int):
        self.symbol = symbol
        self.expected = expected
        self.found = found
        super().__init__(f"{symbol} expects {expected} argument(s), got {found}")


class UnboundVariable(QmlSttError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound variable {name}")


class UnknownConstant(QmlSttError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"constant {name!r} has no interpretation")


class UnknownDefinition(QmlSttError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"no definition for {name!r}")


class ResourceBound(QmlSttError):
    """An enumeration exceeded its configured ceiling."""


class UnsupportedModel(QmlSttError):
    pass


class NotAnEmbedding(QmlSttError):
    """A term is not in the image of the QML translation."""


class ConfigurationError(QmlSttError):
    pass


class ProcessFailure(QmlSttError):
    pass


class UnparsableOutput(QmlSttError):
    pass
