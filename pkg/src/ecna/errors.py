"""Exception hierarchy shared by all modules."""


class ECNAError(Exception):
    """Base class for every error raised by the library."""


class OutOfBounds(ECNAError, IndexError):
    pass


class PositionNotACall(ECNAError, ValueError):
    pass


class AlphabetMismatch(ECNAError, ValueError):
    pass


class InvalidAutomaton(ECNAError, ValueError):
    pass


class NotECNA(ECNAError, ValueError):
    pass


class UnknownClock(ECNAError, KeyError):
    pass


class UnsortedConstants(ECNAError, ValueError):
    pass


class RegionClockMismatch(ECNAError, ValueError):
    pass


class ClockNotPresent(ECNAError, ValueError):
    pass


class NotNormalized(ECNAError, ValueError):
    pass


class HasEventClocks(ECNAError, ValueError):
    pass


class ParseError(ECNAError, ValueError):
    """Syntax error in a text file; carries the file name and line number."""

    def __init__(self, message: str, source: str = "<string>", line: int = 0):
        self.source = source
        self.line = line
        self.message = message
        super().__init__(f"{source}:{line}: {message}")
