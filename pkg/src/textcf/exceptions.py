"""Exception types raised across the package."""


class TextCFError(Exception):
    """Base class for all package errors."""


class UnknownToken(TextCFError, KeyError):
    pass


class IndexOutOfRange(TextCFError, IndexError):
    pass


class PositionConflict(TextCFError, ValueError):
    pass


class ParseError(TextCFError, ValueError):
    """A resource file could not be parsed.

    Carries the offending file, line (or row) number and a reason so
    callers can report a precise diagnostic.
    """

    def __init__(self, reason, path=None, line=None):
        self.reason = reason
        self.path = None if path is None else str(path)
        self.line = line
        where = ""
        if self.path is not None:
            where = self.path
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + reason)


class MissingFile(TextCFError, FileNotFoundError):
    pass


class EmptyFile(ParseError):
    pass


class UnknownSynset(TextCFError, KeyError):
    pass


class UnknownWord(TextCFError, KeyError):
    pass


class LengthMismatch(TextCFError, ValueError):
    pass


class EmptyCorpus(TextCFError, ValueError):
    pass


class EmptyClass(TextCFError, ValueError):
    pass


class NotBinary(TextCFError, ValueError):
    pass


class CannotStratify(TextCFError, ValueError):
    pass


class EmptyDocument(TextCFError, ValueError):
    pass


class MissingColumn(TextCFError, KeyError):
    pass
