"""Exception hierarchy shared by every component.

Each error carries a short ``category`` that the CLI prints on its single
failure line (``error<TAB><category><TAB><message>``).
"""
from typing import Optional


class BitextError(Exception):
    category = "internal"


class ParseError(BitextError, ValueError):
    """A text file line could not be parsed."""
    category = "parse"

    def __init__(self, message: str, path: Optional[str] = None, line_no: Optional[int] = None):
        self.path = path
        self.line_no = line_no
        where = ""
        if path is not None:
            where = f"{path}:{line_no}: " if line_no is not None else f"{path}: "
        super().__init__(where + message)


class ValidationError(BitextError, ValueError):
    category = "validation"


class FormatError(BitextError):
    """Binary file does not match its declared layout."""
    category = "format"


class ConfigError(BitextError, ValueError):
    category = "config"


class UsageError(BitextError):
    """Bad command-line arguments."""
    category = "usage"
