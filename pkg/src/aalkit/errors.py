"""Exception hierarchy shared by all parsers and the diff engine.

Everything user-visible derives from :class:`AalkitError`. ``DataError``
covers malformed inputs and mismatched operands; the CLI maps it to exit
code 1 (usage problems exit 2, handled by argparse).
"""

from __future__ import annotations


class AalkitError(Exception):
    """Base class for all errors raised by this package."""


class DataError(AalkitError):
    """A problem with input data (as opposed to CLI usage)."""


class MalformedLineError(DataError):
    """A canonical signature line that does not match the line grammar."""

    def __init__(self, message: str, line: str, column: int = 1):
        super().__init__(f"{message} (column {column}): {line!r}")
        self.line = line
        self.column = column


class MalformedDescriptorError(DataError):
    """A JNI/JVM type or member descriptor that cannot be decoded."""

    def __init__(self, message: str, descriptor: str, position: int = 0):
        super().__init__(message)
        self.descriptor = descriptor
        self.position = position


class TxtSyntaxError(DataError):
    """Syntax error in a signature text file."""

    def __init__(self, message: str, line_no: int, column: int = 1):
        super().__init__(f"line {line_no}, column {column}: {message}")
        self.line_no = line_no
        self.column = column


class UnknownMemberKeywordError(TxtSyntaxError):
    """A class-body line whose leading keyword is not a known member kind."""


class CsvSignatureError(DataError):
    """Malformed member signature line in a restriction-flag list."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class XmlDocumentError(DataError):
    """Malformed api-versions document or member descriptor within one."""

    def __init__(self, message: str, element_path: str = ""):
        if element_path:
            message = f"{message} (at {element_path})"
        super().__init__(message)
        self.element_path = element_path


class ClassFileError(DataError):
    """Malformed compiled class file."""


class ArchiveError(DataError):
    """Unreadable zip archive (JAR or APK)."""


class DexError(DataError):
    """Malformed DEX file."""


class LevelMismatchError(DataError):
    """Snapshots that must share an API level do not."""


class KindMismatchError(DataError):
    """Snapshots that must share a source kind do not."""
