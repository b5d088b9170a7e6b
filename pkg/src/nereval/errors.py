"""Exception hierarchy shared by every module of the toolkit."""


class ToolkitError(Exception):
    """Base class for all errors raised deliberately by nereval."""


class ConfigurationError(ToolkitError):
    """Unknown scheme/format/methodology id, or an impossible flag combination."""


class InvalidInputError(ToolkitError, ValueError):
    """Input data violates an operation's preconditions."""


class AlignmentError(InvalidInputError):
    """Gold and predicted sequences do not line up."""

    def __init__(self, message, sequence_index=None):
        super().__init__(message)
        self.sequence_index = sequence_index


class NestedEntitiesError(InvalidInputError):
    """Overlapping entities were found where none are allowed."""


class FormatError(ToolkitError):
    """A file could not be parsed.  ``line`` is 1-based when known."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        self.detail = message
        super().__init__(self._render())

    def _render(self):
        where = ""
        if self.source is not None:
            where = str(self.source)
        if self.line is not None:
            where = f"{where}:{self.line}" if where else f"line {self.line}"
        return f"{where}: {self.detail}" if where else self.detail

    def with_source(self, source):
        self.source = source
        self.args = (self._render(),)
        return self

    def __str__(self):
        return self._render()


class MalformedLineError(FormatError):
    pass


class MalformedAnnotationError(FormatError):
    pass


class EncodingError(FormatError):
    pass


class SchemaError(FormatError):
    pass
