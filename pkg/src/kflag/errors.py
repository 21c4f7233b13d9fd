"""Exception hierarchy.

Every error carries the CLI exit code it maps to: input problems exit 1,
computation problems exit 2.
"""


class KFlagError(Exception):
    exit_code = 2


class InputError(KFlagError):
    """Bad user input: expressions, tower files, arguments."""

    exit_code = 1


class ComputationError(KFlagError):
    exit_code = 2


class ModeError(InputError, TypeError):
    """Mixed coefficient modes, or an operation applied in the wrong mode."""


class ArgumentError(InputError, ValueError):
    pass


class UnitError(InputError, ValueError):
    """A non-unit was used where a unit (signed monomial) is required."""


class EvaluationError(InputError, ValueError):
    pass


class UnsupportedError(InputError):
    """The requested Lie family / parabolic is outside what is supported."""


class ValidationError(InputError, ValueError):
    pass


class SchemaError(InputError, ValueError):
    pass


class BindingError(InputError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ParseError(InputError, SyntaxError):
    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(expected))
        text = f"{message} at line {line}, column {column}"
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(text)

    def __str__(self):
        return self.msg


class ExprSemanticError(InputError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} at line {line}, column {column}"
        super().__init__(message)


class EncodingError(InputError, ValueError):
    """A polynomial cannot be written in a Groebner encoding's variables."""


class ResourceError(ComputationError):
    def __init__(self, message, progress=None):
        self.progress = dict(progress or {})
        if self.progress:
            detail = ", ".join(f"{k}={v}" for k, v in sorted(self.progress.items()))
            message = f"{message} ({detail})"
        super().__init__(message)


class SizeError(ComputationError):
    pass


class ConsistencyError(ComputationError):
    """An internal self-check failed. Never expected to fire."""


class VerificationFailure(KFlagError):
    exit_code = 3
