class PPCError(Exception):
    """Base class for all ppclab errors."""


class DomainError(PPCError, ValueError):
    """An argument lies outside the domain of the operation."""


class SequenceFileError(PPCError):
    """A sequence CSV could not be loaded.

    ``code`` is one of ``"missing"``, ``"malformed"`` or ``"not-increasing"``.
    """

    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


class QuadratureError(PPCError, ArithmeticError):
    """Numerical quadrature did not settle within the resolution budget."""


class ConfigError(PPCError):
    """An experiment configuration failed validation.

    ``problems`` lists one human readable entry per violated field.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid config:\n  " + "\n  ".join(self.problems))
