"""Exception hierarchy.

Every error carries its class name as a stable identifier; the CLI prints it
verbatim on stderr.
"""


class PidError(ValueError):
    """Base class for all input and validation errors."""


class NegativeProbability(PidError):
    pass


class NotNormalized(PidError):
    pass


class ShapeMismatch(PidError):
    pass


class DegenerateCondition(PidError):
    """Conditioning on an outcome of zero probability."""


class EmptyInput(PidError):
    pass


class UnknownLabel(PidError):
    pass


class SupportMismatch(PidError):
    """Target marginal puts mass where the source marginal has none."""


class NoiseUnsupported(PidError):
    pass


class ParseError(PidError):
    pass
