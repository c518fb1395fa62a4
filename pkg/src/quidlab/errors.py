"""Exception types shared across the package."""


class QuidlabError(Exception):
    """Base class for package errors."""


class CapacityError(QuidlabError):
    """Register size outside the supported range."""


class ShapeError(QuidlabError):
    """Operator or state dimension mismatch."""


class DataFormatError(QuidlabError):
    """Malformed input file: dataset CSV, noise model, checkpoint, config."""


class DegenerateInputError(QuidlabError):
    """Well-formed but meaningless input, e.g. an all-zero amplitude vector."""


class AttackInfeasibleError(QuidlabError):
    """Poisoning cannot proceed, e.g. the clean set holds a single class."""
