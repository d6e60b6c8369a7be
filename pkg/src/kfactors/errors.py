"""Exception hierarchy shared by every stage of the factor pipeline."""


class FactorError(Exception):
    """Base class for all errors raised by :mod:`kfactors`."""


class StructuralError(FactorError, ValueError):
    """Malformed graph, matching or file (dangling endpoints, bad ids, ...)."""


class InvariantViolation(FactorError):
    """A documented invariant failed; the input was not what it claimed to be."""


class WeightRangeError(FactorError, ValueError):
    """A cycle update would push some weight outside [0, 1]."""


class UnsupportedParameters(FactorError, ValueError):
    """The (d, k) pair lies outside the positive side: need d odd or k even."""


class SizeGuardError(FactorError):
    """Brute-force enumeration refused because the instance is too large."""
