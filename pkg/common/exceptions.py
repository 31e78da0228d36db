"""Exceptions shared by the bundlelab apps"""


class BundleLabError(Exception):
    """Base class for every bundlelab failure that is not a validation error."""


class LatticeError(BundleLabError):
    """Invalid modulus, non-lattice point or a reduction that did not terminate."""


class BundleError(BundleLabError):
    """Bundle data that violates its invariants or mixes different moduli."""


class ProfileError(BundleLabError):
    """A Calabi profile left its positivity range.

    ``t`` is the first offending fiber norm.
    """

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class DifferentiationError(BundleLabError):
    """A numerical derivative could not be formed (step underflow, non-finite values)."""


class ConfigError(BundleLabError):
    """Job configuration or bundle spec that cannot be run.

    ``location`` names the offending flag, JSON field path or file position.
    """

    def __init__(self, message, location=None):
        super().__init__(f'{location}: {message}' if location else message)
        self.location = location
