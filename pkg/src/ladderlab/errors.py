"""Exception types shared across the package.

Invalid arguments raise plain ValueError; the classes here cover the two
failure modes that callers may want to handle differently: a resource that
is too small for the requested computation, and a persisted cache that
fails validation.
"""


class LadderLabError(Exception):
    """Base class for package-specific errors."""


class CapacityError(LadderLabError):
    """A store or evaluator cannot cover the requested range.

    The message names the limiting resource and, where it can be estimated,
    the minimum size that would suffice.
    """


class CacheIntegrityError(LadderLabError):
    """A persisted cache failed checksum, version, or fingerprint checks."""
