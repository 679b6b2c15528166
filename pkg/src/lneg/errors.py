"""Exception types shared across the package."""


class LnegError(Exception):
    """Base class for all package-specific errors."""


class RoundingAmbiguous(LnegError):
    """A floating value sits too far from every integer to round safely.

    Signals insufficient working precision upstream; callers may retry with
    a larger precision budget exactly once.
    """


class NotFundamental(LnegError, ValueError):
    """The given integer is not a fundamental discriminant."""


class VariantInapplicable(LnegError):
    """The requested Bernoulli recursion does not apply to this character."""


class KTooSmall(LnegError, ValueError):
    """The functional-equation route is not offered at k = 1."""


class CharacterSpecError(LnegError, ValueError):
    """A character spec string failed to parse.

    Carries ``position``, the 0-based index in the input where parsing failed.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class RankDeficient(LnegError):
    """A linear solve had fewer independent rows than unknowns."""


class Inconsistent(LnegError):
    """An overdetermined exact linear system has no solution.

    Load-bearing: raised from a coefficient solve it falsifies the conjectured
    identity that generated the system (or reveals a basis bug).
    """


class ConjectureInconsistent(Inconsistent):
    """A universal-coefficient solve for a conjectured identity failed.

    Must be surfaced as a first-class result (CLI exit code 4), never patched.
    """


class GcdViolation(LnegError, ValueError):
    """Arguments violate a required coprimality condition."""


class DeadLevel(LnegError):
    """The requested auxiliary level has vanishing projection factor."""


class InadmissiblePair(LnegError, ValueError):
    """The (level, 2-class) pair is excluded by the identity's side conditions."""


class CacheCorrupt(LnegError):
    """A coefficient cache file failed its checksum or failed to parse."""


class NoUsableRatio(LnegError):
    """No tabulated weight-one ratio applies to this discriminant."""


class MethodMismatch(LnegError):
    """Two methods that must agree exactly returned different values."""
