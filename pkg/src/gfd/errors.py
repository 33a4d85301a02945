"""Exception types shared across the workbench."""


class GfdError(Exception):
    """Base class for all workbench errors."""


class NonPrimeBase(GfdError):
    """Truncated polynomial ring requested over a composite base."""


class BadModulus(GfdError):
    """Residue ring modulus below 2."""


class RingMismatch(GfdError):
    """Operands live over different rings."""


class UnsupportedInfiniteHom(GfdError):
    """Hom of two infinite modules over the integers is out of contract."""


class InfiniteRing(GfdError):
    """Operation needs a finite ring (character duals, coresolutions)."""


class NotAComplex(GfdError):
    """Differentials do not compose to zero."""


class DegreeGap(GfdError):
    """Complex data does not cover its declared support interval."""


class EndpointMismatch(GfdError):
    """Chain maps do not share source and target."""


class NoCompleteResolution(GfdError):
    """No totally acyclic complex of projectives matches the resolution tail."""


class UnsupportedRing(GfdError):
    """The requested computation is not available over this ring."""


class LiftNotFound(GfdError):
    """A required lift through a precover does not exist."""


class ParseError(GfdError):
    """Malformed workbench document or command line."""


class ValidationError(GfdError):
    """Well-formed document violating a structural invariant."""
