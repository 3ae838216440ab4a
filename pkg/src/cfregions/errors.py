"""Exception types shared across the package."""


class CFracError(ValueError):
    """Base class for all errors raised by cfregions."""


class InvalidElementError(CFracError):
    """A continued-fraction element is zero (or otherwise unusable)."""


class DomainError(CFracError):
    """An argument lies outside the domain of an operation."""


class SectorTooWideError(DomainError):
    """Origin-disk estimates were requested for a sector with half-angle >= pi/4."""


class InvalidCertificateRequest(CFracError):
    """A certificate was requested whose hypotheses do not hold.

    This is distinct from a certificate that was evaluated and failed.
    """
