"""Exception types raised by the numeric kernel.

Every error derives from :class:`ApcertError`, which is a ``ValueError`` so
callers that only care about "bad input" can catch that.
"""


class ApcertError(ValueError):
    pass


class MembershipError(ApcertError):
    """A matrix fails the defining identity of its group."""


class NotUnitary(MembershipError):
    pass


class Singular(ApcertError):
    pass


class NegativeDiscriminant(ApcertError):
    pass


class DomainError(ApcertError):
    pass


class DegreeTooHigh(ApcertError):
    pass


class NonConvergence(ApcertError):
    pass


class OrderViolation(ApcertError):
    pass


class Degenerate(ApcertError):
    pass


class OutOfRegime(ApcertError):
    pass


class UnknownLemma(ApcertError):
    pass
