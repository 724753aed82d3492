"""Exception types shared across the package.

Every error that signals a mathematical domain violation derives from
:class:`DomainError`, which the command-line front end maps to exit code 2.
"""


class DomainError(ValueError):
    """Input lies outside the domain of an operation."""


class PrecisionExhausted(DomainError):
    """All known p-adic digits are zero, so the value cannot be told from 0."""


class ZeroInput(DomainError):
    """The operation is undefined at 0."""


class NotAUnit(DomainError):
    """Inversion requested for an element of pZ_p."""


class PrimeMismatch(DomainError):
    """Operands live over different primes."""


class NegativeValuation(DomainError):
    """A rational with p in its denominator has no image in Z_p."""


class NotInMaximalIdeal(DomainError):
    """The Schneider map is only defined on pZ_p (valuation at least 1)."""


class ExpansionTooShort(DomainError):
    """The digit expansion terminates before the requested index."""


class OutOfDomain(DomainError):
    """A Lyapunov level or parameter lies outside the spectrum domain."""


class AtBoundary(DomainError):
    """The requested quantity is infinite at the boundary of the domain."""


class NoMinimum(DomainError):
    """A Legendre infimum could not be bracketed."""


class TooLarge(DomainError):
    """Brute-force enumeration would exceed the configured size limit."""


class DivergentWeights(DomainError):
    """Gibbs weights p^(-ta) are not summable (t <= 0 on the full alphabet)."""
