"""Exception hierarchy for the Frey elimination toolkit."""


class FreyError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code = 1


class InvalidParameterError(FreyError, ValueError):
    """A parameter such as r, q or a range is outside its domain."""


class InvalidSolutionError(FreyError, ValueError):
    """The pair (a, b) is not coprime."""


class SingularCurveError(FreyError):
    """a^r + b^r vanishes, so the Frey curve degenerates."""


class DegenerateLegendreError(FreyError):
    """ab = 0 puts t0 at 0 or 1."""


class UnsupportedParityError(FreyError):
    """The normalization a = 0 mod 2, b = 1 mod 4 does not hold."""


class PreconditionError(FreyError):
    """An operation was called outside its documented hypotheses."""


class OutOfScopePrimeError(FreyError):
    """The prime divides 2r, where the operation has nothing to say."""


class NonIntegralElementError(FreyError):
    """An element cannot be reduced because its denominator is not invertible."""


class BadReductionError(FreyError):
    """Point counting was requested at a prime of bad reduction."""


class InvalidUnitError(FreyError):
    """A supplied element does not have norm +1 or -1."""


class UnsupportedError(FreyError):
    """The requested computation falls outside the supported cases."""


class CertificateError(FreyError):
    """A mathematical invariant was violated. The CLI exits with status 2."""

    exit_code = 2


class InconsistentLPolynomialError(CertificateError):
    """The L-polynomial has no integral real Weil descent."""


class RecognitionError(CertificateError):
    """No element of O_K reproduces the real Weil polynomial."""


class FixtureCertificateError(CertificateError):
    """A newform fixture fails one of its certificates."""
