"""Exception hierarchy shared by the package."""


class ComonotoneError(Exception):
    """Base class for all errors raised by :mod:`comonotone`."""


class DimensionMismatch(ComonotoneError, ValueError):
    pass


class SingularSystem(ComonotoneError, ArithmeticError):
    """``I + eta*A`` cannot be factored: eta is outside the admissible range
    or the operator is not comonotone at the declared modulus."""


class SingularOperator(ComonotoneError, ArithmeticError):
    """The comonotonicity modulus is infinite for a non-invertible map."""


class InadmissibleIndex(ComonotoneError, ValueError):
    """Resolvent index ``eta`` violates ``eta > max(-2*rho, 0)``."""


class BOutOfRange(ComonotoneError, ValueError):
    """Energy anchor ``b`` outside ``[0, alpha - 1]``."""


class NonpositiveTime(ComonotoneError, ValueError):
    pass


class StepSizeUnderflow(ComonotoneError, ArithmeticError):
    pass


class InsufficientData(ComonotoneError, ValueError):
    pass


class InfeasibleTarget(ComonotoneError, ValueError):
    pass


class UnknownFigure(ComonotoneError, KeyError):
    pass


class ConfigError(ComonotoneError, ValueError):
    pass


class Divergence(ComonotoneError, ArithmeticError):
    """An iteration or integration produced non-finite values.

    ``partial`` carries whatever was logged before the failure.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
