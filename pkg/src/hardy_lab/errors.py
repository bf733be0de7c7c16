"""Exception hierarchy.

Contract errors are bad inputs (the CLI maps them to exit code 2).
Numerical errors mean a computation left its domain of validity.
"""


class HardyLabError(Exception):
    pass


class ContractError(HardyLabError, ValueError):
    pass


class NumericalError(HardyLabError, ArithmeticError):
    pass


class NoRealRoot(ContractError):
    pass


class InvalidOrder(ContractError):
    pass


class SingularKernel(ContractError):
    pass


class DomainError(ContractError):
    """An oracle was asked for times outside its validity interval."""


class TruncationError(NumericalError):
    """Field mass reaches the grid boundary; spectral ops would wrap around."""


class NonIntegrableWeight(NumericalError):
    pass


class UnstableWeighting(NumericalError):
    pass


class NonpositiveF(NumericalError):
    pass


class NegativeIntegrand(NumericalError):
    pass


class SingularRecursion(NumericalError):
    pass
