"""Exception hierarchy.

Every error carries a CLI exit code so the command-line front end can map
failures without a lookup table.
"""


class HermdegError(Exception):
    exit_code = 2


class InvalidInput(HermdegError):
    exit_code = 2


class NonFundamental(InvalidInput):
    pass


class NonNegative(InvalidInput):
    pass


class ZeroArgument(InvalidInput):
    pass


class SingularMatrix(InvalidInput):
    pass


class SchemaError(InvalidInput):
    pass


class SymmetryError(InvalidInput):
    pass


class RankMismatch(InvalidInput):
    pass


class IndefiniteForm(InvalidInput):
    pass


class BadExponents(InvalidInput):
    pass


class BadSize(InvalidInput):
    pass


class ProductFormulaViolation(InvalidInput):
    pass


class SuiteUnknown(InvalidInput):
    pass


class UnsupportedLocale(HermdegError):
    """Prime is split, ramified or even where an odd inert prime is required."""

    exit_code = 3


class NotInert(UnsupportedLocale):
    pass


class EvenPrime(UnsupportedLocale):
    pass


class NotRamifiedAt2(UnsupportedLocale):
    pass


class BadPrime(UnsupportedLocale):
    pass


class UnsupportedCase(HermdegError):
    exit_code = 2


class NotNondegenerate(HermdegError):
    exit_code = 2


class DegenerateT(NotNondegenerate):
    pass


class NotIncoherentLocal(HermdegError):
    exit_code = 2


class Infeasible(HermdegError):
    exit_code = 2


class BudgetExceeded(HermdegError):
    """A search hit its configured node budget; never silently approximated."""

    exit_code = 2


class NonStabilized(BudgetExceeded):
    pass


class CapExceeded(BudgetExceeded):
    pass


class FitMismatch(HermdegError):
    exit_code = 4
