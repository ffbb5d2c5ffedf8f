"""Exception hierarchy shared by every module."""


class InvforgeError(Exception):
    """Base class for all errors raised by invforge."""


# finite fields
class NotPrime(InvforgeError, ValueError):
    pass


class DegreeOutOfRange(InvforgeError, ValueError):
    pass


class CapExceeded(InvforgeError):
    pass


class SpecMismatch(InvforgeError, ValueError):
    pass


class DivisionByZero(InvforgeError, ZeroDivisionError):
    pass


# polynomials
class BadExponentArity(InvforgeError, ValueError):
    pass


class NotDivisible(InvforgeError, ArithmeticError):
    pass


class MissingAssignment(InvforgeError, KeyError):
    pass


class NotSquare(InvforgeError, ValueError):
    pass


class GridMismatch(InvforgeError, ValueError):
    pass


class ParseError(InvforgeError, ValueError):
    pass


# rational expressions
class ZeroDenominator(InvforgeError, ZeroDivisionError):
    pass


class DegreeBoundOverflow(InvforgeError):
    pass


# groups and forms
class OddSizeAlternate(InvforgeError, ValueError):
    pass


class EvenCharForbidden(InvforgeError, ValueError):
    pass


class SizeMismatch(InvforgeError, ValueError):
    pass


class BudgetExceeded(InvforgeError):
    pass


class NotInGroup(InvforgeError, ValueError):
    pass


class FormInvalid(InvforgeError, ValueError):
    pass


# constructions
class IndexOutOfRange(InvforgeError, IndexError):
    pass


class BadRemovedIndex(InvforgeError, ValueError):
    pass


class KindParamMismatch(InvforgeError, ValueError):
    pass


class WrongFieldForUnitary(InvforgeError, ValueError):
    pass


class BranchUnsupported(InvforgeError):
    pass


class ZeroCofactor(InvforgeError):
    pass


# cli
class ConfigInvalid(InvforgeError, ValueError):
    pass
