"""Exception hierarchy shared by every module."""


class FdfbError(Exception):
    """Base class for all library errors."""


class NonNttModulus(FdfbError):
    pass


class DomainMismatch(FdfbError):
    pass


class ModulusMismatch(FdfbError):
    pass


class OutOfRangeExponent(FdfbError):
    pass


class DimensionMismatch(FdfbError):
    pass


class GadgetMismatch(FdfbError):
    pass


class ParamMismatch(FdfbError):
    pass


class IndexOutOfRange(FdfbError):
    pass


class ModulusNot2N(FdfbError):
    pass


class UnrepresentableKeyCoefficient(FdfbError):
    pass


class LadderLengthMismatch(FdfbError):
    pass


class TableTooLarge(FdfbError):
    pass


class InvalidLadderBase(FdfbError):
    pass


class IncompleteParams(FdfbError):
    pass


class MessageOutOfRange(FdfbError):
    pass


class NonCoprimeModuli(FdfbError):
    pass


class UnknownPreset(FdfbError):
    pass


class CorruptFile(FdfbError):
    pass


class BudgetExceeded(FdfbError):
    pass
