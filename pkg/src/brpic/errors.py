"""Exception hierarchy.  CLI exit codes hang off these classes."""


class BrPicError(Exception):
    exit_code = 1


class DimensionMismatch(BrPicError, ValueError):
    pass


class Singular(BrPicError, ValueError):
    pass


class NotPrime(BrPicError, ValueError):
    pass


class WrongCharacteristic(BrPicError, ValueError):
    pass


class WrongShape(BrPicError, ValueError):
    pass


class NotACocycle(BrPicError, ValueError):
    pass


class SizeGuardExceeded(BrPicError):
    exit_code = 2


class MemoryGuardExceeded(BrPicError):
    exit_code = 2


class GeneratorNotInvertible(BrPicError, ValueError):
    pass


class GeneratorNotStabilizing(BrPicError, ValueError):
    pass


class UnknownGroup(BrPicError, KeyError):
    pass


class NondegenerateRequired(BrPicError):
    """The alternating part is degenerate, so the nondegenerate-case theorem does not apply."""
    exit_code = 3


class UnidentifiedCase(BrPicError):
    """No known classification names the expected stabilizer for this case."""
    exit_code = 3


class FormNotInvariant(BrPicError, ValueError):
    def __init__(self, triple, msg=None):
        self.triple = triple
        super().__init__(msg or f"form is not invariant at basis triple {triple}")


class LieAlgebraError(BrPicError, ValueError):
    pass


class DocumentError(BrPicError, ValueError):
    pass
