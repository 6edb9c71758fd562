"""Exception hierarchy shared by every module of the package."""


class BVQError(Exception):
    """Base class for all errors raised by :mod:`bvq`."""


class DegreeMismatch(BVQError):
    pass


class DSquaredNonzero(BVQError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DuplicateGenerator(BVQError):
    pass


class UnspecializedParameter(BVQError):
    pass


class CutoffTooLargeForMemory(BVQError):
    pass


class CutoffExceeded(BVQError):
    pass


class NotWeightLowering(BVQError):
    pass


class NotDegreeZero(BVQError):
    pass


class InvalidQuadraticModule(BVQError):
    pass


class InvalidMorphism(BVQError):
    pass


class DegeneratePairing(BVQError):
    pass


class NonzeroDifferential(BVQError):
    pass


class NotCentral(BVQError):
    pass


class NotClosed(BVQError):
    pass


class WeightNotGraded(BVQError):
    pass


class Unstable(BVQError):
    pass


class InvalidSpecialization(BVQError):
    pass


class OddDegreeUnreduced(BVQError):
    pass


class ParseError(BVQError):
    def __init__(self, message, location=None):
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location


class ValidationError(BVQError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
