"""Exception hierarchy; CLI exit codes hang off these classes."""


class RigidLabError(Exception):
    exit_code = 1


class InvalidPolynomial(RigidLabError, ValueError):
    exit_code = 2


class RepeatedRoot(InvalidPolynomial):
    pass


class ReduciblePolynomial(InvalidPolynomial):
    pass


class PrecisionExhausted(RigidLabError):
    exit_code = 3


class DegradedPrecision(PrecisionExhausted):
    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n


class ZeroElement(RigidLabError, ValueError):
    exit_code = 2


class NonUnitGenerator(RigidLabError, ValueError):
    exit_code = 2


class DependentGenerators(RigidLabError, ValueError):
    exit_code = 2

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class LatticeSaturationError(RigidLabError):
    pass


class HypothesisViolation(RigidLabError):
    exit_code = 4


class ResolutionTooFine(RigidLabError, ValueError):
    exit_code = 2


class NotTranslatedTorsion(RigidLabError, ValueError):
    exit_code = 4
