"""
Exception hierarchy for xdelta

The CLI maps each family to an exit code: UsageError -> 1, DataError -> 2,
IntegrityError -> 3. ComputationError signals a failed mathematical
precondition and is reported like a usage error.
"""


class XDeltaError(Exception):
    """Base class for every error raised by the package"""

    exit_code = 1


class UsageError(XDeltaError, ValueError):
    """Bad input supplied by the caller"""


class NonUnitGenerator(UsageError):
    def __init__(self, generator: int, modulus: int):
        self.generator = generator
        self.modulus = modulus
        super().__init__(f"Generator {generator} is not a unit modulo {modulus}")


# =========================
# Data errors
# =========================

class DataError(XDeltaError):
    """Malformed or missing bundled data"""

    exit_code = 2


class DataFileMissing(DataError):
    def __init__(self, path):
        self.path = path
        super().__init__(f"Data file not found: {path}")


class ParseError(DataError):
    def __init__(self, source: str, line: int, message: str):
        self.source = source
        self.line = line
        super().__init__(f"{source}:{line}: {message}")


class FixtureSyntaxError(ParseError):
    """Malformed line in a q-expansion fixture"""


class BadHeader(DataError):
    pass


class NotCuspidal(DataError):
    pass


class PrecisionMismatch(DataError):
    pass


class GenusMismatch(DataError):
    def __init__(self, level: int, declared: int, computed: int):
        self.level = level
        self.declared = declared
        self.computed = computed
        super().__init__(
            f"Fixture for level {level} lists {declared} forms but the computed genus is {computed}"
        )


# =========================
# Integrity errors
# =========================

class IntegrityError(XDeltaError):
    """Bundled facts disagree with recomputed invariants"""

    exit_code = 3


class GenusIntegrityFailure(IntegrityError):
    def __init__(self, level: int, delta: str, printed: int, computed: int):
        self.level = level
        self.delta = delta
        self.printed = printed
        self.computed = computed
        super().__init__(
            f"Genus mismatch for N={level}, delta={delta}: printed {printed}, computed {computed}"
        )


class CoverageFailure(IntegrityError):
    pass


class ClassificationIntegrityFailure(IntegrityError):
    pass


class NonIntegralGenus(IntegrityError):
    pass


# =========================
# Computation errors
# =========================

class ComputationError(XDeltaError):
    """A mathematical precondition failed"""


class ZeroInput(ComputationError, ValueError):
    pass


class BadDiscriminant(ComputationError, ValueError):
    pass


class NotPrime(ComputationError, ValueError):
    pass


class EvenPrime(ComputationError, ValueError):
    pass


class HyperellipticOrLowPrecision(ComputationError):
    pass


class UnexpectedKernelDimension(ComputationError):
    pass


class PreconditionViolation(ComputationError, UsageError):
    """An operation was called on input of the wrong shape, e.g. the wrong genus"""


class SetupMismatch(ComputationError):
    pass


class UnclassifiedCase(IntegrityError):
    """No decision rule fired; the bundled facts do not cover the curve"""
