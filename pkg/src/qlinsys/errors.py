"""Exception hierarchy for qlinsys."""


class QLinSysError(Exception):
    """Base class for all library errors."""


# -- numerical kernels ------------------------------------------------------

class KernelError(QLinSysError):
    pass


class SingularPencil(KernelError):
    """Sylvester operator is singular: spectra of A and -B overlap."""


class NoStabilizingSolution(KernelError):
    """The Riccati equation has no stabilizing solution."""


class ImaginaryAxisEigenvalue(NoStabilizingSolution):
    """The Hamiltonian matrix has an eigenvalue on (or near) the imaginary axis."""


class NotHermitian(KernelError):
    pass


# Name used for Riccati inputs.
NotHermitianInput = NotHermitian


class UnstableSystem(KernelError):
    pass


class ResolventSingular(KernelError):
    pass


# -- structure / model ------------------------------------------------------

class StructureError(QLinSysError):
    pass


class OddDimension(StructureError):
    pass


class NotDoubled(StructureError):
    pass


class SingularT(StructureError):
    pass


class SingularTheta(StructureError):
    pass


class InvalidParameters(StructureError):
    pass


class NonRealResult(StructureError):
    pass


class NotScattering(StructureError):
    pass


class DimensionMismatch(StructureError):
    pass


# -- realizability ----------------------------------------------------------

class NotMinimal(QLinSysError):
    pass


# -- synthesis --------------------------------------------------------------

class SynthesisError(QLinSysError):
    """Raised when a synthesis step fails.

    ``hypothesis`` names the violated condition, e.g. ``"riccati1"``.
    """

    def __init__(self, message, hypothesis=None):
        super().__init__(message)
        self.hypothesis = hypothesis


class AssumptionViolation(SynthesisError):
    pass


class RiccatiUnsolvable(SynthesisError):
    pass


class IndefiniteSolution(SynthesisError):
    pass


class CouplingFailure(SynthesisError):
    pass


class NormTooLarge(SynthesisError):
    pass


class NotHurwitz(SynthesisError):
    pass


class ControllerNotDirectlyRealizable(SynthesisError):
    pass


# -- serialization ----------------------------------------------------------

class SchemaError(QLinSysError):
    """Invalid system document. ``field`` and ``line`` locate the problem."""

    def __init__(self, message, field=None, line=None):
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        text = f"{message} ({', '.join(where)})" if where else message
        super().__init__(text)
        self.field = field
        self.line = line
