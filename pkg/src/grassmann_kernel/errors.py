"""Exception hierarchy for the kernel.

Verdicts ("not split", "cocycle violated") are report content and never raise.
These exceptions are reserved for misuse: bad arguments, unsupported inputs and
broken preconditions.
"""


class KernelError(Exception):
    """Base class for every error raised by the kernel."""


class ArgumentError(KernelError, ValueError):
    """An argument is out of range or structurally incompatible."""


class ParityError(KernelError, ValueError):
    """An element or map does not have the required Z/2 parity."""


class DomainError(KernelError, ValueError):
    """A smooth atom was evaluated outside its guarded domain."""


class UnsupportedCenterError(KernelError, ValueError):
    """Taylor data at the requested center is not rational."""


class TruncationError(KernelError, ValueError):
    """An element exceeds the total-degree truncation of a presentation."""


class PreconditionError(KernelError, ValueError):
    """A documented precondition (cocycle identity, gluing data, ...) fails."""


class UnsupportedModelError(KernelError, ValueError):
    """A chart model is outside what the construction can handle."""
