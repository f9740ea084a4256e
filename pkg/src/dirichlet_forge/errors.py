"""Exception taxonomy shared across the package.

Validation errors map to CLI exit code 2, budget exhaustion to exit code 3.
"""


class ForgeError(Exception):
    """Base class for all package errors."""

    def payload(self) -> dict:
        return {"type": type(self).__name__, "message": str(self)}


class ValidationError(ForgeError):
    """Malformed or inconsistent input data."""


class BasisMismatchError(ValidationError):
    """Operands built over different semigroup bases."""


class PreconditionError(ForgeError):
    """A documented operation precondition does not hold."""


class SingularElementError(PreconditionError):
    """Inversion requested for an element with vanishing constant term."""


class NeumannInapplicableError(PreconditionError):
    """Neumann contraction ratio q >= 1; carries the measured q."""

    def __init__(self, q: float):
        super().__init__(f"Neumann series inapplicable: contraction ratio q = {q} >= 1")
        self.q = q

    def payload(self) -> dict:
        out = super().payload()
        out["q"] = self.q
        return out


class CapExceededError(ForgeError):
    """A configured enumeration or precision cap was exhausted."""


class BudgetExhaustedError(ForgeError):
    """Search budget ran out; .best carries the best-effort result."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best
