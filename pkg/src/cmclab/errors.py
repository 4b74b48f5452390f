"""Exception types raised across cmclab."""


class CMCError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 3

    def to_json(self):
        return {"error": type(self).__name__, "message": str(self)}


class GroupSpecError(CMCError, ValueError):
    exit_code = 2


class PotentialZeroOnRange(CMCError):
    pass


class StepFailure(CMCError):
    pass


class ClosureFailure(CMCError):
    pass


class InitFailure(CMCError):
    pass


class NewtonDivergence(CMCError):
    pass


class StepUnderflow(CMCError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

    def to_json(self):
        out = super().to_json()
        out["diagnostics"] = self.diagnostics
        return out


class EigenFailure(CMCError):
    pass


class DegenerateTriangle(CMCError):
    pass


class InvalidAxis(CMCError, ValueError):
    pass


class NormalizationMissing(CMCError):
    pass


class StructureResidualTooLarge(CMCError):
    pass


class SchemaError(CMCError, ValueError):
    exit_code = 2

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))

    def to_json(self):
        return {"error": "SchemaError", "errors": self.errors}


class IoError(CMCError, OSError):
    # unreadable or foreign input files are reported like configuration errors
    exit_code = 2


class ExtrapolationWarning(UserWarning):
    """Candidate Gauss values left the tabulated coverage of a reference."""
