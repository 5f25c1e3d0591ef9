"""Exception types shared across the package.

Each class carries the process exit code the CLI maps it to.
"""


class EncloseError(Exception):
    exit_code = 1
    kind = "error"

    def to_dict(self):
        return {"error": self.kind, "message": str(self)}


class InvalidArgumentError(EncloseError, ValueError):
    exit_code = 2
    kind = "invalid-argument"


class UnsupportedDegreeError(InvalidArgumentError):
    kind = "unsupported-degree"


class SolverError(EncloseError):
    exit_code = 4
    kind = "solver-failure"


class NotPositiveDefiniteError(SolverError):
    kind = "not-positive-definite"

    def __init__(self, index, pivot=None):
        self.index = index
        self.pivot = pivot
        msg = f"matrix is not positive definite (pivot {index}"
        if pivot is not None:
            msg += f", value {pivot:.3e}"
        super().__init__(msg + ")")

    def to_dict(self):
        d = super().to_dict()
        d["index"] = self.index
        return d


class ConvergenceError(SolverError):
    kind = "convergence-failure"


class ShiftInSpectrumError(EncloseError):
    exit_code = 3
    kind = "shift-in-spectrum"

    def __init__(self, t, index=None):
        self.t = t
        self.index = index
        super().__init__(
            f"shift t={t!r} is numerically indistinguishable from a spectral point "
            "on this trial space (A2t lost definiteness)"
        )

    def to_dict(self):
        d = super().to_dict()
        d["t"] = self.t
        return d


class InconsistentEnclosureError(EncloseError):
    exit_code = 5
    kind = "inconsistent-enclosure"

    def __init__(self, index, lower, upper):
        self.index = index
        self.lower = lower
        self.upper = upper
        super().__init__(
            f"crossed bounds for eigenvalue {index}: lower {lower!r} > upper {upper!r}; "
            "the shift is probably misplaced relative to the true count below it"
        )

    def to_dict(self):
        d = super().to_dict()
        d.update(index=self.index, lower=self.lower, upper=self.upper)
        return d
