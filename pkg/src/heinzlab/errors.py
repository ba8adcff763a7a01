class HeinzLabError(Exception):
    pass


class ValidationError(HeinzLabError, ValueError):
    """Bad shapes, non-Hermitian input, parameters out of range."""


class DomainError(ValidationError):
    """A scalar map evaluated outside its domain (e.g. log of a non-positive eigenvalue)."""


class HypothesisViolation(ValidationError):
    """Parameters fall outside the stated hypotheses of a registered inequality."""

    def __init__(self, check_id: str, hypothesis: str):
        self.check_id = check_id
        self.hypothesis = hypothesis
        super().__init__(f"{check_id}: hypothesis violated: {hypothesis}")

    def __reduce__(self):
        return (type(self), (self.check_id, self.hypothesis))


class NumericalError(HeinzLabError, ArithmeticError):
    """A kernel failed to converge or produced non-finite output."""

    def __init__(self, message: str, seed: int | None = None):
        super().__init__(message)
        self.seed = seed

    def __reduce__(self):
        return (type(self), (self.args[0], self.seed))
