"""Exception types shared by the package."""


class InvalidArgumentError(ValueError):
    """Raised when an input violates a documented precondition."""


class NumericalFailureError(ArithmeticError):
    """Raised when an iterative or orthogonalization step fails.

    ``stage`` names the pipeline step that failed, so that command-line
    front ends can report it.
    """

    def __init__(self, message, stage=None, index=None):
        super().__init__(message)
        self.stage = stage
        self.index = index
