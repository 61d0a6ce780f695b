"""Exception types shared across the package.

The CLI maps DomainError to exit code 1, ToleranceError to 2 and
ConfigError to 65; anything else is a bug.
"""


class LevykitError(Exception):
    pass


class DomainError(LevykitError):
    """Invalid parameters or a quantity that does not exist for them."""


class MomentDivergenceError(DomainError):
    def __init__(self, side: str, detail: str = ""):
        self.side = side
        msg = f"moment integral diverges on the {side} side"
        super().__init__(msg + (f": {detail}" if detail else ""))


class DegenerateMeasureError(DomainError):
    pass


class GridTooSmallError(DomainError):
    def __init__(self, msg: str, suggested_L: float | None = None,
                 suggested_n: int | None = None):
        self.suggested_L = suggested_L
        self.suggested_n = suggested_n
        if suggested_L is not None:
            msg += f" (try L >= {suggested_L:.3g}"
            if suggested_n is not None:
                msg += f", n >= {suggested_n}"
            msg += ")"
        super().__init__(msg)


class PlanError(DomainError):
    pass


class ConeError(DomainError):
    """(tau, beta) outside the admissible cone of a Karamata regime."""


class ExponentChoiceError(DomainError):
    """Sandwich exponents incompatible with the profile's growth."""


class InsufficientRangeError(DomainError):
    """Profile not evaluable over enough dyadic octaves to estimate indices."""


class CoefficientBoundsError(DomainError):
    pass


class NodeBudgetError(DomainError):
    """Quadrature node count would exceed the configured budget."""


class SolverDivergenceError(DomainError):
    def __init__(self, msg: str, trace: list[float] | None = None):
        self.trace = trace or []
        super().__init__(msg)


class ConvergenceError(SolverDivergenceError):
    """Iteration stayed bounded but missed the tolerance in max_iter."""


class ToleranceError(LevykitError):
    """A verification quantity exceeded its stated tolerance."""

    def __init__(self, name: str, value: float, bound: float):
        self.name = name
        self.value = value
        self.bound = bound
        super().__init__(f"{name}: {value:.6g} exceeds {bound:.6g}")


class ConfigError(LevykitError):
    pass
