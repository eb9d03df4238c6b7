"""Exception types shared across the solver pipeline."""


class CtrlselError(Exception):
    """Base class for library errors."""


class InfeasibleSystem(CtrlselError):
    """The system is not structurally controllable even with every link selected."""


class ZeroMaxCost(CtrlselError):
    """Sparsity penalty undefined: the largest link cost is zero."""


class GroupingViolation(CtrlselError):
    """The source-grouped input constraint fails; carries a witness input."""

    def __init__(self, input_j: int, state_a: int, state_b: int):
        self.input_j = input_j
        self.state_a = state_a
        self.state_b = state_b
        super().__init__(
            f"input u{input_j} actuates x{state_a} and x{state_b}, which lie in "
            f"different source components or in a source and a non-source component"
        )


class NonIntegralSolution(CtrlselError):
    """An LP vertex has a coordinate outside {0, 1}."""

    def __init__(self, column: int, value):
        self.column = column
        self.value = value
        super().__init__(f"coordinate {column} is {value}, not in {{0, 1}}")


class CertificateFailure(CtrlselError):
    """A recovered selection failed the controllability certificate."""


class TooLarge(CtrlselError):
    """Input exceeds a documented exhaustive-search bound."""


class GenerationExhausted(CtrlselError):
    """The random instance generator gave up after its retry budget."""
