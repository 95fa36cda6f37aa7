"""Exception types shared across the package.

Control-flow errors (budget, missing equilibria, failed constructions) get
dedicated classes; bad input data raises ValidationError with a stable
machine-readable ``code`` so callers and the CLI can react without parsing
messages.
"""


class GameError(Exception):
    """Base class for every domain error raised by this package."""

    code = "error"


class ValidationError(GameError, ValueError):
    """Invalid input; ``code`` names the violated rule (e.g. "not-monotone")."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class BudgetExceeded(GameError):
    """Enumerating a game would visit more type placements than allowed."""

    code = "budget-exceeded"

    def __init__(self, count: int, budget: int):
        super().__init__(
            f"{count} type placements exceed the enumeration budget of {budget}"
        )
        self.count = count
        self.budget = budget


class NoEquilibrium(GameError):
    """The game admits no equilibrium, so price ratios are undefined."""

    code = "no-equilibrium"


class ZeroWelfareEquilibrium(GameError):
    """The worst equilibrium has social welfare 0; the anarchy ratio is undefined."""

    code = "zero-welfare-equilibrium"


class WrongGameClass(GameError):
    """A construction was asked to run on a game outside its supported class."""

    code = "wrong-game-class"


class NotGrid(GameError):
    """The topology carries no grid metadata."""

    code = "not-grid"


class NotATree(GameError):
    """The topology is not a tree."""

    code = "not-a-tree"


class ConstructionCheckFailed(GameError):
    """A construction finished but its output failed the equilibrium check."""

    code = "construction-check-failed"
