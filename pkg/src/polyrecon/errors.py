"""Exception types shared across the package."""


class PolyreconError(Exception):
    """Base class for all library errors."""


class SourceOnObstacle(PolyreconError):
    """A BFS source cell lies on an obstacle or outside the workspace."""


class SourceNotOnTiles(PolyreconError):
    """A tile-set BFS source is not part of the tile set."""


class SizeMismatch(PolyreconError):
    """Start and goal configurations have different tile counts."""


class InfeasibleMatching(PolyreconError):
    """Every perfect matching would pair at least one unreachable tile."""


class IllegalPickup(PolyreconError):
    """The pickup cell is not a leaf tile of the configuration."""


class IllegalPlacement(PolyreconError):
    """The placement cell is occupied, an obstacle, out of bounds, or
    adjacent only to the picked-up tile."""


class DisconnectedResult(PolyreconError):
    """Applying a dropoff would leave a disconnected configuration."""


class AlreadyAtGoal(PolyreconError):
    """A planner step was requested although start equals goal."""


class NoMoveFound(PolyreconError):
    """No legal dropoff exists; a contract violation for complete planners."""


class Stuck(PolyreconError):
    """MWPMexpand found no matched leaf pair admitting a valid dropoff."""


class BudgetExceeded(PolyreconError):
    """A solve loop ran past its step budget (treated as a bug)."""


class SeparateComponents(PolyreconError):
    """Start and goal do not share a free-space component."""


class BrokenChain(PolyreconError):
    """Consecutive plan steps do not chain (after != next step's before)."""


class NoRoom(PolyreconError):
    """No free-space component is large enough to host the polyomino."""


class TooSmall(PolyreconError):
    """Requested fixture size cannot produce the instance family's shape."""


class Infeasible(PolyreconError):
    """No feasible instance was found within the retry budget."""


class NoEligibleNode(PolyreconError):
    """Every tree node was already extended toward the goal."""


class ParseError(PolyreconError):
    """A map or record file could not be parsed."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(message + where)
