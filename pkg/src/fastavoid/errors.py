"""Error types shared across the library."""


class FastAvoidError(Exception):
    """Base class for library errors."""


class GammaSingularityError(FastAvoidError):
    """Distance query at an obstacle's reference point (direction undefined)."""


class InsideObstacleError(FastAvoidError):
    """Query point lies inside (or on) an obstacle; caller decides recovery."""

    def __init__(self, message="inside-obstacle", gamma=None, obstacle_index=None):
        super().__init__(message)
        self.gamma = gamma
        self.obstacle_index = obstacle_index


class ContactError(FastAvoidError):
    """Agent body is in contact with (or penetrates) scan points."""

    def __init__(self, indices):
        super().__init__(f"contact with {len(indices)} scan point(s)")
        self.indices = list(indices)


class StaleWriteError(FastAvoidError):
    """A sensor channel received a payload older than the one it holds."""


class ScenarioError(FastAvoidError):
    """Scenario file violates the schema; `pointer` is a JSON-pointer path."""

    def __init__(self, pointer, message):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer
