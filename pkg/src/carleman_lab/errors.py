"""Exception hierarchy shared by the numerical modules and the CLI."""


class CarlemanLabError(Exception):
    """Base class; ``code`` is the name emitted in machine-readable error JSON."""

    code = "CarlemanLabError"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class ConfigInvalid(CarlemanLabError):
    code = "ConfigInvalid"


class InvalidGeometry(CarlemanLabError):
    code = "InvalidGeometry"


class UnknownBoundary(CarlemanLabError):
    code = "UnknownBoundary"


class UnsupportedGeometry(CarlemanLabError):
    code = "UnsupportedGeometry"


class WeightViolation(CarlemanLabError):
    code = "WeightViolation"

    def __init__(self, condition, worst_node, value):
        self.condition = condition
        self.worst_node = tuple(int(i) for i in worst_node)
        self.value = float(value)
        super().__init__(f"{condition} (worst node {self.worst_node}, value {self.value:.6g})")

    def to_dict(self):
        d = super().to_dict()
        d.update(condition=self.condition, worst_node=list(self.worst_node), value=self.value)
        return d


class ParameterOverflow(CarlemanLabError):
    code = "ParameterOverflow"


class SolverDiverged(CarlemanLabError):
    code = "SolverDiverged"


class IncompatibleData(CarlemanLabError):
    code = "IncompatibleData"


class TruncationTooSmall(CarlemanLabError):
    code = "TruncationTooSmall"


class GammaOffGrid(CarlemanLabError):
    code = "GammaOffGrid"


class SamplingExhausted(CarlemanLabError):
    code = "SamplingExhausted"


class NoStableRegion(CarlemanLabError):
    """Raised only on request; sweeps normally record it in the result."""

    code = "NoStableRegion"
