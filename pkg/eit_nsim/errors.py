"""
Error types raised by the simulator. The CLI maps them to exit codes:
config and file problems -> 1, solver failures -> 2, failed validation -> 3
"""


class EitSimError(Exception):
    """Base class for every error raised by eit_nsim"""


class ConfigError(EitSimError, ValueError):
    """Invalid or missing configuration value"""

    def __init__(self, message: str, key: str = ""):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class InputValidationError(EitSimError, ValueError):
    """An operation received a value outside its domain (non-unit vector, negative intensity, ...)"""


class UnsupportedModeError(EitSimError):
    """Operation is not defined for the level scheme's mode"""


class SolverError(EitSimError, RuntimeError):
    """Numerical failure while building or solving a generator"""


class DegenerateSteadyStateError(SolverError):
    pass


class StiffnessError(SolverError):
    def __init__(self, message: str, t_reached: float):
        self.t_reached = t_reached
        super().__init__(f"{message} (integration stopped at t={t_reached:.6g} us)")


class AmbiguousFixedPointError(SolverError):
    pass


class InvalidDensityMatrixError(SolverError):
    pass


class ConsistencyError(SolverError):
    """Density matrix and frame/field metadata do not belong together"""


class ScanError(SolverError):
    """Solver failure inside a scan, tagged with where it happened"""

    def __init__(self, cause: Exception, index: int, value: float, velocity_node=None):
        self.cause = cause
        self.index = index
        self.value = value
        self.velocity_node = velocity_node
        where = f"grid point {index} (value={value:.6g})"
        if velocity_node is not None:
            where += f", velocity node {velocity_node}"
        super().__init__(f"{where}: {cause}")


class ResultsFileError(EitSimError):
    """A results CSV is missing, empty or not in the eit-nsim format"""
