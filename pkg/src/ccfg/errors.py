"""Exception types raised across the toolkit."""


class CcfgError(Exception):
    """Base class for all toolkit errors."""


class DegenerateForce(CcfgError):
    """Center of pressure is undefined: no normal force across the patch."""


class NegativeNormalForce(CcfgError):
    """A contact normal force was negative (separating) where compression was required."""


class TooFewPoints(CcfgError):
    """Not enough points to run the noisy-hull heuristic."""


class DegenerateVisionPolygon(CcfgError):
    """Vision vertices are collinear or too few to define a polygon."""


class NoFeasibleMode(CcfgError):
    """No enumerated contact-mode hypothesis passed the feasibility checks."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class JammedConfiguration(CcfgError):
    """A mode is feasible only with unbounded contact forces."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class NotReady(CcfgError):
    """Wrench-cone estimate queried before enough samples were ingested."""


class InsufficientHistory(CcfgError):
    """Classifier history buffer is shorter than the required window."""


class DuplicateId(CcfgError):
    """A factor-graph variable id was added twice."""


class UnknownVariable(CcfgError):
    """A factor references a variable id that does not exist."""


class SingularNormalEquations(CcfgError):
    """Normal equations were rank deficient even after damping."""


class SolverDiverged(CcfgError):
    """Factor-graph solve increased cost beyond the divergence guard."""


class FrameOutOfWindow(CcfgError):
    """Requested frame is no longer (or not yet) in the active window."""


class StaleEstimate(CcfgError):
    """Controller received an estimator snapshot that is too old or degenerate."""


class ConesNotReady(CcfgError):
    """Controller requires wrench-cone estimates that are not ready yet."""


class MalformedLog(CcfgError):
    """A trajectory log file is empty or fails schema validation."""


class ScenarioError(CcfgError):
    """Scenario file failed validation."""
