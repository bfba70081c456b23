"""Construction, analysis, and simulation of prepare-and-measure
verification strategies for qudit unitary gates via their Choi states."""

from .errors import GateVerifyError, NumericFault, ValidationError

__version__ = "0.1.0"

__all__ = ["GateVerifyError", "NumericFault", "ValidationError", "__version__"]
