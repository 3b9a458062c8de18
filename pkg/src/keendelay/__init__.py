"""Stability analysis and simulation of a delayed wage-employment-debt model.

Subpackages split along the analysis pipeline: closed-form equilibria,
linearization constants, delay-dependent spectrum, center-manifold
classification at the crossing, and direct integration of the delayed
system.  `keendelay.kernels.BACKEND` names the arithmetic backend in use.
"""

from .model_core import DomainError, ModelParams, State

__version__ = "0.1.0"

__all__ = ["DomainError", "ModelParams", "State", "__version__"]
