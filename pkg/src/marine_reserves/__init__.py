"""Two-zone marine reserve models: patch model versus split (global) model."""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    BioParams,
    DiffusionSpec,
    DomainError,
    EconParams,
    ModelVariant,
    SolverError,
    State,
)

__all__ = [
    "BioParams",
    "DiffusionSpec",
    "DomainError",
    "EconParams",
    "ModelVariant",
    "SolverError",
    "State",
    "__version__",
]
