"""Named, seeded, tolerance-controlled checks binding the calculus to the
claimed identities.  Importing this package populates the registry."""

from .base import (
    REGISTRY,
    CheckContext,
    CheckReport,
    CheckSpec,
    TOLERANCE_TIERS,
    UnknownCheckError,
    check_ids,
    resolve_ids,
    run_checks,
)
from . import curvature_checks  # noqa: F401  (registration side effects)
from . import isometry_checks  # noqa: F401
from . import diastasis_checks  # noqa: F401
from . import fd_checks  # noqa: F401
from . import probes  # noqa: F401

__all__ = [
    "REGISTRY",
    "CheckContext",
    "CheckReport",
    "CheckSpec",
    "TOLERANCE_TIERS",
    "UnknownCheckError",
    "check_ids",
    "resolve_ids",
    "run_checks",
]
