"""kahlerlab: curvature and diastasis verification for Kahler metrics on
blow-ups of C^n, built on exact symbolic Wirtinger calculus."""

__version__ = "0.1.0"

from . import atlas, diastasis, expr, fd, metrics, potentials, sampling  # noqa: E402
from .potentials import (  # noqa: E402
    KahlerPotential,
    ball_potential,
    eh_potential,
    flat_potential,
    fs_potential,
    s_potential,
)

__all__ = [
    "__version__",
    "atlas",
    "diastasis",
    "expr",
    "fd",
    "metrics",
    "potentials",
    "sampling",
    "KahlerPotential",
    "ball_potential",
    "eh_potential",
    "flat_potential",
    "fs_potential",
    "s_potential",
]
