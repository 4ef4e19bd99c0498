"""Central finite-difference oracles for Wirtinger derivatives.

These provide the derivative-free reference values used to cross-validate
the symbolic engine.  A function f is sampled on the diagonal (zbar = conj z)
as a map C^n -> C of the underlying real coordinates, and Wirtinger
derivatives are assembled from real-direction central differences:

    d/dz_i    = (d/dx_i - i d/dy_i) / 2
    d/dzbar_i = (d/dx_i + i d/dy_i) / 2

Nothing here touches the symbolic differentiation path.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

PointFn = Callable[[np.ndarray], complex]

#: Default step for first-order stencils (per-derivative error ~1e-11).
STEP = 1e-5
#: Step for nested second-order stencils, where roundoff scales like eps/h^2.
STEP2 = 1e-4


def _bump(z: np.ndarray, i: int, delta: complex) -> np.ndarray:
    w = np.array(z, dtype=complex)
    w[i] += delta
    return w


def wirtinger_fd(f: PointFn, z: np.ndarray, i: int, anti: bool = False, step: float = STEP) -> complex:
    """First Wirtinger derivative of f at z by central differences."""
    dx = (f(_bump(z, i, step)) - f(_bump(z, i, -step))) / (2 * step)
    dy = (f(_bump(z, i, 1j * step)) - f(_bump(z, i, -1j * step))) / (2 * step)
    if anti:
        return 0.5 * (dx + 1j * dy)
    return 0.5 * (dx - 1j * dy)


def mixed_fd(f: PointFn, z: np.ndarray, i: int, j: int, step: float = STEP2) -> complex:
    """Second mixed derivative d/dz_i d/dzbar_j of f, nested stencils."""

    def inner(w: np.ndarray) -> complex:
        return wirtinger_fd(f, w, j, anti=True, step=step)

    return wirtinger_fd(inner, z, i, anti=False, step=step)


def hessian_fd(f: PointFn, z: np.ndarray, step: float = STEP2) -> np.ndarray:
    n = len(z)
    H = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            H[i, j] = mixed_fd(f, z, i, j, step=step)
    return H


def gradient_fd(f: PointFn, z: np.ndarray, anti: bool = False, step: float = STEP) -> np.ndarray:
    n = len(z)
    return np.array([wirtinger_fd(f, z, i, anti=anti, step=step) for i in range(n)])
