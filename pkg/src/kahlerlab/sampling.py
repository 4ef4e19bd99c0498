"""Deterministic seeded samplers for admissible evaluation points.

Every check derives its generator from the run seed plus its own id, so
reports are reproducible bit-for-bit and independent of check ordering.
Default sampling region is the annulus 0.2 <= |z| <= 2.0, which clears the
blown-up origin, the z.qbar = 0 diastasis locus (for near-diagonal pairs)
and the branch cuts of polarized square roots.
"""

from __future__ import annotations

import hashlib
from typing import Callable

import numpy as np

RMIN = 0.2
RMAX = 2.0


def rng_for(seed: int, *labels: str) -> np.random.Generator:
    """Generator seeded by the run seed and a stable hash of the labels."""
    digest = hashlib.sha256("/".join(labels).encode()).digest()
    words = [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]
    return np.random.default_rng(np.random.SeedSequence([int(seed), *words]))


def unit_directions(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    # one interleaved draw per row keeps sample prefixes independent of count
    raw = rng.normal(size=(count, 2, n))
    v = raw[:, 0, :] + 1j * raw[:, 1, :]
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def annulus_points(
    rng: np.random.Generator, count: int, n: int, rmin: float = RMIN, rmax: float = RMAX
) -> np.ndarray:
    """Points with direction uniform on the unit sphere of C^n and radius
    uniform on [rmin, rmax].

    Directions and radii come from spawned substreams so that samples nest:
    the first k points are the same whatever count is requested.  Max-type
    residuals are then monotone in the sample count."""
    dir_rng, rad_rng = rng.spawn(2)
    dirs = unit_directions(dir_rng, count, n)
    radii = rad_rng.uniform(rmin, rmax, size=(count, 1))
    return dirs * radii


def ball_points(rng: np.random.Generator, count: int, n: int, rmax: float) -> np.ndarray:
    dir_rng, rad_rng = rng.spawn(2)
    dirs = unit_directions(dir_rng, count, n)
    radii = rad_rng.uniform(0.0, rmax, size=(count, 1))
    return dirs * radii


def near_diagonal_pairs(
    rng: np.random.Generator,
    count: int,
    n: int,
    spread: float = 0.3,
    rmin: float = RMIN,
    rmax: float = RMAX,
) -> tuple[np.ndarray, np.ndarray]:
    """(centers q, nearby points z): q in the annulus, |z - q| <= spread.

    Staying near the diagonal keeps (z.qbar)^2 + 1 in the right half-plane
    for the polarized Eguchi-Hanson terms."""
    q_rng, d_rng = rng.spawn(2)
    Q = annulus_points(q_rng, count, n, rmin, rmax)
    Z = Q + spread * ball_points(d_rng, count, n, 1.0)
    return Q, Z


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def rejection_sample(
    draw: Callable[[int], np.ndarray],
    accept: Callable[[np.ndarray], np.ndarray],
    count: int,
    max_rounds: int = 50,
) -> np.ndarray:
    """Draw batches until `count` rows pass `accept` (boolean mask per row)."""
    rows: list[np.ndarray] = []
    have = 0
    for _ in range(max_rounds):
        batch = draw(count)
        mask = accept(batch)
        good = batch[mask]
        if good.shape[0]:
            rows.append(good)
            have += good.shape[0]
        if have >= count:
            return np.concatenate(rows, axis=0)[:count]
    raise RuntimeError(f"rejection sampling stalled: {have}/{count} accepted")
