"""Signature-aware linear algebra for surfaces of constant curvature.

The configuration space is the quadric ``kappa * (x^2 + y^2 + sigma*z^2) = 1``
embedded in R^3, where ``sigma = +1`` for positive curvature (a sphere) and
``sigma = -1`` for negative curvature (the upper sheet of a hyperboloid,
carrying the Minkowski inner product).  Points and velocities are plain
3-vectors; every operation here takes the signature explicitly or through a
:class:`Curvature` record.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MANIFOLD_TOL = 1e-10


class DegenerateVector(ValueError):
    """Raised when a vector cannot be projected to the surface."""


@dataclass(frozen=True)
class Curvature:
    """Nonzero Gaussian curvature together with its derived signature."""

    kappa: float

    def __post_init__(self):
        if not np.isfinite(self.kappa) or self.kappa == 0.0:
            raise ValueError(f"curvature must be finite and nonzero, got {self.kappa!r}")

    @property
    def sigma(self) -> float:
        return 1.0 if self.kappa > 0 else -1.0

    @property
    def scale(self) -> float:
        """The natural length |kappa|**-1/2 of the surface."""
        return abs(self.kappa) ** -0.5


def signed_dot(a, b, sigma: float) -> float:
    """Inner product a_x b_x + a_y b_y + sigma * a_z b_z."""
    return float(a[0] * b[0] + a[1] * b[1] + sigma * a[2] * b[2])


def signed_cross(a, b, sigma: float) -> np.ndarray:
    """Cross product whose z-component carries the signature sign."""
    return np.array(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            sigma * (a[0] * b[1] - a[1] * b[0]),
        ]
    )


def manifold_residual(q, curv: Curvature) -> float:
    """kappa * (q . q) - 1; zero exactly when q lies on the surface."""
    return curv.kappa * signed_dot(q, q, curv.sigma) - 1.0


def project_position(q, curv: Curvature) -> np.ndarray:
    """Radially rescale q onto the surface.

    For negative curvature the input must lie inside the light cone
    (q . q < 0 in the Minkowski metric) with z > 0, so the result stays on
    the upper sheet.
    """
    q = np.asarray(q, dtype=float)
    s = curv.kappa * signed_dot(q, q, curv.sigma)
    if s <= 0.0 or not np.isfinite(s):
        raise DegenerateVector(
            f"cannot rescale {q.tolist()} onto the kappa={curv.kappa} surface: "
            f"kappa*(q.q) = {s}"
        )
    if curv.kappa < 0 and q[2] <= 0.0:
        raise DegenerateVector(f"point {q.tolist()} is not on the upper sheet (z <= 0)")
    return q / np.sqrt(s)


def project_velocity(q, v, curv: Curvature) -> np.ndarray:
    """Remove the signed-metric component of v along q, making it tangent."""
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    qq = signed_dot(q, q, curv.sigma)
    return v - (signed_dot(q, v, curv.sigma) / qq) * q
