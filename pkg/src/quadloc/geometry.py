"""Area-preserving quadrupole boundary and its element discretization.

The boundary is given in polar form

    r(phi) = (1 + eps * cos(2 phi)) / sqrt(1 + eps**2 / 2)

so that the enclosed area stays pi for every deformation.  Lengths are in
units of the undeformed radius.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

#: Upper bound of the supported deformation window.
MAX_EPSILON = 0.5
#: Smallest element count accepted by :func:`discretize_boundary`.
MIN_ELEMENTS = 16


@dataclass(frozen=True)
class ShapeParams:
    epsilon: float
    refractive_index: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.epsilon < MAX_EPSILON):
            raise ConfigurationError(
                f"epsilon must lie in [0, {MAX_EPSILON}), got {self.epsilon}")
        if not self.refractive_index > 0:
            raise ConfigurationError(
                f"refractive_index must be positive, got {self.refractive_index}")


@dataclass(frozen=True)
class BoundaryMesh:
    """Piecewise-flat boundary elements collocated at their midpoints.

    Attributes
    ----------
    points : ndarray, shape (M, 2)
        Element midpoints.
    normals : ndarray, shape (M, 2)
        Outward unit normals at the midpoints.
    weights : ndarray, shape (M,)
        Element arc lengths ``ds_j``.
    epsilon : float
        Deformation the mesh was built from.
    refractive_index : float
        Carried along so the solver can scale ``k`` to ``n k``.
    """

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    epsilon: float
    refractive_index: float = 1.0

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def mean_element_length(self) -> float:
        return float(np.mean(self.weights))


def radius(params: ShapeParams, phi):
    eps = params.epsilon
    return (1.0 + eps * np.cos(2.0 * phi)) / np.sqrt(1.0 + 0.5 * eps * eps)


def _radius_prime(params: ShapeParams, phi):
    eps = params.epsilon
    return -2.0 * eps * np.sin(2.0 * phi) / np.sqrt(1.0 + 0.5 * eps * eps)


def boundary_point(params: ShapeParams, phi):
    """Cartesian boundary point(s) at polar angle ``phi``.

    Accepts a scalar or an array of angles; the last axis of the result holds
    the ``(x, y)`` components.
    """
    r = radius(params, phi)
    return np.stack([r * np.cos(phi), r * np.sin(phi)], axis=-1)


def boundary_derivatives(params: ShapeParams, phi):
    """Tangent ``d(point)/d(phi)``, outward unit normal and speed at ``phi``.

    The normal is the tangent rotated clockwise by 90 degrees, which points
    outward for a counter-clockwise parametrization.
    """
    r = radius(params, phi)
    dr = _radius_prime(params, phi)
    c, s = np.cos(phi), np.sin(phi)
    tangent = np.stack([dr * c - r * s, dr * s + r * c], axis=-1)
    speed = np.hypot(tangent[..., 0], tangent[..., 1])
    normal = np.stack([tangent[..., 1], -tangent[..., 0]], axis=-1) / speed[..., None]
    return tangent, normal, speed


def enclosed_area(params: ShapeParams, samples: int = 4096) -> float:
    """Area ``(1/2) \\oint r^2 dphi`` by the periodic trapezoid rule.

    The integrand is a trigonometric polynomial of degree 4, so the rule is
    exact to rounding for any ``samples > 4``.
    """
    phi = 2.0 * np.pi * np.arange(samples) / samples
    return float(0.5 * np.sum(radius(params, phi) ** 2) * (2.0 * np.pi / samples))


def perimeter(params: ShapeParams, samples: int = 100_000) -> float:
    phi = 2.0 * np.pi * np.arange(samples) / samples
    _, _, speed = boundary_derivatives(params, phi)
    return float(np.sum(speed) * (2.0 * np.pi / samples))


def discretize_boundary(params: ShapeParams, elements: int) -> BoundaryMesh:
    """Split the boundary into ``elements`` pieces uniform in polar angle.

    Element ``j`` is centred at ``phi_j = 2 pi j / M`` and has arc length
    ``speed(phi_j) * 2 pi / M``.
    """
    if elements < MIN_ELEMENTS:
        raise ConfigurationError(
            f"need at least {MIN_ELEMENTS} boundary elements, got {elements}")
    phi = 2.0 * np.pi * np.arange(elements) / elements
    points = boundary_point(params, phi)
    _, normals, speed = boundary_derivatives(params, phi)
    return BoundaryMesh(
        points=points,
        normals=normals,
        weights=speed * (2.0 * np.pi / elements),
        epsilon=params.epsilon,
        refractive_index=params.refractive_index,
    )


def contains(params: ShapeParams, x, y):
    """Boolean mask of points strictly inside the boundary."""
    r = np.hypot(x, y)
    return r < radius(params, np.arctan2(y, x))


def bounding_box(params: ShapeParams, samples: int = 4096):
    """Half-extents ``(ax, ay)`` of the boundary; the shape is centred at 0."""
    phi = 2.0 * np.pi * np.arange(samples) / samples
    pts = boundary_point(params, phi)
    return float(np.max(np.abs(pts[:, 0]))), float(np.max(np.abs(pts[:, 1])))
