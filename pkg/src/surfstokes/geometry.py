"""Exact differential geometry of the analytic surfaces (sphere, torus).

All functions accept a single point of shape ``(3,)`` or a batch of shape
``(..., 3)`` and broadcast accordingly.  Closed forms are used throughout;
no iterative closest-point solves.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfTubularNeighborhood

__all__ = [
    "AnalyticSurface",
    "Sphere",
    "Torus",
    "GeometricData",
    "signed_distance",
    "geometric_data",
    "closest_point",
    "exact_normal_extension",
    "make_surface",
]


@dataclass(frozen=True)
class GeometricData:
    """Signed distance, normal, Weingarten map, projector and closest point."""

    d: np.ndarray
    n: np.ndarray
    H: np.ndarray
    P: np.ndarray
    pi_x: np.ndarray


class AnalyticSurface:
    """Common interface; subclasses provide the closed forms."""

    kind: str
    tubular_width: float

    @property
    def diameter(self) -> float:
        raise NotImplementedError

    @property
    def area(self) -> float:
        raise NotImplementedError

    def _distance(self, x):
        raise NotImplementedError

    def _normal(self, x):
        raise NotImplementedError

    def _hessian(self, x):
        raise NotImplementedError

    def _check(self, x, d):
        bad = np.abs(d) >= self.tubular_width
        if np.any(bad):
            worst = float(np.max(np.abs(d)))
            raise OutOfTubularNeighborhood(
                f"|d| = {worst:.3g} outside tubular width {self.tubular_width:.3g}"
            )

    def signed_distance(self, x):
        x = np.asarray(x, dtype=float)
        d = self._distance(x)
        self._check(x, d)
        return d

    def normal(self, x):
        x = np.asarray(x, dtype=float)
        self._check(x, self._distance(x))
        return self._normal(x)

    def closest_point(self, x):
        x = np.asarray(x, dtype=float)
        d = self._distance(x)
        self._check(x, d)
        return self._project(x, d)

    def _project(self, x, d):
        return x - d[..., None] * self._normal(x)

    def geometric_data(self, x) -> GeometricData:
        x = np.asarray(x, dtype=float)
        d = self._distance(x)
        self._check(x, d)
        n = self._normal(x)
        H = self._hessian(x)
        P = np.eye(3) - n[..., :, None] * n[..., None, :]
        return GeometricData(d=d, n=n, H=H, P=P, pi_x=x - d[..., None] * n)


@dataclass(frozen=True)
class Sphere(AnalyticSurface):
    radius: float = 1.0
    tubular_width: float = field(default=None)  # type: ignore[assignment]
    kind: str = field(default="sphere", init=False)

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("sphere radius must be positive")
        if self.tubular_width is None:
            object.__setattr__(self, "tubular_width", 0.5 * self.radius)

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    @property
    def area(self) -> float:
        return 4.0 * np.pi * self.radius**2

    def _distance(self, x):
        return np.linalg.norm(x, axis=-1) - self.radius

    def _normal(self, x):
        return x / np.linalg.norm(x, axis=-1)[..., None]

    def _project(self, x, d):
        # exact normalization keeps projected points on the sphere to 1 ulp
        return self.radius * self._normal(x)

    def _hessian(self, x):
        r = np.linalg.norm(x, axis=-1)
        n = x / r[..., None]
        P = np.eye(3) - n[..., :, None] * n[..., None, :]
        return P / r[..., None, None]


@dataclass(frozen=True)
class Torus(AnalyticSurface):
    """Torus of revolution about the x3-axis."""

    major_radius: float = 2.0
    minor_radius: float = 0.5
    tubular_width: float = field(default=None)  # type: ignore[assignment]
    kind: str = field(default="torus", init=False)

    def __post_init__(self):
        if not (self.major_radius > self.minor_radius > 0):
            raise ValueError("torus requires major_radius > minor_radius > 0")
        if self.tubular_width is None:
            object.__setattr__(self, "tubular_width", 0.5 * self.minor_radius)

    @property
    def diameter(self) -> float:
        return 2.0 * (self.major_radius + self.minor_radius)

    @property
    def area(self) -> float:
        return 4.0 * np.pi**2 * self.major_radius * self.minor_radius

    def _frame(self, x):
        rho = np.hypot(x[..., 0], x[..., 1])
        if np.any(rho <= 1e-14 * self.major_radius):
            raise OutOfTubularNeighborhood("point on the torus axis; closest point is not unique")
        q = rho - self.major_radius
        s = np.hypot(q, x[..., 2])
        if np.any(s <= 1e-14 * self.minor_radius):
            raise OutOfTubularNeighborhood("point on the core circle; closest point is not unique")
        return rho, q, s

    def _distance(self, x):
        _, _, s = self._frame(x)
        return s - self.minor_radius

    def _normal(self, x):
        rho, q, s = self._frame(x)
        a = q / s
        n = np.empty(x.shape)
        n[..., 0] = a * x[..., 0] / rho
        n[..., 1] = a * x[..., 1] / rho
        n[..., 2] = x[..., 2] / s
        return n

    def _hessian(self, x):
        # H = t t^T / s + (a / rho) e_phi e_phi^T with t the meridional tangent
        rho, q, s = self._frame(x)
        a = q / s
        b = x[..., 2] / s
        cos, sin = x[..., 0] / rho, x[..., 1] / rho
        zero = np.zeros_like(rho)
        t = np.stack([-b * cos, -b * sin, a], axis=-1)
        e_phi = np.stack([-sin, cos, zero], axis=-1)
        return (t[..., :, None] * t[..., None, :]) / s[..., None, None] + (
            (a / rho)[..., None, None] * e_phi[..., :, None] * e_phi[..., None, :]
        )


def make_surface(kind: str, **params) -> AnalyticSurface:
    if kind == "sphere":
        return Sphere(radius=params.get("radius", 1.0))
    if kind == "torus":
        return Torus(
            major_radius=params.get("major_radius", 2.0),
            minor_radius=params.get("minor_radius", 0.5),
        )
    raise ValueError(f"unsupported surface kind {kind!r}")


def signed_distance(surface: AnalyticSurface, x):
    """Signed distance to the surface, negative inside."""
    return surface.signed_distance(x)


def geometric_data(surface: AnalyticSurface, x) -> GeometricData:
    return surface.geometric_data(x)


def closest_point(surface: AnalyticSurface, x):
    return surface.closest_point(x)


def exact_normal_extension(surface: AnalyticSurface, x):
    """Normal at the closest point, n(pi(x)); equals grad d inside the tube."""
    return surface.normal(x)
