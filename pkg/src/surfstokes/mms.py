"""Manufactured solutions on the sphere and discrete error evaluation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _polynomial_case as poly
from .errors import DimensionMismatch, UnsupportedSurface
from .geometry import AnalyticSurface, Sphere

__all__ = [
    "ManufacturedCase",
    "ErrorReport",
    "killing_case",
    "polynomial_case",
    "make_case",
    "interpolate",
    "eval_errors",
    "velocity_error_integrals",
    "pressure_error",
]

Field = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ManufacturedCase:
    """Exact tangential velocity, zero-mean pressure and data on the surface.

    All callables take surface points of shape (..., 3).  ``velocity_gradient``
    returns grad(u^e) at the surface (rows are components), which is
    tangential on the right.
    """

    name: str
    surface: AnalyticSurface
    velocity: Field
    velocity_gradient: Field
    pressure: Field
    pressure_gradient: Field
    forcing: Field
    source: Field

    def extended_velocity(self, geo):
        """u^e and grad u^e at ambient points with geometric data ``geo``.

        Uses grad(u o pi) = (grad u)(pi(x)) (P - d H)(x).
        """
        y = geo.pi_x
        dpi = geo.P - geo.d[..., None, None] * geo.H
        return self.velocity(y), self.velocity_gradient(y) @ dpi


def _projector(y):
    n = y / np.linalg.norm(y, axis=-1)[..., None]
    return n, np.eye(3) - n[..., :, None] * n[..., None, :]


def _cubic_pressure(y):
    return y[..., 0] * y[..., 1] * y[..., 2]


def _cubic_pressure_ambient_gradient(y):
    x1, x2, x3 = y[..., 0], y[..., 1], y[..., 2]
    return np.stack([x2 * x3, x1 * x3, x1 * x2], axis=-1)


def _cubic_pressure_gradient(y):
    _, P = _projector(y)
    return np.einsum("...ij,...j->...i", P, _cubic_pressure_ambient_gradient(y))


def killing_case(surface: AnalyticSurface) -> ManufacturedCase:
    """Rotation u = e3 x x (a Killing field, E(u) = 0) with p = x1 x2 x3."""
    if not isinstance(surface, Sphere):
        raise UnsupportedSurface("the Killing case is defined on the sphere only")
    rot = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])

    def velocity(y):
        return np.einsum("ij,...j->...i", rot, y)

    def velocity_gradient(y):
        _, P = _projector(y)
        return rot @ P

    def forcing(y):
        return velocity(y) + _cubic_pressure_gradient(y)

    def source(y):
        return np.zeros(np.shape(y)[:-1])

    return ManufacturedCase("killing", surface, velocity, velocity_gradient, _cubic_pressure,
                            _cubic_pressure_gradient, forcing, source)


def polynomial_case(surface: AnalyticSurface) -> ManufacturedCase:
    """u_T = P w with w = (x2 x3, -x1 x3, x1^2 - x2^2), p = x1 x2 x3.

    The velocity is not divergence free, so the source g is nonzero.
    """
    if not isinstance(surface, Sphere):
        raise UnsupportedSurface("the polynomial case is defined on the sphere only")
    R = surface.radius
    return ManufacturedCase(
        "polynomial",
        surface,
        lambda y: poly.velocity(np.asarray(y, dtype=float), R),
        lambda y: poly.velocity_gradient(np.asarray(y, dtype=float), R),
        _cubic_pressure,
        _cubic_pressure_gradient,
        lambda y: poly.forcing(np.asarray(y, dtype=float), R),
        lambda y: poly.source(np.asarray(y, dtype=float), R),
    )


def make_case(name: str, surface: AnalyticSurface) -> ManufacturedCase:
    try:
        factory = {"killing": killing_case, "polynomial": polynomial_case}[name]
    except KeyError:
        raise ValueError(f"unknown manufactured case {name!r}") from None
    return factory(surface)


def interpolate(case: ManufacturedCase, disc):
    """Nodal interpolants (u_I, p_I) of the extended exact fields on Gamma_h^k."""
    lifted = disc.lifted
    xu = lifted.node_positions(disc.dofmap.velocity)
    xp = lifted.node_positions(disc.dofmap.pressure)
    u = case.velocity(case.surface.closest_point(xu))
    p = case.pressure(case.surface.closest_point(xp))
    return u.T.ravel(), p


def _fe_velocity(disc, u, sl):
    """Values (F,Q,3) and surface gradients (F,Q,3,3) of a discrete velocity."""
    n = disc.dofmap.n_scalar
    cells = disc.dofmap.velocity.cells[sl]
    coeff = np.stack([u[c * n : (c + 1) * n][cells] for c in range(3)], axis=-1)  # (F, nb, 3)
    values = np.einsum("qj,fjc->fqc", disc.vbasis.values, coeff)
    grads = disc.chart_block(sl).surface_gradient(disc.vbasis.grads)
    return values, np.einsum("fqjx,fjc->fqcx", grads, coeff)


def velocity_error_integrals(disc, case: ManufacturedCase, u) -> dict:
    """Squared integrals of u^e - u_h over Gamma_h^k.

    Keys: ``l2``, ``h1_semi`` (full surface gradient of all components),
    ``normal`` (exact normal component), ``tangential_h1`` (P grad e P).
    """
    u = np.zeros(disc.n_u) if u is None else np.asarray(u, dtype=float)
    if u.shape != (disc.n_u,):
        raise DimensionMismatch(f"velocity vector must have length {disc.n_u}")
    geo = disc.exact_geometry()
    ue, gue = case.extended_velocity(geo)
    out = dict(l2=0.0, h1_semi=0.0, normal=0.0, tangential_h1=0.0)
    for sl in disc.blocks():
        values, grads = _fe_velocity(disc, u, sl)
        Ph = disc.chart_block(sl).projector
        dS = disc.dS[sl]
        e = ue[sl] - values
        ge = gue[sl] @ Ph - grads
        P = geo.P[sl]
        out["l2"] += float(np.sum(dS * np.einsum("fqc,fqc->fq", e, e)))
        out["h1_semi"] += float(np.sum(dS * np.einsum("fqcx,fqcx->fq", ge, ge)))
        out["normal"] += float(np.sum(dS * np.einsum("fqc,fqc->fq", geo.n[sl], e) ** 2))
        gt = P @ ge @ P
        out["tangential_h1"] += float(np.sum(dS * np.einsum("fqcx,fqcx->fq", gt, gt)))
    return out


def pressure_error(disc, case: ManufacturedCase, p) -> float:
    """L2(Gamma_h^k) error of p_h against p^e after the L2-optimal constant shift."""
    p = np.zeros(disc.n_p) if p is None else np.asarray(p, dtype=float)
    if p.shape != (disc.n_p,):
        raise DimensionMismatch(f"pressure vector must have length {disc.n_p}")
    pe = case.pressure(disc.exact_geometry().pi_x)
    ph = np.einsum("ql,fl->fq", disc.pbasis.values, p[disc.dofmap.pressure.cells])
    diff = pe - ph
    shift = np.sum(diff * disc.dS) / np.sum(disc.dS)
    return float(np.sqrt(np.sum((diff - shift) ** 2 * disc.dS)))


@dataclass(frozen=True)
class ErrorReport:
    energy_error: float
    pressure_l2: float
    velocity_l2: float
    tangential_h1: float
    level: int
    h: float
    n_u: int
    n_p: int


def eval_errors(result, case: ManufacturedCase, system) -> ErrorReport:
    """Energy-norm velocity error and shifted pressure L2 error.

    ``result`` is a SolveResult or any object with ``u`` and ``p`` attributes.
    """
    disc = system.disc
    parts = velocity_error_integrals(disc, case, result.u)
    energy = np.sqrt(parts["l2"] + parts["h1_semi"] + disc.h**-2 * parts["normal"])
    return ErrorReport(
        energy_error=float(energy),
        pressure_l2=pressure_error(disc, case, result.p),
        velocity_l2=float(np.sqrt(parts["l2"])),
        tangential_h1=float(np.sqrt(parts["l2"] + parts["tangential_h1"])),
        level=disc.mesh.level,
        h=disc.h,
        n_u=disc.n_u,
        n_p=disc.n_p,
    )
