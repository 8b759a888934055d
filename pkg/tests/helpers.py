"""Shared builders and independent oracles for the test suite."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from surfstokes.assembly import AssemblyConfig, assemble_system
from surfstokes.geometry import Sphere, Torus
from surfstokes.mesh import refine_to
from surfstokes.mms import eval_errors, make_case
from surfstokes.param_lift import LiftedMesh, geometric_errors
from surfstokes.solver import solve_direct
from surfstokes.study import compute_eoc

UNIT_SPHERE = Sphere(1.0)
TORUS = Torus(2.0, 0.5)


def surface_by_name(name):
    return {"sphere": UNIT_SPHERE, "torus": TORUS}[name]


@lru_cache(maxsize=None)
def mesh(surface: str, level: int):
    return refine_to(surface_by_name(surface), level)


@lru_cache(maxsize=24)
def system(level, k=2, m=2, case="killing", penalty_normal="improved", surface="sphere"):
    surf = surface_by_name(surface)
    mms = make_case(case, surf) if case is not None else None
    sys_ = assemble_system(mesh(surface, level), surf, k, m, mms,
                           AssemblyConfig(penalty_normal=penalty_normal))
    return sys_, mms


@lru_cache(maxsize=24)
def direct_solution(level, k=2, m=2, case="killing"):
    sys_, mms = system(level, k, m, case)
    return solve_direct(sys_)


@lru_cache(maxsize=None)
def error_sweep(levels, k=2, m=2, case="killing"):
    """ErrorReports of direct solves over the given levels."""
    out = []
    for level in levels:
        sys_, mms = system(level, k, m, case)
        out.append(eval_errors(direct_solution(level, k, m, case), mms, sys_))
    return tuple(out)


@lru_cache(maxsize=None)
def geometry_sweep(surface, k, levels=(1, 2, 3, 4), velocity_degree=None):
    hs, rows = [], []
    for level in levels:
        msh = mesh(surface, level)
        hs.append(msh.h_max)
        rows.append(geometric_errors(LiftedMesh(msh, surface_by_name(surface), k),
                                     velocity_degree=velocity_degree))
    return hs, rows


def eocs(values, hs):
    return compute_eoc(list(values), list(hs))


def variation(values):
    """Relative spread (max - min) / min of positive values."""
    v = np.asarray(values, dtype=float)
    return float((v.max() - v.min()) / v.min())


def random_surface_points(surface, n, seed=0):
    rng = np.random.default_rng(seed)
    if isinstance(surface, Sphere):
        x = rng.standard_normal((n, 3))
        return surface.radius * x / np.linalg.norm(x, axis=1)[:, None]
    u, v = rng.uniform(0, 2 * np.pi, (2, n))
    R, r = surface.major_radius, surface.minor_radius
    return np.column_stack([(R + r * np.cos(v)) * np.cos(u), (R + r * np.cos(v)) * np.sin(u),
                            r * np.sin(v)])


# --- finite-difference oracle -------------------------------------------------

def richardson_derivative(f, x, step):
    """Jacobian of f at x, columns d f / d x_k, by Richardson-extrapolated central
    differences (fourth order)."""
    x = np.asarray(x, dtype=float)

    def central(hh):
        cols = [(np.asarray(f(x + hh * e)) - np.asarray(f(x - hh * e))) / (2 * hh)
                for e in np.eye(3)]
        return np.stack(cols, axis=-1)

    return (4.0 * central(step / 2) - central(step)) / 3.0


def _proj(x):
    n = x / np.linalg.norm(x)
    return n, np.eye(3) - np.outer(n, n)


def fd_strong_form(case, y):
    """Forcing f and source g of the surface Stokes operator at surface point y,
    computed only from the case's velocity and pressure callables.

    Fields are extended by composition with the closest-point map, so all
    tangential derivatives at y are those of the surface fields.
    """
    surf = case.surface

    def u_ext(x):
        return case.velocity(surf.closest_point(x))

    def p_ext(x):
        return case.pressure(surf.closest_point(x))

    def normal(x):
        return surf.normal(surf.closest_point(x))

    def strain(x):
        n = normal(x)
        P = np.eye(3) - np.outer(n, n)
        G = P @ richardson_derivative(u_ext, x, 1e-3) @ P
        return 0.5 * (G + G.T)

    n = normal(y)
    P = np.eye(3) - np.outer(n, n)
    dE = richardson_derivative(strain, y, 1e-2)  # dE[i, j, k] = d E_ij / d x_k
    div = np.einsum("ijk,jk->i", dE, P)
    grad_u = richardson_derivative(u_ext, y, 1e-3)
    grad_p = P @ richardson_derivative(p_ext, y, 1e-3)
    f = -P @ div + case.velocity(y) + grad_p
    g = float(np.trace(grad_u @ P))
    return f, g, grad_u @ P
