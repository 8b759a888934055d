"""Degree-k parametric lift of the flat mesh onto the curved surface Gamma_h^k.

The lift on each flat triangle is the degree-k Lagrange interpolant of the
closest-point map.  Edge nodes are generated once per global edge so that
neighbouring elements share identical lifted points.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateLift
from .fe_space import ScalarSpace, lagrange_nodes, reference_basis, scalar_space
from .geometry import AnalyticSurface
from .mesh import BaseMesh

__all__ = [
    "LiftedElement",
    "LiftedMesh",
    "ChartData",
    "ImprovedNormalField",
    "lift_element",
    "eval_lift",
    "discrete_normal",
    "discrete_weingarten",
    "build_improved_normal",
    "geometric_errors",
]


@dataclass(frozen=True)
class ChartData:
    """Lift evaluated at reference points for a batch of elements.

    Shapes: ``x`` (F,Q,3), ``J`` (F,Q,3,2), ``G_inv`` (F,Q,2,2), ``mu`` (F,Q),
    ``normal`` (F,Q,3), ``weingarten`` (F,Q,3,3) or None.
    """

    x: np.ndarray
    J: np.ndarray
    G_inv: np.ndarray
    mu: np.ndarray
    normal: np.ndarray
    weingarten: np.ndarray | None

    @property
    def projector(self) -> np.ndarray:
        n = self.normal
        return np.eye(3) - n[..., :, None] * n[..., None, :]

    def surface_gradient(self, ref_grads):
        """Map reference gradients (Q, nb, 2) to tangential gradients (F, Q, nb, 3)."""
        return np.einsum("fqia,fqab,qjb->fqji", self.J, self.G_inv, ref_grads, optimize=True)


def _chart(nodes, k, xi, second_derivatives=False):
    """Evaluate the polynomial chart defined by lifted nodes (F, n_k, 3)."""
    basis = reference_basis(k)
    phi = basis.evaluate(xi)
    dphi = basis.gradient(xi)
    x = np.einsum("qj,fjd->fqd", phi, nodes)
    J = np.einsum("qja,fjd->fqda", dphi, nodes)
    G = np.einsum("fqia,fqib->fqab", J, J)
    det = G[..., 0, 0] * G[..., 1, 1] - G[..., 0, 1] ** 2
    G_inv = np.empty_like(G)
    G_inv[..., 0, 0] = G[..., 1, 1] / det
    G_inv[..., 1, 1] = G[..., 0, 0] / det
    G_inv[..., 0, 1] = G_inv[..., 1, 0] = -G[..., 0, 1] / det
    c = np.cross(J[..., 0], J[..., 1])
    mu = np.linalg.norm(c, axis=-1)
    normal = c / mu[..., None]

    weingarten = None
    if second_derivatives:
        if k == 1:
            weingarten = np.zeros(x.shape + (3,))
        else:
            d2 = np.einsum("qjab,fjd->fqdab", basis.hessian(xi), nodes)
            dn = []
            for a in range(2):
                dc = np.cross(d2[..., a, 0], J[..., 1]) + np.cross(J[..., 0], d2[..., a, 1])
                dc_t = dc - np.einsum("fqi,fqi->fq", normal, dc)[..., None] * normal
                dn.append(dc_t / mu[..., None])
            dn = np.stack(dn, axis=-1)  # (F,Q,3,2): derivative of n_h along xi_a
            H = np.einsum("fqia,fqab,fqjb->fqij", dn, G_inv, J)
            weingarten = 0.5 * (H + np.swapaxes(H, -1, -2))
    return ChartData(x, J, G_inv, mu, normal, weingarten)


class LiftedMesh:
    """Gamma_h^k: the flat mesh together with its degree-k lift."""

    def __init__(self, mesh: BaseMesh, surface: AnalyticSurface, k: int):
        if k < 1:
            raise ConfigError("geometry degree k must be >= 1")
        self.mesh = mesh
        self.surface = surface
        self.k = k
        self.geometry_space = scalar_space(mesh, k)
        if k == 1:
            self.lifted_points = mesh.vertices.copy()
        else:
            self.lifted_points = surface.closest_point(self.geometry_space.points)
            self.lifted_points[: mesh.n_vertices] = mesh.vertices
        self.element_nodes = self.lifted_points[self.geometry_space.cells]
        tri = mesh.vertices[mesh.triangles]
        self.flat_area = 0.5 * np.linalg.norm(
            np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]), axis=1
        )
        self.flat_normals = mesh.flat_normals()

    @property
    def h(self) -> float:
        return self.mesh.h_max

    @property
    def n_elements(self) -> int:
        return self.mesh.n_triangles

    def evaluate(self, xi, elements=None, second_derivatives=False, check=True) -> ChartData:
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        sel = slice(None) if elements is None else elements
        data = _chart(self.element_nodes[sel], self.k, xi, second_derivatives)
        if check:
            ratio = data.mu / (2.0 * self.flat_area[sel])[:, None]
            aligned = np.einsum("fqi,fi->fq", data.normal, self.flat_normals[sel])
            if np.any(ratio < 1e-8) or np.any(aligned <= 0.0):
                raise DegenerateLift("lifted chart is degenerate; mesh too coarse for curvature")
        return data

    def jacobian(self, element: int, xi) -> np.ndarray:
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        return _chart(self.element_nodes[[element]], self.k, xi).J[0]

    def node_positions(self, space: ScalarSpace) -> np.ndarray:
        """Images on Gamma_h^k of the flat nodes of a scalar space."""
        if self.k == 1:
            return space.points.copy()
        ref = lagrange_nodes(space.degree)
        x = _chart(self.element_nodes, self.k, ref).x
        out = np.empty((space.dim, 3))
        out[space.cells.ravel()] = x.reshape(-1, 3)
        return out

    def area(self, exactness: int | None = None) -> float:
        from .fe_space import quadrature

        rule = quadrature(exactness if exactness is not None else 2 * self.k + 2)
        data = self.evaluate(rule.points)
        return float(np.sum(data.mu @ rule.weights))


@dataclass(frozen=True)
class LiftedElement:
    flat_triangle: np.ndarray
    k: int
    lifted_nodes: np.ndarray

    @property
    def chart_origin(self) -> np.ndarray:
        return self.flat_triangle[0]

    @property
    def chart_matrix(self) -> np.ndarray:
        """Affine reference-to-flat map: X = origin + chart_matrix @ xi."""
        T = self.flat_triangle
        return np.column_stack([T[1] - T[0], T[2] - T[0]])


def lift_element(T, surface: AnalyticSurface, k: int) -> LiftedElement:
    """Lift a single flat triangle (3x3 vertex array) with degree-k nodes."""
    T = np.asarray(T, dtype=float)
    if k < 1:
        raise ConfigError("geometry degree k must be >= 1")
    ref = lagrange_nodes(k)
    bary = np.column_stack([1.0 - ref.sum(axis=1), ref])
    flat = bary @ T
    nodes = flat.copy() if k == 1 else surface.closest_point(flat)
    nodes[:3] = T
    elem = LiftedElement(T, k, nodes)
    from .fe_space import quadrature

    # the signed area element (relative to the flat normal) must stay positive:
    # a sign change means the Jacobian loses rank somewhere on the element
    rule = quadrature(2 * k + 2)
    xi = np.vstack([rule.points, lagrange_nodes(max(k, 2))])
    data = _chart(nodes[None], k, xi)
    c = np.cross(T[1] - T[0], T[2] - T[0])
    flat_mu = np.linalg.norm(c)
    signed = (data.mu * np.einsum("qi,i->q", data.normal[0], c / flat_mu))[0]
    if flat_mu == 0.0 or np.any(signed < 1e-8 * flat_mu):
        raise DegenerateLift("lift Jacobian has rank < 2 on the element")
    return elem


def eval_lift(elem: LiftedElement, xi):
    """Return (x, J, mu_ref) at reference point(s) xi."""
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    data = _chart(elem.lifted_nodes[None], elem.k, xi)
    return data.x[0], data.J[0], data.mu[0]


def discrete_normal(elem: LiftedElement, xi) -> np.ndarray:
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    return _chart(elem.lifted_nodes[None], elem.k, xi).normal[0]


def discrete_weingarten(elem: LiftedElement, xi) -> np.ndarray:
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    return _chart(elem.lifted_nodes[None], elem.k, xi, second_derivatives=True).weingarten[0]


@dataclass(frozen=True)
class ImprovedNormalField:
    """Per-node 3-vectors of the interpolated exact normal in the velocity space."""

    coefficients: np.ndarray
    space: ScalarSpace

    def at(self, values: np.ndarray, elements=None) -> np.ndarray:
        """Evaluate given basis values (Q, nb); returns (F, Q, 3)."""
        cells = self.space.cells if elements is None else self.space.cells[elements]
        return np.einsum("qj,fjd->fqd", values, self.coefficients[cells])


def build_improved_normal(
    surface: AnalyticSurface, velocity_space: ScalarSpace, lifted: LiftedMesh
) -> ImprovedNormalField:
    """Nodal interpolant of x -> n(pi(x)) in the degree-m velocity space."""
    if velocity_space.degree < lifted.k:
        raise ConfigError(
            f"improved normal needs velocity degree m={velocity_space.degree} >= k={lifted.k}"
        )
    p = lifted.node_positions(velocity_space)
    return ImprovedNormalField(surface.normal(p), velocity_space)


def geometric_errors(lifted: LiftedMesh, exactness: int = 6, velocity_degree: int | None = None):
    """Sup-norm geometry errors of Gamma_h^k sampled at quadrature points.

    Returns a dict with ``d`` (max |d|), ``n`` (max |n o pi - n_h|) and
    ``H`` (max spectral norm of H o pi - H_h).  With ``velocity_degree``
    given, ``improved_normal`` holds max |n o pi - n_hat| for the nodal
    interpolant in that space.
    """
    from .fe_space import quadrature

    rule = quadrature(exactness)
    chart = lifted.evaluate(rule.points, second_derivatives=True)
    surface = lifted.surface
    geo = surface.geometric_data(chart.x)
    exact = surface.geometric_data(geo.pi_x)
    out = {
        "d": float(np.max(np.abs(geo.d))),
        "n": float(np.max(np.linalg.norm(exact.n - chart.normal, axis=-1))),
        "H": float(np.max(np.linalg.norm(exact.H - chart.weingarten, ord=2, axis=(-2, -1)))),
    }
    if velocity_degree is not None:
        space = scalar_space(lifted.mesh, velocity_degree)
        nhat = build_improved_normal(surface, space, lifted)
        values = reference_basis(velocity_degree).evaluate(rule.points)
        diff = exact.n - nhat.at(values)
        out["improved_normal"] = float(np.max(np.linalg.norm(diff, axis=-1)))
    return out
