"""Lagrange bases on the reference triangle, quadrature and global DOF maps.

Reference triangle: vertices (0,0), (1,0), (0,1).  Local node order is
vertices, then edge nodes along (v0->v1), (v1->v2), (v2->v0), then interior
nodes row by row.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import UnsupportedDegree, UnsupportedExactness
from .mesh import LOCAL_EDGES, BaseMesh

__all__ = [
    "ReferenceBasis",
    "QuadratureRule",
    "DofMap",
    "ScalarSpace",
    "reference_basis",
    "quadrature",
    "build_dofmap",
    "scalar_space",
    "lagrange_nodes",
    "eval_fe",
    "MAX_DEGREE",
    "MAX_EXACTNESS",
]

MAX_DEGREE = 4
MAX_EXACTNESS = 20

_VERTS = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


def lagrange_nodes(m: int) -> np.ndarray:
    """Equispaced degree-m nodes in local order, shape (n_m, 2)."""
    nodes = [v for v in _VERTS]
    for a, b in LOCAL_EDGES:
        for i in range(1, m):
            nodes.append(_VERTS[a] + (i / m) * (_VERTS[b] - _VERTS[a]))
    for j in range(1, m):
        for i in range(1, m - j):
            nodes.append(np.array([i / m, j / m]))
    return np.array(nodes)


def _monomial_exponents(m):
    return [(a, t - a) for t in range(m + 1) for a in range(t, -1, -1)]


def _monomials(xi, exps, dx=0, dy=0):
    """Derivative d^dx/dxi1 d^dy/dxi2 of each monomial, shape (Q, n)."""
    out = np.empty((len(xi), len(exps)))
    for k, (a, b) in enumerate(exps):
        if a < dx or b < dy:
            out[:, k] = 0.0
            continue
        ca = np.prod(np.arange(a - dx + 1, a + 1)) if dx else 1.0
        cb = np.prod(np.arange(b - dy + 1, b + 1)) if dy else 1.0
        out[:, k] = ca * cb * xi[:, 0] ** (a - dx) * xi[:, 1] ** (b - dy)
    return out


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray
    exactness: int

    def __len__(self):
        return len(self.weights)


@lru_cache(maxsize=None)
def quadrature(exactness: int) -> QuadratureRule:
    """Symmetric positive-weight rule on the reference triangle.

    Backed by the Xiao-Gimbutas tables shipped with modepy, mapped from the
    bi-unit triangle.
    """
    if not 0 <= exactness <= MAX_EXACTNESS:
        raise UnsupportedExactness(f"quadrature exactness must be in [0, {MAX_EXACTNESS}]")
    import modepy

    rule = modepy.XiaoGimbutasSimplexQuadrature(max(exactness, 1), 2)
    points = 0.5 * (np.asarray(rule.nodes).T + 1.0)
    weights = 0.25 * np.asarray(rule.weights)
    points.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(points, weights, int(rule.exact_to))


@dataclass(frozen=True, eq=False)
class ReferenceBasis:
    """Degree-m Lagrange basis; ``values``/``grads`` are tabulated at ``rule``."""

    degree: int
    nodes: np.ndarray
    coefficients: np.ndarray
    rule: QuadratureRule | None
    values: np.ndarray | None
    grads: np.ndarray | None

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def barycentric(self) -> np.ndarray:
        return np.column_stack([1.0 - self.nodes.sum(axis=1), self.nodes])

    def evaluate(self, xi) -> np.ndarray:
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        return _monomials(xi, self._exps) @ self.coefficients

    def gradient(self, xi) -> np.ndarray:
        """Reference gradients, shape (Q, n_nodes, 2)."""
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        gx = _monomials(xi, self._exps, 1, 0) @ self.coefficients
        gy = _monomials(xi, self._exps, 0, 1) @ self.coefficients
        return np.stack([gx, gy], axis=-1)

    def hessian(self, xi) -> np.ndarray:
        """Reference second derivatives, shape (Q, n_nodes, 2, 2)."""
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        hxx = _monomials(xi, self._exps, 2, 0) @ self.coefficients
        hxy = _monomials(xi, self._exps, 1, 1) @ self.coefficients
        hyy = _monomials(xi, self._exps, 0, 2) @ self.coefficients
        return np.stack([np.stack([hxx, hxy], -1), np.stack([hxy, hyy], -1)], -1)

    @property
    def _exps(self):
        return _monomial_exponents(self.degree)


@lru_cache(maxsize=None)
def reference_basis(m: int, exactness: int | None = None) -> ReferenceBasis:
    """Lagrange basis of degree m, optionally tabulated at a quadrature rule."""
    if not 1 <= m <= MAX_DEGREE:
        raise UnsupportedDegree(f"degree {m} not in [1, {MAX_DEGREE}]")
    nodes = lagrange_nodes(m)
    vander = _monomials(nodes, _monomial_exponents(m))
    coefficients = np.linalg.inv(vander)
    basis = ReferenceBasis(m, nodes, coefficients, None, None, None)
    if exactness is None:
        return basis
    rule = quadrature(exactness)
    return ReferenceBasis(
        m, nodes, coefficients, rule, basis.evaluate(rule.points), basis.gradient(rule.points)
    )


@dataclass(frozen=True, eq=False)
class ScalarSpace:
    """Continuous degree-m Lagrange space on the flat mesh.

    ``cells[t]`` lists global DOFs of triangle t in local node order;
    ``points`` holds the flat (unlifted) node coordinates.
    """

    degree: int
    cells: np.ndarray
    points: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.points)


def scalar_space(mesh: BaseMesh, m: int) -> ScalarSpace:
    if not 1 <= m <= MAX_DEGREE:
        raise UnsupportedDegree(f"degree {m} not in [1, {MAX_DEGREE}]")
    V, E, F = mesh.n_vertices, mesh.n_edges, mesh.n_triangles
    ne = m - 1
    ni = (m - 1) * (m - 2) // 2
    cells = np.empty((F, (m + 1) * (m + 2) // 2), dtype=np.int64)
    cells[:, :3] = mesh.triangles
    col = 3
    steps = np.arange(ne)
    for i, (a, b) in enumerate(LOCAL_EDGES):
        e = mesh.tri_edges[:, i]
        forward = mesh.triangles[:, a] < mesh.triangles[:, b]
        local = np.where(forward[:, None], steps[None, :], ne - 1 - steps[None, :])
        cells[:, col : col + ne] = V + ne * e[:, None] + local
        col += ne
    cells[:, col:] = V + ne * E + ni * np.arange(F)[:, None] + np.arange(ni)[None, :]

    bary = np.column_stack([1.0 - lagrange_nodes(m).sum(axis=1), lagrange_nodes(m)])
    tri = mesh.vertices[mesh.triangles]
    dim = V + ne * E + ni * F
    points = np.empty((dim, 3))
    points[:V] = mesh.vertices
    # edge nodes are written from their forward-oriented triangle when there is
    # one, so every shared node gets one deterministic coordinate; boundary
    # edges of open meshes may only have a backward-oriented triangle
    flat = np.einsum("nk,tkd->tnd", bary, tri)
    for want_forward in (False, True):
        for i, (a, b) in enumerate(LOCAL_EDGES):
            sel = (mesh.triangles[:, a] < mesh.triangles[:, b]) == want_forward
            sl = slice(3 + i * ne, 3 + (i + 1) * ne)
            points[cells[sel, sl].ravel()] = flat[sel, sl].reshape(-1, 3)
    points[cells[:, 3 + 3 * ne :].ravel()] = flat[:, 3 + 3 * ne :].reshape(-1, 3)
    return ScalarSpace(m, cells, points)


@dataclass(frozen=True, eq=False)
class DofMap:
    """Taylor-Hood numbering: velocity P_m (three component copies) and pressure P_{m-1}.

    Velocity vectors are component-major: index ``c * n_scalar + j``.
    """

    m: int
    velocity: ScalarSpace
    pressure: ScalarSpace

    @property
    def n_scalar(self) -> int:
        return self.velocity.dim

    @property
    def n_u(self) -> int:
        return 3 * self.velocity.dim

    @property
    def n_p(self) -> int:
        return self.pressure.dim


def build_dofmap(mesh: BaseMesh, m: int) -> DofMap:
    if m < 2:
        # P1 velocity alone is still a valid scalar space; pressure degenerates to P1
        return DofMap(m, scalar_space(mesh, m), scalar_space(mesh, 1))
    return DofMap(m, scalar_space(mesh, m), scalar_space(mesh, m - 1))


def eval_fe(coeffs, space: ScalarSpace, geometry, element: int, xi):
    """Value and surface gradient of a scalar FE function on one lifted element.

    ``geometry`` is a :class:`surfstokes.param_lift.LiftedMesh`.  Returns
    ``(values (Q,), gradients (Q, 3))``; gradients are tangent to the lifted
    surface.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    basis = reference_basis(space.degree)
    c = np.asarray(coeffs, dtype=float)[space.cells[element]]
    values = basis.evaluate(xi) @ c
    ref_grad = np.einsum("qj,qjd->qd", np.broadcast_to(c, (len(xi), len(c))), basis.gradient(xi))
    J = geometry.jacobian(element, xi)
    G = np.einsum("qia,qib->qab", J, J)
    grads = np.einsum("qia,qab,qb->qi", J, np.linalg.inv(G), ref_grad)
    return values, grads
