"""Flat base triangulations with vertices on the exact surface."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import ConvexHull

from .geometry import AnalyticSurface, Sphere, Torus

__all__ = [
    "BaseMesh",
    "MeshDiagnostics",
    "build_base_mesh",
    "refine",
    "refine_to",
    "mesh_size",
    "validate",
    "write_off",
]

LOCAL_EDGES = ((0, 1), (1, 2), (2, 0))


@dataclass(frozen=True, eq=False)
class BaseMesh:
    """Triangulation Gamma_h.

    ``edges`` holds sorted vertex pairs; ``edge_triangles`` the (up to two)
    adjacent triangles per edge, ``-1`` marking a missing neighbour;
    ``tri_edges[t, i]`` is the global edge through local vertices
    ``LOCAL_EDGES[i]`` of triangle ``t``.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    edge_triangles: np.ndarray
    tri_edges: np.ndarray
    level: int
    h_max: float
    h_min: float

    @classmethod
    def from_triangles(cls, vertices, triangles, level: int = 0) -> "BaseMesh":
        vertices = np.ascontiguousarray(vertices, dtype=float)
        triangles = np.ascontiguousarray(triangles, dtype=np.int64)
        F = len(triangles)
        pairs = np.concatenate([triangles[:, [a, b]] for a, b in LOCAL_EDGES])
        pairs.sort(axis=1)
        edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        tri_edges = inverse.reshape(3, F).T.copy()

        counts = np.bincount(inverse, minlength=len(edges))
        if np.any(counts > 2):
            raise ValueError("non-manifold edge (more than two adjacent triangles)")
        owner = np.tile(np.arange(F), 3)
        order = np.argsort(inverse, kind="stable")
        first = np.concatenate([[0], np.cumsum(counts)[:-1]])
        slot = np.arange(3 * F) - first[inverse[order]]
        edge_triangles = np.full((len(edges), 2), -1, dtype=np.int64)
        edge_triangles[inverse[order], slot] = owner[order]

        h_max, h_min = _diameters(vertices, triangles)
        return cls(vertices, triangles, edges, edge_triangles, tri_edges, level, h_max, h_min)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def h(self) -> float:
        return self.h_max

    def flat_normals(self) -> np.ndarray:
        v = self.vertices[self.triangles]
        c = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
        return c / np.linalg.norm(c, axis=1)[:, None]


def _triangle_diameters(vertices, triangles):
    v = vertices[triangles]
    lengths = np.stack(
        [np.linalg.norm(v[:, b] - v[:, a], axis=1) for a, b in LOCAL_EDGES], axis=1
    )
    return lengths


def _diameters(vertices, triangles):
    if len(triangles) == 0:
        raise ValueError("empty mesh")
    diam = _triangle_diameters(vertices, triangles).max(axis=1)
    return float(diam.max()), float(diam.min())


def mesh_size(mesh: BaseMesh) -> tuple[float, float]:
    """Largest and smallest triangle diameter (longest edge)."""
    return _diameters(mesh.vertices, mesh.triangles)


def _orient_outward(vertices, triangles, surface):
    v = vertices[triangles]
    c = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
    centroid_normal = surface.normal(surface.closest_point(v.mean(axis=1)))
    flip = np.einsum("ij,ij->i", c, centroid_normal) < 0
    out = triangles.copy()
    out[flip] = out[flip][:, [0, 2, 1]]
    return out


def _icosahedron(radius):
    phi = 0.5 * (1.0 + np.sqrt(5.0))
    pts = []
    for s1 in (-1.0, 1.0):
        for s2 in (-1.0, 1.0):
            pts.append((0.0, s1, s2 * phi))
            pts.append((s1, s2 * phi, 0.0))
            pts.append((s2 * phi, 0.0, s1))
    pts = np.array(pts)
    pts = radius * pts / np.linalg.norm(pts, axis=1)[:, None]
    return pts, ConvexHull(pts).simplices.astype(np.int64)


def _torus_grid(surface: Torus, n_major=16, n_minor=8):
    R, r = surface.major_radius, surface.minor_radius
    phi = 2 * np.pi * np.arange(n_major) / n_major
    theta = 2 * np.pi * np.arange(n_minor) / n_minor
    P, T = np.meshgrid(phi, theta, indexing="ij")
    rho = R + r * np.cos(T)
    vertices = np.stack([rho * np.cos(P), rho * np.sin(P), r * np.sin(T)], axis=-1).reshape(-1, 3)

    def vid(i, j):
        return (i % n_major) * n_minor + (j % n_minor)

    tris = []
    for i in range(n_major):
        for j in range(n_minor):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    return vertices, np.array(tris, dtype=np.int64)


def build_base_mesh(surface: AnalyticSurface, n_major: int = 16, n_minor: int = 8) -> BaseMesh:
    """Level-0 mesh: icosahedron for a sphere, structured grid for a torus."""
    if isinstance(surface, Sphere):
        vertices, tris = _icosahedron(surface.radius)
    elif isinstance(surface, Torus):
        vertices, tris = _torus_grid(surface, n_major, n_minor)
    else:
        raise ValueError(f"no base mesh for {surface!r}")
    tris = _orient_outward(vertices, tris, surface)
    return BaseMesh.from_triangles(vertices, tris, level=0)


def refine(mesh: BaseMesh, surface: AnalyticSurface) -> BaseMesh:
    """Uniform red refinement; midpoints are pushed onto the surface."""
    V = mesh.n_vertices
    mid = 0.5 * (mesh.vertices[mesh.edges[:, 0]] + mesh.vertices[mesh.edges[:, 1]])
    vertices = np.concatenate([mesh.vertices, surface.closest_point(mid)])
    t = mesh.triangles
    m = V + mesh.tri_edges  # m[:, 0] on (v0,v1), m[:, 1] on (v1,v2), m[:, 2] on (v2,v0)
    children = np.concatenate(
        [
            np.stack([t[:, 0], m[:, 0], m[:, 2]], axis=1),
            np.stack([m[:, 0], t[:, 1], m[:, 1]], axis=1),
            np.stack([m[:, 2], m[:, 1], t[:, 2]], axis=1),
            np.stack([m[:, 0], m[:, 1], m[:, 2]], axis=1),
        ]
    )
    return BaseMesh.from_triangles(vertices, children, level=mesh.level + 1)


def refine_to(surface: AnalyticSurface, level: int) -> BaseMesh:
    mesh = build_base_mesh(surface)
    for _ in range(level):
        mesh = refine(mesh, surface)
    return mesh


@dataclass(frozen=True)
class MeshDiagnostics:
    closed: bool
    oriented: bool
    max_vertex_deviation: float
    shape_regularity: float
    quasi_uniformity: float
    euler_characteristic: int
    boundary_edges: int


def validate(mesh: BaseMesh, surface: AnalyticSurface) -> MeshDiagnostics:
    """Closedness, orientation and shape diagnostics; never raises on bad meshes."""
    boundary = int(np.sum(mesh.edge_triangles[:, 1] < 0))
    v = mesh.vertices[mesh.triangles]
    centroid = v.mean(axis=1)
    try:
        n_exact = surface.normal(surface.closest_point(centroid))
        oriented = bool(np.all(np.einsum("ij,ij->i", mesh.flat_normals(), n_exact) > 0))
    except ValueError:
        oriented = False
    deviation = float(np.max(np.abs(surface._distance(mesh.vertices))))

    lengths = _triangle_diameters(mesh.vertices, mesh.triangles)
    a, b, c = lengths.T
    s = 0.5 * (a + b + c)
    area = np.sqrt(np.maximum(s * (s - a) * (s - b) * (s - c), 0.0))
    inradius = area / s
    circumradius = a * b * c / (4.0 * area)
    h_max, h_min = mesh_size(mesh)
    return MeshDiagnostics(
        closed=boundary == 0,
        oriented=oriented,
        max_vertex_deviation=deviation,
        shape_regularity=float(np.max(circumradius / inradius)),
        quasi_uniformity=h_max / h_min,
        euler_characteristic=mesh.n_vertices - mesh.n_edges + mesh.n_triangles,
        boundary_edges=boundary,
    )


def write_off(mesh: BaseMesh, path) -> None:
    """Write the mesh in OFF format (vertex count, face count, edge count)."""
    lines = ["OFF", f"{mesh.n_vertices} {mesh.n_triangles} {mesh.n_edges}"]
    lines += [" ".join(repr(float(c)) for c in v) for v in mesh.vertices]
    lines += [f"3 {a} {b} {c}" for a, b, c in mesh.triangles]
    Path(path).write_text("\n".join(lines) + "\n")
