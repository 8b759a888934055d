import numpy as np
import pytest

from helpers import TORUS, UNIT_SPHERE, mesh
from surfstokes.geometry import Sphere
from surfstokes.mesh import BaseMesh, build_base_mesh, mesh_size, refine, validate, write_off


def test_icosahedron_combinatorics():
    m = build_base_mesh(UNIT_SPHERE)
    assert (m.n_vertices, m.n_triangles, m.n_edges) == (12, 20, 30)
    assert np.max(np.abs(np.linalg.norm(m.vertices, axis=1) - 1.0)) <= 1e-15
    assert m.level == 0


def test_icosahedron_edge_length():
    h_max, h_min = mesh_size(build_base_mesh(UNIT_SPHERE))
    exact = 4.0 / np.sqrt(10.0 + 2.0 * np.sqrt(5.0))
    assert h_max == pytest.approx(exact, rel=1e-14)
    assert h_min == pytest.approx(exact, rel=1e-14)
    assert h_max == pytest.approx(1.0515, abs=1e-4)


def test_scaled_icosahedron():
    m = build_base_mesh(Sphere(3.0))
    assert np.allclose(np.linalg.norm(m.vertices, axis=1), 3.0, rtol=0, atol=1e-14)


def test_torus_grid():
    m = build_base_mesh(TORUS)
    assert (m.n_vertices, m.n_triangles) == (128, 256)
    assert m.n_vertices - m.n_edges + m.n_triangles == 0
    d = validate(m, TORUS)
    assert d.closed and d.oriented


def test_single_equilateral_triangle_size():
    v = np.array([[0, 0, 0], [1, 0, 0], [0.5, np.sqrt(3) / 2, 0]])
    tri = BaseMesh.from_triangles(v, np.array([[0, 1, 2]]))
    assert mesh_size(tri) == pytest.approx((1.0, 1.0))


def test_refine_once():
    m1 = refine(build_base_mesh(UNIT_SPHERE), UNIT_SPHERE)
    assert (m1.n_vertices, m1.n_triangles, m1.level) == (42, 80, 1)
    assert m1.n_vertices - m1.n_edges + m1.n_triangles == 2


@pytest.mark.parametrize("surface", ["sphere", "torus"])
def test_invariants_over_levels(surface):
    surf = UNIT_SPHERE if surface == "sphere" else TORUS
    chi = 2 if surface == "sphere" else 0
    ratios = []
    for level in range(5 if surface == "sphere" else 4):
        m = mesh(surface, level)
        d = validate(m, surf)
        assert d.closed and d.oriented and d.boundary_edges == 0
        assert d.euler_characteristic == chi
        assert d.max_vertex_deviation <= 1e-12 * surf.diameter
        ratios.append(d.shape_regularity)
        if surface == "sphere":
            assert d.quasi_uniformity <= 2.5
    # shape regularity must not grow with the level (tiny rounding slack)
    assert max(ratios[1:]) <= ratios[1] * 1.05
    # circumradius/inradius of an equilateral triangle is 2; torus cells are stretched
    assert max(ratios) < (2.5 if surface == "sphere" else 4.0)


def test_h_halves_under_refinement():
    h = np.array([mesh("sphere", level).h_max for level in range(5)])
    ratios = h[1:] / h[:-1]
    # the first step from the icosahedron is special: edge midpoints move
    # radially by a large amount, so the ratio there is about 0.59
    assert np.all((ratios[1:] >= 0.45) & (ratios[1:] <= 0.55)), ratios
    assert np.all(np.abs(ratios - 0.5) <= 0.1), ratios


def test_midpoints_projected_and_orientation_kept():
    m0 = build_base_mesh(TORUS)
    m1 = refine(m0, TORUS)
    assert np.max(np.abs(TORUS.signed_distance(m1.vertices))) < 1e-14
    assert validate(m1, TORUS).oriented
    np.testing.assert_array_equal(m1.vertices[: m0.n_vertices], m0.vertices)


def test_validate_detects_hole():
    m = build_base_mesh(UNIT_SPHERE)
    holed = BaseMesh.from_triangles(m.vertices, m.triangles[1:])
    d = validate(holed, UNIT_SPHERE)
    assert not d.closed and d.boundary_edges == 3


def test_validate_detects_flip():
    m = build_base_mesh(UNIT_SPHERE)
    tris = m.triangles.copy()
    tris[0] = tris[0, ::-1]
    assert not validate(BaseMesh.from_triangles(m.vertices, tris), UNIT_SPHERE).oriented


def test_edge_adjacency_consistent():
    m = mesh("sphere", 2)
    assert np.all(m.edge_triangles >= 0)
    for e, (a, b) in enumerate(m.edges[:50]):
        for t in m.edge_triangles[e]:
            assert a in m.triangles[t] and b in m.triangles[t]


def test_write_off(tmp_path):
    m = build_base_mesh(UNIT_SPHERE)
    path = tmp_path / "ico.off"
    write_off(m, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "OFF"
    assert lines[1].split()[:2] == ["12", "20"]
    v = np.array([[float(t) for t in line.split()] for line in lines[2:14]])
    np.testing.assert_array_equal(v, m.vertices)
    faces = np.array([[int(t) for t in line.split()] for line in lines[14:]])
    assert np.all(faces[:, 0] == 3)
    np.testing.assert_array_equal(faces[:, 1:], m.triangles)
