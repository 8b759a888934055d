import numpy as np
import pytest
import scipy.linalg as sla
import scipy.sparse as sp

from helpers import UNIT_SPHERE, direct_solution, system, variation
from surfstokes.assembly import assemble_system, energy_norm
from surfstokes.errors import NoConvergence
from surfstokes.mesh import BaseMesh, build_base_mesh
from surfstokes.solver import (
    SolveResult,
    a_condition,
    mass_condition,
    minres,
    project_pressure,
    schur_spectrum,
    solve_direct,
    solve_minres,
)


def toy_system():
    """One curved triangle of the icosahedron: an open surface patch."""
    m = build_base_mesh(UNIT_SPHERE)
    one = BaseMesh.from_triangles(m.vertices[m.triangles[0]], np.array([[0, 1, 2]]))
    return assemble_system(one, UNIT_SPHERE, 2, 2)


class TestDirect:
    def test_zero_rhs(self):
        sys_, _ = system(1, case=None)
        res = solve_direct(sys_)
        assert isinstance(res, SolveResult) and res.iterations == 0
        assert not np.any(np.abs(res.u) > 1e-300) and not np.any(np.abs(res.p) > 1e-300)

    def test_killing_level3(self):
        sys_, _ = system(3)
        res = direct_solution(3)
        assert res.residual <= 1e-12
        assert abs(sys_.mean_vec @ res.p) <= 1e-10 * np.abs(sys_.mean_vec).sum() * np.abs(res.p).max()

    def test_constraint_and_shift_invariance(self):
        sys_, _ = system(2)
        res = direct_solution(2)
        # the unconstrained saddle system sees p and p + c 1 alike
        K = sys_.saddle_matrix()
        shifted = np.concatenate([res.u, res.p + 3.7])
        r1 = K @ np.concatenate([res.u, res.p])
        np.testing.assert_allclose(K @ shifted, r1, atol=1e-10 * np.abs(r1).max())
        np.testing.assert_allclose(project_pressure(res.p + 3.7, sys_.mean_vec), res.p,
                                   atol=1e-10)

    def test_dense_fallback_agrees(self):
        sys_, _ = system(0, case="polynomial")
        res = solve_direct(sys_)
        c = sys_.mean_vec
        K = np.block([[sys_.A.toarray(), sys_.B.T.toarray(), np.zeros((sys_.n_u, 1))],
                      [sys_.B.toarray(), np.zeros((sys_.n_p, sys_.n_p)), c[:, None]],
                      [np.zeros((1, sys_.n_u)), c[None, :], np.zeros((1, 1))]])
        x = sla.solve(K, np.concatenate([sys_.rhs_f, sys_.rhs_g, [0.0]]))
        np.testing.assert_allclose(res.u, x[:sys_.n_u], atol=1e-11)
        np.testing.assert_allclose(res.p, x[sys_.n_u:-1], atol=1e-11)


class TestMinres:
    @pytest.mark.parametrize("case", ["killing", "polynomial"])
    def test_agrees_with_direct(self, case):
        sys_, _ = system(2, case=case)
        d = solve_direct(sys_)
        it = solve_minres(sys_, tol=1e-10)
        assert np.linalg.norm(it.u - d.u) <= 1e-8 * np.linalg.norm(d.u)
        assert np.linalg.norm(it.p - d.p) <= 1e-8 * np.linalg.norm(d.p)
        assert energy_norm(it.u - d.u, sys_) <= 1e-8 * energy_norm(d.u, sys_)
        assert abs(sys_.mean_vec @ it.p) <= 1e-10 * np.abs(sys_.mean_vec).sum() * np.abs(it.p).max()

    def test_history_monotone(self):
        sys_, _ = system(2)
        res = solve_minres(sys_)
        h = np.asarray(res.history)
        assert len(h) == res.iterations + 1
        assert np.all(np.diff(h) <= 1e-14 * h[0])
        assert h[-1] <= 1e-10

    def test_no_convergence(self):
        sys_, _ = system(1)
        with pytest.raises(NoConvergence):
            solve_minres(sys_, tol=1e-14, max_iter=2)

    def test_diagonal_preconditioner_converges(self):
        sys_, _ = system(1)
        res = solve_minres(sys_, preconditioner="diagonal", tol=1e-10, max_iter=5000)
        d = direct_solution(1)
        assert np.linalg.norm(res.u - d.u) <= 1e-7 * np.linalg.norm(d.u)

    def test_unknown_preconditioner(self):
        with pytest.raises(ValueError):
            solve_minres(system(0)[0], preconditioner="ilu")

    def test_generic_minres_on_spd_matrix(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((40, 40))
        A = X @ X.T + 40 * np.eye(40)
        b = rng.standard_normal(40)
        x, its, hist = minres(lambda v: A @ v, b, lambda r: r, tol=1e-12, max_iter=100)
        np.testing.assert_allclose(x, np.linalg.solve(A, b), atol=1e-10)
        assert its <= 40


class TestSpectra:
    def test_schur_dense_vs_iterative(self):
        sys_, _ = system(1)
        dense = schur_spectrum(sys_, "dense")
        it = schur_spectrum(sys_, "iterative")
        assert dense.method == "dense" and it.method == "iterative"
        assert it.min == pytest.approx(dense.min, rel=1e-6)
        assert it.max == pytest.approx(dense.max, rel=1e-6)
        assert 0 < dense.min <= dense.max

    def test_inf_sup_sup_characterization(self):
        sys_, _ = system(1)
        est = schur_spectrum(sys_, "dense")
        A = sys_.A.toarray()
        L = np.linalg.cholesky(A)
        B = sys_.B.toarray()
        Mp = sys_.M_p.toarray()
        rng = np.random.default_rng(11)
        ratios = []
        for _ in range(20):
            q = project_pressure(rng.standard_normal(sys_.n_p), sys_.mean_vec)
            # sup_v b(v,q)/A(v,v)^{1/2} = |L^{-1} B^T q| attained at v = A^{-1} B^T q
            sup = np.linalg.norm(sla.solve_triangular(L, B.T @ q, lower=True))
            v = np.linalg.solve(A, B.T @ q)
            assert (q @ B @ v) / np.sqrt(v @ A @ v) == pytest.approx(sup, rel=1e-10)
            w = v + 0.1 * rng.standard_normal(sys_.n_u)
            assert (q @ B @ w) / np.sqrt(w @ A @ w) <= sup * (1 + 1e-12)
            ratios.append(sup / np.sqrt(q @ Mp @ q))
        c_star = np.sqrt(est.min)
        assert c_star <= min(ratios) * (1 + 1e-10)
        assert max(ratios) <= np.sqrt(est.max) * (1 + 1e-10)

    def test_a_condition_toy_dense_vs_iterative(self):
        toy = toy_system()
        dense = a_condition(toy, "dense")
        it = a_condition(toy, "iterative")
        assert it.min == pytest.approx(dense.min, rel=1e-8)
        assert it.max == pytest.approx(dense.max, rel=1e-8)

    def test_a_condition_dense_vs_iterative(self):
        sys_, _ = system(1)
        dense = a_condition(sys_, "dense")
        it = a_condition(sys_, "iterative")
        assert it.min == pytest.approx(dense.min, rel=1e-8)
        assert it.max == pytest.approx(dense.max, rel=1e-8)
        assert dense.ratio == pytest.approx(dense.max / dense.min)

    def test_mass_conditioning_level_independent(self):
        mu, mp = [], []
        for level in (1, 2, 3):
            sys_, _ = system(level)
            mu.append(mass_condition(sys_.M_u).ratio)
            mp.append(mass_condition(sys_.M_p).ratio)
        assert variation(mu) < 0.2 and variation(mp) < 0.2

    def test_mass_condition_identity(self):
        est = mass_condition(sp.identity(5, format="csr"), "dense")
        assert est.min == pytest.approx(1.0) and est.max == pytest.approx(1.0)
