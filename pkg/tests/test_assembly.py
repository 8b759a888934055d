import numpy as np
import pytest
import scipy.io
import scipy.linalg as sla

from helpers import UNIT_SPHERE, eocs, mesh, system
from surfstokes.assembly import (
    AssemblyConfig,
    Discretization,
    apply_b_star,
    assemble_system,
    energy_norm,
    energy_product,
    strain_ET,
    write_matrix_market,
)
from surfstokes.assembly import _strain_tensors
from surfstokes.errors import ConfigError, DimensionMismatch
from surfstokes.mms import interpolate, killing_case, velocity_error_integrals


def sym_defect(M):
    return abs(M - M.T).max() / abs(M).max()


class TestStructure:
    @pytest.mark.parametrize("k,m", [(1, 2), (2, 2), (2, 3), (3, 3)])
    def test_identities(self, k, m):
        sys_, _ = system(1, k, m)
        for M in (sys_.A, sys_.M_u, sys_.M_p):
            assert sym_defect(M) <= 1e-12
        bt1 = sys_.B.T @ np.ones(sys_.n_p)
        assert np.max(np.abs(bt1)) <= 1e-12 * abs(sys_.B).max()
        np.linalg.cholesky(sys_.M_p.toarray())
        assert abs(sys_.rhs_g.sum()) <= 1e-12 * np.abs(sys_.rhs_g).sum()
        np.testing.assert_allclose(sys_.mean_vec, sys_.M_p @ np.ones(sys_.n_p))

    def test_shapes_and_penalty(self):
        sys_, _ = system(2)
        assert sys_.A.shape == (sys_.n_u, sys_.n_u) and sys_.B.shape == (sys_.n_p, sys_.n_u)
        assert sys_.eta == pytest.approx(sys_.h ** -2)
        assert sys_.saddle_matrix().shape == (sys_.n_u + sys_.n_p,) * 2

    def test_csr_sorted_no_duplicates(self):
        sys_, _ = system(1)
        for M in (sys_.A, sys_.B, sys_.M_u, sys_.M_p):
            assert M.has_sorted_indices and M.has_canonical_format

    def test_a_positive_definite(self):
        sys_, _ = system(0, 2, 2)
        assert np.min(np.linalg.eigvalsh(sys_.A.toarray())) > 0

    def test_zero_data(self):
        sys_, _ = system(1, case=None)
        assert not np.any(sys_.rhs_f) and not np.any(sys_.rhs_g)

    def test_deterministic(self):
        a = assemble_system(mesh("sphere", 2), UNIT_SPHERE, 2, 2, killing_case(UNIT_SPHERE))
        b = assemble_system(mesh("sphere", 2), UNIT_SPHERE, 2, 2, killing_case(UNIT_SPHERE))
        for name in ("A", "B", "M_u", "M_p"):
            x, y = getattr(a, name), getattr(b, name)
            np.testing.assert_array_equal(x.indptr, y.indptr)
            np.testing.assert_array_equal(x.indices, y.indices)
            np.testing.assert_array_equal(x.data, y.data)
        np.testing.assert_array_equal(a.rhs_f, b.rhs_f)

    def test_config_errors(self):
        with pytest.raises(ConfigError):
            Discretization(mesh("sphere", 0), UNIT_SPHERE, 1, 1)
        with pytest.raises(ConfigError):
            Discretization(mesh("sphere", 0), UNIT_SPHERE, 3, 2)
        with pytest.raises(ConfigError):
            AssemblyConfig(penalty_normal="exact")
        # the discrete normal does not need m >= k
        Discretization(mesh("sphere", 0), UNIT_SPHERE, 3, 2, AssemblyConfig(penalty_normal="discrete"))

    def test_mass_matrix_integrates_area(self):
        sys_, _ = system(2)
        one = np.ones(sys_.n_p)
        area = one @ sys_.M_p @ one
        assert area == pytest.approx(4 * np.pi, abs=mesh("sphere", 2).h_max ** 3)

    def test_torus_identities(self):
        sys_, _ = system(1, 2, 2, None, surface="torus")
        assert sym_defect(sys_.A) <= 1e-12
        assert np.max(np.abs(sys_.B.T @ np.ones(sys_.n_p))) <= 1e-12 * abs(sys_.B).max()


class TestStrain:
    def test_symmetric(self):
        disc = system(1, 3, 3)[0].disc
        for j, c in ((0, 0), (4, 1), (9, 2)):
            E = strain_ET(disc, 5, j, c)
            assert np.max(np.abs(E - np.swapaxes(E, -1, -2))) <= 1e-14

    def test_constant_tangent_field_on_flat_element(self):
        disc = Discretization(mesh("sphere", 0), UNIT_SPHERE, 1, 2)
        nb = disc.vbasis.values.shape[1]
        xi = np.array([[0.2, 0.3], [0.6, 0.1]])
        # the sum over all local basis functions is the constant 1 on the element
        for c in range(3):
            E = sum(strain_ET(disc, 0, j, c, xi) for j in range(nb))
            np.testing.assert_allclose(E, 0.0, atol=1e-13)

    def test_tangential_rows(self):
        disc = system(1, 2, 2)[0].disc
        n = disc.chart.normal[3]
        E = strain_ET(disc, 3, 2, 1)
        assert np.max(np.abs(np.einsum("qij,qj->qi", E, n))) <= 1e-13

    @pytest.mark.parametrize("k,m", [(2, 2), (3, 3)])
    def test_killing_strain_decays(self, k, m):
        hs, norms = [], []
        for level in (1, 2, 3):
            disc = system(level, k, m)[0].disc
            u, _ = interpolate(killing_case(UNIT_SPHERE), disc)
            total = 0.0
            n = disc.dofmap.n_scalar
            for sl in disc.blocks():
                chart = disc.chart_block(sl)
                grads = chart.surface_gradient(disc.vbasis.grads)
                E = _strain_tensors(chart, disc.vbasis.values, grads)  # (F,Q,3,nb,3,3)
                cells = disc.dofmap.velocity.cells[sl]
                coeff = np.stack([u[c * n:(c + 1) * n][cells] for c in range(3)], axis=-2)
                Eu = np.einsum("fqcjxy,fcj->fqxy", E, coeff)
                total += np.sum(disc.dS[sl] * np.einsum("fqxy,fqxy->fq", Eu, Eu))
            hs.append(disc.h)
            norms.append(np.sqrt(total))
        assert eocs(norms, hs)[-1] >= min(k, m) - 0.2


class TestForms:
    def test_dimension_mismatch(self):
        sys_, _ = system(0)
        with pytest.raises(DimensionMismatch):
            apply_b_star(np.zeros(3), np.zeros(sys_.n_p), sys_)
        with pytest.raises(DimensionMismatch):
            energy_product(np.zeros(sys_.n_u), np.zeros(5), sys_)
        with pytest.raises(DimensionMismatch):
            energy_norm(np.zeros(7), sys_)

    def test_energy_norm_zero(self):
        sys_, _ = system(1)
        assert energy_norm(np.zeros(sys_.n_u), sys_) == 0.0

    def test_energy_product_positive(self):
        sys_, _ = system(1)
        rng = np.random.default_rng(0)
        for _ in range(5):
            v = rng.standard_normal(sys_.n_u)
            assert energy_product(v, v, sys_) > 0
            w = rng.standard_normal(sys_.n_u)
            assert energy_product(v, w, sys_) == pytest.approx(energy_product(w, v, sys_), rel=1e-12)

    def test_constant_field_norm(self):
        sys_, _ = system(3)
        n = sys_.disc.dofmap.n_scalar
        v = np.zeros(sys_.n_u)
        v[:n] = 1.0
        M = sys_.M_u
        l2 = np.sqrt(v @ M @ v)
        assert l2 == pytest.approx(np.sqrt(4 * np.pi), abs=1e-4)
        # the gradient part vanishes, the normal part is h^-2 int n_1^2 = h^-2 4 pi / 3
        assert energy_norm(v, sys_) ** 2 == pytest.approx(
            4 * np.pi + sys_.h**-2 * 4 * np.pi / 3, rel=1e-4)

    def test_exact_field_normal_part_vanishes(self):
        sys_, case = system(2)
        parts = velocity_error_integrals(sys_.disc, case, None)
        assert parts["normal"] <= 1e-28
        assert energy_norm(None, sys_, exact=case) == pytest.approx(
            np.sqrt(parts["l2"] + parts["h1_semi"]))

    def test_b_constant_pressure(self):
        sys_, _ = system(1)
        v = np.random.default_rng(2).standard_normal(sys_.n_u)
        one = np.ones(sys_.n_p)
        assert abs(one @ sys_.B @ v) <= 1e-12 * np.abs(v).sum() * abs(sys_.B).max()
        # the divergence form does not vanish on constants
        assert abs(apply_b_star(v, one, sys_)) > 1e-6

    def test_b_star_integration_by_parts_on_smooth_fields(self):
        sys_, case = system(3)
        u, p = interpolate(case, sys_.disc)
        b = p @ sys_.B @ u
        bs = apply_b_star(u, p, sys_)
        assert abs(b - bs) <= 0.05 * abs(b) + 1e-3

    def test_penalty_consistency(self):
        # for the rotation field (e3 x y_i) . y_j is antisymmetric in i, j, so
        # k_h(u_I, u_I) vanishes identically; the polynomial field is generic
        hs, vals = [], []
        for level in (1, 2, 3, 4):
            sys_, case = system(level, case="polynomial")
            disc = sys_.disc
            u, _ = interpolate(case, disc)
            n = disc.dofmap.n_scalar
            cells = disc.dofmap.velocity.cells
            coeff = np.stack([u[c * n:(c + 1) * n][cells] for c in range(3)], axis=-1)
            vals_q = np.einsum("qj,fjc->fqc", disc.vbasis.values, coeff)
            un = np.einsum("fqc,fqc->fq", vals_q, disc.penalty_normal)
            hs.append(disc.h)
            vals.append(np.sum(disc.dS * un**2))
        assert eocs(vals, hs)[-1] >= 2 * 2 - 0.3


def test_matrix_market_roundtrip(tmp_path):
    sys_, _ = system(0)
    path = tmp_path / "A.mtx"
    write_matrix_market(sys_.A, path)
    assert path.read_text().startswith("%%MatrixMarket matrix coordinate real")
    back = scipy.io.mmread(str(path)).tocsr()
    assert abs(back - sys_.A).max() == 0.0


def test_mass_matrix_against_dense_integration():
    sys_, _ = system(0, 2, 2)
    disc = sys_.disc
    # independent: M_p = Psi^T diag(dS) Psi over all quadrature points
    psi = disc.pbasis.values
    Q = np.zeros((disc.n_p, disc.dS.size))
    for f, cell in enumerate(disc.dofmap.pressure.cells):
        for l, dof in enumerate(cell):
            Q[dof, f * psi.shape[0]:(f + 1) * psi.shape[0]] += psi[:, l]
    dense = Q @ np.diag(disc.dS.ravel()) @ Q.T
    np.testing.assert_allclose(sys_.M_p.toarray(), dense, atol=1e-14)
    sla.cholesky(dense)
