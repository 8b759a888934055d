"""Assembly of the penalised Taylor-Hood surface Stokes system.

Velocity unknowns are three copies of the scalar P_m space (component-major),
pressure unknowns the scalar P_{m-1} space, both lifted to Gamma_h^k.
Local matrices are formed for blocks of elements with numpy and scattered
with a fixed element order, which makes the result bit-reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, DimensionMismatch
from .fe_space import DofMap, build_dofmap, quadrature, reference_basis
from .geometry import AnalyticSurface
from .mesh import BaseMesh
from .param_lift import ChartData, LiftedMesh, build_improved_normal

__all__ = [
    "AssemblyConfig",
    "Discretization",
    "SaddleSystem",
    "assemble_system",
    "strain_ET",
    "apply_b_star",
    "energy_product",
    "energy_norm",
    "write_matrix_market",
]

BLOCK = 512


@dataclass(frozen=True)
class AssemblyConfig:
    penalty_exponent: float = 2.0
    penalty_normal: str = "improved"  # or "discrete"
    quad_exactness: int | None = None  # default 2m + 2k

    def __post_init__(self):
        if self.penalty_normal not in ("improved", "discrete"):
            raise ConfigError(f"unknown penalty normal {self.penalty_normal!r}")


class Discretization:
    """Lifted mesh, Taylor-Hood DOF maps and geometry tabulated at quadrature points."""

    def __init__(self, mesh: BaseMesh, surface: AnalyticSurface, k: int, m: int,
                 config: AssemblyConfig | None = None):
        config = config or AssemblyConfig()
        if m < 2:
            raise ConfigError("Taylor-Hood requires velocity degree m >= 2")
        if config.penalty_normal == "improved" and m < k:
            raise ConfigError("improved normal requires m >= k")
        self.mesh, self.surface, self.k, self.m, self.config = mesh, surface, k, m, config
        self.lifted = LiftedMesh(mesh, surface, k)
        self.dofmap: DofMap = build_dofmap(mesh, m)
        exactness = config.quad_exactness or 2 * m + 2 * k
        self.rule = quadrature(exactness)
        self.vbasis = reference_basis(m, exactness)
        self.pbasis = reference_basis(m - 1, exactness)
        self.chart: ChartData = self.lifted.evaluate(self.rule.points, second_derivatives=True)
        self.dS = self.chart.mu * self.rule.weights[None, :]
        self.h = mesh.h_max
        self.eta = self.h ** (-config.penalty_exponent)
        if config.penalty_normal == "improved":
            self.improved_normal = build_improved_normal(surface, self.dofmap.velocity, self.lifted)
            self.penalty_normal = self.improved_normal.at(self.vbasis.values)
        else:
            self.improved_normal = None
            self.penalty_normal = self.chart.normal
        self._exact = None

    @property
    def n_u(self) -> int:
        return self.dofmap.n_u

    @property
    def n_p(self) -> int:
        return self.dofmap.n_p

    @property
    def n_elements(self) -> int:
        return self.mesh.n_triangles

    def blocks(self):
        F = self.n_elements
        for start in range(0, F, BLOCK):
            yield slice(start, min(start + BLOCK, F))

    def chart_block(self, sl) -> ChartData:
        c = self.chart
        return ChartData(c.x[sl], c.J[sl], c.G_inv[sl], c.mu[sl], c.normal[sl],
                         None if c.weingarten is None else c.weingarten[sl])

    def exact_geometry(self):
        """Exact d, n, P, H at the quadrature points and their closest points."""
        if self._exact is None:
            self._exact = self.surface.geometric_data(self.chart.x)
        return self._exact

    def velocity_indices(self, sl) -> np.ndarray:
        """Global vector indices (F, 3*nb), local order c * nb + j."""
        cells = self.dofmap.velocity.cells[sl]
        n = self.dofmap.n_scalar
        return np.concatenate([cells + c * n for c in range(3)], axis=1)

    def pressure_indices(self, sl) -> np.ndarray:
        return self.dofmap.pressure.cells[sl]


def _strain_tensors(chart: ChartData, values, grads):
    """E_{T,h}(phi_j e_c) for all local j, c: shape (F, Q, 3, nb, 3, 3)."""
    P = chart.projector
    n = chart.normal
    # p_c = P e_c is column c of P
    pg = np.einsum("fqxc,fqjy->fqcjxy", P, grads)
    E = 0.5 * (pg + np.swapaxes(pg, -1, -2))
    E -= np.einsum("qj,fqc,fqxy->fqcjxy", values, n, chart.weingarten)
    return E


def strain_ET(disc: Discretization, element: int, j: int, c: int, xi=None):
    """E_{T,h} of the vector basis function phi_j e_c on one element.

    Evaluated at the assembly quadrature points, or at reference points ``xi``.
    Returns an array (Q, 3, 3).
    """
    if xi is None:
        sl = slice(element, element + 1)
        chart = disc.chart_block(sl)
        values, ref_grads = disc.vbasis.values, disc.vbasis.grads
    else:
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        chart = disc.lifted.evaluate(xi, elements=[element], second_derivatives=True)
        basis = reference_basis(disc.m)
        values, ref_grads = basis.evaluate(xi), basis.gradient(xi)
    grads = chart.surface_gradient(ref_grads)
    E = _strain_tensors(chart, values, grads)
    return E[0, :, c, j]


def _scatter(rows, cols, data, shape):
    mat = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=shape
    ).tocsr()
    mat.sort_indices()
    return mat


def _pairs(idx_r, idx_c):
    F, a = idx_r.shape
    b = idx_c.shape[1]
    r = np.broadcast_to(idx_r[:, :, None], (F, a, b)).ravel()
    c = np.broadcast_to(idx_c[:, None, :], (F, a, b)).ravel()
    return r, c


@dataclass(eq=False)
class SaddleSystem:
    A: sp.csr_matrix
    B: sp.csr_matrix
    M_u: sp.csr_matrix
    M_p: sp.csr_matrix
    rhs_f: np.ndarray
    rhs_g: np.ndarray
    mean_vec: np.ndarray
    h: float
    eta: float
    config: AssemblyConfig
    disc: Discretization = field(repr=False)
    _energy: sp.csr_matrix | None = field(default=None, repr=False)
    _b_star: sp.csr_matrix | None = field(default=None, repr=False)

    @property
    def n_u(self) -> int:
        return self.A.shape[0]

    @property
    def n_p(self) -> int:
        return self.B.shape[0]

    @property
    def energy_matrix(self) -> sp.csr_matrix:
        """Gram matrix of the |||.|||_k norm on the discrete velocity space."""
        if self._energy is None:
            self._energy = _assemble_energy_matrix(self.disc)
        return self._energy

    @property
    def B_star(self) -> sp.csr_matrix:
        if self._b_star is None:
            self._b_star = _assemble_b_star(self.disc)
        return self._b_star

    def saddle_matrix(self) -> sp.csr_matrix:
        return sp.bmat([[self.A, self.B.T], [self.B, None]], format="csr")


def assemble_system(mesh: BaseMesh, surface: AnalyticSurface, k: int, m: int,
                    mms_case=None, config: AssemblyConfig | None = None,
                    disc: Discretization | None = None) -> SaddleSystem:
    """Assemble A = a_h + k_h, B = b_h, the mass matrices and right-hand sides.

    ``mms_case`` supplies ``forcing`` and ``source`` callables on the exact
    surface; data are extended by composition with the closest-point map and
    the source is mean-corrected on Gamma_h^k.  ``None`` gives zero data.
    """
    disc = disc or Discretization(mesh, surface, k, m, config)
    n_u, n_p, n = disc.n_u, disc.n_p, disc.dofmap.n_scalar
    phi, psi = disc.vbasis.values, disc.pbasis.values
    nb, npb = phi.shape[1], psi.shape[1]

    A_r, A_c, A_d = [], [], []
    Mu_r, Mu_c, Mu_d = [], [], []
    B_r, B_c, B_d = [], [], []
    Mp_r, Mp_c, Mp_d = [], [], []
    for sl in disc.blocks():
        chart = disc.chart_block(sl)
        dS = disc.dS[sl]
        F = dS.shape[0]
        vgrads = chart.surface_gradient(disc.vbasis.grads)
        pgrads = chart.surface_gradient(disc.pbasis.grads)
        vidx = disc.velocity_indices(sl)
        pidx = disc.pressure_indices(sl)

        # strain part: sum_q dS E(a) : E(b)
        E = _strain_tensors(chart, phi, vgrads).reshape(F, -1, 3 * nb, 9)
        X = np.sqrt(dS)[:, :, None, None] * E
        X = X.transpose(0, 2, 1, 3).reshape(F, 3 * nb, -1)
        local = X @ X.transpose(0, 2, 1)

        # zero-order tangential term and penalty: phi_i phi_j (P_h + eta nhat nhat^T)_{cd}
        nhat = disc.penalty_normal[sl]
        Z = chart.projector + disc.eta * nhat[..., :, None] * nhat[..., None, :]
        local += np.einsum("fq,qi,qj,fqcd->fcidj", dS, phi, phi, Z, optimize=True).reshape(
            F, 3 * nb, 3 * nb
        )
        local = 0.5 * (local + local.transpose(0, 2, 1))
        r, c = _pairs(vidx, vidx)
        A_r.append(r), A_c.append(c), A_d.append(local.ravel())

        ms = np.einsum("fq,qi,qj->fij", dS, phi, phi, optimize=True)
        ms = 0.5 * (ms + ms.transpose(0, 2, 1))
        for comp in range(3):
            idx = vidx[:, comp * nb : (comp + 1) * nb]
            r, c = _pairs(idx, idx)
            Mu_r.append(r), Mu_c.append(c), Mu_d.append(ms.ravel())

        # b_h(phi_j e_c, psi_l) = int phi_j (grad psi_l)_c
        bl = np.einsum("fq,qj,fqlc->flcj", dS, phi, pgrads, optimize=True).reshape(F, npb, 3 * nb)
        r, c = _pairs(pidx, vidx)
        B_r.append(r), B_c.append(c), B_d.append(bl.ravel())

        mp = np.einsum("fq,qi,qj->fij", dS, psi, psi, optimize=True)
        mp = 0.5 * (mp + mp.transpose(0, 2, 1))
        r, c = _pairs(pidx, pidx)
        Mp_r.append(r), Mp_c.append(c), Mp_d.append(mp.ravel())

    A = _scatter(A_r, A_c, A_d, (n_u, n_u))
    M_u = _scatter(Mu_r, Mu_c, Mu_d, (n_u, n_u))
    B = _scatter(B_r, B_c, B_d, (n_p, n_u))
    M_p = _scatter(Mp_r, Mp_c, Mp_d, (n_p, n_p))
    mean_vec = M_p @ np.ones(n_p)

    rhs_f = np.zeros(n_u)
    rhs_g = np.zeros(n_p)
    if mms_case is not None:
        y = disc.exact_geometry().pi_x
        f = mms_case.forcing(y)
        g = mms_case.source(y)
        g = g - np.sum(g * disc.dS) / np.sum(disc.dS)
        fl = np.einsum("fq,qj,fqc->fcj", disc.dS, phi, f, optimize=True).reshape(-1, 3 * nb)
        np.add.at(rhs_f, disc.velocity_indices(slice(None)).ravel(), fl.ravel())
        gl = -np.einsum("fq,ql,fq->fl", disc.dS, psi, g, optimize=True)
        np.add.at(rhs_g, disc.pressure_indices(slice(None)).ravel(), gl.ravel())

    return SaddleSystem(A, B, M_u, M_p, rhs_f, rhs_g, mean_vec, disc.h, disc.eta,
                        disc.config, disc)


def _assemble_energy_matrix(disc: Discretization) -> sp.csr_matrix:
    """M + K (each component) + h^-2 int (n.u)(n.v) with the exact normal."""
    phi = disc.vbasis.values
    nb = phi.shape[1]
    n_exact = disc.exact_geometry().n
    rows, cols, data = [], [], []
    for sl in disc.blocks():
        chart = disc.chart_block(sl)
        dS = disc.dS[sl]
        F = dS.shape[0]
        g = chart.surface_gradient(disc.vbasis.grads)
        scalar = np.einsum("fq,qi,qj->fij", dS, phi, phi, optimize=True)
        scalar += np.einsum("fq,fqix,fqjx->fij", dS, g, g, optimize=True)
        local = np.zeros((F, 3, nb, 3, nb))
        for c in range(3):
            local[:, c, :, c, :] = scalar
        nn = n_exact[sl]
        local += disc.h**-2 * np.einsum("fq,qi,qj,fqc,fqd->fcidj", dS, phi, phi, nn, nn,
                                        optimize=True)
        local = local.reshape(F, 3 * nb, 3 * nb)
        local = 0.5 * (local + local.transpose(0, 2, 1))
        idx = disc.velocity_indices(sl)
        r, c = _pairs(idx, idx)
        rows.append(r), cols.append(c), data.append(local.ravel())
    return _scatter(rows, cols, data, (disc.n_u, disc.n_u))


def _assemble_b_star(disc: Discretization) -> sp.csr_matrix:
    """Matrix of b_h*(v, q) = -int div v q, rows pressure, columns velocity."""
    phi, psi = disc.vbasis.values, disc.pbasis.values
    nb, npb = phi.shape[1], psi.shape[1]
    rows, cols, data = [], [], []
    for sl in disc.blocks():
        chart = disc.chart_block(sl)
        dS = disc.dS[sl]
        F = dS.shape[0]
        g = chart.surface_gradient(disc.vbasis.grads)
        # div(phi_j e_c) = tr(P_h e_c g_j^T) = (g_j)_c since g_j is tangential
        local = -np.einsum("fq,ql,fqjc->flcj", dS, psi, g, optimize=True).reshape(F, npb, 3 * nb)
        r, c = _pairs(disc.pressure_indices(sl), disc.velocity_indices(sl))
        rows.append(r), cols.append(c), data.append(local.ravel())
    return _scatter(rows, cols, data, (disc.n_p, disc.n_u))


def apply_b_star(u, q, system: SaddleSystem) -> float:
    """b_h*(u_h, q_h) = -int div_{Gamma_h^k} u_h q_h."""
    u, q = np.asarray(u), np.asarray(q)
    if u.shape != (system.n_u,) or q.shape != (system.n_p,):
        raise DimensionMismatch("coefficient vectors do not match the spaces")
    return float(q @ (system.B_star @ u))


def energy_product(u, v, system: SaddleSystem) -> float:
    """A_h(u_h, v_h) through the assembled matrix."""
    u, v = np.asarray(u), np.asarray(v)
    if u.shape != (system.n_u,) or v.shape != (system.n_u,):
        raise DimensionMismatch(f"expected vectors of length {system.n_u}")
    return float(v @ (system.A @ u))


def energy_norm(v, system: SaddleSystem, exact=None) -> float:
    """|||v|||_k for a discrete velocity ``v`` or, with ``exact`` given, for
    the difference ``exact^e - v`` where ``exact`` is a manufactured case.

    The normal part always uses the exact surface normal.
    """
    from .mms import velocity_error_integrals

    if exact is None:
        v = np.asarray(v)
        if v.shape != (system.n_u,):
            raise DimensionMismatch(f"expected a vector of length {system.n_u}")
        return float(np.sqrt(max(v @ (system.energy_matrix @ v), 0.0)))
    parts = velocity_error_integrals(system.disc, exact, v)
    return float(np.sqrt(parts["l2"] + parts["h1_semi"] + system.h**-2 * parts["normal"]))


def write_matrix_market(matrix, path) -> None:
    """MatrixMarket coordinate export, 1-based indices."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    lines = ["%%MatrixMarket matrix coordinate real general",
             f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}"]
    lines += [f"{r + 1} {c + 1} {v!r}" for r, c, v in
              zip(coo.row[order], coo.col[order], coo.data[order].tolist())]
    Path(path).write_text("\n".join(lines) + "\n")
