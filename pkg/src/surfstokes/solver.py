"""Solvers and spectral estimates for the singular saddle-point system.

The pressure is fixed in the M_p-orthogonal complement of the constants,
``<M_p p, 1> = 0``.  The direct path augments the system with one Lagrange
multiplier row; MINRES works on the singular system with a consistent
right-hand side and the block-diagonal preconditioner diag(Q_A, M_p).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import EigenFailure, NoConvergence, SingularSystem

__all__ = [
    "SolveResult",
    "SpectrumEstimate",
    "solve_direct",
    "solve_minres",
    "minres",
    "schur_spectrum",
    "a_condition",
    "mass_condition",
    "generalized_lanczos",
    "project_pressure",
    "DENSE_SCHUR_LIMIT",
]

DENSE_SCHUR_LIMIT = 4000
DENSE_A_LIMIT = 3000
DENSE_DIRECT_LIMIT = 5000


@dataclass
class SolveResult:
    u: np.ndarray
    p: np.ndarray
    iterations: int
    residual: float
    wall_time: float
    history: list = field(default_factory=list, repr=False)


@dataclass(frozen=True)
class SpectrumEstimate:
    min: float
    max: float
    method: str

    @property
    def ratio(self) -> float:
        return self.max / self.min


def project_pressure(p, mean_vec):
    """Project onto {p : <M_p p, 1> = 0} along the constant vector."""
    return p - (mean_vec @ p) / mean_vec.sum() * np.ones_like(p)


def _relative_residual(system, u, p):
    K = system.saddle_matrix()
    b = np.concatenate([system.rhs_f, system.rhs_g])
    nb = np.linalg.norm(b)
    r = b - K @ np.concatenate([u, p])
    return float(np.linalg.norm(r) / nb) if nb > 0 else float(np.linalg.norm(r))


def _factor_saddle(K):
    """Sparse LU of a symmetric indefinite matrix.

    Symmetric-mode minimum-degree ordering with weak diagonal pivoting is
    tried first; COLAMD with partial pivoting is the fallback.
    """
    attempts = (
        dict(permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.01,
             options={"SymmetricMode": True}),
        dict(permc_spec="COLAMD"),
    )
    err = None
    for kw in attempts:
        try:
            return spla.splu(K, **kw).solve
        except RuntimeError as exc:
            err = exc
    raise SingularSystem(str(err))


def solve_direct(system) -> SolveResult:
    """Sparse LU of the saddle matrix bordered by the mean-value constraint.

    Systems with at most DENSE_DIRECT_LIMIT unknowns fall back to dense LU
    when the sparse factorization fails or returns a poor solution.
    """
    t0 = time.perf_counter()
    n_u, n_p = system.n_u, system.n_p
    c = sp.csr_matrix(system.mean_vec[None, :])
    K = sp.bmat(
        [[system.A, system.B.T, None], [system.B, None, c.T], [None, c, None]], format="csc"
    )
    b = np.concatenate([system.rhs_f, system.rhs_g, [0.0]])
    nb = max(np.linalg.norm(b), np.finfo(float).tiny)
    x = None
    try:
        solve = _factor_saddle(K)
        x = solve(b)
        x += solve(b - K @ x)  # one step of iterative refinement
        if not np.all(np.isfinite(x)) or np.linalg.norm(K @ x - b) > 1e-8 * nb:
            x = None
    except SingularSystem:
        if K.shape[0] > DENSE_DIRECT_LIMIT:
            raise
    if x is None:
        if K.shape[0] > DENSE_DIRECT_LIMIT:
            raise SingularSystem("sparse factorization gave an inaccurate solution")
        try:
            x = sla.solve(K.toarray(), b)
        except sla.LinAlgError as exc:
            raise SingularSystem(str(exc)) from exc
    u, p = x[:n_u], x[n_u : n_u + n_p]
    res = _relative_residual(system, u, p)
    return SolveResult(u, p, 0, res, time.perf_counter() - t0)


def minres(apply_A, b, apply_M, tol=1e-10, max_iter=1000, project=None):
    """Preconditioned MINRES for symmetric A with SPD preconditioner M^{-1}.

    ``apply_M`` applies M^{-1}; ``project`` (optional) is applied to every
    preconditioned vector.  Stops when the preconditioned residual norm has
    dropped by ``tol``.  Returns (x, iterations, history of relative
    preconditioned residual norms).
    """
    n = len(b)
    x = np.zeros(n)
    r1 = b.copy()
    y = apply_M(r1)
    if project is not None:
        y = project(y)
    beta1 = np.sqrt(max(r1 @ y, 0.0))
    history = [1.0]
    if beta1 == 0.0:
        return x, 0, history
    oldb, beta = 0.0, beta1
    dbar, epsln = 0.0, 0.0
    phibar = beta1
    cs, sn = -1.0, 0.0
    w, w2 = np.zeros(n), np.zeros(n)
    r2 = r1.copy()
    for itn in range(1, max_iter + 1):
        v = y / beta
        y = apply_A(v)
        if itn >= 2:
            y = y - (beta / oldb) * r1
        alfa = v @ y
        y = y - (alfa / beta) * r2
        r1, r2 = r2, y
        y = apply_M(r2)
        if project is not None:
            y = project(y)
        oldb, beta = beta, np.sqrt(max(r2 @ y, 0.0))

        oldeps = epsln
        delta = cs * dbar + sn * alfa
        gbar = sn * dbar - cs * alfa
        epsln = sn * beta
        dbar = -cs * beta
        gamma = max(np.hypot(gbar, beta), np.finfo(float).eps)
        cs, sn = gbar / gamma, beta / gamma
        phi = cs * phibar
        phibar = sn * phibar

        w1, w2 = w2, w
        w = (v - oldeps * w1 - delta * w2) / gamma
        x = x + phi * w
        history.append(abs(phibar) / beta1)
        if history[-1] <= tol or beta == 0.0:
            return x, itn, history
    raise NoConvergence(f"MINRES did not reach {tol:g} in {max_iter} iterations "
                        f"(relative residual {history[-1]:.3e})")


def _factor_spd(M):
    lu = spla.splu(sp.csc_matrix(M), permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                   options={"SymmetricMode": True})
    return lu.solve


def solve_minres(system, preconditioner: str = "exact", tol: float = 1e-10,
                 max_iter: int = 2000) -> SolveResult:
    """MINRES with block preconditioner diag(Q_A, M_p).

    ``preconditioner`` selects Q_A: ``"exact"`` (factorization of A) or
    ``"diagonal"`` (Jacobi).  ``residual`` in the result is the relative
    preconditioned residual norm that MINRES minimizes.
    """
    t0 = time.perf_counter()
    n_u = system.n_u
    if preconditioner == "exact":
        solve_A = _factor_spd(system.A)
    elif preconditioner == "diagonal":
        inv_diag = 1.0 / system.A.diagonal()
        solve_A = lambda r: inv_diag * r  # noqa: E731
    else:
        raise ValueError(f"unknown preconditioner {preconditioner!r}")
    solve_Mp = _factor_spd(system.M_p)
    K = system.saddle_matrix()
    ones = np.ones(system.n_p)
    mass_one = system.mean_vec
    total = mass_one @ ones

    def apply_M(r):
        return np.concatenate([solve_A(r[:n_u]), solve_Mp(r[n_u:])])

    def project(z):
        z = z.copy()
        z[n_u:] -= (mass_one @ z[n_u:]) / total * ones
        return z

    b = np.concatenate([system.rhs_f, system.rhs_g])
    b[n_u:] -= b[n_u:].sum() / system.n_p  # consistent with the kernel (0, 1)
    x, its, history = minres(lambda v: K @ v, b, apply_M, tol, max_iter, project)
    u, p = x[:n_u], project_pressure(x[n_u:], system.mean_vec)
    return SolveResult(u, p, its, history[-1], time.perf_counter() - t0, history)


def _complement_basis(vec):
    """Orthonormal basis (n, n-1) of the Euclidean complement of ``vec``."""
    q, _ = np.linalg.qr(vec[:, None], mode="complete")
    return q[:, 1:]


def generalized_lanczos(apply_S, M_solve, M_apply, n, deflate=None, tol=1e-8, max_iter=None,
                        seed=0):
    """Extreme eigenvalues of S w = sigma M w by Lanczos in the M-inner product.

    Full reorthogonalization.  ``deflate`` is a vector spanning a subspace to
    exclude (projected out M-orthogonally).  Returns (min, max).
    """
    rng = np.random.default_rng(seed)
    max_iter = min(n if max_iter is None else max_iter, n)

    def proj(v):
        if deflate is None:
            return v
        Md = M_apply(deflate)
        return v - (Md @ v) / (Md @ deflate) * deflate

    q = proj(rng.standard_normal(n))
    q /= np.sqrt(q @ M_apply(q))
    Q = [q]
    alphas, betas = [], []
    prev = None
    for j in range(max_iter):
        z = proj(M_solve(apply_S(Q[-1])))
        alpha = z @ M_apply(Q[-1])
        alphas.append(alpha)
        for _ in range(2):
            MQ = np.array([M_apply(v) for v in Q])
            z = z - np.array(Q).T @ (MQ @ z)
        z = proj(z)
        beta = np.sqrt(max(z @ M_apply(z), 0.0))
        T = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
        ritz = np.linalg.eigvalsh(T)
        cur = (ritz[0], ritz[-1])
        if prev is not None and all(abs(a - b) <= tol * abs(b) for a, b in zip(cur, prev)):
            return cur
        prev = cur
        if beta <= 1e-13 * abs(alpha) or len(Q) == max_iter - (deflate is not None):
            return cur
        betas.append(beta)
        Q.append(z / beta)
    return prev


def schur_spectrum(system, method: str = "auto") -> SpectrumEstimate:
    """Extreme generalized eigenvalues of (B A^{-1} B^T, M_p) on 1^{perp_M}."""
    n_p = system.n_p
    if method == "auto":
        method = "dense" if n_p <= DENSE_SCHUR_LIMIT else "iterative"
    solve_A = _factor_spd(system.A)
    B = system.B
    try:
        if method == "dense":
            X = solve_A(B.T.toarray())
            S = B @ X
            S = 0.5 * (S + S.T)
            Mp = system.M_p.toarray()
            Z = _complement_basis(system.mean_vec / np.linalg.norm(system.mean_vec))
            ev = sla.eigh(Z.T @ S @ Z, Z.T @ Mp @ Z, eigvals_only=True)
            lo, hi = float(ev[0]), float(ev[-1])
        elif method == "iterative":
            solve_Mp = _factor_spd(system.M_p)
            lo, hi = generalized_lanczos(
                lambda v: B @ solve_A(B.T @ v), solve_Mp, lambda v: system.M_p @ v, n_p,
                deflate=np.ones(n_p),
            )
        else:
            raise ValueError(f"unknown method {method!r}")
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise EigenFailure(str(exc)) from exc
    if not lo > 0:
        raise EigenFailure(f"non-positive Schur eigenvalue {lo:g} on 1^perp")
    return SpectrumEstimate(lo, hi, method)


def _pair_extremes(K, M, method):
    n = K.shape[0]
    if method == "auto":
        method = "dense" if n <= DENSE_A_LIMIT else "iterative"
    try:
        if method == "dense":
            ev = sla.eigh(K.toarray(), M.toarray(), eigvals_only=True)
            return float(ev[0]), float(ev[-1]), method
        if method == "iterative":
            hi = spla.eigsh(K, k=1, M=M, which="LA", tol=1e-10, return_eigenvectors=False)[0]
            lo = spla.eigsh(K, k=1, M=M, sigma=0.0, which="LM", tol=1e-10,
                            return_eigenvectors=False)[0]
            return float(lo), float(hi), method
    except (np.linalg.LinAlgError, sla.LinAlgError, spla.ArpackError) as exc:
        raise EigenFailure(str(exc)) from exc
    raise ValueError(f"unknown method {method!r}")


def a_condition(system, method: str = "auto") -> SpectrumEstimate:
    """Extreme generalized eigenvalues of (A, M_u)."""
    lo, hi, used = _pair_extremes(system.A, system.M_u, method)
    if not lo > 0:
        raise EigenFailure(f"A is not positive definite (min eigenvalue {lo:g})")
    return SpectrumEstimate(lo, hi, used)


def mass_condition(M, method: str = "auto") -> SpectrumEstimate:
    """Extreme eigenvalues of diag(M)^{-1} M, i.e. of (M, diag M)."""
    D = sp.diags(M.diagonal()).tocsr()
    lo, hi, used = _pair_extremes(sp.csr_matrix(M), D, method)
    return SpectrumEstimate(lo, hi, used)
