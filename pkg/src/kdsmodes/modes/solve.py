"""Quadratic eigenvalue solve, polishing and spurious-mode filtering."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from ..errors import EigensolverFailure, ZeroVector
from ..spectral import interpolation_matrix
from .assembly import ModeProblem, assemble_reduced_operator


@dataclass(frozen=True)
class Window:
    """Closed rectangle ``re_min <= Re sigma <= re_max``, ``im_min <= Im sigma <= im_max``."""

    re_min: float = -1.0
    re_max: float = 1.0
    im_min: float = -0.05
    im_max: float = 0.2

    def contains(self, z, pad: float = 0.0):
        z = np.asarray(z)
        return ((z.real >= self.re_min - pad) & (z.real <= self.re_max + pad)
                & (z.imag >= self.im_min - pad) & (z.imag <= self.im_max + pad))


@dataclass
class QnmResult:
    """Accepted eigenpairs of one mode problem, sorted by |Im sigma| then Re sigma.

    ``eigenvectors[n]`` holds ``w`` on the solver grid (flat, unit 2-norm) and
    ``refined_eigenvectors[n]`` the same mode on the refined grid.
    ``refinement_shift`` is |sigma(refined grid) - sigma|.
    """

    k: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    refined_eigenvalues: np.ndarray
    refinement_shift: np.ndarray
    refined_residuals: np.ndarray
    refined_eigenvectors: list = field(default_factory=list)
    rejected: list = field(default_factory=list)
    problem: ModeProblem | None = field(default=None, repr=False)
    refined_problem: ModeProblem | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.eigenvalues)


def mode_residual(problem: ModeProblem, sigma: complex, v: np.ndarray) -> float:
    """||P(sigma) v|| / ||v|| on the grid."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ZeroVector("mode_residual needs a nonzero vector")
    return float(np.linalg.norm(problem.apply(sigma, v)) / nv)


def companion_eigs(problem: ModeProblem):
    """All eigenvalues and right eigenvectors of the pencil via first companion form."""
    n = problem.size
    P0, P1, P2 = problem.P0, problem.P1, problem.P2
    d = np.diag(P2)
    try:
        if np.count_nonzero(P2 - np.diag(d)) == 0 and np.all(d != 0):
            A = np.zeros((2 * n, 2 * n), dtype=complex)
            A[:n, n:] = np.eye(n)
            A[n:, :n] = -P0 / d[:, None]
            A[n:, n:] = -P1 / d[:, None]
            vals, vecs = np.linalg.eig(A)
        else:
            A = np.block([[np.zeros((n, n)), np.eye(n)], [-P0, -P1]])
            B = np.block([[np.eye(n), np.zeros((n, n))], [np.zeros((n, n)), P2]])
            vals, vecs = sla.eig(A, B)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    return vals, vecs[:n]


def _lu(M):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        return sla.lu_factor(M, check_finite=False)


def _phase_fix(v):
    v = v / np.linalg.norm(v)
    # fix the phase by the largest entry so exported vectors are reproducible
    return v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v))]))


def _polish_simple(problem, sigma, v, steps):
    n = problem.size
    if v is None:
        v = np.random.default_rng(0).standard_normal(n) + 0j
    v = np.asarray(v, dtype=complex).reshape(n, -1).sum(axis=1)
    v = v / np.linalg.norm(v)
    lu = _lu(problem.pencil(sigma))
    best = None
    for _ in range(steps):
        w = sla.lu_solve(lu, problem.apply_derivative(sigma, v), check_finite=False)
        if not np.all(np.isfinite(w)):
            break
        v = w / np.linalg.norm(w)
        for _ in range(2):
            dPv = problem.apply_derivative(sigma, v)
            sigma = complex(sigma - np.vdot(dPv, problem.apply(sigma, v)) / np.vdot(dPv, dPv))
        res = mode_residual(problem, sigma, v)
        if best is None or res < best[0]:
            best = (res, sigma, v)
    if best is None:
        raise EigensolverFailure(f"inverse iteration produced no finite iterate near {sigma}")
    return best[1], best[2], 1


def _polish_cluster(problem, sigma, V, nev, cluster_tol, ncv, tol):
    n = problem.size
    lu = _lu(problem.pencil(sigma))
    P1, P2 = problem.P1, problem.P2

    def op(z):
        u, w = z[:n], z[n:]
        x = -sla.lu_solve(lu, P2 @ w + P1 @ u + sigma * (P2 @ u), check_finite=False)
        return np.concatenate([x, u + sigma * x])

    L = spla.LinearOperator((2 * n, 2 * n), matvec=op, dtype=complex)
    v0 = (np.random.default_rng(0).standard_normal(n) + 0j if V is None
          else np.asarray(V, dtype=complex).reshape(n, -1).sum(axis=1))
    try:
        theta, _ = spla.eigs(L, k=min(nev, 2 * n - 2), v0=np.concatenate([v0, sigma * v0]),
                             which="LM", ncv=min(2 * n, ncv), tol=tol)
    except spla.ArpackNoConvergence as exc:
        raise EigensolverFailure(f"Arnoldi did not converge near {sigma}") from exc
    lam = sigma + 1.0 / theta[theta != 0]
    j = int(np.argmin(np.abs(lam - sigma)))
    group = np.abs(lam - lam[j]) < cluster_tol
    s = complex(np.mean(lam[group]))
    # at a (nearly) defective eigenvalue the pencil iteration stalls; take the
    # smallest right singular vector of P(s) by inverse iteration on P^H P
    lu = _lu(problem.pencil(s))
    v = v0 / np.linalg.norm(v0)
    for _ in range(4):
        v = sla.lu_solve(lu, sla.lu_solve(lu, v, trans=2, check_finite=False), check_finite=False)
        v = v / np.linalg.norm(v)
    return s, v, int(group.sum())


def polish(problem: ModeProblem, sigma: complex, V: np.ndarray | None = None, *,
           cluster: bool = False, steps: int = 3, nev: int = 3, cluster_tol: float = 1e-6,
           ncv: int = 12, tol: float = 1e-13):
    """Refine an eigenpair of the pencil near ``sigma``.

    A simple eigenvalue is refined by inverse iteration with one LU
    factorization of ``P(sigma)`` and a residual-minimizing update
    ``sigma -= (P' v)^H P v / ||P' v||^2``; the best of ``steps`` iterates is
    kept.  With ``cluster=True`` the eigenvalue is treated as a split double:
    shift-invert Arnoldi on the companion linearization returns the ``nev``
    nearest eigenvalues, those within ``cluster_tol`` are averaged (the mean
    of a split pair moves linearly in the perturbation, each member only as
    its square root) and the vector is the smallest right singular vector
    of ``P(mean)``.  ``V`` holds starting vectors as columns.  Returns
    ``(sigma, v, multiplicity)`` with ``v`` of unit norm.
    """
    if cluster:
        s, v, m = _polish_cluster(problem, sigma, V, nev, cluster_tol, ncv, tol)
    else:
        s, v, m = _polish_simple(problem, sigma, V, steps)
    return s, _phase_fix(v), m


def transfer(problem: ModeProblem, target: ModeProblem, w: np.ndarray) -> np.ndarray:
    """Interpolate a grid function from one tensor grid to another."""
    Ir = interpolation_matrix(problem.r, target.r)
    Ix = interpolation_matrix(problem.x, target.x)
    W = w.reshape(len(problem.r), len(problem.x))
    return (Ir @ W @ Ix.T).reshape(-1)


def _dedupe(sigmas, tol):
    keep = []
    for i, s in enumerate(sigmas):
        if all(abs(s - sigmas[j]) > tol for j in keep):
            keep.append(i)
    return keep


def _clusters(vals, tol):
    """Group indices of ``vals`` into chains of mutually close values."""
    groups = []
    for i in np.argsort(vals.real):
        for g in groups:
            if np.min(np.abs(vals[g] - vals[i])) < tol:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def qnm_solve(problem: ModeProblem, window: Window | None = None, *, refine: bool = True,
              agreement_tol: float = 1e-6, residual_tol: float = 1e-8,
              full_refinement: bool = False,
              cluster_tol: float = 1e-6) -> QnmResult:
    """Quasinormal modes of one mode problem inside ``window``.

    Companion eigenvalues closer than ``cluster_tol`` are treated as one
    (possibly defective) eigenvalue and polished together.  A candidate is
    accepted if its residual is below ``residual_tol`` and it reappears
    within ``agreement_tol`` on the refined grid ``(ceil(1.5 N_r), N_theta + 4)``
    with residual below ``residual_tol``.  On the refined grid each candidate
    is polished from its interpolated eigenvector; ``full_refinement=True``
    instead re-solves the refined pencil completely and starts from the
    nearest refined eigenvalue.
    """
    window = Window() if window is None else window
    vals, vecs = companion_eigs(problem)
    finite = np.isfinite(vals)
    vals, vecs = vals[finite], vecs[:, finite]
    inside = np.nonzero(window.contains(vals, pad=1e-3))[0]

    cands = []
    for g in _clusters(vals[inside], cluster_tol):
        idx = inside[g]
        s, v, m = polish(problem, complex(np.mean(vals[idx])), vecs[:, idx],
                         cluster=len(idx) > 1, cluster_tol=cluster_tol)
        if window.contains(s):
            cands.append((s, v, mode_residual(problem, s, v), m))
    cands.sort(key=lambda c: c[2])
    cands = [cands[i] for i in _dedupe([c[0] for c in cands], cluster_tol)]

    fine = None
    fine_vals = None
    if refine and cands:
        fine = assemble_reduced_operator(problem.params, problem.op_spec, problem.k,
                                         problem.grid.refined(), problem.frame)
        if full_refinement:
            fine_vals, _ = companion_eigs(fine)
            fine_vals = fine_vals[np.isfinite(fine_vals)]

    accepted, rejected = [], []
    for s, v, res, m in cands:
        if res >= residual_tol:
            rejected.append((s, "residual", res))
            continue
        if fine is None:
            accepted.append((s, v, res, s, 0.0, res, v))
            continue
        start = s
        if full_refinement:
            start = complex(fine_vals[int(np.argmin(np.abs(fine_vals - s)))])
        s_f, v_f, _ = polish(fine, start, transfer(problem, fine, v), cluster=m > 1,
                             cluster_tol=cluster_tol)
        res_f = mode_residual(fine, s_f, v_f)
        shift = abs(s_f - s)
        if shift < agreement_tol and res_f < residual_tol:
            accepted.append((s, v, res, s_f, shift, res_f, v_f))
        else:
            rejected.append((s, "refinement", shift))

    accepted.sort(key=lambda t: (round(abs(t[0].imag), 9), t[0].real))
    if accepted:
        cols = list(zip(*accepted))
        return QnmResult(k=problem.k, eigenvalues=np.array(cols[0]), eigenvectors=np.array(cols[1]),
                         residuals=np.array(cols[2]), refined_eigenvalues=np.array(cols[3]),
                         refinement_shift=np.array(cols[4]), refined_residuals=np.array(cols[5]),
                         refined_eigenvectors=list(cols[6]), rejected=rejected, problem=problem,
                         refined_problem=fine if fine is not None else problem)
    empty = np.zeros(0)
    return QnmResult(k=problem.k, eigenvalues=empty.astype(complex),
                     eigenvectors=np.zeros((0, problem.size), dtype=complex), residuals=empty,
                     refined_eigenvalues=empty.astype(complex), refinement_shift=empty,
                     refined_residuals=empty, rejected=rejected, problem=problem,
                     refined_problem=fine if fine is not None else problem)
