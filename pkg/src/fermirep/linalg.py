"""Deterministic dense linear algebra for small Hermitian problems.

Eigendecomposition uses cyclic Jacobi rotations in a fixed sweep order so that
identical input bits give identical output bits; eigenvalues are returned
non-increasing and each eigenvector is phase-fixed by making its first
nonzero component real positive. The SVD is derived from the Jacobi
eigendecomposition of ``X^+ X`` with explicit recovery of the left factor.

numpy.linalg is deliberately not used here (it serves as an independent
oracle in the tests instead).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConvergenceError

#: largest Hermitian matrix accepted by eigh
EIGH_DIM_CAP = 64

#: largest matrix side accepted by svd_small
SVD_DIM_CAP = 8


@dataclass(frozen=True)
class Tolerances:
    """Central tolerance configuration for the numeric layer."""

    hermiticity: float = 1e-8
    convergence: float = 1e-13
    assertion: float = 1e-10


DEFAULT_TOLS = Tolerances()

#: maximum Jacobi sweeps before giving up
MAX_SWEEPS = 60


@dataclass
class EigenDecomposition:
    values: np.ndarray    # (k,) float64, non-increasing
    vectors: np.ndarray   # (k, k) complex128, column k pairs with values[k]
    sweeps: int


@dataclass
class SVDResult:
    u: np.ndarray          # (m, m) unitary
    singulars: np.ndarray  # (min(m, n),) float64, non-negative, non-increasing
    v: np.ndarray          # (n, n) unitary


def _fix_phases(vectors: np.ndarray) -> None:
    # first nonzero component of each column made real positive
    k = vectors.shape[0]
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        mags = np.abs(col)
        tiny = 100.0 * k * np.finfo(np.float64).eps * mags.max()
        nz = np.nonzero(mags > tiny)[0]
        if nz.size == 0:
            continue
        lead = col[nz[0]]
        vectors[:, j] = col * (np.conj(lead) / abs(lead))


def eigh(h: np.ndarray, tols: Tolerances = DEFAULT_TOLS) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix (dimension <= 64).

    Raises if the Hermiticity residual exceeds ``tols.hermiticity`` or if the
    sweep loop fails to converge to ``tols.convergence`` (relative to the
    Frobenius norm).
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    k = h.shape[0]
    if k > EIGH_DIM_CAP:
        raise ValueError(f"matrix dimension {k} exceeds cap {EIGH_DIM_CAP}")
    resid = np.abs(h - h.conj().T).max() if k else 0.0
    if resid > tols.hermiticity:
        raise ValueError(f"matrix is not Hermitian: max |h - h^+| = {resid:.3e}")
    a = np.ascontiguousarray((h + h.conj().T) / 2.0)
    np.fill_diagonal(a, a.diagonal().real)
    v = np.eye(k, dtype=np.complex128)
    sweeps = kernels.eigh_sweeps_kernel(a, v, tols.convergence, MAX_SWEEPS)
    if sweeps < 0:
        raise ConvergenceError(
            f"Jacobi sweeps did not converge within {MAX_SWEEPS} sweeps"
        )
    vals = a.diagonal().real.copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = v[:, order].copy()
    _fix_phases(vecs)
    return EigenDecomposition(values=vals, vectors=vecs, sweeps=int(sweeps))


def _gram_schmidt_fill(u: np.ndarray, ncols: int) -> None:
    # complete columns [ncols:] of u to a unitary, deterministically, by
    # orthogonalizing canonical basis vectors against the existing columns
    m = u.shape[0]
    col = ncols
    cand = 0
    while col < m:
        if cand >= m:  # cannot happen for consistent ncols, defensive only
            raise RuntimeError("ran out of candidate vectors completing unitary")
        w = np.zeros(m, np.complex128)
        w[cand] = 1.0
        for _ in range(2):  # twice for stability
            w -= u[:, :col] @ (u[:, :col].conj().T @ w)
        nrm = np.linalg.norm(w)
        if nrm > 0.5:
            u[:, col] = w / nrm
            col += 1
        cand += 1


def svd_small(x: np.ndarray, tols: Tolerances = DEFAULT_TOLS) -> SVDResult:
    """Singular value decomposition of a matrix up to 8x8: x = u @ diag @ v^+.

    Implemented as the Jacobi eigendecomposition of ``x^+ x``; left singular
    vectors are recovered as ``x v / sigma`` (re-orthonormalized) and the null
    space of ``u`` is completed deterministically.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {x.shape}")
    m, n = x.shape
    if m > SVD_DIM_CAP or n > SVD_DIM_CAP or m == 0 or n == 0:
        raise ValueError(f"matrix shape {x.shape} outside supported range (1..8)")
    gram = x.conj().T @ x
    dec = eigh(gram, tols)
    vals = np.maximum(dec.values, 0.0)
    v = dec.vectors
    kmin = min(m, n)
    singulars = np.sqrt(vals[:kmin])
    smax = singulars[0] if kmin else 0.0
    rank_tol = max(m, n) * np.finfo(np.float64).eps * smax
    u = np.zeros((m, m), np.complex128)
    ncols = 0
    for j in range(kmin):
        if singulars[j] <= rank_tol:
            break
        w = x @ v[:, j] / singulars[j]
        # re-orthonormalize against previous columns (tiny singular values
        # otherwise leave u unitary only to O(eps * smax / sigma))
        for _ in range(2):
            w -= u[:, :ncols] @ (u[:, :ncols].conj().T @ w)
        u[:, ncols] = w / np.linalg.norm(w)
        ncols += 1
    _gram_schmidt_fill(u, ncols)
    return SVDResult(u=u, singulars=singulars, v=v)


def svd_reconstruct(res: SVDResult, shape: tuple[int, int]) -> np.ndarray:
    """Assemble u @ diag(singulars) @ v^+ back into the given (m, n) shape."""
    m, n = shape
    sigma = np.zeros((m, n), np.complex128)
    k = res.singulars.shape[0]
    sigma[:k, :k] = np.diag(res.singulars)
    return res.u @ sigma @ res.v.conj().T
