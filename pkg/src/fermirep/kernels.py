"""Hot numeric kernels, each implemented twice.

The loop versions are plain Python written in nopython style; when the numba
backend is active they are compiled with ``@njit(cache=True)``. The ``*_numpy``
twins are vectorized fallbacks used when numba is disabled or unavailable
(see :mod:`fermirep.backend`). ``impls()`` returns the active set;
``numpy_impls()`` / ``numba_impls()`` expose both for benchmarks and
cross-checks.
"""
from __future__ import annotations

import numpy as np

from . import backend


# ---------------------------------------------------------------------------
# loop sources (numba-compilable, also runnable as plain python)
# ---------------------------------------------------------------------------

def _one_rdm_loops(amps, ext_orb, ext_idx, ext_sign, r):
    # gamma[p, q] = sum_J sign(p,J) sign(q,J) conj(x[J+q]) x[J+p]
    dim1, m = ext_orb.shape
    gamma = np.zeros((r, r), np.complex128)
    for j in range(dim1):
        for a in range(m):
            p = ext_orb[j, a]
            xa = ext_sign[j, a] * amps[ext_idx[j, a]]
            for b in range(m):
                q = ext_orb[j, b]
                xb = ext_sign[j, b] * amps[ext_idx[j, b]]
                gamma[p, q] += np.conj(xb) * xa
    return gamma


def _jacobi_sweeps_loops(a, v, conv_tol, max_sweeps):
    # Cyclic complex Jacobi; rotations in fixed (p, q) row-major order.
    # a is overwritten with the (nearly) diagonal matrix, v accumulates the
    # unitary (columns are eigenvectors). Returns sweeps used, or -1 if the
    # off-diagonal norm failed to reach conv_tol * max(1, ||a||_F).
    k = a.shape[0]
    fro = 0.0
    for i in range(k):
        for j in range(k):
            fro += abs(a[i, j]) ** 2
    scale = np.sqrt(fro)
    if scale < 1.0:
        scale = 1.0
    thresh = conv_tol * scale
    skip = 0.1 * thresh / (k * k + 1)
    sweeps = 0
    while True:
        off = 0.0
        for p in range(k - 1):
            for q in range(p + 1, k):
                off += abs(a[p, q]) ** 2
        if np.sqrt(2.0 * off) <= thresh:
            return sweeps
        if sweeps == max_sweeps:
            return -1
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                rr = abs(apq)
                if rr <= skip:
                    continue
                # componentwise division: the complex/real form can overflow
                # to inf when rr is denormal, which a tiny conv_tol reaches
                w = complex(apq.real / rr, apq.imag / rr)
                wbar = np.conj(w)
                app = a[p, p].real
                aqq = a[q, q].real
                gap = aqq - app
                if abs(gap) > 2.0 * rr * 1.0e150:
                    t = 0.0  # angle underflows; the explicit zeroing still applies
                else:
                    tau = gap / (2.0 * rr)
                    if tau >= 0.0:
                        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for i in range(k):
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = c * aip - s * (wbar * aiq)
                    a[i, q] = s * (w * aip) + c * aiq
                for j in range(k):
                    apj = a[p, j]
                    aqj = a[q, j]
                    a[p, j] = c * apj - s * (w * aqj)
                    a[q, j] = s * (wbar * apj) + c * aqj
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real + 0.0j
                a[q, q] = a[q, q].real + 0.0j
                for i in range(k):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = c * vip - s * (wbar * viq)
                    v[i, q] = s * (w * vip) + c * viq
        sweeps += 1


def _compound_apply_loops(u, dets, amps):
    # y[K] = sum_L det(u[rows K, cols L]) x[L] -- n-th compound matrix action
    dim, n = dets.shape
    out = np.zeros(dim, np.complex128)
    work = np.empty((n, n), np.complex128)
    for ik in range(dim):
        acc = 0.0 + 0.0j
        for il in range(dim):
            x = amps[il]
            if x.real == 0.0 and x.imag == 0.0:
                continue
            for a in range(n):
                ra = dets[ik, a]
                for b in range(n):
                    work[a, b] = u[ra, dets[il, b]]
            det = 1.0 + 0.0j
            sign = 1.0
            for col in range(n):
                piv = col
                best = abs(work[col, col])
                for i in range(col + 1, n):
                    mag = abs(work[i, col])
                    if mag > best:
                        best = mag
                        piv = i
                if best == 0.0:
                    det = 0.0 + 0.0j
                    break
                if piv != col:
                    for cc in range(col, n):
                        tmp = work[col, cc]
                        work[col, cc] = work[piv, cc]
                        work[piv, cc] = tmp
                    sign = -sign
                pivval = work[col, col]
                det *= pivval
                for i in range(col + 1, n):
                    f = work[i, col] / pivval
                    for cc in range(col + 1, n):
                        work[i, cc] -= f * work[col, cc]
            acc += sign * det * x
        out[ik] = acc
    return out


# ---------------------------------------------------------------------------
# vectorized numpy fallbacks
# ---------------------------------------------------------------------------

def _one_rdm_numpy(amps, ext_orb, ext_idx, ext_sign, r):
    x = ext_sign * amps[ext_idx]                       # (dim1, m) signed amplitudes
    contrib = x[:, :, None] * np.conj(x)[:, None, :]   # [j, a, b] -> gamma[orb_a, orb_b]
    gamma = np.zeros((r, r), np.complex128)
    np.add.at(gamma, (ext_orb[:, :, None], ext_orb[:, None, :]), contrib)
    # add.at's accumulation order differs between (p,q) and (q,p), leaving
    # ~1 ulp hermiticity defects; mirror the upper triangle instead
    upper = np.triu(gamma, 1)
    return upper + upper.conj().T + np.diag(np.diag(gamma).real)


def _jacobi_sweeps_numpy(a, v, conv_tol, max_sweeps):
    k = a.shape[0]
    scale = max(1.0, float(np.linalg.norm(a)))
    thresh = conv_tol * scale
    skip = 0.1 * thresh / (k * k + 1)
    sweeps = 0
    while True:
        off = np.sqrt(2.0) * np.linalg.norm(np.triu(a, 1))
        if off <= thresh:
            return sweeps
        if sweeps == max_sweeps:
            return -1
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                rr = abs(apq)
                if rr <= skip:
                    continue
                w = complex(apq.real / rr, apq.imag / rr)  # see loop twin
                wbar = np.conj(w)
                app = a[p, p].real
                aqq = a[q, q].real
                gap = aqq - app
                if abs(gap) > 2.0 * rr * 1.0e150:
                    t = 0.0
                else:
                    tau = gap / (2.0 * rr)
                    if tau >= 0.0:
                        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - s * (wbar * colq)
                a[:, q] = s * (w * colp) + c * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - s * (w * rowq)
                a[q, :] = s * (wbar * rowp) + c * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * (wbar * vq)
                v[:, q] = s * (w * vp) + c * vq
        sweeps += 1


def _compound_apply_numpy(u, dets, amps):
    dim, n = dets.shape
    out = np.empty(dim, np.complex128)
    # chunk rows so the stacked submatrix block stays ~64 MB at worst
    chunk = max(1, 4_000_000 // max(1, dim * n * n))
    for s in range(0, dim, chunk):
        rows = dets[s:s + chunk]
        sub = u[rows[:, None, :, None], dets[None, :, None, :]]
        out[s:s + chunk] = np.linalg.det(sub) @ amps
    return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

_LOOP_SOURCES = {
    "one_rdm": _one_rdm_loops,
    "eigh_sweeps": _jacobi_sweeps_loops,
    "compound": _compound_apply_loops,
}

_NUMPY_IMPLS = {
    "one_rdm": _one_rdm_numpy,
    "eigh_sweeps": _jacobi_sweeps_numpy,
    "compound": _compound_apply_numpy,
}

_numba_cache: dict | None = None
_active_cache: dict | None = None


def numpy_impls() -> dict:
    return dict(_NUMPY_IMPLS)


def numba_impls() -> dict:
    """Compile (once) and return the numba versions of the loop kernels."""
    global _numba_cache
    if _numba_cache is None:
        from numba import njit

        _numba_cache = {
            name: njit(cache=True)(fn) for name, fn in _LOOP_SOURCES.items()
        }
    return dict(_numba_cache)


def impls(which: str | None = None) -> dict:
    global _active_cache
    if which is None:
        if _active_cache is None:
            _active_cache = (
                numba_impls() if backend.using_numba() else numpy_impls()
            )
        return _active_cache
    if which == "numba":
        return numba_impls()
    if which == "numpy":
        return numpy_impls()
    raise ValueError(f"unknown backend {which!r}")


def one_rdm_kernel(amps, ext_orb, ext_idx, ext_sign, r):
    return impls()["one_rdm"](amps, ext_orb, ext_idx, ext_sign, r)


def eigh_sweeps_kernel(a, v, conv_tol, max_sweeps):
    return impls()["eigh_sweeps"](a, v, conv_tol, max_sweeps)


def compound_kernel(u, dets, amps):
    return impls()["compound"](u, dets, amps)
