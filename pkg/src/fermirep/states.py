"""Fermionic pure states as dense amplitude vectors over Slater determinants.

A state of ``n`` particles in ``r`` orbitals is stored as a complex vector
indexed by the lexicographically ordered strictly-increasing ``n``-subsets of
``{1, ..., r}``. Orbitals are 1-based at the API surface; internal tables are
0-based numpy arrays.

Sign convention: removing orbital ``p`` from the determinant ``J + {p}``
carries the factor ``(-1)**pos`` where ``pos`` is the zero-based position of
``p`` within the sorted union. ``partial_inner`` additionally carries the
first-quantized normalization ``1/sqrt(n)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import kernels
from .errors import DimensionCapError, NormalizationError

#: largest supported determinant-basis dimension C(r, n)
DIMENSION_CAP = 100_000

#: unit-norm tolerance enforced at reduced-density-matrix entry points
NORM_TOL = 1e-8

#: unitarity tolerance for one-particle basis rotations
UNITARITY_TOL = 1e-8


class DetBasis:
    """Cached combinatorics of one (n, r) determinant basis.

    Attributes
    ----------
    dets : (dim, n) int64, 0-based orbitals, lexicographic rows
    ext_orb, ext_idx, ext_sign : (dim1, r-n+1) extension tables mapping each
        (n-1)-subset J and each orbital p not in J to the index of J+{p} in
        this basis and the removal sign (-1)**pos(p, J+{p}).
    """

    def __init__(self, n: int, r: int):
        if n < 1:
            raise ValueError(f"particle number must be positive, got {n}")
        if r < 1:
            raise ValueError(f"orbital count must be positive, got {r}")
        if n > r:
            raise ValueError(f"particle number {n} exceeds orbital count {r}")
        dim = math.comb(r, n)
        if dim > DIMENSION_CAP:
            raise DimensionCapError(
                f"C({r},{n}) = {dim} exceeds the dimension cap {DIMENSION_CAP}"
            )
        self.n = n
        self.r = r
        self.dim = dim
        self.dets = np.array(
            list(combinations(range(r), n)), dtype=np.int64
        ).reshape(dim, n)
        self.index = {
            tuple(int(o) + 1 for o in row): i for i, row in enumerate(self.dets)
        }

        sub = list(combinations(range(r), n - 1))
        self.dim1 = len(sub)
        m = r - (n - 1)
        rank = {tuple(int(o) for o in row): i for i, row in enumerate(self.dets)}
        ext_orb = np.empty((self.dim1, m), np.int64)
        ext_idx = np.empty((self.dim1, m), np.int64)
        ext_sign = np.empty((self.dim1, m), np.float64)
        for j, J in enumerate(sub):
            a = 0
            for p in range(r):
                if p in J:
                    continue
                pos = sum(1 for o in J if o < p)
                K = tuple(sorted(J + (p,)))
                ext_orb[j, a] = p
                ext_idx[j, a] = rank[K]
                ext_sign[j, a] = -1.0 if pos % 2 else 1.0
                a += 1
        self.ext_orb = ext_orb
        self.ext_idx = ext_idx
        self.ext_sign = ext_sign

    def index_of(self, det) -> int:
        key = tuple(int(o) for o in det)
        if key not in self.index:
            raise ValueError(f"{det} is not a valid determinant for (n={self.n}, r={self.r})")
        return self.index[key]


@lru_cache(maxsize=None)
def det_basis(n: int, r: int) -> DetBasis:
    return DetBasis(n, r)


def basis_index(n: int, r: int) -> tuple[tuple[int, ...], ...]:
    """Lexicographic tuple of all 1-based determinants for (n, r)."""
    b = det_basis(n, r)
    return tuple(tuple(int(o) + 1 for o in row) for row in b.dets)


@dataclass
class FermionState:
    """Dense n-particle amplitude vector over the (n, r) determinant basis."""

    n: int
    r: int
    amps: np.ndarray

    def __post_init__(self):
        b = det_basis(self.n, self.r)
        amps = np.asarray(self.amps, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != b.dim:
            raise ValueError(
                f"amplitude vector has length {amps.shape[0]}, expected C({self.r},{self.n}) = {b.dim}"
            )
        self.amps = amps

    @property
    def basis(self) -> DetBasis:
        return det_basis(self.n, self.r)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "FermionState":
        nrm = self.norm()
        if nrm == 0.0:
            raise NormalizationError("cannot normalize the zero state")
        return FermionState(self.n, self.r, self.amps / nrm)

    def amplitude(self, det) -> complex:
        return complex(self.amps[self.basis.index_of(det)])


def slater(det, r: int) -> FermionState:
    """Single Slater determinant |det| in r orbitals (det: increasing, 1-based)."""
    det = tuple(int(o) for o in det)
    if any(b <= a for a, b in zip(det, det[1:])):
        raise ValueError(f"determinant {det} must be strictly increasing")
    if det and (det[0] < 1 or det[-1] > r):
        raise ValueError(f"determinant {det} has orbitals outside [1, {r}]")
    b = det_basis(len(det), r)
    amps = np.zeros(b.dim, np.complex128)
    amps[b.index_of(det)] = 1.0
    return FermionState(len(det), r, amps)


def inner(bra: FermionState, ket: FermionState) -> complex:
    """Inner product, conjugate-linear in the first argument."""
    if (bra.n, bra.r) != (ket.n, ket.r):
        raise ValueError(
            f"shape mismatch: ({bra.n},{bra.r}) vs ({ket.n},{ket.r})"
        )
    return complex(np.vdot(bra.amps, ket.amps))


def partial_inner(p: int, state: FermionState) -> FermionState:
    """Contract orbital p (1-based) against the state's first slot.

    Returns the (n-1)-particle state with coefficients
    sign(p, J) * x[J + {p}] / sqrt(n) on each (n-1)-determinant J not
    containing p.
    """
    if state.n < 2:
        raise ValueError("partial_inner requires a state with at least 2 particles")
    if not 1 <= p <= state.r:
        raise ValueError(f"orbital {p} outside [1, {state.r}]")
    b = state.basis
    rows, cols = np.nonzero(b.ext_orb == p - 1)
    out = np.zeros(b.dim1, np.complex128)
    out[rows] = b.ext_sign[rows, cols] * state.amps[b.ext_idx[rows, cols]]
    out /= math.sqrt(state.n)
    return FermionState(state.n - 1, state.r, out)


def contract_orbital(f: np.ndarray, state: FermionState) -> FermionState:
    """Contract a one-particle vector f against the first slot: sum_p conj(f_p) <e_p, .>."""
    if state.n < 2:
        raise ValueError("contract_orbital requires a state with at least 2 particles")
    f = np.asarray(f, dtype=np.complex128).reshape(-1)
    if f.shape[0] != state.r:
        raise ValueError(f"orbital vector has length {f.shape[0]}, expected {state.r}")
    b = state.basis
    signed = b.ext_sign * state.amps[b.ext_idx]          # (dim1, m)
    out = (signed * np.conj(f)[b.ext_orb]).sum(axis=1)
    out /= math.sqrt(state.n)
    return FermionState(state.n - 1, state.r, out)


def attach_orbital(f: np.ndarray, state: FermionState) -> FermionState:
    """Antisymmetrically attach a one-particle vector to an (n-1)-particle state.

    Computes sqrt(n) * A(f (x) state); the result is normalized whenever f is a
    unit vector with no occupation overlap with the state.
    """
    f = np.asarray(f, dtype=np.complex128).reshape(-1)
    if f.shape[0] != state.r:
        raise ValueError(f"orbital vector has length {f.shape[0]}, expected {state.r}")
    b = det_basis(state.n + 1, state.r)
    contrib = b.ext_sign * f[b.ext_orb] * state.amps[:, None]   # (dim1, m)
    out = np.zeros(b.dim, np.complex128)
    np.add.at(out, b.ext_idx.ravel(), contrib.ravel())
    return FermionState(state.n + 1, state.r, out)


def dual_contract(bra_small: FermionState, ket: FermionState) -> np.ndarray:
    """Contract an (n-1)-particle bra against the first n-1 slots of an n-particle ket.

    Returns the leftover one-particle vector v with
    v_p = <bra_small (x) e_p, ket> (conjugate-linear in bra_small).
    """
    if bra_small.r != ket.r or bra_small.n != ket.n - 1:
        raise ValueError(
            f"expected an ({ket.n - 1},{ket.r}) bra for an ({ket.n},{ket.r}) ket, "
            f"got ({bra_small.n},{bra_small.r})"
        )
    b = ket.basis
    n = ket.n
    glob = -1.0 if (n - 1) % 2 else 1.0
    weights = np.conj(bra_small.amps)[:, None] * b.ext_sign * ket.amps[b.ext_idx]
    v = np.zeros(ket.r, np.complex128)
    np.add.at(v, b.ext_orb.ravel(), weights.ravel())
    return glob / math.sqrt(n) * v


def one_rdm(state: FermionState) -> np.ndarray:
    """One-particle reduced density matrix gamma[p, q] = <a_q^+ a_p> (trace n)."""
    nrm = state.norm()
    if abs(nrm - 1.0) > NORM_TOL:
        raise NormalizationError(
            f"state norm {nrm!r} deviates from 1 beyond {NORM_TOL}"
        )
    b = state.basis
    return kernels.one_rdm_kernel(
        state.amps, b.ext_orb, b.ext_idx, b.ext_sign, state.r
    )


def rotate(state: FermionState, u: np.ndarray) -> FermionState:
    """Apply a one-particle unitary u to every orbital of the state.

    The amplitudes transform by the n-th compound matrix of u, so that
    one_rdm(rotate(state, u)) = u @ one_rdm(state) @ u^+.
    """
    u = np.ascontiguousarray(np.asarray(u, dtype=np.complex128))
    if u.shape != (state.r, state.r):
        raise ValueError(f"unitary must be {state.r}x{state.r}, got {u.shape}")
    resid = np.abs(u.conj().T @ u - np.eye(state.r)).max()
    if resid > UNITARITY_TOL:
        raise ValueError(f"matrix is not unitary: max |u^+ u - I| = {resid:.3e}")
    b = state.basis
    out = kernels.compound_kernel(u, b.dets, state.amps)
    return FermionState(state.n, state.r, out)


def particle_hole_rdm(gamma: np.ndarray) -> np.ndarray:
    """Hole-side density matrix I - gamma (trace r - n for an n-particle input)."""
    gamma = np.asarray(gamma, dtype=np.complex128)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {gamma.shape}")
    return np.eye(gamma.shape[0], dtype=np.complex128) - gamma


# ---------------------------------------------------------------------------
# state file round trip
# ---------------------------------------------------------------------------

def state_to_dict(state: FermionState) -> dict:
    b = state.basis
    entries = []
    for i in np.nonzero(state.amps)[0]:
        amp = state.amps[i]
        entries.append(
            {
                "orbitals": [int(o) + 1 for o in b.dets[i]],
                "re": float(amp.real),
                "im": float(amp.imag),
            }
        )
    return {"n": state.n, "r": state.r, "amplitudes": entries}


def state_from_dict(data: dict) -> FermionState:
    try:
        n = int(data["n"])
        r = int(data["r"])
        raw = data["amplitudes"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed state record: {exc}") from exc
    b = det_basis(n, r)
    amps = np.zeros(b.dim, np.complex128)
    seen = set()
    for entry in raw:
        try:
            det = tuple(int(o) for o in entry["orbitals"])
            re = float(entry["re"])
            im = float(entry["im"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed amplitude entry {entry!r}: {exc}") from exc
        if len(det) != n or any(b2 <= a2 for a2, b2 in zip(det, det[1:])):
            raise ValueError(f"orbitals {det} are not a strictly increasing {n}-tuple")
        if det[0] < 1 or det[-1] > r:
            raise ValueError(f"orbitals {det} outside [1, {r}]")
        if det in seen:
            raise ValueError(f"duplicate determinant entry {det}")
        seen.add(det)
        amps[b.index_of(det)] = complex(re, im)
    return FermionState(n, r, amps)


def save_state(state: FermionState, path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_dict(state), fh, indent=1)
        fh.write("\n")


def load_state(path) -> FermionState:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON in state file {path}: {exc}") from exc
    return state_from_dict(data)
