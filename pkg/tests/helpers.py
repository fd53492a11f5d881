"""Dense first-quantized oracles used to cross-check the packed-amplitude code.

Everything here works on the full r**n coefficient tensor, so it is slow and
memory-hungry — fine for the small shapes used in tests, and completely
independent of the extension-table machinery in fermirep.states.
"""

import math
from itertools import permutations

import numpy as np

from fermirep import FermionState, det_basis


def _parity(perm) -> float:
    inv = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                inv += 1
    return -1.0 if inv % 2 else 1.0


def dense_tensor(state: FermionState) -> np.ndarray:
    """Full antisymmetric tensor T with T[sorted det] = amp / sqrt(n!)."""
    n, r = state.n, state.r
    b = det_basis(n, r)
    t = np.zeros((r,) * n, dtype=np.complex128)
    scale = 1.0 / math.sqrt(math.factorial(n))
    for det, amp in zip(b.dets, state.amps):
        for perm in permutations(range(n)):
            idx = tuple(int(det[k]) for k in perm)
            t[idx] = _parity(perm) * amp * scale
    return t


def extract_amps(t: np.ndarray, n: int, r: int) -> np.ndarray:
    b = det_basis(n, r)
    scale = math.sqrt(math.factorial(n))
    return np.array([t[tuple(int(o) for o in det)] for det in b.dets]) * scale


def oracle_one_rdm(state: FermionState) -> np.ndarray:
    t = dense_tensor(state)
    tm = t.reshape(state.r, -1)
    return state.n * (tm @ tm.conj().T)


def oracle_partial_inner(p: int, state: FermionState) -> FermionState:
    """Slot-1 contraction against e_p, re-expressed on the (n-1) basis."""
    t = dense_tensor(state)
    amps = extract_amps(t[p - 1], state.n - 1, state.r)
    return FermionState(state.n - 1, state.r, amps)


def oracle_dual_contract(bra: FermionState, ket: FermionState) -> np.ndarray:
    """v_p = <bra (x) e_p, ket>, contracting the first n-1 slots."""
    tb = dense_tensor(bra)
    tk = dense_tensor(ket)
    axes = list(range(ket.n - 1))
    return np.tensordot(np.conj(tb), tk, axes=(axes, axes))


def oracle_rotate(state: FermionState, u: np.ndarray) -> FermionState:
    t = dense_tensor(state)
    for axis in range(state.n):
        t = np.tensordot(u, t, axes=(1, axis))
        t = np.moveaxis(t, 0, axis)
    return FermionState(state.n, state.r, extract_amps(t, state.n, state.r))


def rand_state(n: int, r: int, rng: np.random.Generator) -> FermionState:
    dim = det_basis(n, r).dim
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return FermionState(n, r, amps / np.linalg.norm(amps))


def rand_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, rr = np.linalg.qr(z)
    return q * (np.diag(rr) / np.abs(np.diag(rr)))
