"""Pure-state representability conditions, pre-image constructors, and
canonical forms for one-particle occupation spectra.

Spectra are always handled sorted non-increasing; checkers demand pre-sorted
input (``sort_spectrum`` is the helper for callers holding raw values) and
report per-condition residuals rather than bare booleans.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .errors import DegeneracyError, RepresentabilityError
from .linalg import DEFAULT_TOLS, Tolerances, eigh
from .states import (
    FermionState,
    attach_orbital,
    contract_orbital,
    det_basis,
    dual_contract,
    one_rdm,
    partial_inner,
    rotate,
)

#: default pass/fail tolerance for spectrum checks
DEFAULT_CHECK_TOL = 1e-10

#: relative gap below which two occupation numbers count as degenerate
CLUSTER_TOL = 1e-7

_SORT_SLOP = 1e-12


@dataclass
class Spectrum:
    """Occupation spectrum paired with its particle number."""

    lambdas: np.ndarray
    n: int

    def __post_init__(self):
        self.lambdas = np.asarray(self.lambdas, dtype=np.float64).reshape(-1)
        self.n = int(self.n)
        if self.n < 1:
            raise ValueError(f"particle number must be positive, got {self.n}")
        if self.lambdas.size == 0:
            raise ValueError("empty spectrum")

    def __len__(self):
        return self.lambdas.size


def sort_spectrum(values) -> np.ndarray:
    """Sort occupation values non-increasing (checkers demand sorted input)."""
    return np.sort(np.asarray(values, dtype=np.float64).reshape(-1))[::-1].copy()


def _require_sorted(lam: np.ndarray, check: str) -> None:
    if lam.size > 1 and np.any(lam[:-1] < lam[1:] - _SORT_SLOP):
        raise ValueError(
            f"{check} requires a non-increasing spectrum; use sort_spectrum first"
        )


def spectrum_of(state: FermionState, tols: Tolerances = DEFAULT_TOLS) -> Spectrum:
    """Sorted occupation spectrum of a state's one-particle density matrix."""
    dec = eigh(one_rdm(state), tols)
    return Spectrum(dec.values, state.n)


@dataclass
class CheckReport:
    """Outcome of one spectrum condition with its residual diagnostics."""

    check: str
    passed: bool
    tolerance: float
    residuals: dict

    def to_dict(self) -> dict:
        out: dict = {"check": self.check, "pass": bool(self.passed)}
        for key, val in self.residuals.items():
            if isinstance(val, np.ndarray):
                out[key] = [float(x) for x in val]
            elif isinstance(val, (list, tuple)):
                out[key] = [float(x) for x in val]
            elif isinstance(val, (np.floating, float)):
                out[key] = float(val)
            else:
                out[key] = val
        out["tolerance"] = float(self.tolerance)
        return out


# ---------------------------------------------------------------------------
# spectrum checks
# ---------------------------------------------------------------------------

def check_pauli(spec: Spectrum, tol: float = DEFAULT_CHECK_TOL) -> CheckReport:
    """Ensemble condition: each occupation in [0, 1], total equal to n."""
    lam = spec.lambdas
    bound_violation = float(max(0.0, lam.max() - 1.0, -lam.min()))
    sum_residual = float(abs(lam.sum() - spec.n))
    return CheckReport(
        check="pauli",
        passed=bound_violation <= tol and sum_residual <= tol,
        tolerance=tol,
        residuals={"bound_violation": bound_violation, "sum_residual": sum_residual},
    )


def check_bd(spec: Spectrum, tol: float = DEFAULT_CHECK_TOL) -> CheckReport:
    """Borland-Dennis conditions for three particles in six orbitals.

    Equalities lambda_k + lambda_{7-k} = 1 (k = 1, 2, 3) and the inequality
    lambda_1 + lambda_2 <= lambda_3 + 1. Input must be sorted non-increasing.
    """
    if spec.n != 3:
        raise ValueError(f"Borland-Dennis check requires n=3, got n={spec.n}")
    lam = spec.lambdas
    if lam.size != 6:
        raise ValueError(f"Borland-Dennis check requires 6 occupations, got {lam.size}")
    _require_sorted(lam, "check_bd")
    residuals = [abs(float(lam[k] + lam[5 - k]) - 1.0) for k in range(3)]
    slack = float(lam[2] + 1.0 - lam[0] - lam[1])
    passed = max(residuals) <= tol and slack >= -tol
    return CheckReport(
        check="bd",
        passed=passed,
        tolerance=tol,
        residuals={"residuals": residuals, "slack": slack},
    )


def check_two_rep(spec: Spectrum, tol: float = DEFAULT_CHECK_TOL) -> CheckReport:
    """Two-particle condition: every nonzero occupation is doubly degenerate."""
    if spec.n != 2:
        raise ValueError(f"two-particle check requires n=2, got n={spec.n}")
    lam = spec.lambdas
    _require_sorted(lam, "check_two_rep")
    pair_residuals: list[float] = []
    unpaired = 0.0
    i = 0
    while i < lam.size:
        if lam[i] <= tol:
            break  # sorted: everything remaining is zero within tolerance
        if i + 1 == lam.size:
            unpaired = float(lam[i])
            break
        pair_residuals.append(float(abs(lam[i] - lam[i + 1])))
        i += 2
    passed = unpaired <= tol and all(r <= tol for r in pair_residuals)
    return CheckReport(
        check="two_rep",
        passed=passed,
        tolerance=tol,
        residuals={"pair_residuals": pair_residuals, "unpaired": unpaired},
    )


def check_rank_n_plus_2(spec: Spectrum, tol: float = DEFAULT_CHECK_TOL) -> CheckReport:
    """Odd-n condition at rank n+2: top occupation 1, the rest doubly degenerate."""
    n = spec.n
    if n % 2 == 0:
        raise ValueError(f"rank-(n+2) check applies to odd n only, got n={n}")
    lam = spec.lambdas
    if lam.size != n + 2:
        raise ValueError(
            f"rank-(n+2) check requires {n + 2} occupations for n={n}, got {lam.size}"
        )
    _require_sorted(lam, "check_rank_n_plus_2")
    top_residual = float(abs(lam[0] - 1.0))
    pair_residuals = [
        float(abs(lam[i] - lam[i + 1])) for i in range(1, lam.size - 1, 2)
    ]
    passed = top_residual <= tol and all(r <= tol for r in pair_residuals)
    return CheckReport(
        check="rank_n_plus_2",
        passed=passed,
        tolerance=tol,
        residuals={"top_residual": top_residual, "pair_residuals": pair_residuals},
    )


def check_weyl_2x2(a, b, c, tol: float = DEFAULT_CHECK_TOL) -> CheckReport:
    """Eigenvalue feasibility of c = spec(A + B) for 2x2 Hermitian A, B.

    a, b, c are non-increasing pairs with matching traces; for 2x2 the three
    inequalities a1+b1 >= c1, a2+b1 >= c2, a1+b2 >= c2 are also sufficient.
    """
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    c = np.asarray(c, dtype=np.float64).reshape(-1)
    if a.size != 2 or b.size != 2 or c.size != 2:
        raise ValueError("check_weyl_2x2 expects three pairs")
    for name, pair in (("a", a), ("b", b), ("c", c)):
        if pair[0] < pair[1] - _SORT_SLOP:
            raise ValueError(f"pair {name} must be non-increasing, got {pair}")
    trace_residual = float(abs(a.sum() + b.sum() - c.sum()))
    if trace_residual > max(tol, 1e-8):
        raise ValueError(
            f"trace mismatch: sum(a)+sum(b)-sum(c) = {trace_residual:.3e}"
        )
    margins = [
        float(a[0] + b[0] - c[0]),
        float(a[1] + b[0] - c[1]),
        float(a[0] + b[1] - c[1]),
    ]
    return CheckReport(
        check="weyl_2x2",
        passed=min(margins) >= -tol,
        tolerance=tol,
        residuals={"margins": margins, "trace_residual": trace_residual},
    )


# ---------------------------------------------------------------------------
# pre-image constructors
# ---------------------------------------------------------------------------

@dataclass
class PreimageCoefficients:
    """Squared moduli (and amplitudes) of the four-determinant pre-image."""

    a2: float
    b2: float
    s2: float
    t2: float

    @property
    def amplitudes(self) -> tuple[float, float, float, float]:
        return (
            math.sqrt(self.a2),
            math.sqrt(self.b2),
            math.sqrt(self.s2),
            math.sqrt(self.t2),
        )


def construct_bd_preimage(
    spec: Spectrum, tol: float = DEFAULT_CHECK_TOL
) -> tuple[PreimageCoefficients, FermionState]:
    """Build a (3, 6) state whose density matrix is diag(spec.lambdas).

    Amplitudes are placed on the determinants {1,2,3}, {1,4,5}, {2,4,6},
    {3,5,6}; squared moduli follow the closed-form inversion
        a2 = (l2 + l3 - l6)/2      b2 = (l1 - l2 + l4)/2
        s2 = (l2 - l3 + l6)/2      t2 = (l6 - l2 + l3)/2
    and t2 < 0 is exactly a violation of the ordering inequality. All phases
    are real non-negative; the {3,5,6} amplitude carries the permutation sign
    from reordering the pair-grouped determinant into increasing order.
    """
    report = check_bd(spec, tol)
    if not report.passed:
        raise RepresentabilityError(
            f"spectrum is not pure-state representable: {report.to_dict()}"
        )
    lam = spec.lambdas
    raw = {
        "a2": 0.5 * (lam[1] + lam[2] - lam[5]),
        "b2": 0.5 * (lam[0] - lam[1] + lam[3]),
        "s2": 0.5 * (lam[1] - lam[2] + lam[5]),
        "t2": 0.5 * (lam[5] - lam[1] + lam[2]),
    }
    for key, val in raw.items():
        if val < -tol:
            raise RepresentabilityError(f"coefficient {key} = {val:.3e} is negative")
        raw[key] = max(0.0, float(val))
    coeffs = PreimageCoefficients(**raw)
    a, b, s, t = coeffs.amplitudes
    basis = det_basis(3, 6)
    amps = np.zeros(basis.dim, np.complex128)
    amps[basis.index_of((1, 2, 3))] = a
    amps[basis.index_of((1, 4, 5))] = b
    amps[basis.index_of((2, 4, 6))] = s
    amps[basis.index_of((3, 5, 6))] = -t
    return coeffs, FermionState(3, 6, amps)


def construct_two_preimage(
    spec: Spectrum, phases, tol: float = DEFAULT_CHECK_TOL
) -> FermionState:
    """Build a 2-particle state with the given doubly degenerate spectrum.

    Pair k (occupations lambda_{2k-1} = lambda_{2k}) contributes the
    determinant {2k-1, 2k} with amplitude exp(i*theta_k) sqrt(lambda_{2k});
    one phase per nonzero pair.
    """
    report = check_two_rep(spec, tol)
    if not report.passed:
        raise RepresentabilityError(
            f"spectrum is not two-particle representable: {report.to_dict()}"
        )
    lam = spec.lambdas
    if abs(lam.sum() - 2.0) > max(tol, 1e-8):
        raise RepresentabilityError(
            f"two-particle spectrum must sum to 2, got {lam.sum()!r}"
        )
    npairs = len(report.residuals["pair_residuals"])
    phases = np.asarray(phases, dtype=np.float64).reshape(-1)
    if phases.size != npairs:
        raise ValueError(f"expected {npairs} phases (one per nonzero pair), got {phases.size}")
    r = int(lam.size)
    basis = det_basis(2, r)
    amps = np.zeros(basis.dim, np.complex128)
    for k in range(npairs):
        amps[basis.index_of((2 * k + 1, 2 * k + 2))] = np.exp(1j * phases[k]) * math.sqrt(
            lam[2 * k + 1]
        )
    return FermionState(2, r, amps)


# ---------------------------------------------------------------------------
# canonical eight-determinant form and Weyl blocks
# ---------------------------------------------------------------------------

def _pair_det(a: int, b: int, c: int) -> tuple[tuple[int, int, int], float]:
    # pair-grouped determinant [one of {1,6}, one of {2,5}, one of {3,4}]
    # canonicalized to increasing order with the permutation parity
    seq = (1 if a == 0 else 6, 2 if b == 0 else 5, 3 if c == 0 else 4)
    best = tuple(sorted(seq))
    for perm in permutations(range(3)):
        if tuple(seq[i] for i in perm) == best:
            inversions = sum(
                1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j]
            )
            return best, -1.0 if inversions % 2 else 1.0
    raise AssertionError("unreachable")


#: (det, parity) for every key (a, b, c); x_abc = parity * amplitude(det)
PAIR_DETS = {
    (a, b, c): _pair_det(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)
}


@dataclass
class NaturalForm:
    """Eight pair-grouped coefficients of a (3,6) state in its natural basis."""

    coefficients: np.ndarray   # (2, 2, 2) complex, keyed [a, b, c]
    leakage: float             # norm of the 12 amplitudes outside the pattern
    occupations: np.ndarray    # (6,) non-increasing
    orbitals: np.ndarray       # (6, 6) natural orbitals as columns


def natural_form(
    state: FermionState,
    cluster_tol: float = CLUSTER_TOL,
    tols: Tolerances = DEFAULT_TOLS,
) -> NaturalForm:
    """Rotate a (3, 6) state into its natural-orbital basis.

    In that basis the state is supported (up to ``leakage``, generically
    ~1e-15) on the eight determinants picking one orbital from each of the
    pairs {1,6}, {2,5}, {3,4}. Degenerate occupations make the basis
    ambiguous and raise DegeneracyError.
    """
    if (state.n, state.r) != (3, 6):
        raise ValueError(f"natural form is defined for (3, 6) states, got ({state.n}, {state.r})")
    dec = eigh(one_rdm(state), tols)
    vals = dec.values
    for i in range(5):
        gap = vals[i] - vals[i + 1]
        if gap < cluster_tol * max(1.0, abs(vals[i])):
            raise DegeneracyError(
                f"occupations {vals[i]!r} and {vals[i + 1]!r} are degenerate within "
                f"{cluster_tol}; natural basis is not unique"
            )
    rotated = rotate(state, dec.vectors.conj().T)
    basis = rotated.basis
    coeffs = np.zeros((2, 2, 2), np.complex128)
    pattern_idx = []
    for (a, b, c), (det, parity) in PAIR_DETS.items():
        i = basis.index_of(det)
        pattern_idx.append(i)
        coeffs[a, b, c] = parity * rotated.amps[i]
    mask = np.ones(basis.dim, bool)
    mask[pattern_idx] = False
    leakage = float(np.linalg.norm(rotated.amps[mask]))
    return NaturalForm(
        coefficients=coeffs,
        leakage=leakage,
        occupations=vals.copy(),
        orbitals=dec.vectors.copy(),
    )


def coefficients_to_state(coeffs: np.ndarray) -> FermionState:
    """Embed eight pair-grouped coefficients back into a (3, 6) state."""
    coeffs = np.asarray(coeffs, dtype=np.complex128).reshape(2, 2, 2)
    basis = det_basis(3, 6)
    amps = np.zeros(basis.dim, np.complex128)
    for (a, b, c), (det, parity) in PAIR_DETS.items():
        amps[basis.index_of(det)] = parity * coeffs[a, b, c]
    return FermionState(3, 6, amps)


def _herm2_top(m: np.ndarray) -> float:
    # larger eigenvalue of a 2x2 Hermitian matrix, closed form
    half_tr = 0.5 * (m[0, 0].real + m[1, 1].real)
    half_gap = 0.5 * (m[0, 0].real - m[1, 1].real)
    return float(half_tr + math.hypot(half_gap, abs(m[0, 1])))


@dataclass
class WeylBlocks:
    """2x2 occupation blocks of an eight-coefficient state."""

    s_matrix: np.ndarray          # (2, 2) complex
    t_matrix: np.ndarray          # (2, 2) complex
    w1: np.ndarray                # (2, 2) Hermitian
    w2: np.ndarray                # (2, 2) Hermitian
    w3: np.ndarray                # (2, 2) Hermitian
    sigma: float                  # larger eigenvalue of S S^+
    tau: float                    # larger eigenvalue of T T^+
    lambdas: np.ndarray           # (6,) sorted occupation spectrum of the state
    diagonal_residuals: np.ndarray  # (3,) |diag(Wk) - (lambda_k, lambda_{7-k})| max


def weyl_blocks(coeffs, tols: Tolerances = DEFAULT_TOLS) -> WeylBlocks:
    """Split the eight coefficients x_abc into S = x_0bc, T = x_1bc blocks.

    W1 pairs the {1,6} occupations ([[Tr SS+, Tr ST+], [Tr TS+, Tr TT+]]),
    W2 = SS+ + TT+ pairs {2,5}, W3 = S+S + T+T pairs {3,4}. The consistency
    residuals compare each W diagonal against the sorted occupation pairs of
    the state rebuilt from the coefficients; they are only small when the
    input is already in natural form (diagonal density matrix).
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128).reshape(2, 2, 2)
    total = float(np.sum(np.abs(coeffs) ** 2))
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"coefficients must have unit norm, got {total!r}")
    s = coeffs[0].copy()
    t = coeffs[1].copy()
    ss = s @ s.conj().T
    tt = t @ t.conj().T
    w1 = np.array(
        [
            [np.trace(ss), np.trace(s @ t.conj().T)],
            [np.trace(t @ s.conj().T), np.trace(tt)],
        ],
        np.complex128,
    )
    w2 = ss + tt
    w3 = s.conj().T @ s + t.conj().T @ t
    sigma = _herm2_top(ss)
    tau = _herm2_top(tt)
    lam = spectrum_of(coefficients_to_state(coeffs), tols).lambdas
    resid = np.array(
        [
            max(abs(w1[0, 0].real - lam[0]), abs(w1[1, 1].real - lam[5])),
            max(abs(w2[0, 0].real - lam[1]), abs(w2[1, 1].real - lam[4])),
            max(abs(w3[0, 0].real - lam[2]), abs(w3[1, 1].real - lam[3])),
        ],
        np.float64,
    )
    return WeylBlocks(
        s_matrix=s,
        t_matrix=t,
        w1=w1,
        w2=w2,
        w3=w3,
        sigma=sigma,
        tau=tau,
        lambdas=lam,
        diagonal_residuals=resid,
    )


# ---------------------------------------------------------------------------
# top-orbital split
# ---------------------------------------------------------------------------

@dataclass
class SplitDecomposition:
    """State split along its highest-occupation natural orbital.

    state = sqrt(top_weight) * (top_orbital ^ companion)
          + sqrt(1 - top_weight) * remainder
    with the remainder carrying no top-orbital occupation. ``remainder`` is
    None when the top occupation is 1 within tolerance.
    """

    top_weight: float                 # highest occupation number
    top_orbital: np.ndarray           # (r,) natural orbital with that occupation
    companion: FermionState           # (n-1)-particle factor, normalized
    remainder: FermionState | None    # n-particle rest, normalized, or None
    residuals: tuple[float, float]    # strong-orthogonality residual norms
    occupations: np.ndarray           # (len r,) sorted spectrum
    natural_basis: np.ndarray         # (r, r) eigenvector columns


def coleman_split(
    state: FermionState,
    tols: Tolerances = DEFAULT_TOLS,
    cluster_tol: float = CLUSTER_TOL,
) -> SplitDecomposition:
    """Split a state along its top natural orbital.

    The residuals report strong orthogonality: norm of the top orbital
    contracted against the remainder, and norm of the companion contracted
    against the remainder's first n-1 slots. Both are reported, not asserted.
    A top occupation equal to 1 within tolerance yields remainder None; a
    merely degenerate top occupation (ambiguous orbital) raises.
    """
    if state.n < 2:
        raise ValueError("splitting requires at least 2 particles")
    dec = eigh(one_rdm(state), tols)
    vals = dec.values
    v = dec.vectors
    lam1 = float(vals[0])
    rotated = rotate(state, v.conj().T)
    phi1 = v[:, 0].copy()
    if 1.0 - lam1 <= tols.assertion:
        companion_nat = partial_inner(1, rotated)
        companion_nat = FermionState(
            state.n - 1,
            state.r,
            companion_nat.amps * (math.sqrt(state.n) / math.sqrt(lam1)),
        )
        companion = rotate(companion_nat, v)
        return SplitDecomposition(
            top_weight=lam1,
            top_orbital=phi1,
            companion=companion,
            remainder=None,
            residuals=(0.0, 0.0),
            occupations=vals.copy(),
            natural_basis=v.copy(),
        )
    if vals[0] - vals[1] < cluster_tol * max(1.0, abs(vals[0])):
        raise DegeneracyError(
            f"top occupations {vals[0]!r} and {vals[1]!r} are degenerate within "
            f"{cluster_tol}; the split orbital is not unique"
        )
    companion_nat = partial_inner(1, rotated)
    companion_nat = FermionState(
        state.n - 1,
        state.r,
        companion_nat.amps * (math.sqrt(state.n) / math.sqrt(lam1)),
    )
    basis = rotated.basis
    no_top = basis.dets[:, 0] != 0  # lexicographic rows: orbital 1 is first if present
    rem_amps = np.where(no_top, rotated.amps, 0.0)
    remainder_nat = FermionState(state.n, state.r, rem_amps / math.sqrt(1.0 - lam1))
    companion = rotate(companion_nat, v)
    remainder = rotate(remainder_nat, v)
    r1 = contract_orbital(phi1, remainder).norm()
    r2 = float(np.linalg.norm(dual_contract(companion, remainder)))
    return SplitDecomposition(
        top_weight=lam1,
        top_orbital=phi1,
        companion=companion,
        remainder=remainder,
        residuals=(r1, r2),
        occupations=vals.copy(),
        natural_basis=v.copy(),
    )


def reconstruct_split(split: SplitDecomposition) -> FermionState:
    """Reassemble sqrt(w) (phi ^ companion) + sqrt(1-w) remainder."""
    top = attach_orbital(split.top_orbital, split.companion)
    amps = math.sqrt(split.top_weight) * top.amps
    if split.remainder is not None:
        amps = amps + math.sqrt(1.0 - split.top_weight) * split.remainder.amps
    return FermionState(top.n, top.r, amps)
