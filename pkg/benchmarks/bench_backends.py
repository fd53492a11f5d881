"""Compare the numba-compiled kernels against the pure-numpy fallbacks.

Times the three hot kernels (density-matrix assembly, Jacobi sweeps, compound
unitary action) on growing problem sizes and prints per-call timings with the
speedup of the compiled path. The numba column is skipped when numba is not
installed.

Usage: python3 benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import time

import numpy as np

from fermirep import det_basis
from fermirep.backend import HAVE_NUMBA
from fermirep.kernels import numpy_impls

try:
    from fermirep.kernels import numba_impls
except ImportError:  # pragma: no cover
    numba_impls = None


def _rand_state_amps(dim, rng):
    z = rng.standard_normal((dim, 2))
    amps = z[:, 0] + 1j * z[:, 1]
    return amps / np.linalg.norm(amps)


def _rand_unitary(r, rng):
    z = rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
    q, rr = np.linalg.qr(z)
    return q * (np.diag(rr) / np.abs(np.diag(rr))).conj()


def _hermitian(k, rng):
    z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    return (z + z.conj().T) / 2.0


def cases():
    rng = np.random.default_rng(0)
    for n, r in [(3, 6), (4, 8), (5, 10), (6, 12)]:
        basis = det_basis(n, r)
        amps = _rand_state_amps(basis.dim, rng)
        args = (amps, basis.ext_orb, basis.ext_idx, basis.ext_sign, r)
        yield f"one_rdm ({n},{r}) dim={basis.dim}", "one_rdm", args, None
    for k in [6, 12, 24, 48]:
        h = _hermitian(k, rng)

        def fresh(h=h, k=k):
            return (h.copy(), np.eye(k, dtype=np.complex128), 1e-13, 60)

        yield f"eigh_sweeps k={k}", "eigh_sweeps", None, fresh
    for n, r in [(3, 6), (4, 8), (5, 10)]:
        basis = det_basis(n, r)
        u = _rand_unitary(r, rng)
        amps = _rand_state_amps(basis.dim, rng)
        yield f"compound ({n},{r}) dim={basis.dim}", "compound", (u, basis.dets, amps), None


def time_call(fn, args, fresh, repeat):
    best = np.inf
    for _ in range(repeat):
        call_args = fresh() if fresh is not None else args
        t0 = time.perf_counter()
        fn(*call_args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=7, help="timed repetitions, best-of")
    opts = parser.parse_args()

    groups = {"numpy": numpy_impls()}
    if HAVE_NUMBA:
        groups["numba"] = numba_impls()
        # first calls compile; run every kernel once on tiny inputs to warm up
        for label, kernel, args, fresh in cases():
            groups["numba"][kernel](*(fresh() if fresh else args))
    else:
        print("numba not installed; timing the numpy fallback only\n")

    header = f"{'case':<28} {'numpy':>12}"
    if HAVE_NUMBA:
        header += f" {'numba':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for label, kernel, args, fresh in cases():
        t_np = time_call(groups["numpy"][kernel], args, fresh, opts.repeat)
        line = f"{label:<28} {t_np * 1e6:>10.1f}us"
        if HAVE_NUMBA:
            t_nb = time_call(groups["numba"][kernel], args, fresh, opts.repeat)
            line += f" {t_nb * 1e6:>10.1f}us {t_np / t_nb:>8.1f}x"
        print(line)


if __name__ == "__main__":
    main()
