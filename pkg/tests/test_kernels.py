"""Backend dispatch and numba/numpy kernel agreement."""

import os
import subprocess
import sys

import numpy as np
import pytest

from fermirep import active_backend, det_basis, using_numba
from fermirep.backend import ENV_VAR, HAVE_NUMBA
from fermirep.kernels import impls, numpy_impls

from helpers import rand_state, rand_unitary

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


def test_active_backend_is_consistent():
    assert active_backend() in ("numba", "numpy")
    assert using_numba() == (active_backend() == "numba")


def test_impls_rejects_unknown_backend():
    with pytest.raises(ValueError):
        impls("cupy")


def _backend_in_subprocess(value):
    env = dict(os.environ)
    env[ENV_VAR] = value
    return subprocess.run(
        [sys.executable, "-c", "import fermirep; print(fermirep.active_backend())"],
        env=env,
        capture_output=True,
        text=True,
    )


def test_env_forces_numpy_backend():
    proc = _backend_in_subprocess("numpy")
    assert proc.returncode == 0
    assert proc.stdout.strip() == "numpy"


@needs_numba
def test_env_forces_numba_backend():
    proc = _backend_in_subprocess("numba")
    assert proc.returncode == 0
    assert proc.stdout.strip() == "numba"


def test_env_rejects_unknown_backend():
    proc = _backend_in_subprocess("tpu")
    assert proc.returncode != 0
    assert ENV_VAR in proc.stderr


# ---------------------------------------------------------------------------
# implementation agreement
# ---------------------------------------------------------------------------
# The loop sources run under plain python too, so the fallback can always be
# checked against them; with numba present the compiled set is checked as well.

def _impl_sets():
    from fermirep.kernels import _LOOP_SOURCES

    sets = [("loops", dict(_LOOP_SOURCES))]
    if HAVE_NUMBA:
        from fermirep.kernels import numba_impls

        sets.append(("numba", numba_impls()))
    return sets


@pytest.mark.parametrize("n,r", [(3, 6), (2, 5), (5, 8)])
def test_one_rdm_kernels_agree(n, r):
    basis = det_basis(n, r)
    state = rand_state(n, r, np.random.default_rng(n * 100 + r))
    args = (state.amps, basis.ext_orb, basis.ext_idx, basis.ext_sign, r)
    reference = numpy_impls()["one_rdm"](*args)
    for label, group in _impl_sets():
        out = group["one_rdm"](*args)
        assert np.abs(out - reference).max() < 1e-13, label


@pytest.mark.parametrize("k", [2, 6, 17])
def test_eigh_kernels_agree(k):
    rng = np.random.default_rng(k)
    z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    h = (z + z.conj().T) / 2.0

    def run(group):
        a = h.astype(np.complex128).copy()
        v = np.eye(k, dtype=np.complex128)
        sweeps = group["eigh_sweeps"](a, v, 1e-13, 60)
        return a, v, sweeps

    a_ref, v_ref, sweeps_ref = run(numpy_impls())
    assert sweeps_ref >= 0
    # the unitary diagonalizes h
    assert np.abs(v_ref @ np.diag(np.diag(a_ref)) @ v_ref.conj().T - h).max() < 1e-12
    for label, group in _impl_sets():
        a, v, sweeps = run(group)
        assert sweeps == sweeps_ref, label
        assert np.abs(np.sort(np.diag(a).real) - np.sort(np.diag(a_ref).real)).max() < 1e-12, label
        assert np.abs(v @ v.conj().T - np.eye(k)).max() < 1e-12, label


@pytest.mark.parametrize("n,r", [(1, 4), (2, 5), (3, 6)])
def test_compound_kernels_agree(n, r):
    rng = np.random.default_rng(10 * n + r)
    basis = det_basis(n, r)
    u = rand_unitary(r, rng)
    amps = rand_state(n, r, rng).amps
    reference = numpy_impls()["compound"](u, basis.dets, amps)
    # the compound action of a unitary preserves norms
    assert np.linalg.norm(reference) == pytest.approx(1.0, abs=1e-12)
    for label, group in _impl_sets():
        out = group["compound"](u, basis.dets, amps)
        assert np.abs(out - reference).max() < 1e-13, label


def test_compound_kernel_skips_zero_amplitudes():
    # the loop source short-circuits exact zeros; results must not differ
    basis = det_basis(2, 5)
    amps = np.zeros(basis.dim, np.complex128)
    amps[0] = 0.6
    amps[-1] = 0.8j
    u = rand_unitary(5, np.random.default_rng(3))
    reference = numpy_impls()["compound"](u, basis.dets, amps)
    for label, group in _impl_sets():
        out = group["compound"](u, basis.dets, amps)
        assert np.abs(out - reference).max() < 1e-13, label
