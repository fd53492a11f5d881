"""Pure-state representability of fermionic one-particle density matrices.

The library builds N-particle states over lexicographic determinant bases,
computes one-particle density matrices with self-contained numerics, checks
occupation spectra against the known pure-state conditions (Pauli,
Borland-Dennis, pairing at small rank), constructs explicit pre-image states,
and runs seeded Monte-Carlo campaigns against the proven theorems and the
open rank-(n+3) question.
"""

__version__ = "0.1.0"

from .backend import active_backend, using_numba
from .campaigns import (
    CampaignConfig,
    CampaignReport,
    ConstrainedWeylRecord,
    StrongOrthProbe,
    campaign_bd_necessity,
    campaign_conjecture,
    campaign_hole_duality,
    probe_strong_orthogonality,
    random_state,
    replay_sample,
    run_campaign,
    select_campaign,
    stream_seed,
    verify_constrained_weyl,
)
from .conditions import (
    CheckReport,
    NaturalForm,
    PreimageCoefficients,
    SplitDecomposition,
    Spectrum,
    WeylBlocks,
    check_bd,
    check_pauli,
    check_rank_n_plus_2,
    check_two_rep,
    check_weyl_2x2,
    coefficients_to_state,
    coleman_split,
    construct_bd_preimage,
    construct_two_preimage,
    natural_form,
    reconstruct_split,
    sort_spectrum,
    spectrum_of,
    weyl_blocks,
)
from .errors import (
    AnomalyError,
    ConvergenceError,
    DegeneracyError,
    DimensionCapError,
    FermirepError,
    NormalizationError,
    RepresentabilityError,
)
from .linalg import (
    DEFAULT_TOLS,
    EigenDecomposition,
    SVDResult,
    Tolerances,
    eigh,
    svd_reconstruct,
    svd_small,
)
from .states import (
    DetBasis,
    FermionState,
    attach_orbital,
    basis_index,
    contract_orbital,
    det_basis,
    dual_contract,
    inner,
    load_state,
    one_rdm,
    partial_inner,
    particle_hole_rdm,
    rotate,
    save_state,
    slater,
    state_from_dict,
    state_to_dict,
)
