"""Seeded Monte-Carlo campaigns: determinism, replay, probes, dump files."""

import json

import numpy as np
import pytest

from fermirep import (
    AnomalyError,
    CampaignConfig,
    DimensionCapError,
    RepresentabilityError,
    SplitDecomposition,
    campaign_bd_necessity,
    campaign_conjecture,
    campaign_hole_duality,
    coleman_split,
    load_state,
    one_rdm,
    probe_strong_orthogonality,
    random_state,
    replay_sample,
    run_campaign,
    select_campaign,
    slater,
    stream_seed,
    verify_constrained_weyl,
)
from fermirep.campaigns import PAYLOAD_CAP, _bd_statistic

from helpers import rand_state


# ---------------------------------------------------------------------------
# sampling plumbing
# ---------------------------------------------------------------------------

def test_stream_seed_is_xor_masked():
    assert stream_seed(5, 3) == 6
    assert stream_seed(2**64 - 1, 1) == 2**64 - 2
    assert stream_seed(-1 & (2**64 - 1), 0) == 2**64 - 1


def test_random_state_determinism_and_norm():
    a = random_state(3, 6, 12345)
    b = random_state(3, 6, 12345)
    assert np.array_equal(a.amps, b.amps)
    assert a.norm() == pytest.approx(1.0, abs=1e-14)
    c = random_state(3, 6, 12346)
    assert not np.array_equal(a.amps, c.amps)


def test_random_state_spectra_patterns():
    # 2-particle spectra pair up; (3,5) spectra have a forced unit occupation
    vals = np.linalg.eigvalsh(one_rdm(random_state(2, 6, 7)))[::-1]
    assert abs(vals[0] - vals[1]) < 1e-10
    assert abs(vals[2] - vals[3]) < 1e-10
    vals = np.linalg.eigvalsh(one_rdm(random_state(3, 5, 7)))[::-1]
    assert abs(vals[0] - 1.0) < 1e-10


def test_config_validation():
    with pytest.raises(ValueError):
        CampaignConfig(n=3, r=6, samples=0, seed=1)
    with pytest.raises(ValueError):
        CampaignConfig(n=3, r=6, samples=10, seed=1, tolerance=-1e-9)
    with pytest.raises(ValueError):
        CampaignConfig(n=4, r=3, samples=10, seed=1)
    with pytest.raises(DimensionCapError):
        CampaignConfig(n=10, r=30, samples=1, seed=1)


# ---------------------------------------------------------------------------
# bd_necessity
# ---------------------------------------------------------------------------

def test_bd_campaign_finds_no_violations():
    config = CampaignConfig(n=3, r=6, samples=300, seed=1)
    report = campaign_bd_necessity(config)
    assert report.campaign == "bd_necessity"
    assert report.samples_run == 300
    assert report.violations == 0
    assert report.payloads == []
    assert report.worst_residual < 1e-8
    assert 0.0 <= report.statistic_min <= report.statistic_mean <= report.statistic_max


def test_bd_campaign_zero_tolerance_flags_float_noise():
    # residuals are tiny but nonzero, so a degenerate tolerance flags ~everything
    config = CampaignConfig(n=3, r=6, samples=50, seed=3, tolerance=0.0)
    report = campaign_bd_necessity(config)
    assert report.violations >= 48
    assert report.worst_residual < 1e-12


def test_bd_campaign_payload_cap(tmp_path):
    config = CampaignConfig(n=3, r=6, samples=PAYLOAD_CAP + 20, seed=3, tolerance=0.0)
    report = campaign_bd_necessity(config)
    assert len(report.payloads) == PAYLOAD_CAP
    assert report.extras["payloads_truncated"] is True


def test_bd_campaign_shape_gate():
    with pytest.raises(ValueError):
        campaign_bd_necessity(CampaignConfig(n=3, r=7, samples=1, seed=1))


def test_bd_campaign_dump_files_reproduce_residual(tmp_path):
    config = CampaignConfig(n=3, r=6, samples=4, seed=9, tolerance=0.0)
    report = campaign_bd_necessity(config, dump_dir=tmp_path)
    files = sorted(tmp_path.glob("bd_necessity_violation_*.json"))
    assert len(files) == report.violations
    payload = report.payloads[0]
    state = load_state(tmp_path / f"bd_necessity_violation_{payload['index']:06d}.json")
    _, residual = _bd_statistic(state)
    assert residual == payload["residual"]


# ---------------------------------------------------------------------------
# hole_duality
# ---------------------------------------------------------------------------

def test_hole_campaign_rank_n_plus_2():
    report = campaign_hole_duality(CampaignConfig(n=3, r=5, samples=200, seed=2))
    assert report.extras["mode"] == "rank_n_plus_2"
    assert report.extras["applicable"] is True
    assert report.violations == 0
    assert report.worst_residual < 1e-8


def test_hole_campaign_two_particle():
    report = campaign_hole_duality(CampaignConfig(n=2, r=6, samples=200, seed=2))
    assert report.extras["mode"] == "two_particle"
    assert report.violations == 0


def test_hole_campaign_negative_control():
    # (3,6) has no forced pattern: the campaign still runs, marked inapplicable,
    # and every generic sample trips the detector
    report = campaign_hole_duality(CampaignConfig(n=3, r=6, samples=200, seed=2))
    assert report.extras["mode"] == "none"
    assert report.extras["applicable"] is False
    assert report.violations == 200
    assert report.statistic_min > 1e-3


# ---------------------------------------------------------------------------
# conjecture
# ---------------------------------------------------------------------------

def test_conjecture_campaign_counts_bound_violations():
    # every generic (5,8) sample exceeds the particle-side bound
    # lambda1 + lambda8 <= 1; the bound provably holds only for the dual hole
    # spectrum (an exact counterexample: any rank-6 state wedged with the two
    # remaining orbitals has lambda1 + lambda8 = 1 + lambda3_of_the_core > 1)
    config = CampaignConfig(n=5, r=8, samples=60, seed=11)
    report = campaign_conjecture(config)
    assert report.campaign == "conjecture"
    assert report.violations == 60
    assert report.statistic_min > 1.0
    # the dual hole-side statistic respects the bound in every sample
    assert report.extras["hole_side_statistic_max"] <= 1.0 + config.tolerance
    assert report.extras["max_deviation_from_one"] == pytest.approx(
        report.statistic_max - 1.0
    )


def test_conjecture_campaign_shape_gate():
    with pytest.raises(ValueError):
        campaign_conjecture(CampaignConfig(n=4, r=7, samples=1, seed=1))
    with pytest.raises(ValueError):
        campaign_conjecture(CampaignConfig(n=3, r=7, samples=1, seed=1))


# ---------------------------------------------------------------------------
# selection, determinism, replay
# ---------------------------------------------------------------------------

def test_select_campaign_precedence():
    assert select_campaign(3, 6) == "bd_necessity"
    assert select_campaign(2, 6) == "hole_duality"
    assert select_campaign(3, 5) == "hole_duality"
    assert select_campaign(5, 8) == "conjecture"
    assert select_campaign(3, 6) != "conjecture"  # (3,6) wins the specific match
    with pytest.raises(ValueError):
        select_campaign(4, 9)


def test_run_campaign_rejects_unknown_name():
    with pytest.raises(ValueError):
        run_campaign("nope", CampaignConfig(n=3, r=6, samples=1, seed=1))


@pytest.mark.parametrize(
    "name,n,r",
    [("bd_necessity", 3, 6), ("hole_duality", 3, 5), ("conjecture", 5, 8)],
)
def test_campaign_reports_bit_identical(name, n, r):
    config = CampaignConfig(n=n, r=r, samples=40, seed=20260815)
    first = run_campaign(name, config).to_json()
    second = run_campaign(name, config).to_json()
    assert first == second
    assert json.loads(first)["campaign"] == name


def test_replay_matches_payload_digit_for_digit():
    config = CampaignConfig(n=3, r=6, samples=30, seed=4, tolerance=0.0)
    report = campaign_bd_necessity(config)
    payload = report.payloads[7]
    again = replay_sample(config, payload["index"])
    assert again["campaign"] == "bd_necessity"
    assert again["statistic"] == payload["statistic"]
    assert again["residual"] == payload["residual"]
    assert again["stream_seed"] == payload["stream_seed"]


def test_replay_respects_explicit_campaign_and_bounds():
    config = CampaignConfig(n=3, r=6, samples=5, seed=4)
    out = replay_sample(config, 0, campaign="hole_duality")
    assert out["campaign"] == "hole_duality"
    with pytest.raises(ValueError):
        replay_sample(config, 5)
    with pytest.raises(ValueError):
        replay_sample(config, 0, campaign="nope")


# ---------------------------------------------------------------------------
# strong-orthogonality probe
# ---------------------------------------------------------------------------

def test_probe_3_6_confirms_forced_structure():
    probe = probe_strong_orthogonality(random_state(3, 6, 5))
    assert probe.applicable
    assert probe.status == "ok"
    assert probe.remainder_top == pytest.approx(1.0, abs=1e-10)
    assert probe.contraction_residual < 1e-8
    assert probe.eigenvector_residual < 1e-8
    assert probe.sum_rule_residual < 1e-8
    # g1 is the least-occupied natural orbital of the full state
    gamma = one_rdm(random_state(3, 6, 5))
    occ = float(np.real(np.vdot(probe.g1, gamma @ probe.g1)))
    assert occ == pytest.approx(1.0 - probe.lambda1, abs=1e-10)


def test_probe_5_8_reports_without_asserting():
    probe = probe_strong_orthogonality(random_state(5, 8, 5))
    assert probe.applicable
    assert probe.remainder_top == pytest.approx(1.0, abs=1e-8)
    # strong orthogonality genuinely fails at n = 5: the residual is O(1)
    assert probe.contraction_residual > 1e-3
    assert probe.eigenvector_residual > 1e-3


def test_probe_skips_when_top_occupation_is_one():
    probe = probe_strong_orthogonality(slater((1, 2, 3), 6))
    assert not probe.applicable
    assert probe.status == "skipped_top_occupation_one"
    assert probe.g1 is None


def test_probe_shape_gate():
    with pytest.raises(ValueError):
        probe_strong_orthogonality(random_state(3, 5, 1))
    with pytest.raises(ValueError):
        probe_strong_orthogonality(random_state(4, 7, 1))


# ---------------------------------------------------------------------------
# constrained two-block decomposition
# ---------------------------------------------------------------------------

def test_constrained_weyl_exact_for_3_6():
    psi = random_state(3, 6, 8)
    split = coleman_split(psi)
    rec = verify_constrained_weyl(psi, split)
    assert rec.applicable
    assert rec.g1_occupation == pytest.approx(1.0, abs=1e-10)
    assert rec.equation_residual < 1e-10
    assert rec.cross_trace < 1e-10
    assert rec.cross_identity_residual < 1e-10


def test_constrained_weyl_not_applicable_for_slater():
    psi = slater((1, 2, 3, 4, 5), 8)
    rec = verify_constrained_weyl(psi, coleman_split(psi))
    assert rec.applicable is False


def test_constrained_weyl_rejects_sloppy_split():
    psi = random_state(3, 6, 8)
    split = coleman_split(psi)
    doctored = SplitDecomposition(
        top_weight=split.top_weight,
        top_orbital=split.top_orbital,
        companion=split.companion,
        remainder=split.remainder,
        residuals=(0.5, 0.5),
        occupations=split.occupations,
        natural_basis=split.natural_basis,
    )
    with pytest.raises(RepresentabilityError):
        verify_constrained_weyl(psi, doctored)


def test_constrained_weyl_needs_three_particles():
    psi = rand_state(2, 6, np.random.default_rng(0))
    with pytest.raises(ValueError):
        verify_constrained_weyl(psi, object())
