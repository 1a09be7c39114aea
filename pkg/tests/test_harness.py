"""Campaign orchestration: determinism, matched seeding, and reporting."""

import json
from dataclasses import replace

import numpy as np
import pytest

from leadercast import harness
from leadercast.core import default_config
from leadercast.harness import SchemeId


def small_config(seed=0):
    return replace(
        default_config(seed=seed),
        num_groups=3,
        group_sizes=(2, 2, 2),
        bits_per_user=(6.0,) * 6,
        penalty_weights=(4.0, 4.0, 4.0),
    )


ALL_SCHEMES = list(SchemeId)


def test_scheme_parse_aliases():
    assert SchemeId.parse("b1") is SchemeId.B1_NO_LEADER_SELECTION
    assert SchemeId.parse("B4") is SchemeId.B4_BROADCAST
    assert SchemeId.parse("proposed") is SchemeId.PROPOSED
    with pytest.raises(ValueError):
        SchemeId.parse("b9")


def test_wilson_interval():
    lo, hi = harness.wilson_interval(0, 0)
    assert (lo, hi) == (0.0, 1.0)
    lo, hi = harness.wilson_interval(300, 300)
    assert lo > 0.98 and hi == pytest.approx(1.0)
    lo, hi = harness.wilson_interval(150, 300)
    assert lo < 0.5 < hi
    assert hi - lo < 0.12


def test_trial_is_deterministic():
    cfg = small_config(seed=7)
    a = harness.run_trial(cfg, SchemeId.PROPOSED, 3)
    b = harness.run_trial(cfg, SchemeId.PROPOSED, 3)
    assert a == b
    c = harness.run_trial(cfg, SchemeId.PROPOSED, 4)
    assert c.realization_digest != a.realization_digest


def test_schemes_share_matched_realizations():
    cfg = small_config(seed=1)
    outs = harness._run_trial_schemes(cfg, ALL_SCHEMES, 0)
    digests = {o.realization_digest for o in outs}
    assert len(digests) == 1
    # and a separately run single scheme sees the same realization
    solo = harness.run_trial(cfg, SchemeId.B5_TDMA, 0)
    assert solo.realization_digest in digests
    assert solo == [o for o in outs if o.scheme is SchemeId.B5_TDMA][0]


def test_campaign_report_shape():
    cfg = small_config(seed=2)
    schemes = [SchemeId.PROPOSED, SchemeId.B5_TDMA]
    rep = harness.run_campaign(cfg, schemes, n_trials=4)
    assert rep.n_trials == 4
    assert set(rep.stats) == set(schemes)
    assert len(rep.trials) == 8
    st = rep.stats[SchemeId.PROPOSED]
    assert st.trials == 4
    assert 0.0 <= st.ci_low <= st.probability <= st.ci_high <= 1.0
    assert 0.0 <= st.mean_success <= cfg.num_users


def test_campaign_rejects_zero_trials():
    with pytest.raises(ValueError):
        harness.run_campaign(small_config(), [SchemeId.B5_TDMA], 0)


def test_summary_independent_of_worker_count():
    cfg = small_config(seed=3)
    schemes = [SchemeId.PROPOSED, SchemeId.B4_BROADCAST, SchemeId.B5_TDMA]
    rep1 = harness.run_campaign(cfg, schemes, n_trials=6, workers=1)
    rep2 = harness.run_campaign(cfg, schemes, n_trials=6, workers=3)
    assert harness.summary_dict(rep1) == harness.summary_dict(rep2)
    assert rep1.trials == rep2.trials


def test_trials_csv_byte_identical(tmp_path):
    cfg = small_config(seed=4)
    schemes = [SchemeId.PROPOSED, SchemeId.B5_TDMA]
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    harness.write_trials_csv(
        p1, harness.run_campaign(cfg, schemes, 5, workers=1), cfg.num_groups)
    harness.write_trials_csv(
        p2, harness.run_campaign(cfg, schemes, 5, workers=1), cfg.num_groups)
    assert p1.read_bytes() == p2.read_bytes()


def test_summary_json_roundtrip(tmp_path):
    cfg = small_config(seed=5)
    rep = harness.run_campaign(cfg, [SchemeId.B5_TDMA], 3)
    path = tmp_path / "summary.json"
    harness.write_summary_json(path, rep)
    data = json.loads(path.read_text())
    assert data["trials"] == 3
    assert "b5_tdma" in data["schemes"]
    assert data["schemes"]["b5_tdma"]["trials"] == 3


def test_sweep_reuses_realizations(tmp_path):
    cfg = small_config(seed=6)
    res = harness.sweep_message_size(cfg, [SchemeId.B5_TDMA], [4.0, 8.0], 3)
    assert [d for d, _ in res] == [4.0, 8.0]
    d4 = {o.trial_index: o.realization_digest for _, r in res[:1] for o in r.trials}
    d8 = {o.trial_index: o.realization_digest for _, r in res[1:] for o in r.trials}
    assert d4 == d8  # matched realizations across message sizes
    harness.write_sweep_csv(tmp_path / "sweep.csv", res)
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "D,scheme,probability,ci_low,ci_high"
    assert len(lines) == 3
    with pytest.raises(ValueError):
        harness.sweep_message_size(cfg, [SchemeId.B5_TDMA], [], 3)


def test_seed_changes_results():
    cfg_a = small_config(seed=10)
    cfg_b = small_config(seed=11)
    a = harness.run_trial(cfg_a, SchemeId.B5_TDMA, 0)
    b = harness.run_trial(cfg_b, SchemeId.B5_TDMA, 0)
    assert a.realization_digest != b.realization_digest
