"""End-to-end acceptance suite.

Each test prints one `[PASS]`/`[FAIL]` line per criterion. The Monte
Carlo fixtures are module-scoped and shared, so the heavy campaigns run
once; expect the full module to take on the order of an hour on one
core at the default 300-trial desk scale.
"""

import itertools

import numpy as np
import pytest
import scipy.sparse as sp

from leadercast import beamform, conic, harness, protocol, radio
from leadercast.conic import ConicProgram, SocConstraint, solve
from leadercast.core import default_config, min_sinr_target
from leadercast.harness import SchemeId

N_TRIALS = 300
D_TABLE = 22
D_SWEEP = (12, 14, 16, 18, 20, 22, 24, 26, 28)
SWEEP_SCHEMES = (SchemeId.PROPOSED, SchemeId.B2_OCCUPY_COW,
                 SchemeId.B3_OCCUPY_COW_LEADERS, SchemeId.B4_BROADCAST,
                 SchemeId.B5_TDMA, SchemeId.B6_ONE_PHASE_MULTICAST)


def _report(num: int, desc: str, ok: bool, detail: str = "") -> None:
    tail = f" ({detail})" if detail else ""
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {desc}{tail}")
    assert ok, f"criterion {num}: {desc}{tail}"


# ----------------------------------------------------------- shared runs

@pytest.fixture(scope="module")
def table_campaign():
    cfg = default_config(seed=0).with_uniform_bits(D_TABLE)
    return harness.run_campaign(cfg, list(SchemeId), N_TRIALS, workers=1)


@pytest.fixture(scope="module")
def sweep_results():
    cfg = default_config(seed=0)
    res = harness.sweep_message_size(cfg, SWEEP_SCHEMES, D_SWEEP, N_TRIALS)
    return {d: rep for d, rep in res}


@pytest.fixture(scope="module")
def far_annulus_sweep():
    cfg = default_config(seed=0, donut_inner_m=350.0, donut_outer_m=450.0)
    res = harness.sweep_message_size(cfg, [SchemeId.PROPOSED],
                                     (12, 14, 16, 18, 20), N_TRIALS)
    return {d: rep for d, rep in res}


def _largest_outage_free(results: dict, scheme: SchemeId) -> int:
    best = 0
    for d in sorted(results):
        if results[d].stats[scheme].successes == results[d].n_trials:
            best = d
    return best


# -------------------------------------------------------------- criteria

def test_criterion_1_sinr_target_analytics():
    t_low = min_sinr_target(576, 75)
    t_high = min_sinr_target(1056, 75)
    ok = abs(t_low.db - 23.10) <= 0.01 and 42.0 <= t_high.db <= 42.8
    _report(1, "SINR-target analytics", ok,
            f"576/75 -> {t_low.db:.4f} dB, 1056/75 -> {t_high.db:.4f} dB")


def test_criterion_2_reliability_ordering(table_campaign):
    st = table_campaign.stats
    n = table_campaign.n_trials
    parts = {
        "proposed >= 297/300": st[SchemeId.PROPOSED].successes >= 297,
        "b1 = 0": st[SchemeId.B1_NO_LEADER_SELECTION].successes == 0,
        "b2 = 0": st[SchemeId.B2_OCCUPY_COW].successes == 0,
        "b3 = 0": st[SchemeId.B3_OCCUPY_COW_LEADERS].successes == 0,
        "b5 = 0": st[SchemeId.B5_TDMA].successes == 0,
        "b6 = 0": st[SchemeId.B6_ONE_PHASE_MULTICAST].successes == 0,
        "b4 in [4%, 20%]": 0.04 <= st[SchemeId.B4_BROADCAST].probability <= 0.20,
    }
    detail = ", ".join(f"{s.value}={st[s].successes}/{n}" for s in SchemeId)
    _report(2, "URLLC reliability ordering at D=22", all(parts.values()),
            detail + "; failed: " + (", ".join(k for k, v in parts.items() if not v) or "none"))


def test_criterion_3_mean_success_counts(table_campaign):
    st = table_campaign.stats
    m = {s: st[s].mean_success for s in SchemeId}
    parts = {
        "proposed 48.0 +/- 0.1": abs(m[SchemeId.PROPOSED] - 48.0) <= 0.1,
        "b1 32.2 +/- 3": abs(m[SchemeId.B1_NO_LEADER_SELECTION] - 32.2) <= 3.0,
        "b4 45.1 +/- 2": abs(m[SchemeId.B4_BROADCAST] - 45.1) <= 2.0,
        "b2 = 0": m[SchemeId.B2_OCCUPY_COW] == 0.0,
        "b3 = 0": m[SchemeId.B3_OCCUPY_COW_LEADERS] == 0.0,
        "b6 11.5 +/- 3": abs(m[SchemeId.B6_ONE_PHASE_MULTICAST] - 11.5) <= 3.0,
        "b5 <= 0.2": m[SchemeId.B5_TDMA] <= 0.2,
    }
    detail = ", ".join(f"{s.value}={m[s]:.2f}" for s in SchemeId)
    _report(3, "mean success counts at D=22", all(parts.values()),
            detail + "; failed: " + (", ".join(k for k, v in parts.items() if not v) or "none"))


def test_criterion_4_leader_fairness(table_campaign):
    cfg_groups = default_config().num_groups
    proposed = [o for o in table_campaign.trials if o.scheme is SchemeId.PROPOSED]
    all_groups_led = sum(1 for o in proposed if o.groups_with_leader == cfg_groups)
    frac = all_groups_led / len(proposed)
    b1_mean = table_campaign.stats[SchemeId.B1_NO_LEADER_SELECTION].mean_groups_with_leader
    ok = frac >= 0.99 and 3.0 <= b1_mean <= 5.5
    _report(4, "leader fairness", ok,
            f"proposed all-groups-led fraction {frac:.4f}, "
            f"unselected-leader mean groups {b1_mean:.2f}")


def test_criterion_5_message_size_trend(sweep_results):
    ordered, detail = True, []
    for d in D_SWEEP:
        st = sweep_results[d].stats
        p = {s: st[s].probability for s in SWEEP_SCHEMES}
        detail.append(f"D={d}: prop={p[SchemeId.PROPOSED]:.3f} b4={p[SchemeId.B4_BROADCAST]:.3f}")
        if p[SchemeId.PROPOSED] < p[SchemeId.B4_BROADCAST]:
            ordered = False
        for s in (SchemeId.B2_OCCUPY_COW, SchemeId.B3_OCCUPY_COW_LEADERS,
                  SchemeId.B5_TDMA, SchemeId.B6_ONE_PHASE_MULTICAST):
            if p[SchemeId.B4_BROADCAST] < p[s]:
                ordered = False
    outage_free_24 = all(
        sweep_results[d].stats[SchemeId.PROPOSED].successes == N_TRIALS
        for d in D_SWEEP if d <= 24)
    outage_at_28 = sweep_results[28].stats[SchemeId.PROPOSED].successes < N_TRIALS
    ok = ordered and outage_free_24 and outage_at_28
    _report(5, "reliability trend over message size", ok,
            "; ".join(detail) + f"; ordered={ordered}, outage-free<=24={outage_free_24}, "
            f"outage@28={outage_at_28}")


def test_criterion_6_topology_sensitivity(sweep_results, far_annulus_sweep):
    far_best = _largest_outage_free(far_annulus_sweep, SchemeId.PROPOSED)
    near_best = _largest_outage_free(sweep_results, SchemeId.PROPOSED)
    ok = far_best <= 18 and far_best < near_best
    _report(6, "far-annulus topology shrinks the outage-free range", ok,
            f"largest outage-free D: far annulus {far_best}, baseline {near_best}")


def test_criterion_7_sca_convergence_properties():
    cfg = default_config(seed=0)
    targets = protocol.phase1_group_targets(cfg)
    bad = []
    for trial in range(200):
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, trial, 0]))
        _, ch = radio.sample_realization(cfg, rng)
        beams, slacks, trace = beamform.run_sca(
            ch, targets, cfg,
            rng=np.random.default_rng(np.random.SeedSequence([cfg.seed, trial, 7])))
        obj = np.array(trace.objectives)
        if not np.all(np.diff(obj) <= 1e-6):
            bad.append((trial, "non-monotone trace"))
        if "incumbent_infeasible" in trace.statuses:
            bad.append((trial, "infeasible iterate"))
        hp = ch.h / np.sqrt(ch.interference_phase1)[:, None]
        tgt = np.array([t.linear_value for t in targets])
        if not beamform._incumbent_feasible(hp, beams.beams, slacks, tgt,
                                            ch.group_index, single=False):
            bad.append((trial, "final point infeasible"))
        if trace.last_solution is None or not trace.last_solution.kkt_residuals:
            bad.append((trial, "missing KKT certificate"))
        elif max(trace.last_solution.kkt_residuals.values()) > 1e-6:
            bad.append((trial, "KKT residual above 1e-6"))
    _report(7, "SCA descent, feasibility, and KKT certificates over 200 realizations",
            not bad, f"violations: {bad[:5] if bad else 'none'}")


def test_criterion_8_penalty_and_surrogate_bounds():
    group_sizes, weights = (2, 2), (4.0, 4.0)
    ok = True
    # exhaustive zero-iff check on a small grid
    for t in itertools.product((0.0, 0.5, 1.0, 3.0), repeat=4):
        t = np.array(t)
        killed = (t[:2] == 0).any() and (t[2:] == 0).any()
        if (beamform.penalty(t, group_sizes, weights) == 0.0) != killed:
            ok = False
    # majorization of the penalty by its linearization
    rng = np.random.default_rng(0)
    worst_eq, worst_dom = 0.0, -np.inf
    for _ in range(10):
        t_hat = rng.uniform(0.05, 5.0, 4)
        const, grad = beamform.linearize_penalty(t_hat, group_sizes, weights, floor=0.0)
        worst_eq = max(worst_eq, abs(const + grad @ t_hat
                                     - beamform.penalty(t_hat, group_sizes, weights)))
        t = rng.uniform(0.0, 10.0, (1000, 4))
        pen = np.array([beamform.penalty(row, group_sizes, weights) for row in t])
        worst_dom = max(worst_dom, np.max(pen - (const + t @ grad)))
    ok &= worst_eq <= 1e-12 and worst_dom <= 1e-9
    # tangent underestimates the squared magnitude
    worst_eq_q, worst_under = 0.0, -np.inf
    for _ in range(10):
        h = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        w_hat = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        const, ca, cb = beamform.linearize_quadratic(h, w_hat)
        a_hat, b_hat = (h @ w_hat).real, (h @ w_hat).imag
        worst_eq_q = max(worst_eq_q,
                         abs(const + ca * a_hat + cb * b_hat - (a_hat**2 + b_hat**2)))
        ab = rng.standard_normal((1000, 2)) * 10.0
        g = const + ab @ np.array([ca, cb])
        worst_under = max(worst_under, np.max(g - ab[:, 0] ** 2 - ab[:, 1] ** 2))
    ok &= worst_eq_q <= 1e-12 and worst_under <= 1e-9
    _report(8, "penalty and surrogate bound properties", bool(ok),
            f"eq err {max(worst_eq, worst_eq_q):.2e}, bound err "
            f"{max(worst_dom, worst_under):.2e}")


def _random_box_program(rng, n):
    """Random SOC program over [-1, 1]^n with a guaranteed-feasible center."""
    c = rng.standard_normal(n)
    socs = []
    for i in range(n):  # |x_i| <= 1 as a 1-D cone
        F = sp.csc_matrix((np.array([1.0]), (np.array([1]), np.array([i]))), shape=(2, n))
        socs.append(SocConstraint(F, np.array([1.0, 0.0]), f"box{i}"))
    center = rng.uniform(-0.5, 0.5, n)
    radius = rng.uniform(0.8, 2.0)
    F = sp.csc_matrix(np.vstack([np.zeros(n), np.eye(n)]))
    socs.append(SocConstraint(F, np.concatenate([[radius], -center]), "ball"))
    return ConicProgram(num_vars=n, c=c, A_eq=sp.csc_matrix((0, n)),
                        b_eq=np.zeros(0), nonneg_idx=np.array([], dtype=int),
                        socs=socs), center, radius


def test_criterion_9_solver_oracle_equivalence():
    rng = np.random.default_rng(2024)
    worst = 0.0
    ok = True
    for _ in range(100):
        n = int(rng.integers(2, 4))
        prog, center, radius = _random_box_program(rng, n)
        sol = solve(prog, tol=1e-9)
        if sol.status != "optimal":
            ok = False
            continue
        grid = np.linspace(-1.0, 1.0, 41)
        pts = np.array(list(itertools.product(grid, repeat=n)))
        feas = np.linalg.norm(pts - center, axis=1) <= radius
        oracle = float(np.min(pts[feas] @ prog.c))
        cell = 2.0 / 40.0 * np.sqrt(n) * float(np.linalg.norm(prog.c))
        if not (sol.objective <= oracle + 1e-6 and sol.objective >= oracle - cell - 1e-3):
            ok = False
        worst = max(worst, abs(sol.objective - oracle))
    # analytic minimum-norm beamforming: min ||w|| s.t. Re(h^H w) >= 1
    # has closed form w* = h / ||h||^2
    errs = []
    for _ in range(20):
        M = 6
        h = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        n = 2 * M + 1  # [Re w, Im w, r]
        tri = np.zeros((n, n))
        tri[0, -1] = 1.0
        tri[1:, :2 * M] = np.eye(2 * M)
        re_row = np.concatenate([h.real, h.imag, [0.0]])
        prog = ConicProgram(
            num_vars=n, c=np.eye(n)[-1],
            A_eq=sp.csc_matrix(re_row.reshape(1, -1)), b_eq=np.array([1.0]),
            nonneg_idx=np.array([], dtype=int),
            socs=[SocConstraint(sp.csc_matrix(tri), np.zeros(n), "norm")])
        sol = solve(prog, tol=1e-9)
        w = sol.x[:M] + 1j * sol.x[M:2 * M]
        w_ref = h / np.vdot(h, h).real
        errs.append(np.max(np.abs(w - w_ref)))
    ok &= max(errs) <= 1e-6
    _report(9, "conic solver matches grid and closed-form oracles", bool(ok),
            f"max grid gap {worst:.2e}, max beam err {max(errs):.2e}")


def test_criterion_10_determinism(tmp_path):
    cfg = default_config(seed=31).with_uniform_bits(D_TABLE)
    schemes = list(SchemeId)
    rep_a = harness.run_campaign(cfg, schemes, 5, workers=1)
    rep_b = harness.run_campaign(cfg, schemes, 5, workers=1)
    pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
    harness.write_trials_csv(pa, rep_a, cfg.num_groups)
    harness.write_trials_csv(pb, rep_b, cfg.num_groups)
    csv_ok = pa.read_bytes() == pb.read_bytes()
    rep_c = harness.run_campaign(cfg, schemes, 5, workers=3)
    json_ok = harness.summary_dict(rep_a) == harness.summary_dict(rep_c)
    _report(10, "byte-identical trials CSV and worker-count-independent summary",
            csv_ok and json_ok, f"csv={csv_ok}, summary={json_ok}")
