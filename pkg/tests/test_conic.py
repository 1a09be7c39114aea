"""Conic layer: solver correctness against independent oracles."""

import numpy as np
import pytest
import scipy.sparse as sp

from leadercast.conic import (
    ConicProgram,
    SocConstraint,
    check_kkt,
    dump_program,
    solve,
)


def _soc(F_dense: np.ndarray, g: np.ndarray, label: str = "") -> SocConstraint:
    return SocConstraint(sp.csc_matrix(np.asarray(F_dense, float)),
                         np.asarray(g, float), label)


def test_validate_catches_shape_errors():
    p = ConicProgram(num_vars=2, c=np.zeros(3))
    with pytest.raises(ValueError):
        p.validate()
    p = ConicProgram(num_vars=2, c=np.zeros(2),
                     socs=[_soc(np.zeros((2, 3)), np.zeros(2))])
    with pytest.raises(ValueError):
        p.validate()


def test_interval_maximum():
    # max x s.t. |x - 2| <= 1, x >= 0  ->  x = 3
    p = ConicProgram(
        num_vars=1,
        c=np.array([-1.0]),
        nonneg_idx=np.array([0]),
        socs=[_soc([[0.0], [1.0]], [1.0, -2.0], "ball")],
    )
    sol = solve(p)
    assert sol.status == "optimal"
    assert sol.x[0] == pytest.approx(3.0, abs=1e-6)


def test_min_norm_hyperplane_projection():
    # min ||w|| s.t. a.w = 1 has the closed form w* = a / ||a||^2
    rng = np.random.default_rng(3)
    for _ in range(20):
        d = int(rng.integers(2, 7))
        a = rng.standard_normal(d)
        n = d + 1  # [w, r]
        F = np.zeros((d + 1, n))
        F[0, d] = 1.0
        F[1:, :d] = np.eye(d)
        p = ConicProgram(
            num_vars=n,
            c=np.concatenate([np.zeros(d), [1.0]]),
            A_eq=sp.csc_matrix(np.concatenate([a, [0.0]]).reshape(1, -1)),
            b_eq=np.array([1.0]),
            socs=[_soc(F, np.zeros(d + 1), "norm")],
        )
        sol = solve(p)
        assert sol.status == "optimal"
        np.testing.assert_allclose(sol.x[:d], a / (a @ a), atol=1e-6)


def _random_program(rng) -> ConicProgram:
    """Small random SOCP with a bounded feasible region.

    Variables live in [-1, 1]^d (box via per-coordinate SOCs), plus a few
    random ball constraints guaranteed to contain a feasible point.
    """
    d = int(rng.integers(1, 4))
    c = rng.standard_normal(d)
    socs = []
    for i in range(d):
        F = np.zeros((2, d))
        F[1, i] = 1.0
        socs.append(_soc(F, [1.0, 0.0], f"box[{i}]"))
    center = rng.uniform(-0.5, 0.5, d)
    for _ in range(int(rng.integers(0, 3))):
        # ball around a point near `center` with radius that keeps center inside
        mid = center + rng.uniform(-0.2, 0.2, d)
        radius = float(np.linalg.norm(center - mid)) + rng.uniform(0.3, 1.0)
        F = np.zeros((d + 1, d))
        F[1:, :] = np.eye(d)
        socs.append(_soc(F, np.concatenate([[radius], -mid]), "ball"))
    return ConicProgram(num_vars=d, c=c, socs=socs)


def _feasible_mask(p: ConicProgram, pts: np.ndarray) -> np.ndarray:
    ok = np.ones(len(pts), dtype=bool)
    for s in p.socs:
        vals = pts @ s.F.toarray().T + s.g
        ok &= np.linalg.norm(vals[:, 1:], axis=1) <= vals[:, 0] + 1e-12
    return ok


def test_random_programs_against_grid_oracle():
    """100 random small programs vs a brute-force grid search."""
    rng = np.random.default_rng(2024)
    for _ in range(100):
        p = _random_program(rng)
        d = p.num_vars
        sol = solve(p)
        assert sol.status == "optimal"
        axes = [np.linspace(-1.0, 1.0, 41)] * d
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, d)
        feas = grid[_feasible_mask(p, grid)]
        assert len(feas), "oracle grid found no feasible point"
        oracle = float(np.min(feas @ p.c))
        # the grid value can exceed the true optimum by one cell's objective span
        cell = float(np.linalg.norm(p.c)) * (2.0 / 40) * np.sqrt(d)
        assert sol.objective <= oracle + 1e-6
        assert sol.objective >= oracle - cell - 1e-3


def test_kkt_residuals_reported_and_small():
    rng = np.random.default_rng(11)
    for _ in range(20):
        p = _random_program(rng)
        sol = solve(p, tol=1e-8)
        assert sol.status == "optimal"
        res = check_kkt(p, sol)
        assert res["primal"] <= 1e-6
        assert res["dual"] <= 1e-6
        assert res["gap"] <= 1e-6


def test_kkt_detects_perturbed_solution():
    rng = np.random.default_rng(5)
    p = _random_program(rng)
    sol = solve(p)
    sol.x = sol.x + 0.2
    res = check_kkt(p, sol)
    assert max(res.values()) > 1e-3


def test_infeasible_program_status():
    # x >= 0 and x <= -1 (via SOC |x + 1.5| <= 0.5 shifted to [-2, -1])
    p = ConicProgram(
        num_vars=1,
        c=np.array([1.0]),
        nonneg_idx=np.array([0]),
        socs=[_soc([[0.0], [1.0]], [0.5, 1.5], "neg")],
    )
    assert solve(p).status == "infeasible"


def test_unbounded_program_status():
    p = ConicProgram(num_vars=1, c=np.array([1.0]), nonneg_idx=np.array([], int))
    sol = solve(p)
    assert sol.status in ("unbounded", "max_iter")


def test_degenerate_soc_is_linear_inequality():
    # scalar-only SOC means s >= 0: x <= 4 via s = 4 - x
    p = ConicProgram(
        num_vars=1,
        c=np.array([-1.0]),
        socs=[_soc([[-1.0]], [4.0], "cap")],
    )
    sol = solve(p)
    assert sol.status == "optimal"
    assert sol.x[0] == pytest.approx(4.0, abs=1e-6)


def test_dump_program_roundtrips_labels():
    p = _random_program(np.random.default_rng(1))
    text = dump_program(p)
    assert text.startswith("conic-program v1")
    assert f"vars={p.num_vars}" in text
