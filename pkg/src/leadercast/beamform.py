"""Leader-selection beamforming via successive convex approximation.

The non-convex design problem (minimize the l1 norm of per-user SINR
slacks plus a weighted geometric-mean penalty that vanishes when every
group has a zero-slack user) is solved by iterating convex second-order
cone subproblems: the concave penalty and the convex |h'w|^2 signal
terms are replaced by first-order expansions around the incumbent.

All subproblems normalize each user's constraint by its interference
power, so the channel entering the program is h' = h / sqrt(I) and the
slack t is dimensionless.

Variable layout for multi-beam programs (nbeams = N or 1):
    [Re w_0, Im w_0, ..., Re w_{nb-1}, Im w_{nb-1}, t (K), a (K), b (K)]
Broadcast programs use [Re w_0, Im w_0, ..., (K beams), t (K)].
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .conic import ConicProgram, ConicSolution, SocConstraint, solve
from .core import SystemConfig
from .radio import ChannelSet

__all__ = [
    "BeamformerSet",
    "ScaTrace",
    "penalty",
    "linearize_penalty",
    "linearize_quadratic",
    "build_subproblem",
    "run_sca",
    "run_sca_single_beam",
    "solve_broadcast",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BeamformerSet:
    """Transmit beams in linear amplitude units. variant names the scheme family."""

    variant: str  # per_group | single | per_user
    beams: np.ndarray  # (nbeams, M) complex

    @property
    def total_power(self) -> float:
        return float(np.sum(np.abs(self.beams) ** 2))


@dataclass
class ScaTrace:
    """Per-iteration diagnostics of one SCA run."""

    objectives: list = field(default_factory=list)
    surrogates: list = field(default_factory=list)
    statuses: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    failed: bool = False
    retries_used: int = 0
    last_program: ConicProgram | None = None
    last_solution: ConicSolution | None = None


def penalty(t: np.ndarray, group_sizes, weights) -> float:
    """Weighted sum of per-group geometric means of the slacks.

    Zero exactly when every group contains at least one zero slack.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("slacks must be nonnegative")
    total, at = 0.0, 0
    for kn, beta in zip(group_sizes, weights):
        tg = t[at:at + kn]
        total += beta * float(np.prod(tg)) ** (1.0 / kn)
        at += kn
    return total


def linearize_penalty(t_hat: np.ndarray, group_sizes, weights,
                      floor: float = 1e-8,
                      grad_cap: float = np.inf) -> tuple[float, np.ndarray]:
    """First-order expansion of the geometric-mean penalty at t_hat.

    Returns (const, grad) so that f(t) = const + grad . t satisfies
    f(t_hat) = penalty(t_hat) and f majorizes the penalty (concavity).
    Components of t_hat below `floor` are clamped, with a warning, since
    the gradient divides by them. `grad_cap` bounds the coefficients (a
    near-zero slack otherwise produces a 1/t blow-up that destroys the
    subproblem's conditioning); capping is equivalent to clamping that
    coordinate at a larger floor.
    """
    t_hat = np.asarray(t_hat, dtype=float)
    if np.any(t_hat < floor):
        log.warning("linearize_penalty: %d slack(s) clamped to floor %.1e",
                    int(np.sum(t_hat < floor)), floor)
        t_hat = np.maximum(t_hat, floor)
    grad = np.zeros_like(t_hat)
    const, at = 0.0, 0
    for kn, beta in zip(group_sizes, weights):
        tg = t_hat[at:at + kn]
        gm = float(np.prod(tg)) ** (1.0 / kn)
        grad[at:at + kn] = np.minimum(beta * gm / (kn * tg), grad_cap)
        const += beta * gm - float(grad[at:at + kn] @ tg)
        at += kn
    return const, grad


def linearize_quadratic(h: np.ndarray, w_hat: np.ndarray) -> tuple[float, float, float]:
    """Tangent plane of |h^T w|^2 = a^2 + b^2 at the point induced by w_hat.

    Returns (const, coeff_a, coeff_b) with
    g(a, b) = const + coeff_a * a + coeff_b * b; g is exact at the
    expansion point and underestimates a^2 + b^2 everywhere.
    """
    inner = complex(np.dot(h, w_hat))
    a_hat, b_hat = inner.real, inner.imag
    return -(a_hat ** 2 + b_hat ** 2), 2.0 * a_hat, 2.0 * b_hat


def _inner_coeffs(hp_row: np.ndarray):
    """Coefficients of Re/Im(h'^T w) over a [Re w, Im w] block."""
    re = np.concatenate([hp_row.real, -hp_row.imag])
    im = np.concatenate([hp_row.imag, hp_row.real])
    return re, im


class _Triplets:
    """Row-major triplet accumulator for sparse constraint assembly."""

    def __init__(self):
        self.rows, self.cols, self.vals = [], [], []

    def add_row(self, r: int, cols: np.ndarray, vals: np.ndarray):
        mask = vals != 0.0
        n = int(np.sum(mask))
        if n:
            self.rows.append(np.full(n, r))
            self.cols.append(np.asarray(cols)[mask])
            self.vals.append(np.asarray(vals)[mask])

    def matrix(self, shape) -> sp.csc_matrix:
        if not self.rows:
            return sp.csc_matrix(shape)
        return sp.csc_matrix(
            (np.concatenate(self.vals),
             (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=shape,
        )


def _power_soc(n_var: int, w_dim: int, budget_w: float) -> SocConstraint:
    """||w|| <= sqrt(P): scalar row constant, vector rows the w block."""
    tri = _Triplets()
    for i in range(w_dim):
        tri.add_row(1 + i, np.array([i]), np.array([1.0]))
    g = np.zeros(w_dim + 1)
    g[0] = math.sqrt(budget_w)
    return SocConstraint(tri.matrix((w_dim + 1, n_var)), g, label="power")


def build_subproblem(
    ch: ChannelSet,
    targets: np.ndarray,
    cfg: SystemConfig,
    t_hat: np.ndarray,
    w_hat: np.ndarray,
    mode: str,
) -> ConicProgram:
    """Convex SOC subproblem around (w_hat, t_hat) for multi-beam schemes.

    `targets` is per group (linear); `w_hat` is (nbeams, M) with nbeams
    equal to the group count (per-group multicast) or 1 (single common
    beam, in which case the SINR has no intra-cell interference term and
    the constraint is linear). mode: "proposed" adds the linearized
    leader penalty to the l1 objective; "l1_only" omits it.
    """
    if mode not in ("proposed", "l1_only"):
        raise ValueError(f"unknown mode {mode!r}")
    K, M = ch.h.shape
    nb = w_hat.shape[0]
    if w_hat.shape != (nb, M):
        raise ValueError("w_hat shape mismatch")
    if t_hat.shape != (K,):
        raise ValueError("t_hat shape mismatch")
    single = nb == 1
    if not single and nb != cfg.num_groups:
        raise ValueError("beam count must be 1 or num_groups")

    hp = ch.h / np.sqrt(ch.interference_phase1)[:, None]
    n_w = 2 * M * nb
    n_var = n_w + 3 * K
    t0, a0, b0 = n_w, n_w + K, n_w + 2 * K

    floor = cfg.sca.slack_floor
    t_hat = np.maximum(t_hat, floor)

    # equalities: a_k = Re(h'_k w_{beam(k)}), b_k = Im(h'_k w_{beam(k)})
    eq = _Triplets()
    b_eq = np.zeros(2 * K)
    for k in range(K):
        beam = 0 if single else int(ch.group_index[k])
        off = 2 * M * beam
        cols = np.arange(off, off + 2 * M)
        re, im = _inner_coeffs(hp[k])
        eq.add_row(2 * k, cols, -re)
        eq.add_row(2 * k, np.array([a0 + k]), np.array([1.0]))
        eq.add_row(2 * k + 1, cols, -im)
        eq.add_row(2 * k + 1, np.array([b0 + k]), np.array([1.0]))

    socs = [_power_soc(n_var, n_w, cfg.bs_power_w)]
    for k in range(K):
        gk = int(ch.group_index[k])
        gamma = float(targets[gk])
        if gamma < 0:
            raise ValueError("targets must be nonnegative")
        wb = w_hat[0 if single else gk]
        g_const, ca, cb = linearize_quadratic(hp[k], wb)
        if gamma == 0.0:
            # zero target: t_k >= 0 already enforced; constraint vacuous
            continue
        # y = g_lin/gamma + t - 1 must dominate the interference power sum
        y_cols = np.array([a0 + k, b0 + k, t0 + k])
        y_vals = np.array([ca / gamma, cb / gamma, 1.0])
        y_const = g_const / gamma - 1.0
        if single:
            # no intra-cell interference: linear constraint y >= 0
            tri = _Triplets()
            tri.add_row(0, y_cols, y_vals)
            socs.append(SocConstraint(tri.matrix((1, n_var)),
                                      np.array([y_const]), label=f"sinr[{k}]"))
            continue
        others = [j for j in range(nb) if j != gk]
        dim = 1 + 2 * len(others) + 1
        tri = _Triplets()
        g = np.zeros(dim)
        tri.add_row(0, y_cols, y_vals)          # s = y + 1
        g[0] = y_const + 1.0
        r = 1
        for j in others:
            off = 2 * M * j
            cols = np.arange(off, off + 2 * M)
            re, im = _inner_coeffs(hp[k])
            tri.add_row(r, cols, 2.0 * re)
            tri.add_row(r + 1, cols, 2.0 * im)
            r += 2
        tri.add_row(r, y_cols, y_vals)          # last row: y - 1
        g[r] = y_const - 1.0
        socs.append(SocConstraint(tri.matrix((dim, n_var)), g, label=f"sinr[{k}]"))

    c = np.zeros(n_var)
    c[t0:t0 + K] = 1.0
    if mode == "proposed":
        _, grad = linearize_penalty(t_hat, cfg.group_sizes, cfg.penalty_weights,
                                    floor, cfg.sca.grad_cap)
        c[t0:t0 + K] += grad

    return ConicProgram(
        num_vars=n_var,
        c=c,
        A_eq=eq.matrix((2 * K, n_var)),
        b_eq=b_eq,
        nonneg_idx=np.arange(t0, t0 + K),
        socs=socs,
    )


def _extract_beams(x: np.ndarray, nb: int, M: int) -> np.ndarray:
    w = np.empty((nb, M), dtype=complex)
    for n in range(nb):
        off = 2 * M * n
        w[n] = x[off:off + M] + 1j * x[off + M:off + 2 * M]
    return w


def _cross_powers(hp: np.ndarray, w: np.ndarray, group_index: np.ndarray, single: bool):
    """(signal, interference) of |h'_k w_j|^2 sums under the current beams."""
    inner = hp @ w.T  # (K, nb)
    p = np.abs(inner) ** 2
    if single:
        return p[:, 0], np.zeros(len(hp))
    sig = p[np.arange(len(hp)), group_index]
    return sig, p.sum(axis=1) - sig


def _feasible_slacks(hp, w, targets, group_index, single: bool) -> np.ndarray:
    """Smallest t making (w, t) satisfy the normalized SINR constraints."""
    sig, interf = _cross_powers(hp, w, group_index, single)
    gamma = targets[group_index]
    need = np.where(gamma > 0, interf + 1.0 - sig / np.where(gamma > 0, gamma, 1.0), 0.0)
    return np.maximum(need, 0.0)


def _incumbent_feasible(hp, w, t, targets, group_index, single: bool, rtol=1e-5) -> bool:
    sig, interf = _cross_powers(hp, w, group_index, single)
    gamma = targets[group_index]
    lhs = np.where(gamma > 0, sig / np.where(gamma > 0, gamma, 1.0), 0.0) + t
    rhs = np.where(gamma > 0, interf + 1.0, 0.0)
    return bool(np.all(lhs >= rhs - rtol * (1.0 + np.abs(rhs))))


def _mrt_init(ch, cfg, nb: int, how: str, rng: np.random.Generator) -> np.ndarray:
    """Initial beams: MRT toward a representative member, equal power split."""
    M = ch.h.shape[1]
    w = np.empty((nb, M), dtype=complex)
    per_beam = cfg.bs_power_w / nb
    for n in range(nb):
        members = np.arange(len(ch.h)) if nb == 1 else np.where(ch.group_index == n)[0]
        norms = np.linalg.norm(ch.h[members], axis=1)
        if how == "median":
            pick = members[int(np.argsort(norms)[len(norms) // 2])]
            direction = np.conj(ch.h[pick])
        elif how == "max":
            pick = members[int(np.argmax(norms))]
            direction = np.conj(ch.h[pick])
        else:
            direction = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        w[n] = math.sqrt(per_beam) * direction / np.linalg.norm(direction)
    return w


def _zf_beams(hp, leaders, gamma) -> tuple[np.ndarray, float]:
    """Zero-forcing beams hitting each leader at exactly its target.

    Returns (beams, total power). Power explodes when the chosen leader
    channels are nearly aligned, so the choice of leaders matters.
    """
    H = hp[list(leaders)]
    W = np.linalg.pinv(H).T  # rows: h_m^T W[n] = delta_mn
    gains = np.abs(np.einsum("nm,nm->n", H, W))
    base = np.sqrt(np.maximum(gamma, 1e-12)) / gains
    W = W * base[:, None]
    return W, float(np.sum(np.abs(W) ** 2))


def _min_power_beams(hp, leaders, gamma, num_antennas: int):
    """Minimum-power beams putting each chosen leader exactly on target.

    Solves min ||w|| subject to, for each group n with leader l,
    Re(h'_l w_n)/sqrt(gamma_n) >= ||[h'_l w_j (j != n); 1]|| — the exact
    SINR constraint after a per-beam phase rotation. Returns
    (beams, power) or (None, inf) when the solve does not finish.
    """
    M, nb = num_antennas, len(leaders)
    nw = 2 * M * nb
    n_var = nw + 1  # [Re w, Im w blocks; norm epigraph r]
    socs = []
    for n, l in enumerate(leaders):
        re, im = _inner_coeffs(hp[l])
        dim = 1 + 2 * (nb - 1) + 1
        tri = _Triplets()
        cols = np.arange(2 * M * n, 2 * M * n + 2 * M)
        tri.add_row(0, cols, re / math.sqrt(max(gamma[n], 1e-12)))
        r = 1
        for j in range(nb):
            if j == n:
                continue
            cj = np.arange(2 * M * j, 2 * M * j + 2 * M)
            tri.add_row(r, cj, re)
            tri.add_row(r + 1, cj, im)
            r += 2
        g = np.zeros(dim)
        g[-1] = 1.0  # unit noise term under normalized channels
        socs.append(SocConstraint(tri.matrix((dim, n_var)), g, f"sinr_g{n}"))
    tri = _Triplets()
    tri.add_row(0, np.array([nw]), np.array([1.0]))
    for i in range(nw):
        tri.add_row(1 + i, np.array([i]), np.array([1.0]))
    socs.append(SocConstraint(tri.matrix((nw + 1, n_var)), np.zeros(nw + 1), "norm"))
    c = np.zeros(n_var)
    c[-1] = 1.0
    prog = ConicProgram(num_vars=n_var, c=c, A_eq=sp.csc_matrix((0, n_var)),
                        b_eq=np.zeros(0), nonneg_idx=np.array([nw]), socs=socs)
    sol = solve(prog, tol=1e-8)
    if sol.status != "optimal":
        return None, np.inf
    return _extract_beams(sol.x, nb, M), float(sol.x[-1] ** 2)


def _zf_init(ch, cfg, targets, rng: np.random.Generator,
             randomize: bool = False) -> np.ndarray:
    """Initial beams: zero-forcing across one candidate leader per group.

    The surrogate descent cannot recover a beam that reaches zero (the
    linearized signal term has no gradient there), so the starting point
    must already put every group's candidate leader above target. The
    leader combination is chosen to minimize zero-forcing power over the
    strongest few candidates per group; each beam is then scaled to the
    largest common SINR margin that fits the power budget.
    """
    import itertools

    hp = ch.h / np.sqrt(ch.interference_phase1)[:, None]
    gamma = np.asarray(targets, dtype=float)
    cands = []
    for n in range(cfg.num_groups):
        members = np.where(ch.group_index == n)[0]
        if randomize:
            cands.append([int(rng.choice(members))])
        else:
            norms = np.linalg.norm(hp[members], axis=1)
            cands.append(members[np.argsort(norms)[-3:]].tolist())
    ranked = []
    for combo in itertools.product(*cands):
        w, p = _zf_beams(hp, combo, gamma)
        ranked.append((p, combo, w))
    ranked.sort(key=lambda item: item[0])
    best_p, _, best_w = ranked[0]
    if not randomize and best_p > 0.95 * cfg.bs_power_w:
        # zero-forcing over-spends when leader channels are correlated;
        # when even the best combination busts the budget, refine the
        # most promising ones with the exact minimum-power solve
        for _, combo, _ in ranked[:4]:
            w, p = _min_power_beams(hp, list(combo), gamma, cfg.num_antennas)
            if p < best_p:
                best_w, best_p = w, p
    margin = min(2.0, 0.95 * cfg.bs_power_w / best_p)
    return best_w * math.sqrt(margin)


def _sca_loop(ch, targets, cfg, mode: str, nb: int,
              rng: np.random.Generator | None) -> tuple[BeamformerSet, np.ndarray, ScaTrace]:
    """Shared SCA driver for per-group and single-beam schemes."""
    if rng is None:
        rng = np.random.default_rng(0)
    K = ch.h.shape[0]
    single = nb == 1
    hp = ch.h / np.sqrt(ch.interference_phase1)[:, None]
    opts = cfg.sca
    group_sizes, weights = cfg.group_sizes, cfg.penalty_weights

    def true_objective(t):
        obj = float(np.sum(t))
        if mode == "proposed":
            obj += penalty(t, group_sizes, weights)
        return obj

    def groups_served(t):
        t = np.asarray(t)
        off = 0
        for kn in group_sizes:
            if t[off:off + kn].min() > 1e-6:
                return False
            off += kn
        return True

    if single:
        inits = ["median", "max"] + ["random"] * max(0, opts.retries - 1)
    else:
        inits = ["zf", "zf_random", "max"] + ["random"] * max(0, opts.retries - 2)
    trace = ScaTrace()
    best = None  # (served, objective, beams, slacks, trace)
    for attempt, how in enumerate(inits[: opts.retries + 1]):
        trace = ScaTrace(retries_used=attempt)
        if how.startswith("zf"):
            w_hat = _zf_init(ch, cfg, targets, rng, randomize=how == "zf_random")
        else:
            w_hat = _mrt_init(ch, cfg, nb, how, rng)
        t_hat = np.maximum(
            _feasible_slacks(hp, w_hat, targets, ch.group_index, single),
            opts.slack_floor,
        )
        t_cur = t_hat.copy()
        obj_prev = true_objective(t_cur)
        trace.objectives.append(obj_prev)
        ok = False
        for _ in range(opts.max_iter):
            # feasibility inheritance: the incumbent must satisfy its own subproblem
            if not _incumbent_feasible(hp, w_hat, t_hat, targets, ch.group_index, single):
                trace.statuses.append("incumbent_infeasible")
                break
            prog = build_subproblem(ch, targets, cfg, t_hat, w_hat, mode)
            # nearly-solved subproblems pass at a slightly looser
            # tolerance whose certificates still verify below 1e-6
            for tol in (opts.solver_tol, 1e-6):
                sol = solve(prog, tol=tol, max_iter=opts.solver_max_iter)
                if sol.status == "optimal":
                    break
            trace.statuses.append(sol.status)
            if sol.status != "optimal":
                break
            w_new = _extract_beams(sol.x, nb, ch.h.shape[1])
            t_new = np.maximum(sol.x[2 * ch.h.shape[1] * nb:][:K], 0.0)
            obj = true_objective(t_new)
            if obj > obj_prev:
                # the capped gradient is not a global majorizer near zero
                # slacks, so a step can raise the true objective; keep the
                # incumbent and stop instead of recording an ascent
                trace.statuses.append("ascent_rejected")
                trace.converged = ok
                break
            if mode == "proposed":
                pc, pg = linearize_penalty(t_hat, group_sizes, weights,
                                           opts.slack_floor, opts.grad_cap)
                surrogate = float(np.sum(t_new)) + pc + float(pg @ t_new)
            else:
                surrogate = float(np.sum(t_new))
            trace.objectives.append(obj)
            trace.surrogates.append(surrogate)
            trace.iterations += 1
            trace.last_program, trace.last_solution = prog, sol
            w_hat = w_new
            t_hat = np.maximum(t_new, opts.slack_floor)
            t_cur = t_new
            ok = True
            if abs(obj - obj_prev) <= opts.tol * max(1.0, abs(obj_prev)):
                trace.converged = True
                break
            obj_prev = obj
        if ok:
            served = groups_served(t_cur)
            key = (not served, true_objective(t_cur))
            if best is None or key < (not best[0], best[1]):
                best = (served, key[1], w_hat, t_cur, trace)
            if served:
                break  # a point with a leader in every group; stop restarting
    variant = "single" if single else "per_group"
    if best is not None:
        _, _, w_best, t_best, trace = best
        return BeamformerSet(variant, w_best), t_best, trace
    trace.failed = True
    return BeamformerSet(variant, w_hat), t_cur, trace


def run_sca(ch: ChannelSet, targets, cfg: SystemConfig, mode: str = "proposed",
            rng: np.random.Generator | None = None):
    """Per-group multicast beamforming via SCA.

    targets: per-group linear SINR targets. Returns (beams, slacks, trace).
    """
    targets = np.asarray([getattr(t, "linear_value", t) for t in targets], dtype=float)
    return _sca_loop(ch, targets, cfg, mode, cfg.num_groups, rng)


def run_sca_single_beam(ch: ChannelSet, target, cfg: SystemConfig,
                        with_leader_penalty: bool = False,
                        rng: np.random.Generator | None = None):
    """Single common beam (whole-cell multicast) with one shared SINR target."""
    gamma = float(getattr(target, "linear_value", target))
    targets = np.full(cfg.num_groups, gamma)
    mode = "proposed" if with_leader_penalty else "l1_only"
    return _sca_loop(ch, targets, cfg, mode, 1, rng)


def build_broadcast_program(ch: ChannelSet, targets: np.ndarray,
                            cfg: SystemConfig) -> ConicProgram:
    """One-shot convex program for per-user beams.

    Each user's beam is phase-rotated so h'_k^T w_k is real nonnegative
    (enforced as Im = 0 plus the cone constraint), which makes the SINR
    constraint a single second-order cone.
    """
    K, M = ch.h.shape
    hp = ch.h / np.sqrt(ch.interference_phase1)[:, None]
    sqrt_i = np.sqrt(ch.interference_phase1)
    n_w = 2 * M * K
    n_var = n_w + K
    t0 = n_w

    eq = _Triplets()
    b_eq = np.zeros(K)
    for k in range(K):
        off = 2 * M * k
        cols = np.arange(off, off + 2 * M)
        _, im = _inner_coeffs(hp[k])
        eq.add_row(k, cols, im)

    socs = [_power_soc(n_var, n_w, cfg.bs_power_w)]
    for k in range(K):
        gamma = float(targets[k])
        if gamma == 0.0:
            continue  # any SINR meets a zero target
        dim = 1 + 2 * (K - 1) + 1
        tri = _Triplets()
        g = np.zeros(dim)
        off = 2 * M * k
        cols = np.arange(off, off + 2 * M)
        re, _ = _inner_coeffs(hp[k])
        tri.add_row(0, cols, re / math.sqrt(gamma))
        tri.add_row(0, np.array([t0 + k]), np.array([sqrt_i[k]]))
        r = 1
        for u in range(K):
            if u == k:
                continue
            off_u = 2 * M * u
            cols_u = np.arange(off_u, off_u + 2 * M)
            re_u, im_u = _inner_coeffs(hp[k])
            tri.add_row(r, cols_u, re_u)
            tri.add_row(r + 1, cols_u, im_u)
            r += 2
        g[r] = 1.0  # unit noise term after normalization
        socs.append(SocConstraint(tri.matrix((dim, n_var)), g, label=f"bcast[{k}]"))

    c = np.zeros(n_var)
    c[t0:] = 1.0
    return ConicProgram(
        num_vars=n_var, c=c,
        A_eq=eq.matrix((K, n_var)), b_eq=b_eq,
        nonneg_idx=np.arange(t0, t0 + K),
        socs=socs,
    )


def solve_broadcast(ch: ChannelSet, targets, cfg: SystemConfig):
    """Per-user broadcast beams from a single conic solve.

    targets: per-user linear SINR targets. Returns (beams, slacks, status).
    """
    targets = np.asarray([getattr(t, "linear_value", t) for t in targets], dtype=float)
    prog = build_broadcast_program(ch, targets, cfg)
    # tolerance ladder: a barely-not-converged interior point run is still a
    # usable beamformer, so relax before declaring failure
    sol = None
    for tol in (cfg.sca.solver_tol, 1e-6, 1e-5):
        sol = solve(prog, tol=tol, max_iter=cfg.sca.solver_max_iter)
        if sol.status == "optimal":
            break
    K, M = ch.h.shape
    w = _extract_beams(sol.x, K, M) if sol.status in ("optimal", "max_iter") else np.zeros((K, M), complex)
    t = np.maximum(sol.x[2 * M * K:], 0.0) if sol.status in ("optimal", "max_iter") else np.full(K, np.inf)
    return BeamformerSet("per_user", w), t, sol.status
