"""Split disjunctions and multiplier-based cut generation.

Branches are plain (A, K, b) triples sharing a common prefix of variables;
`generate_cut` searches the multiplier description of the valid inequalities
for one that separates a given point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cones import BlockKind, ConeBlock, ConeProduct, nonneg
from .linalg import as_matrix
from .model import DisjunctiveSet, Inequality
from .solver import ConicProgram, SolveStatus, SolverOptions, solve


@dataclass(frozen=True)
class Branch:
    A: np.ndarray
    K: ConeProduct
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", as_matrix(self.A))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float).ravel())
        if self.A.shape[0] != self.b.size:
            raise ValueError("rhs length does not match the row count")
        if self.A.shape[1] != self.K.dim:
            raise ValueError("cone dimension does not match the column count")


@dataclass(frozen=True)
class SplitDisjunction:
    """Base relaxation {x in K : Atilde x = b} split along d.x <= r0 or
    d.x >= r0 + 1."""

    Atilde: np.ndarray
    b: np.ndarray
    K: ConeProduct
    d: np.ndarray
    r0: int

    def __post_init__(self):
        A = np.asarray(self.Atilde, dtype=float)
        if A.ndim != 2:
            A = np.atleast_2d(A)
        object.__setattr__(self, "Atilde", A)
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float).ravel())
        object.__setattr__(self, "d", np.asarray(self.d, dtype=float).ravel())
        if A.shape[0] != self.b.size:
            raise ValueError("rhs length does not match the row count")
        if A.shape[1] != self.K.dim or self.d.size != self.K.dim:
            raise ValueError("dimension mismatch between base and split direction")
        if not np.any(self.d):
            raise ValueError("split direction d must be nonzero")


def build_split_set(sd: SplitDisjunction) -> list[Branch]:
    """Two branches over (x, s) with one Nonneg slack s each:
    d.x + s = r0  and  d.x - s = r0 + 1."""
    m, n = sd.Atilde.shape
    out = []
    for sign, rhs in ((1.0, float(sd.r0)), (-1.0, float(sd.r0) + 1.0)):
        A = np.zeros((m + 1, n + 1))
        A[:m, :n] = sd.Atilde
        A[m, :n] = sd.d
        A[m, n] = sign
        b = np.concatenate([sd.b, [rhs]])
        K = ConeProduct(list(sd.K.blocks) + [nonneg(1)])
        out.append(Branch(A, K, b))
    return out


def branches_from_set(dset: DisjunctiveSet) -> list[Branch]:
    """One equality branch per expanded right-hand side."""
    return [Branch(dset.A, dset.K, b) for b in dset.B.expand()]


@dataclass
class CutResult:
    found: bool
    inequality: Inequality | None = None
    violation: float | None = None
    verified: bool = False
    diagnostic: str = ""


def generate_cut(
    branches: list[Branch],
    xhat,
    normalization: str = "trivial_box",
    tol: float = 1e-6,
    solver: SolverOptions | None = None,
    shared_dim: int | None = None,
) -> CutResult:
    """Search for (mu; eta0) valid on every feasible branch (in the shared
    variables) with <mu, xhat> < eta0 - tol."""
    if normalization not in ("trivial_box", "alpha_norm"):
        raise ValueError(f"unknown normalization {normalization!r}")
    solver = solver or SolverOptions()
    xhat = np.asarray(xhat, dtype=float).ravel()
    ns = shared_dim if shared_dim is not None else xhat.size
    if xhat.size != ns or ns > min(br.K.dim for br in branches):
        raise ValueError(f"xhat must have the shared-variable length (got {xhat.size})")

    feasible = []
    for br in branches:
        sol = solve(
            ConicProgram(np.zeros(br.K.dim), br.A, br.b, br.K), solver
        )
        if sol.status is SolveStatus.OPTIMAL:
            feasible.append(br)
        elif sol.status is not SolveStatus.PRIMAL_INFEASIBLE:
            return CutResult(False, diagnostic=f"branch feasibility {sol.status.value}")
    if not feasible:
        raise ValueError("every branch of the disjunction is infeasible")

    # variables: mu (free ns), eta0 (free 1), per branch (lambda free m_k,
    # gamma in K_k*, w_k Nonneg 1), then normalization slacks
    blocks = [ConeBlock(BlockKind.FREE, ns), ConeBlock(BlockKind.FREE, 1)]
    offs = []
    off = ns + 1
    for br in feasible:
        mk, nk = br.A.shape
        offs.append(off)
        blocks += [
            ConeBlock(BlockKind.FREE, mk),
            *br.K.dual().blocks,
            ConeBlock(BlockKind.NONNEG, 1),
        ]
        off += mk + nk + 1
    norm_off = off
    if normalization == "trivial_box":
        blocks.append(ConeBlock(BlockKind.NONNEG, 2 * ns + 2))
        nv = norm_off + 2 * ns + 2
        nrows_norm = 2 * ns + 2
    else:
        # abs vars a (free ns), h (free 1), slacks (Nonneg 2ns+2), s0 (Nonneg 1)
        blocks += [
            ConeBlock(BlockKind.FREE, ns + 1),
            ConeBlock(BlockKind.NONNEG, 2 * ns + 3),
        ]
        nv = norm_off + ns + 1 + 2 * ns + 3
        nrows_norm = 2 * ns + 3

    rows = sum(br.K.dim + 1 for br in feasible) + nrows_norm
    Amat = np.zeros((rows, nv))
    bvec = np.zeros(rows)
    r = 0
    for br, o in zip(feasible, offs):
        mk, nk = br.A.shape
        # A_k^T lambda_k + gamma_k agrees with mu on the shared prefix and
        # vanishes on the branch-local slacks
        Amat[r : r + nk, o : o + mk] = br.A.T
        Amat[r : r + nk, o + mk : o + mk + nk] = np.eye(nk)
        Amat[r : r + ns, :ns] -= np.eye(ns)
        r += nk
        # b_k . lambda_k - eta0 - w_k = 0
        Amat[r, o : o + mk] = br.b
        Amat[r, ns] = -1.0
        Amat[r, o + mk + nk] = -1.0
        r += 1
    if normalization == "trivial_box":
        # |mu_i| <= 1 and |eta0| <= 1
        for i in range(ns + 1):
            Amat[r, i] = 1.0
            Amat[r, norm_off + 2 * i] = 1.0
            bvec[r] = 1.0
            Amat[r + 1, i] = -1.0
            Amat[r + 1, norm_off + 2 * i + 1] = 1.0
            bvec[r + 1] = 1.0
            r += 2
    else:
        a0, s0 = norm_off, norm_off + ns + 1
        for i in range(ns + 1):
            Amat[r, a0 + i] = 1.0
            Amat[r, i] = -1.0
            Amat[r, s0 + 2 * i] = -1.0
            r += 1
            Amat[r, a0 + i] = 1.0
            Amat[r, i] = 1.0
            Amat[r, s0 + 2 * i + 1] = -1.0
            r += 1
        # sum a + h + slack = 1
        Amat[r, a0 : a0 + ns + 1] = 1.0
        Amat[r, s0 + 2 * ns + 2] = 1.0
        bvec[r] = 1.0
        r += 1

    c = np.zeros(nv)
    c[:ns] = xhat
    c[ns] = -1.0
    sol = solve(ConicProgram(c, Amat, bvec, ConeProduct(blocks)), solver)
    if sol.status is not SolveStatus.OPTIMAL:
        return CutResult(False, diagnostic=f"cut program {sol.status.value}")
    if sol.objective >= -tol:
        return CutResult(False, diagnostic="no violated inequality under this normalization")
    mu = sol.x[:ns]
    eta0 = float(sol.x[ns])
    violation = eta0 - float(mu @ xhat)
    verified = _verify_cut(feasible, mu, eta0, ns, tol, solver)
    return CutResult(True, Inequality(mu, eta0, "cut"), violation, verified)


def _verify_cut(branches, mu, eta0, ns, tol, solver) -> bool:
    """Validity of the returned cut: per-branch optimum of <mu, x> over the
    shared variables stays above eta0."""
    for br in branches:
        c = np.zeros(br.K.dim)
        c[:ns] = mu
        sol = solve(ConicProgram(c, br.A, br.b, br.K), solver)
        if sol.status is SolveStatus.PRIMAL_INFEASIBLE:
            continue
        if sol.status is not SolveStatus.OPTIMAL:
            return False
        if sol.objective < eta0 - 10 * tol:
            return False
    return True
