import math

import numpy as np
import pytest

from conecert.cones import ConeBlock, BlockKind, ConeProduct, free, lorentz, nonneg, zero
from conecert.solver import (
    ConicProgram,
    SolveStatus,
    SolverOptions,
    check_kkt,
    solve,
)

from oracles import oracle_lp


def test_small_lp_optimal():
    p = ConicProgram(
        c=[1.0, 2.0],
        A=[[1.0, 1.0]],
        b=[1.0],
        cone=ConeProduct([nonneg(2)]),
    )
    sol = solve(p)
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.objective == pytest.approx(1.0, abs=1e-7)
    assert np.allclose(sol.x, [1.0, 0.0], atol=1e-6)
    assert check_kkt(p, sol, 1e-6)["passed"]


def test_lorentz_optimal():
    # min -x2 over L3 with radius fixed: optimum at the boundary
    p = ConicProgram(
        c=[0.0, -1.0, 0.0],
        A=[[0.0, 0.0, 1.0]],
        b=[1.0],
        cone=ConeProduct([lorentz(3)]),
    )
    sol = solve(p)
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.objective == pytest.approx(-1.0, abs=1e-6)


def test_lorentz_radius_minimization():
    p = ConicProgram(
        c=[0.0, 0.0, 1.0],
        A=[[1.0, 0.0, 0.0]],
        b=[1.0],
        cone=ConeProduct([lorentz(3)]),
    )
    sol = solve(p)
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.objective == pytest.approx(1.0, abs=1e-6)


def test_free_and_zero_blocks():
    # free variable pair with an equality linking them
    p = ConicProgram(
        c=[1.0, 0.0, 0.0],
        A=[[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]],
        b=[2.0, 0.0],
        cone=ConeProduct([free(1), nonneg(1), zero(1)]),
    )
    sol = solve(p)
    assert sol.status is SolveStatus.OPTIMAL
    assert sol.objective == pytest.approx(2.0, abs=1e-6)


def test_primal_infeasible_certificate():
    p = ConicProgram(
        c=[0.0],
        A=[[1.0]],
        b=[-1.0],
        cone=ConeProduct([nonneg(1)]),
    )
    sol = solve(p)
    assert sol.status is SolveStatus.PRIMAL_INFEASIBLE
    y = sol.certificate
    # Farkas: A^T y <= 0 (dual cone of Nonneg), b.y > 0
    assert (np.asarray(p.A).T @ y)[0] <= 1e-8
    assert float(np.asarray(p.b) @ y) > 1e-8


def test_dual_infeasible_certificate():
    p = ConicProgram(
        c=[-1.0, -1.0],
        A=[[1.0, -1.0]],
        b=[0.0],
        cone=ConeProduct([nonneg(2)]),
    )
    sol = solve(p)
    assert sol.status is SolveStatus.DUAL_INFEASIBLE
    d = sol.certificate
    assert np.min(d) >= -1e-8
    assert abs(np.asarray(p.A) @ d)[0] <= 1e-6 * max(1.0, np.linalg.norm(d))
    assert float(np.asarray(p.c) @ d) < -1e-8


def test_lorentz_infeasible():
    # x in L3 with x3 = -1 is impossible
    p = ConicProgram(
        c=[0.0, 0.0, 0.0],
        A=[[0.0, 0.0, 1.0]],
        b=[-1.0],
        cone=ConeProduct([lorentz(3)]),
    )
    sol = solve(p)
    assert sol.status is SolveStatus.PRIMAL_INFEASIBLE


def test_scale_invariance():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(2, 5))
    x0 = rng.uniform(0.5, 1.5, size=5)
    b = A @ x0
    # dual-feasible objective so the optimum is finite
    c = A.T @ rng.normal(size=2) + rng.uniform(0.1, 1.0, size=5)
    K = ConeProduct([nonneg(5)])
    base = solve(ConicProgram(c, A, b, K))
    assert base.status is SolveStatus.OPTIMAL
    for tau in (1e-3, 1e3):
        scaled = solve(ConicProgram(tau * c, A, b, K))
        assert scaled.status is SolveStatus.OPTIMAL
        assert scaled.objective == pytest.approx(tau * base.objective, rel=1e-6, abs=1e-6)


def test_validation_errors():
    with pytest.raises(ValueError):
        ConicProgram(c=[1.0], A=[[1.0, 2.0]], b=[1.0], cone=ConeProduct([nonneg(1)]))
    with pytest.raises(ValueError):
        ConicProgram(c=[1.0, 2.0], A=[[1.0, 2.0]], b=[1.0, 2.0], cone=ConeProduct([nonneg(2)]))


def test_agrees_with_basic_solution_oracle():
    rng = np.random.default_rng(11)
    agree = 0
    for _ in range(60):
        m = rng.integers(1, 3)
        n = rng.integers(int(m) + 1, 6)
        A = rng.integers(-3, 4, size=(m, n)).astype(float)
        c = rng.integers(-3, 4, size=n).astype(float)
        if rng.random() < 0.7:
            b = A @ rng.uniform(0.0, 2.0, size=n)
        else:
            b = rng.integers(-4, 5, size=m).astype(float)
        status, value, _ = oracle_lp(c, A, b)
        sol = solve(ConicProgram(c, A, b, ConeProduct([nonneg(int(n))])))
        if status == "optimal":
            assert sol.status is SolveStatus.OPTIMAL, (A, b, c)
            assert sol.objective == pytest.approx(value, rel=1e-6, abs=1e-6)
        elif status == "infeasible":
            assert sol.status is SolveStatus.PRIMAL_INFEASIBLE
        else:
            assert sol.status is SolveStatus.DUAL_INFEASIBLE
        agree += 1
    assert agree == 60
