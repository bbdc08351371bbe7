import math

import numpy as np
import pytest

from conecert.analysis import (
    AnalysisOptions,
    SupportHandle,
    check_A1i,
    full_report,
    sigma_over_rhs,
    theta,
)
from conecert.cones import ConeProduct, nonneg, sample_extreme_rays
from conecert.fixtures import builtin, names
from conecert.model import DisjunctiveSet, Inequality, RhsFamily, Status
from conecert.solver import ConicProgram, SolveStatus, solve

from oracles import oracle_lp


def _random_orthant_instance(rng):
    m = int(rng.integers(1, 3))
    n = int(rng.integers(m + 1, 5))
    A = rng.integers(-2, 3, size=(m, n)).astype(float)
    bs = tuple(A @ rng.uniform(0.0, 2.0, size=n) for _ in range(2))
    dset = DisjunctiveSet(A, ConeProduct([nonneg(n)]), RhsFamily(explicit=bs))
    # mu in Im(A*) + K* so the cut generating set is nonempty and theta finite
    lam = rng.normal(size=m)
    gamma = rng.uniform(0.0, 1.0, size=n)
    mu = A.T @ lam + gamma
    if not np.any(mu):
        mu = gamma + 1.0
    return dset, mu


def test_weak_bound_on_rays():
    rng = np.random.default_rng(42)
    checked = 0
    for _ in range(25):
        dset, mu = _random_orthant_instance(rng)
        handle = SupportHandle(dset, mu)
        for z in sample_extreme_rays(dset.K, 8, seed=0):
            v = handle.eval(dset.A @ z)
            if math.isnan(v):
                continue
            assert v <= float(mu @ z) + 1e-6
            checked += 1
        # a few interior cone points as well
        for _ in range(2):
            z = rng.uniform(0.0, 2.0, size=dset.n)
            v = handle.eval(dset.A @ z)
            if math.isnan(v):
                continue
            assert v <= float(mu @ z) + 1e-6
            checked += 1
    assert checked >= 100


def test_support_subadditive_and_homogeneous():
    rng = np.random.default_rng(7)
    handles = []
    for name, mu in (
        ("ex4_1", [0.0, 1.0, 2.0]),
        ("ex4_2", [0.0, 0.0, 1.0]),
        ("ex2_1", [1.0, 0.0, -1.0]),
        ("cmir", [1.5, 0.5, 1.0, -0.5, 0.0]),
    ):
        fx = builtin(name)
        handles.append(SupportHandle(fx.dset, mu))
    sub_checked = 0
    hom_checked = 0
    while sub_checked < 104:
        h = handles[sub_checked % len(handles)]
        m = h.dset.m
        z1 = rng.normal(size=m)
        z2 = rng.normal(size=m)
        v1, v2, v12 = h.eval(z1), h.eval(z2), h.eval(z1 + z2)
        if any(math.isnan(v) or math.isinf(v) for v in (v1, v2, v12)):
            sub_checked += 1
            continue
        assert v12 <= v1 + v2 + 1e-6
        sub_checked += 1
        for beta in (0.5, 2.0, 10.0):
            vb = h.eval(beta * z1)
            if math.isinf(vb) or math.isnan(vb):
                continue
            assert abs(vb - beta * v1) <= 1e-6 * beta
            hom_checked += 1
    assert hom_checked >= 100


def test_inf_support_bounds_theta():
    rng = np.random.default_rng(123)
    checked = 0
    while checked < 100:
        dset, mu = _random_orthant_instance(rng)
        th = theta(dset, mu)
        if math.isnan(th.value):
            continue
        sig = sigma_over_rhs(dset, SupportHandle(dset, mu))
        if math.isnan(sig.value):
            continue
        assert sig.value <= th.value + 1e-6
        checked += 1


def test_orthant_equalities_under_per_column_conditions():
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 100:
        dset, mu = _random_orthant_instance(rng)
        if checked % 2 == 0:
            # adjoint image: the per-column conditions hold with equality
            mu = dset.A.T @ rng.normal(size=dset.m)
            if not np.any(mu):
                continue
        entries = check_A1i(dset, mu)
        if not all(e.status is Status.HOLDS for e in entries):
            continue
        handle = SupportHandle(dset, mu)
        ok = True
        for i in range(dset.n):
            v = handle.eval(dset.A[:, i])
            if math.isnan(v) or math.isinf(v):
                ok = False
                break
            assert abs(v - mu[i]) <= 1e-6, (dset.A, mu, i, v)
        if not ok:
            continue
        th = theta(dset, mu)
        sig = sigma_over_rhs(dset, handle)
        if math.isfinite(th.value) and math.isfinite(sig.value):
            assert abs(sig.value - th.value) <= 1e-6
        checked += 1


def test_solver_against_enumeration_oracle():
    rng = np.random.default_rng(77)
    checked = 0
    while checked < 100:
        m = int(rng.integers(1, 3))
        n = int(rng.integers(m + 1, 6))
        A = rng.integers(-3, 4, size=(m, n)).astype(float)
        c = rng.integers(-3, 4, size=n).astype(float)
        if rng.random() < 0.7:
            b = A @ rng.uniform(0.0, 2.0, size=n)
        else:
            b = rng.integers(-4, 5, size=m).astype(float)
        status, value, _ = oracle_lp(c, A, b)
        sol = solve(ConicProgram(c, A, b, ConeProduct([nonneg(n)])))
        if sol.status is SolveStatus.NUMERICAL_LIMIT:
            continue
        if status == "optimal":
            assert sol.status is SolveStatus.OPTIMAL, (A, b, c)
            assert sol.objective == pytest.approx(value, rel=1e-6, abs=1e-6)
        elif status == "infeasible":
            assert sol.status is SolveStatus.PRIMAL_INFEASIBLE, (A, b, c)
        else:
            assert sol.status is SolveStatus.DUAL_INFEASIBLE, (A, b, c)
        checked += 1


def test_positive_scaling_verdict_invariance():
    opts = AnalysisOptions(samples=64)
    for name in names():
        fx = builtin(name)
        for fi in fx.inequalities:
            base = full_report(fx.dset, fi.inequality, opts).final_verdict
            for tau in (0.5, 3.0):
                scaled = Inequality(
                    tau * fi.inequality.mu, tau * fi.inequality.eta0
                )
                verdict = full_report(fx.dset, scaled, opts).final_verdict
                assert verdict == base, (name, fi.inequality.name, tau, verdict, base)
