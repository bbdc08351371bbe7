import json

import numpy as np
import pytest

from conecert.cones import ConeProduct, lorentz, nonneg
from conecert.model import (
    DisjunctiveSet,
    Inequality,
    Lattice,
    Problem,
    ProblemFormatError,
    RhsFamily,
    Status,
    assumption2_check,
    feasible_rhs,
    load_problem,
    save_problem,
)
from conecert.fixtures import builtin


def test_rhs_expansion_order_and_labels():
    fam = RhsFamily(
        explicit=(np.array([5.0]),),
        lattice=Lattice(np.array([0.0]), np.array([1.0]), -2, 2),
    )
    labeled = fam.expand_labeled()
    assert [l for l, _ in labeled] == [
        "explicit[0]",
        "lattice[0]",
        "lattice[1]",
        "lattice[2]",
        "lattice[-1]",
        "lattice[-2]",
    ]


def test_rhs_deduplication():
    fam = RhsFamily(
        explicit=(np.array([1.0]),),
        lattice=Lattice(np.array([0.0]), np.array([1.0]), 0, 3),
    )
    labels = [l for l, _ in fam.expand_labeled()]
    # lattice[1] collides with the explicit entry and is dropped
    assert labels == ["explicit[0]", "lattice[0]", "lattice[2]", "lattice[3]"]


def test_set_validation():
    K = ConeProduct([nonneg(2)])
    with pytest.raises(ValueError):
        DisjunctiveSet(np.array([[1.0, 2.0, 3.0]]), K, RhsFamily(explicit=(np.array([1.0]),)))
    with pytest.raises(ValueError):
        DisjunctiveSet(np.array([[1.0, 2.0]]), K, RhsFamily(explicit=(np.array([1.0, 2.0]),)))
    with pytest.raises(ValueError):
        DisjunctiveSet(np.array([[1.0, 2.0]]), K, RhsFamily(explicit=()))


def test_is_orthant():
    assert builtin("ex2_4").dset.is_orthant()
    assert not builtin("ex2_1").dset.is_orthant()


def test_problem_round_trip():
    for name in ("ex2_1", "cmir", "ex4_3"):
        problem = builtin(name).to_problem()
        back = load_problem(save_problem(problem))
        assert np.array_equal(back.dset.A, problem.dset.A)
        assert back.dset.K.blocks == problem.dset.K.blocks
        assert len(back.inequalities) == len(problem.inequalities)
        for p, q in zip(back.inequalities, problem.inequalities):
            assert p.name == q.name
            assert np.array_equal(p.mu, q.mu)
            assert p.eta0 == q.eta0
        assert [b.tolist() for b in back.dset.B.expand()] == [
            b.tolist() for b in problem.dset.B.expand()
        ]


def test_load_rejects_bad_documents():
    with pytest.raises(ProblemFormatError, match="JSON"):
        load_problem("{nope")
    with pytest.raises(ProblemFormatError, match="format_version"):
        load_problem(json.dumps({"format_version": 99}))
    good = json.loads(save_problem(builtin("ex2_4").to_problem()))
    bad = dict(good)
    bad["cone"] = [{"kind": "psd", "dim": 3}]
    with pytest.raises(ProblemFormatError, match="cone"):
        load_problem(json.dumps(bad))
    bad = json.loads(save_problem(builtin("ex2_4").to_problem()))
    bad["inequalities"][0]["mu"] = [1.0]
    with pytest.raises(ProblemFormatError, match="mu"):
        load_problem(json.dumps(bad))


def test_feasible_rhs_flags_empty_branch():
    fx = builtin("ex4_2")
    recs = feasible_rhs(fx.dset)
    by_label = {r.label: r for r in recs}
    assert by_label["explicit[0]"].status is Status.FAILS
    assert by_label["explicit[1]"].status is Status.HOLDS
    # infeasibility certificate: A^T y in -K*, b.y > 0
    bad = by_label["explicit[0]"]
    y = bad.certificate
    v = fx.dset.A.T @ y
    # -v must lie in L3: radius last
    assert -v[2] >= np.hypot(v[0], v[1]) - 1e-7
    assert float(bad.b @ y) > 1e-8
    # feasible branch carries a verified witness
    good = by_label["explicit[1]"]
    assert fx.dset.K.contains(good.witness, tol=1e-6)
    assert np.allclose(fx.dset.A @ good.witness, good.b, atol=1e-6)


def test_assumption2_interior_witness():
    fx = builtin("ex2_1")
    status, witness, margin = assumption2_check(fx.dset)
    assert status is Status.HOLDS
    assert margin > 1e-3
    assert fx.dset.K.interior_margin(witness) > 1e-6


def test_assumption2_fails_on_flat_set():
    fx = builtin("ex2_2")
    status, witness, margin = assumption2_check(fx.dset)
    assert status is Status.FAILS
    assert margin <= 1e-7
