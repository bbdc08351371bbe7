import numpy as np
import pytest

from conecert.cones import (
    BlockKind,
    ConeBlock,
    ConeProduct,
    free,
    lorentz,
    nonneg,
    sample_extreme_rays,
    zero,
)


def test_block_validation():
    with pytest.raises(ValueError):
        ConeBlock(BlockKind.NONNEG, 0)
    with pytest.raises(ValueError):
        ConeBlock(BlockKind.LORENTZ, 1)
    assert lorentz(2).dim == 2
    assert nonneg(3).kind is BlockKind.NONNEG


def test_psd_rejected():
    with pytest.raises(ValueError):
        ConeBlock(BlockKind.PSD, 3)


def test_product_dim_and_offsets():
    K = ConeProduct([nonneg(3), lorentz(2)])
    assert K.dim == 5
    assert [(b.kind, off) for b, off in K.offsets()] == [
        (BlockKind.NONNEG, 0),
        (BlockKind.LORENTZ, 3),
    ]


def test_contains_orthant_and_lorentz():
    K = ConeProduct([nonneg(2), lorentz(3)])
    assert K.contains([1, 0, 1, -1, 2])
    assert not K.contains([-1e-3, 0, 0, 0, 1])
    # radius coordinate comes last in each Lorentz block
    assert K.contains([0, 0, 3, 4, 5])
    assert not K.contains([0, 0, 3, 4, 4.9])


def test_self_duality_of_regular_blocks():
    K = ConeProduct([nonneg(2), lorentz(3)])
    D = K.dual()
    assert [b.kind for b in D.blocks] == [BlockKind.NONNEG, BlockKind.LORENTZ]


def test_dual_swaps_zero_and_free():
    K = ConeProduct([zero(2), free(3)])
    D = K.dual()
    assert [b.kind for b in D.blocks] == [BlockKind.FREE, BlockKind.ZERO]
    assert D.dual().blocks == K.blocks


def test_interior_margin():
    K = ConeProduct([nonneg(2)])
    assert K.interior_margin([2.0, 3.0]) == pytest.approx(2.0)
    L = ConeProduct([lorentz(3)])
    assert L.interior_margin([3.0, 4.0, 6.0]) == pytest.approx(1.0)
    assert L.interior_margin([0.0, 1.0, 1.0]) == pytest.approx(0.0)


def test_canonical_interior_point():
    K = ConeProduct([nonneg(2), lorentz(3)])
    e = K.canonical_interior_point()
    assert K.interior_margin(e) > 0.5
    with pytest.raises(ValueError):
        ConeProduct([free(1)]).canonical_interior_point()


def test_irregular_cone_rejects_margin():
    with pytest.raises(ValueError):
        ConeProduct([zero(1), nonneg(1)]).interior_margin([0.0, 1.0])


def test_extreme_rays_orthant():
    K = ConeProduct([nonneg(3)])
    rays = sample_extreme_rays(K, 10, seed=0)
    assert len(rays) == 3
    assert sorted(tuple(r) for r in rays) == [
        (0.0, 0.0, 1.0),
        (0.0, 1.0, 0.0),
        (1.0, 0.0, 0.0),
    ]


def test_extreme_rays_lorentz_dim2():
    rays = sample_extreme_rays(ConeProduct([lorentz(2)]), 99, seed=0)
    assert len(rays) == 2
    for r in rays:
        assert abs(abs(r[0]) - r[1]) < 1e-12


def test_extreme_rays_lorentz_dim3_grid():
    K = ConeProduct([lorentz(3)])
    rays = sample_extreme_rays(K, 8, seed=0)
    assert len(rays) == 8
    for r in rays:
        # unit-norm boundary rays
        assert np.linalg.norm(r) == pytest.approx(1.0)
        assert np.hypot(r[0], r[1]) == pytest.approx(r[2])


def test_extreme_rays_deterministic():
    K = ConeProduct([lorentz(4)])
    a = sample_extreme_rays(K, 16, seed=7)
    b = sample_extreme_rays(K, 16, seed=7)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    for r in a:
        assert np.linalg.norm(r[:3]) == pytest.approx(r[3])


def test_extreme_rays_product_blocks_zero_elsewhere():
    K = ConeProduct([nonneg(2), lorentz(3)])
    for r in sample_extreme_rays(K, 6, seed=1):
        assert K.contains(r, tol=1e-9)
        # supported on exactly one block
        assert (np.any(r[:2] != 0)) != (np.any(r[2:] != 0))
