"""Product cones built from Zero, Free, Nonneg, and Lorentz blocks.

The Lorentz block of dimension d is {x in R^d : x[d-1] >= ||x[:d-1]||},
i.e. the last coordinate of the block is the radius coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class BlockKind(Enum):
    ZERO = "zero"
    FREE = "free"
    NONNEG = "nonneg"
    LORENTZ = "lorentz"
    # Reserved for future extension; constructing a cone with PSD blocks
    # is rejected everywhere.
    PSD = "psd"


@dataclass(frozen=True)
class ConeBlock:
    kind: BlockKind
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"block dim must be >= 1, got {self.dim}")
        if self.kind is BlockKind.LORENTZ and self.dim < 2:
            raise ValueError(f"Lorentz block needs dim >= 2, got {self.dim}")
        if self.kind is BlockKind.PSD:
            raise ValueError("PSD blocks are reserved and not supported")


def zero(dim: int) -> ConeBlock:
    return ConeBlock(BlockKind.ZERO, dim)


def free(dim: int) -> ConeBlock:
    return ConeBlock(BlockKind.FREE, dim)


def nonneg(dim: int) -> ConeBlock:
    return ConeBlock(BlockKind.NONNEG, dim)


def lorentz(dim: int) -> ConeBlock:
    return ConeBlock(BlockKind.LORENTZ, dim)


_DUAL_KIND = {
    BlockKind.ZERO: BlockKind.FREE,
    BlockKind.FREE: BlockKind.ZERO,
    BlockKind.NONNEG: BlockKind.NONNEG,
    BlockKind.LORENTZ: BlockKind.LORENTZ,
}


@dataclass(frozen=True)
class ConeProduct:
    blocks: tuple[ConeBlock, ...]

    def __init__(self, blocks):
        object.__setattr__(self, "blocks", tuple(blocks))

    @property
    def dim(self) -> int:
        return sum(b.dim for b in self.blocks)

    def offsets(self) -> list[tuple[ConeBlock, int]]:
        """List of (block, start offset) pairs in order."""
        out = []
        off = 0
        for b in self.blocks:
            out.append((b, off))
            off += b.dim
        return out

    def is_regular(self) -> bool:
        return len(self.blocks) > 0 and all(
            b.kind in (BlockKind.NONNEG, BlockKind.LORENTZ) for b in self.blocks
        )

    def _check_len(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.dim:
            raise ValueError(f"vector length {x.size} != cone dim {self.dim}")
        return x

    def contains(self, x, tol: float = 0.0) -> bool:
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        x = self._check_len(x)
        for b, off in self.offsets():
            v = x[off:off + b.dim]
            if b.kind is BlockKind.FREE:
                continue
            if b.kind is BlockKind.ZERO:
                if np.max(np.abs(v)) > tol:
                    return False
            elif b.kind is BlockKind.NONNEG:
                if np.min(v) < -tol:
                    return False
            else:
                if v[-1] < np.linalg.norm(v[:-1]) - tol:
                    return False
        return True

    def interior_margin(self, x) -> float:
        if not self.is_regular():
            raise ValueError("interior_margin requires a regular cone")
        x = self._check_len(x)
        margin = math.inf
        for b, off in self.offsets():
            v = x[off:off + b.dim]
            if b.kind is BlockKind.NONNEG:
                margin = min(margin, float(np.min(v)))
            else:
                margin = min(margin, float(v[-1] - np.linalg.norm(v[:-1])))
        return margin

    def dual(self) -> "ConeProduct":
        return ConeProduct(ConeBlock(_DUAL_KIND[b.kind], b.dim) for b in self.blocks)

    def canonical_interior_point(self) -> np.ndarray:
        if not self.is_regular():
            raise ValueError("canonical_interior_point requires a regular cone")
        e = np.zeros(self.dim)
        for b, off in self.offsets():
            if b.kind is BlockKind.NONNEG:
                e[off:off + b.dim] = 1.0
            else:
                e[off + b.dim - 1] = 1.0
        return e


def sample_extreme_rays(cone: ConeProduct, count: int, seed: int = 0) -> list[np.ndarray]:
    """Unit-norm extreme rays of the product cone, zero outside their block.

    Nonneg blocks contribute every coordinate ray. A Lorentz block of
    dimension d contributes boundary rays (xbar, ||xbar||)/sqrt(2) with xbar
    on the unit sphere of R^(d-1): both points for d = 2, an equispaced
    circle grid of `count` points for d = 3, and `count` seeded Gaussian
    sphere samples otherwise. Deterministic for fixed (count, seed).
    """
    if not cone.is_regular():
        raise ValueError("sample_extreme_rays requires a regular cone")
    if count < 1:
        raise ValueError("count must be positive")
    rays = []
    n = cone.dim
    for b, off in cone.offsets():
        if b.kind is BlockKind.NONNEG:
            for i in range(b.dim):
                r = np.zeros(n)
                r[off + i] = 1.0
                rays.append(r)
            continue
        d = b.dim
        if d == 2:
            bars = [np.array([1.0]), np.array([-1.0])]
        elif d == 3:
            angles = 2.0 * np.pi * np.arange(count) / count
            bars = [np.array([math.cos(a), math.sin(a)]) for a in angles]
        else:
            rng = np.random.default_rng(seed)
            bars = []
            while len(bars) < count:
                g = rng.standard_normal(d - 1)
                nrm = np.linalg.norm(g)
                if nrm > 1e-12:
                    bars.append(g / nrm)
        for bar in bars:
            r = np.zeros(n)
            r[off:off + d - 1] = bar
            r[off + d - 1] = 1.0
            rays.append(r / math.sqrt(2.0))
    return rays
