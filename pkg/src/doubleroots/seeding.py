"""Deterministic seed derivation for sharded Monte Carlo runs.

Work is split into fixed-size blocks; block b of a run with master seed s is
driven by its own generator seeded with splitmix64(s + (b+1)·GAMMA).  Merged
counts are sums over blocks, so results are identical for every worker count
and for any assignment of blocks to workers.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

DEFAULT_BLOCK = 65536


def splitmix64(x: int) -> int:
    """The splitmix64 finalizer; a bijection on 64-bit integers."""
    x &= _MASK
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & _MASK
    return x ^ (x >> 31)


def derive_seed(master: int, index: int) -> int:
    """Seed for block `index` of the stream rooted at `master`."""
    return splitmix64((master + (index + 1) * _GAMMA) & _MASK)


def block_sizes(total: int, block: int = DEFAULT_BLOCK) -> list[int]:
    """Split `total` trials into fixed-size blocks plus a remainder."""
    if total < 0:
        raise ValueError("total must be non-negative")
    sizes = [block] * (total // block)
    if total % block:
        sizes.append(total % block)
    return sizes
