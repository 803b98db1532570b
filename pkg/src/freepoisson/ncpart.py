"""Non-crossing partition combinatorics.

Exact enumeration of the lattice NC(n) of non-crossing partitions of
{1..n}, the refinement partial order, and the Mobius function of the
poset, computed by recursive inversion of the zeta function.  These are
the weights behind every moment/cumulant transform in the package.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import ResourceLimitError, SchemaError

# C_14 = 2,674,440 partitions; enumeration above this needs an explicit opt-in
# to keep worst-case memory under about a gigabyte.
NC_MAX_DEFAULT = 14


@dataclass(frozen=True)
class SetPartition:
    """Partition of {1..n} in canonical form.

    Blocks are sorted by least element and ascending within each block;
    equality and hashing are the canonical-form contract.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ground set size must be positive")
        seen = set()
        prev_least = 0
        for b in self.blocks:
            if not b:
                raise ValueError("blocks must be non-empty")
            if b[0] <= prev_least:
                raise ValueError("blocks must be sorted by least element")
            prev_least = b[0]
            last = 0
            for e in b:
                if e <= last:
                    raise ValueError("block elements must be strictly ascending")
                last = e
                if e in seen:
                    raise ValueError(f"element {e} appears in two blocks")
                seen.add(e)
        if seen != set(range(1, self.n + 1)):
            raise ValueError(f"blocks must cover {{1..{self.n}}} exactly")

    @classmethod
    def of(cls, n: int, blocks) -> "SetPartition":
        """Canonicalize arbitrary iterables of iterables into a partition."""
        canon = tuple(sorted((tuple(sorted(int(e) for e in b)) for b in blocks)))
        return cls(n, canon)

    @classmethod
    def singletons(cls, n: int) -> "SetPartition":
        return cls(n, tuple((i,) for i in range(1, n + 1)))

    @classmethod
    def single_block(cls, n: int) -> "SetPartition":
        return cls(n, (tuple(range(1, n + 1)),))

    def block_count(self) -> int:
        return len(self.blocks)

    def to_jsonable(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]


def partition_from_jsonable(data) -> SetPartition:
    """Parse the JSON form: array of arrays of 1-based integers."""
    if not isinstance(data, list) or not data:
        raise SchemaError("partition: expected a non-empty array of blocks")
    elems = []
    for i, block in enumerate(data):
        if not isinstance(block, list) or not block:
            raise SchemaError(f"partition[{i}]: expected a non-empty array of integers")
        for j, e in enumerate(block):
            if isinstance(e, bool) or not isinstance(e, int) or e < 1:
                raise SchemaError(f"partition[{i}][{j}]: expected a positive integer, got {e!r}")
            elems.append(e)
    n = len(elems)
    if set(elems) != set(range(1, n + 1)):
        raise SchemaError(f"partition: blocks must cover 1..{n} exactly once")
    return SetPartition.of(n, data)


def catalan(m: int) -> int:
    """The m-th Catalan number (2m)!/(m!(m+1)!), |NC(m)| for m >= 1."""
    if m < 0:
        raise ValueError("catalan is defined for m >= 0")
    return math.comb(2 * m, m) // (m + 1)


def is_noncrossing(p: SetPartition) -> bool:
    """Single left-to-right sweep with a stack of open blocks.

    A partition crosses iff some block is revisited while a block opened
    later is still open, which is exactly a stack-discipline violation.
    """
    owner = {}
    for bi, b in enumerate(p.blocks):
        for e in b:
            owner[e] = bi
    stack = []
    for e in range(1, p.n + 1):
        bi = owner[e]
        block = p.blocks[bi]
        if e == block[0]:
            stack.append(bi)
        elif stack[-1] != bi:
            return False
        if e == block[-1]:
            if stack[-1] != bi:
                return False
            stack.pop()
    return True


def _nc_blocks(lo: int, hi: int):
    """Yield non-crossing partitions of the run {lo..hi} as block tuples.

    Decomposes by the block containing lo: if that block ends at j, the
    elements after j are partitioned independently, and the gaps between
    consecutive members of the block are partitioned independently too.
    Blocks come out already sorted by least element.
    """
    if lo > hi:
        yield ()
        return
    for j in range(lo, hi + 1):
        for head, inner in _first_block_chain(lo, j):
            for tail in _nc_blocks(j + 1, hi):
                yield (head,) + inner + tail


def _first_block_chain(c: int, j: int):
    """Yield (members, gap blocks) for a block running from c to final element j."""
    if c == j:
        yield (c,), ()
        return
    for m in range(c + 1, j + 1):
        for seg in _nc_blocks(c + 1, m - 1):
            for members, inner in _first_block_chain(m, j):
                yield (c,) + members, seg + inner


@lru_cache(maxsize=None)
def _nc_all(n: int) -> tuple[SetPartition, ...]:
    parts = [SetPartition(n, blocks) for blocks in _nc_blocks(1, n)]
    parts.sort(key=lambda p: p.blocks)
    return tuple(parts)


def enumerate_noncrossing(n: int, *, max_n: int = NC_MAX_DEFAULT) -> list[SetPartition]:
    """All of NC(n) in canonical (lexicographic) order; length catalan(n)."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > max_n:
        raise ResourceLimitError(
            f"enumerate_noncrossing(n={n}) exceeds the configured maximum {max_n}"
        )
    return list(_nc_all(n))


def leq(p: SetPartition, q: SetPartition) -> bool:
    """Refinement order: every block of p lies inside some block of q."""
    if p.n != q.n:
        raise ValueError(f"partitions live on different ground sets: {p.n} vs {q.n}")
    owner = {}
    for bi, b in enumerate(q.blocks):
        for e in b:
            owner[e] = bi
    for b in p.blocks:
        bi = owner[b[0]]
        for e in b[1:]:
            if owner[e] != bi:
                return False
    return True


def restrict(p: SetPartition, elements: tuple[int, ...]) -> SetPartition:
    """Restriction of p to a subset, relabeled order-preservingly to {1..k}."""
    index = {e: i + 1 for i, e in enumerate(sorted(elements))}
    blocks = []
    for b in p.blocks:
        inside = tuple(index[e] for e in b if e in index)
        if inside:
            blocks.append(inside)
    return SetPartition.of(len(index), blocks)


# Memo for mu(pi, top) keyed by the canonicalized (relabeled) interval base.
# CPython dict reads/writes are atomic under the GIL; for free-threaded use,
# confine computations to one thread or guard this table externally.
_MU_MEMO: dict[SetPartition, int] = {}


def _mu_to_top(p: SetPartition) -> int:
    """mu(p, 1_n) by recursive inversion: sum_{p<=rho<=1_n} mu(p,rho) = 0.

    Each mu(p, rho) with rho < 1_n factors over the blocks of rho into
    strictly smaller instances of the same quantity, so the recursion
    terminates; results are memoized on the canonical form of p.
    """
    if len(p.blocks) == 1:
        return 1
    cached = _MU_MEMO.get(p)
    if cached is not None:
        return cached
    total = 0
    for rho in _nc_all(p.n):
        if len(rho.blocks) == 1 or not leq(p, rho):
            continue
        prod = 1
        for block in rho.blocks:
            prod *= _mu_to_top(restrict(p, block))
            if prod == 0:
                break
        total += prod
    value = -total
    _MU_MEMO[p] = value
    return value


def mobius(p: SetPartition, q: SetPartition) -> int:
    """Mobius function mu_n(p, q) of the NC(n) refinement poset.

    Factorizes over the blocks of q and inverts the zeta function
    recursively on each factor; arbitrary-precision (values grow like
    Catalan numbers).
    """
    if not leq(p, q):
        raise ValueError("mobius requires p <= q in the refinement order")
    if not is_noncrossing(p) or not is_noncrossing(q):
        raise ValueError("mobius is defined on the non-crossing lattice")
    result = 1
    for block in q.blocks:
        result *= _mu_to_top(restrict(p, block))
        if result == 0:
            break
    return result


@lru_cache(maxsize=None)
def mobius_to_top_table(n: int) -> dict[SetPartition, int]:
    """mu_n(pi, 1_n) for every pi in NC(n), as one cached dict."""
    top = SetPartition.single_block(n)
    return {p: mobius(p, top) for p in _nc_all(n)}
