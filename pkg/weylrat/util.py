import math
from typing import Iterator, List, Optional, Sequence, Tuple

from more_itertools import pairwise


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the 1-based positions of the set bits of mask, ascending."""
    position = 1
    while mask:
        if mask & 1:
            yield position
        mask >>= 1
        position += 1


def mask_from_members(members: Sequence[int]) -> int:
    mask = 0
    for a in members:
        mask |= 1 << (a - 1)
    return mask


def even_sign_masks(r: int) -> List[int]:
    return [mask for mask in range(1 << r) if popcount(mask) % 2 == 0]


def unrank_permutation(rank: int, r: int) -> Tuple[int, ...]:
    """The permutation of 1..r at position rank in lexicographic order."""
    if not 0 <= rank < math.factorial(r):
        raise ValueError(f"permutation rank {rank} out of range for r={r}")
    pool = list(range(1, r + 1))
    images: List[int] = []
    for k in range(r - 1, -1, -1):
        digit, rank = divmod(rank, math.factorial(k))
        images.append(pool.pop(digit))
    return tuple(images)


def next_permutation(seq: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """Lexicographic successor of seq, or None for the last permutation."""
    items = list(seq)
    k = len(items) - 2
    while k >= 0 and items[k] >= items[k + 1]:
        k -= 1
    if k < 0:
        return None
    m = len(items) - 1
    while items[m] <= items[k]:
        m -= 1
    items[k], items[m] = items[m], items[k]
    items[k + 1 :] = reversed(items[k + 1 :])
    return tuple(items)


def split_range(total: int, parts: int) -> List[Tuple[int, int]]:
    """Cut range(total) into at most `parts` contiguous, near-equal spans."""
    parts = max(1, min(parts, total))
    bounds = [total * k // parts for k in range(parts + 1)]
    return [(lo, hi) for lo, hi in pairwise(bounds) if hi > lo]
