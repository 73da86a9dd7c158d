import itertools
import math

import pytest

from weylrat.util import (
    even_sign_masks,
    iter_bits,
    mask_from_members,
    next_permutation,
    popcount,
    split_range,
    unrank_permutation,
)


def test_bits() -> None:
    assert popcount(0b1011) == 3
    assert list(iter_bits(0b1011)) == [1, 2, 4]
    assert list(iter_bits(0)) == []
    assert mask_from_members([1, 2, 4]) == 0b1011


def test_even_sign_masks() -> None:
    assert even_sign_masks(3) == [0, 3, 5, 6]
    assert len(even_sign_masks(5)) == 16


def test_permutations_follow_lexicographic_order() -> None:
    expected = list(itertools.permutations(range(1, 5)))
    walked = []
    perm = tuple(range(1, 5))
    while perm is not None:
        walked.append(perm)
        perm = next_permutation(perm)
    assert walked == expected
    assert [unrank_permutation(k, 4) for k in range(24)] == expected


def test_unrank_permutation_bounds() -> None:
    assert unrank_permutation(math.factorial(5) - 1, 5) == (5, 4, 3, 2, 1)
    with pytest.raises(ValueError):
        unrank_permutation(120, 5)
    with pytest.raises(ValueError):
        unrank_permutation(-1, 5)


def test_split_range() -> None:
    assert split_range(10, 3) == [(0, 3), (3, 6), (6, 10)]
    assert split_range(2, 8) == [(0, 1), (1, 2)]
    assert split_range(120, 1) == [(0, 120)]
    spans = split_range(5040, 16)
    assert spans[0][0] == 0
    assert spans[-1][1] == 5040
    assert all(hi == lo for (_, hi), (lo, _) in zip(spans, spans[1:]))
