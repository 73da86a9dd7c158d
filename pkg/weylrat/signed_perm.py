import re
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

from weylrat.root_system import (
    Root,
    RootKind,
    check_odd_rank,
    check_rank,
    root_table,
    simple_root,
)
from weylrat.util import even_sign_masks, next_permutation, popcount


class RankMismatchError(ValueError):
    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(self.message)


class NotInWeylGroupError(ValueError):
    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(self.message)


class OneLineParseError(ValueError):
    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(self.message)


@dataclass(frozen=True, slots=True)
class SignedPerm:
    """An element u of W(D_r) with u(e_j) = eps_j * e_{pi(j)}.

    `pi[j - 1]` holds pi(j); bit j - 1 of `eps` is set iff eps_j = -1.
    """

    rank: int
    pi: bytes
    eps: int

    def __post_init__(self) -> None:
        if __debug__:
            if len(self.pi) != self.rank or sorted(self.pi) != list(
                range(1, self.rank + 1)
            ):
                raise NotInWeylGroupError(
                    f"{list(self.pi)} is not a permutation of 1..{self.rank}"
                )
            if self.eps >> self.rank or popcount(self.eps) % 2:
                raise NotInWeylGroupError(
                    f"sign mask {self.eps:#b} needs an even number of -1 entries"
                )

    @classmethod
    def from_images(cls, images: Sequence[int]) -> "SignedPerm":
        """Build from one-line notation a_j = eps_j * pi(j)."""
        eps = 0
        for j, a in enumerate(images):
            if a < 0:
                eps |= 1 << j
        return cls(len(images), bytes(abs(a) for a in images), eps)

    def sign(self, j: int) -> int:
        return -1 if (self.eps >> (j - 1)) & 1 else 1

    def image(self, j: int) -> int:
        return self.pi[j - 1]

    def signs(self) -> Tuple[int, ...]:
        return tuple(self.sign(j) for j in range(1, self.rank + 1))

    def one_line(self) -> Tuple[int, ...]:
        return tuple(self.sign(j) * self.pi[j - 1] for j in range(1, self.rank + 1))

    def __str__(self) -> str:
        return format_one_line(self)


def _check_same_rank(u: SignedPerm, v: SignedPerm) -> None:
    if u.rank != v.rank:
        raise RankMismatchError(f"rank mismatch: {u.rank} vs {v.rank}")


def identity(r: int) -> SignedPerm:
    check_rank(r)
    return SignedPerm(r, bytes(range(1, r + 1)), 0)


def compose(u: SignedPerm, v: SignedPerm) -> SignedPerm:
    """The element x -> u(v(x))."""
    _check_same_rank(u, v)
    pi = bytearray(u.rank)
    eps = 0
    for j in range(1, u.rank + 1):
        mid = v.pi[j - 1]
        pi[j - 1] = u.pi[mid - 1]
        if v.sign(j) * u.sign(mid) < 0:
            eps |= 1 << (j - 1)
    return SignedPerm(u.rank, bytes(pi), eps)


def inverse(u: SignedPerm) -> SignedPerm:
    pi = bytearray(u.rank)
    eps = 0
    for j in range(1, u.rank + 1):
        target = u.pi[j - 1]
        pi[target - 1] = j
        if u.sign(j) < 0:
            eps |= 1 << (target - 1)
    return SignedPerm(u.rank, bytes(pi), eps)


def apply(u: SignedPerm, beta: Root) -> Root:
    """u(beta) as a positive root with an overall sign."""
    if beta.j > u.rank:
        raise RankMismatchError(f"root {beta} does not live in rank {u.rank}")
    low, high = u.image(beta.i), u.image(beta.j)
    sign_low = u.sign(beta.i)
    sign_high = u.sign(beta.j) * (-1 if beta.kind is RootKind.MINUS else 1)
    if low > high:
        low, high = high, low
        sign_low, sign_high = sign_high, sign_low
    kind = RootKind.MINUS if sign_low != sign_high else RootKind.PLUS
    return Root(kind, low, high, sign_low * beta.sign)


def simple_reflection(a: int, r: int) -> SignedPerm:
    check_rank(r)
    if not 1 <= a <= r:
        raise ValueError(f"simple reflection index must lie in 1..{r}, got {a}")
    images = list(range(1, r + 1))
    if a < r:
        images[a - 1], images[a] = a + 1, a
    else:
        images[r - 2], images[r - 1] = -r, -(r - 1)
    return SignedPerm.from_images(images)


def length(u: SignedPerm) -> int:
    return sum(1 for beta in root_table(u.rank).roots if not apply(u, beta).positive)


def is_ascent(u: SignedPerm, a: int) -> bool:
    """True iff u^{-1}(alpha_a) > 0, i.e. l(s_a u) = l(u) + 1."""
    return apply(inverse(u), simple_root(a, u.rank)).positive


def descents(u: SignedPerm) -> List[int]:
    return [a for a in range(1, u.rank + 1) if not is_ascent(u, a)]


def longest_element(r: int) -> SignedPerm:
    check_odd_rank(r)
    return SignedPerm(r, bytes(range(1, r + 1)), (1 << (r - 1)) - 1)


def tau_conjugate(u: SignedPerm) -> SignedPerm:
    """tau u tau^{-1} for the automorphism negating e_r."""
    r = u.rank
    images = list(u.one_line())
    images = [-a if abs(a) == r else a for a in images]
    images[r - 1] = -images[r - 1]
    return SignedPerm.from_images(images)


def all_elements(r: int) -> Iterator[SignedPerm]:
    """Every element of W(D_r), permutation-major in lexicographic order."""
    masks = even_sign_masks(r)
    perm = tuple(range(1, r + 1))
    while perm is not None:
        pi = bytes(perm)
        for mask in masks:
            yield SignedPerm(r, pi, mask)
        perm = next_permutation(perm)


_ONE_LINE_RE = re.compile(r"^\(\s*-?\d+(\s*,\s*-?\d+)*\s*\)$")


def parse_one_line(text: str) -> SignedPerm:
    stripped = text.strip()
    if not _ONE_LINE_RE.match(stripped):
        raise OneLineParseError(f"malformed one-line notation: {text!r}")
    images = [int(a) for a in stripped[1:-1].split(",")]
    r = len(images)
    if sorted(abs(a) for a in images) != list(range(1, r + 1)):
        raise OneLineParseError(
            f"absolute values of {text!r} are not a permutation of 1..{r}"
        )
    if sum(1 for a in images if a < 0) % 2:
        raise NotInWeylGroupError(
            f"{text!r} has an odd number of sign changes and is not in W(D_{r})"
        )
    return SignedPerm.from_images(images)


def format_one_line(u: SignedPerm) -> str:
    return "(" + ",".join(str(a) for a in u.one_line()) + ")"
