import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np


class InvalidRankError(ValueError):
    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(self.message)


class NonLatticeVectorError(ValueError):
    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(self.message)


def check_rank(r: int) -> None:
    if r < 2:
        raise InvalidRankError(f"rank must be at least 2, got r={r}")


def check_odd_rank(r: int) -> None:
    # Classification statements only hold for odd r >= 5
    if r < 5 or r % 2 == 0:
        raise InvalidRankError(f"rank must satisfy r >= 5 odd, got r={r}")


class RootKind(str, Enum):
    MINUS = "minus"
    PLUS = "plus"


@dataclass(frozen=True, slots=True)
class Root:
    """A root sign * (e_i - e_j) or sign * (e_i + e_j) with i < j."""

    kind: RootKind
    i: int
    j: int
    sign: int = 1

    def __post_init__(self) -> None:
        if __debug__:
            if not 1 <= self.i < self.j:
                raise ValueError(f"root indices must satisfy 1 <= i < j, got {self}")
            if self.sign not in (1, -1):
                raise ValueError(f"root sign must be +1 or -1, got {self.sign}")

    @property
    def positive(self) -> bool:
        return self.sign == 1

    def negate(self) -> "Root":
        return Root(self.kind, self.i, self.j, -self.sign)

    def absolute(self) -> "Root":
        return self if self.sign == 1 else Root(self.kind, self.i, self.j)

    def sort_key(self) -> Tuple[int, int, int]:
        return (0 if self.kind is RootKind.MINUS else 1, self.i, self.j)

    def coordinates(self, r: int) -> Tuple[int, ...]:
        if self.j > r:
            raise InvalidRankError(f"root {self} does not live in rank {r}")
        x = [0] * r
        x[self.i - 1] = self.sign
        x[self.j - 1] = -self.sign if self.kind is RootKind.MINUS else self.sign
        return tuple(x)

    def __str__(self) -> str:
        op = "-" if self.kind is RootKind.MINUS else "+"
        text = f"e{self.i}{op}e{self.j}"
        return text if self.sign == 1 else f"-({text})"


_ROOT_RE = re.compile(r"^\s*(-\()?\s*e(\d+)\s*([+-])\s*e(\d+)\s*(\))?\s*$")


def root_from_text(text: str) -> Root:
    match = _ROOT_RE.match(text)
    if not match or bool(match.group(1)) != bool(match.group(5)):
        raise ValueError(f"malformed root text: {text!r}")
    i, j = int(match.group(2)), int(match.group(4))
    kind = RootKind.MINUS if match.group(3) == "-" else RootKind.PLUS
    return Root(kind, i, j, -1 if match.group(1) else 1)


def simple_root(a: int, r: int) -> Root:
    """alpha_a = e_a - e_{a+1} for a < r, alpha_r = e_{r-1} + e_r."""
    check_rank(r)
    if not 1 <= a <= r:
        raise ValueError(f"simple root index must lie in 1..{r}, got {a}")
    if a < r:
        return Root(RootKind.MINUS, a, a + 1)
    return Root(RootKind.PLUS, r - 1, r)


def positive_roots(r: int) -> Tuple[Root, ...]:
    check_rank(r)
    pairs = [(i, j) for i in range(1, r) for j in range(i + 1, r + 1)]
    return tuple(Root(kind, i, j) for kind in RootKind for i, j in pairs)


@dataclass(frozen=True)
class CoeffVector:
    """Coefficients m_1..m_r of a vector in the simple-root basis."""

    m: Tuple[int, ...]

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self.m)

    def to_coordinates(self) -> Tuple[int, ...]:
        r = len(self.m)
        x = [0] * r
        for a, c in enumerate(self.m, start=1):
            for k, v in enumerate(simple_root(a, r).coordinates(r)):
                x[k] += c * v
        return tuple(x)


def coefficient_vector(x: Sequence[int], r: int) -> CoeffVector:
    check_rank(r)
    if len(x) != r:
        raise InvalidRankError(f"coordinate vector has length {len(x)}, expected {r}")
    prefix = 0
    m: List[int] = []
    for a in range(1, r - 1):
        prefix += x[a - 1]
        m.append(prefix)
    prefix += x[r - 2]
    # doubled spin coefficients, halved once parity is known
    twice_penultimate = prefix - x[r - 1]
    twice_last = prefix + x[r - 1]
    if twice_penultimate % 2 or twice_last % 2:
        raise NonLatticeVectorError(f"{tuple(x)} is not in the root lattice of D_{r}")
    m.append(twice_penultimate // 2)
    m.append(twice_last // 2)
    return CoeffVector(tuple(m))


def _check_comparable(rho: Root, eta: Root, r: int) -> None:
    if rho.j > r or eta.j > r:
        raise InvalidRankError(f"roots {rho}, {eta} do not both live in rank {r}")
    if not (rho.positive and eta.positive):
        raise ValueError(f"root order is defined on positive roots, got {rho}, {eta}")


def root_leq(rho: Root, eta: Root, r: int) -> bool:
    _check_comparable(rho, eta, r)
    x = [b - a for a, b in zip(rho.coordinates(r), eta.coordinates(r))]
    return coefficient_vector(x, r).is_nonnegative()


def root_leq_closed_form(rho: Root, eta: Root, r: int) -> bool:
    """Case-split order test covering every pair of positive roots."""
    _check_comparable(rho, eta, r)
    a, b, c, d = rho.i, rho.j, eta.i, eta.j
    if rho.kind is RootKind.MINUS and eta.kind is RootKind.MINUS:
        return c <= a and b <= d
    if rho.kind is RootKind.PLUS and eta.kind is RootKind.MINUS:
        return False
    if rho.kind is RootKind.MINUS:
        return c <= a and not (b == r and d == r)
    return c <= a and (b == r or (d < r and d <= b))


def elementary_order_test(rho: Root, eta: Root, r: int) -> Optional[bool]:
    """The four elementary order tests; None when none of them applies."""
    _check_comparable(rho, eta, r)
    if rho.kind is RootKind.MINUS and eta.kind is RootKind.MINUS:
        return eta.i <= rho.i < rho.j <= eta.j
    if rho.kind is RootKind.PLUS and rho.j == r:
        if eta.kind is RootKind.MINUS:
            return False
        if eta.j == r:
            return eta.i <= rho.i
        if eta.j == r - 1 and eta.i < r - 1:
            return eta.i <= rho.i
    return None


def tau_root(root: Root, r: int) -> Root:
    """Diagram automorphism swapping the spin nodes: e_r -> -e_r."""
    if root.j != r:
        return root
    kind = RootKind.PLUS if root.kind is RootKind.MINUS else RootKind.MINUS
    return Root(kind, root.i, root.j, root.sign)


class RootTable:
    """Indexed positive roots of one rank with the order relation as a matrix.

    `code[low, high, kind]` gives the index of the root with 0-based positions
    low < high and kind 0 (minus) or 1 (plus), and -1 elsewhere.
    """

    def __init__(self, r: int) -> None:
        check_rank(r)
        self.rank = r
        self.roots: Tuple[Root, ...] = positive_roots(r)
        self.size = len(self.roots)
        self.index: Dict[Root, int] = {root: k for k, root in enumerate(self.roots)}
        self.leq = np.array(
            [[root_leq(rho, eta, r) for eta in self.roots] for rho in self.roots],
            dtype=bool,
        )
        self.i_index = np.array([root.i - 1 for root in self.roots], dtype=np.int64)
        self.j_index = np.array([root.j - 1 for root in self.roots], dtype=np.int64)
        self.is_minus = np.array(
            [root.kind is RootKind.MINUS for root in self.roots], dtype=np.int64
        )
        self.code = np.full((r, r, 2), -1, dtype=np.int64)
        for k, root in enumerate(self.roots):
            kind = 0 if root.kind is RootKind.MINUS else 1
            self.code[root.i - 1, root.j - 1, kind] = k
        self._below: List[FrozenSet[Root]] = [
            frozenset(self.roots[k] for k in np.flatnonzero(self.leq[:, col]))
            for col in range(self.size)
        ]

    def is_leq(self, rho: Root, eta: Root) -> bool:
        return bool(self.leq[self.index[rho], self.index[eta]])

    def below(self, root: Root) -> FrozenSet[Root]:
        return self._below[self.index[root]]

    def canonical(self, roots: Iterable[Root]) -> Tuple[Root, ...]:
        return tuple(sorted(roots, key=self.index.__getitem__))


@lru_cache(maxsize=None)
def root_table(r: int) -> RootTable:
    return RootTable(r)


def adj(roots: Iterable[Root], r: int) -> FrozenSet[Root]:
    table = root_table(r)
    closure: set[Root] = set()
    for root in roots:
        if root.j > r or not root.positive:
            raise ValueError(f"{root} is not a positive root of rank {r}")
        closure |= table.below(root)
    return frozenset(closure)


@dataclass(frozen=True)
class OrderAudit:
    rank: int
    pairs: int
    disagreements: List[Tuple[Root, Root]] = field(default_factory=list)


def audit_order(r: int) -> OrderAudit:
    """Compare the coefficient test with the closed-form test on all pairs."""
    table = root_table(r)
    bad = [
        (rho, eta)
        for rho in table.roots
        for eta in table.roots
        if table.is_leq(rho, eta) != root_leq_closed_form(rho, eta, r)
    ]
    return OrderAudit(rank=r, pairs=table.size**2, disagreements=bad)
