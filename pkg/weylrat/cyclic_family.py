"""
Closed-form description of the rational elements of W(D_r), r odd.

Every rational element is either the longest element w_0 or one of the signed
cyclic elements c_I, d_I built on the increasing cycle (i_1 ... i_k r) for a
non-empty subset I of {1, ..., r - 1}. This module constructs those elements,
their two-level root data, lengths and defects, and recognises them from
one-line notation.
"""

from dataclasses import dataclass, field
from enum import Enum
from math import comb
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    NamedTuple,
    Optional,
    Tuple,
)

import numpy as np

from weylrat.rationality import Certificate
from weylrat.root_system import (
    Root,
    RootKind,
    check_odd_rank,
    check_rank,
    simple_root,
    tau_root,
)
from weylrat.signed_perm import SignedPerm, longest_element
from weylrat.util import iter_bits, mask_from_members, popcount


class EmptySubsetError(ValueError):
    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(self.message)


class InadmissibleToggleError(ValueError):
    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(self.message)


class AllowedMoveError(ValueError):
    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(self.message)


@dataclass(frozen=True, slots=True)
class SubsetIndex:
    """A subset I of {1, ..., rank - 1}; bit a - 1 of `mask` encodes a."""

    rank: int
    mask: int = 0

    def __post_init__(self) -> None:
        check_rank(self.rank)
        if self.mask < 0 or self.mask >> (self.rank - 1):
            raise ValueError(
                f"subset mask {self.mask:#b} is not inside 1..{self.rank - 1}"
            )

    @classmethod
    def from_members(cls, members: Iterable[int], rank: int) -> "SubsetIndex":
        values = list(members)
        bad = [a for a in values if not 1 <= a <= rank - 1]
        if bad:
            raise ValueError(f"subset members {bad} are not inside 1..{rank - 1}")
        return cls(rank, mask_from_members(values))

    @classmethod
    def parse(cls, text: str, rank: int) -> "SubsetIndex":
        stripped = text.strip()
        if not stripped:
            return cls(rank)
        try:
            members = [int(part) for part in stripped.split(",")]
        except ValueError:
            raise ValueError(
                f"malformed subset {text!r}, expected e.g. '1,3'"
            ) from None
        if len(set(members)) != len(members):
            raise ValueError(f"subset {text!r} repeats a member")
        return cls.from_members(members, rank)

    @property
    def members(self) -> Tuple[int, ...]:
        return tuple(iter_bits(self.mask))

    def __contains__(self, a: object) -> bool:
        return isinstance(a, int) and a >= 1 and bool((self.mask >> (a - 1)) & 1)

    def __len__(self) -> int:
        return popcount(self.mask)

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.mask)

    def is_empty(self) -> bool:
        return self.mask == 0

    def min(self) -> int:
        if not self.mask:
            raise EmptySubsetError("the empty subset has no minimum")
        return (self.mask & -self.mask).bit_length()

    def max(self) -> int:
        if not self.mask:
            raise EmptySubsetError("the empty subset has no maximum")
        return self.mask.bit_length()

    def next_in(self, a: int) -> int:
        """n_I(a): the least member of I greater than a, or r if none."""
        higher = self.mask >> a
        if not higher:
            return self.rank
        return a + (higher & -higher).bit_length()

    def toggle(self, a: int) -> "SubsetIndex":
        return SubsetIndex(self.rank, self.mask ^ (1 << (a - 1)))

    def label(self) -> str:
        return "_".join(str(a) for a in self.members)

    def to_json(self) -> List[int]:
        return list(self.members)

    def __str__(self) -> str:
        return ",".join(str(a) for a in self.members)


def all_subsets(r: int, include_empty: bool = False) -> List[SubsetIndex]:
    start = 0 if include_empty else 1
    return [SubsetIndex(r, mask) for mask in range(start, 1 << (r - 1))]


def _require_nonempty(subset: SubsetIndex) -> None:
    if subset.is_empty():
        raise EmptySubsetError(
            "the empty subset denotes w_0; use longest_element instead"
        )


def p_cycle(subset: SubsetIndex) -> Tuple[int, ...]:
    """Images p_I(1), ..., p_I(r) of the increasing cycle (i_1 ... i_k r)."""
    _require_nonempty(subset)
    r = subset.rank
    images = list(range(1, r + 1))
    for a in subset:
        images[a - 1] = subset.next_in(a)
    images[r - 1] = subset.min()
    return tuple(images)


def format_cycle(subset: SubsetIndex) -> str:
    return "(" + " ".join(str(a) for a in subset.members + (subset.rank,)) + ")"


def c_element(subset: SubsetIndex) -> SignedPerm:
    r = subset.rank
    check_odd_rank(r)
    if subset.is_empty():
        return longest_element(r)
    return SignedPerm(r, bytes(p_cycle(subset)), (1 << (r - 1)) - 1)


def d_element(subset: SubsetIndex) -> SignedPerm:
    r = subset.rank
    check_odd_rank(r)
    if subset.is_empty():
        return longest_element(r)
    eps = ((1 << r) - 1) ^ (1 << (subset.max() - 1))
    return SignedPerm(r, bytes(p_cycle(subset)), eps)


@dataclass(frozen=True)
class TwoLevelData:
    """nu_0(c_I) split into its lower level A_I and upper level B_I."""

    subset: SubsetIndex
    a_set: Tuple[Root, ...]
    b_set: Tuple[Root, ...]
    arrows: Tuple[Tuple[Root, Root], ...]
    preimages: Dict[Root, Root] = field(default_factory=dict)

    @property
    def vertices(self) -> Tuple[Root, ...]:
        return self.a_set + self.b_set


def b_preimage_index(subset: SubsetIndex, q: int) -> int:
    """t(q): the index t with p_I(t) = q."""
    return p_cycle(subset).index(q) + 1


def two_level_data(subset: SubsetIndex) -> TwoLevelData:
    _require_nonempty(subset)
    r = subset.rank
    first = subset.min()
    a_labels: List[Tuple[Root, int]] = []
    preimages: Dict[Root, Root] = {}
    for a in subset:
        n = subset.next_in(a)
        for b in range(a + 1, n):
            root = Root(RootKind.MINUS, b, n)
            a_labels.append((root, b))
            preimages[root] = Root(RootKind.MINUS, a, b)
    b_labels: List[Tuple[Root, int]] = []
    for q in range(first + 1, r + 1):
        root = Root(RootKind.MINUS, first, q)
        b_labels.append((root, q))
        preimages[root] = Root(RootKind.PLUS, b_preimage_index(subset, q), r)
    arrows = tuple(
        (source, target)
        for source, b in a_labels
        for target, q in b_labels
        if b <= q
    )
    return TwoLevelData(
        subset=subset,
        a_set=tuple(root for root, _ in a_labels),
        b_set=tuple(root for root, _ in b_labels),
        arrows=arrows,
        preimages=preimages,
    )


def adjacency_block(subset: SubsetIndex) -> np.ndarray:
    """The arrow matrix over A_I followed by B_I; only the A-to-B block is filled."""
    data = two_level_data(subset)
    index = {root: k for k, root in enumerate(data.vertices)}
    matrix = np.zeros((len(index), len(index)), dtype=np.int64)
    for source, target in data.arrows:
        matrix[index[source], index[target]] = 1
    return matrix


def gap_lengths(subset: SubsetIndex) -> List[int]:
    """g_j = n_I(i_j) - i_j - 1 for each member i_j."""
    return [subset.next_in(a) - a - 1 for a in subset]


def arrow_count(subset: SubsetIndex) -> int:
    _require_nonempty(subset)
    r = subset.rank
    twice = sum(
        g * (2 * r - a - subset.next_in(a) + 2)
        for a, g in zip(subset, gap_lengths(subset))
    )
    assert twice % 2 == 0
    return twice // 2


def nu0_size(subset: SubsetIndex) -> int:
    return 2 * subset.rank - 2 * subset.min() - len(subset)


def family_defect(subset: SubsetIndex) -> int:
    if subset.is_empty():
        return 0
    return nu0_size(subset)


def family_length(subset: SubsetIndex) -> int:
    r = subset.rank
    return r * (r - 1) - family_defect(subset)


def defect_polynomial(r: int) -> List[int]:
    """Coefficients of 1 + 2 * sum_{n=0}^{r-2} q^{n+1} (1+q)^n, ascending."""
    check_odd_rank(r)
    coefficients = [0] * (2 * r - 2)
    coefficients[0] = 1
    for n in range(r - 1):
        for j in range(n + 1):
            coefficients[n + 1 + j] += 2 * comb(n, j)
    return coefficients


def layer_sizes(r: int) -> List[int]:
    """Number of rational elements per defect, counted layer by layer."""
    check_odd_rank(r)
    sizes = [1]
    for t in range(1, 2 * r - 2):
        lo, hi = t // 2, min(t - 1, r - 2)
        sizes.append(2 * sum(comb(n, t - n - 1) for n in range(lo, hi + 1)))
    return sizes


class FamilyKind(str, Enum):
    W0 = "w0"
    C = "c"
    D = "d"
    NOT_RATIONAL = "not_rational"


class Half(str, Enum):
    C = "c"
    D = "d"


@dataclass(frozen=True)
class RecognitionResult:
    kind: FamilyKind
    subset: Optional[SubsetIndex] = None

    def __post_init__(self) -> None:
        if self.kind in (FamilyKind.C, FamilyKind.D):
            if self.subset is None or self.subset.is_empty():
                raise EmptySubsetError(f"{self.kind.value}-family needs a subset")

    @property
    def rational(self) -> bool:
        return self.kind is not FamilyKind.NOT_RATIONAL

    def element(self, r: int) -> SignedPerm:
        if self.kind is FamilyKind.W0:
            return longest_element(r)
        if self.kind is FamilyKind.C and self.subset is not None:
            return c_element(self.subset)
        if self.kind is FamilyKind.D and self.subset is not None:
            return d_element(self.subset)
        raise ValueError("a non-rational result has no family element")

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value}
        if self.subset is not None:
            data["subset"] = self.subset.to_json()
        return data


def cycle_subset(pi: bytes, r: int) -> Optional[int]:
    """Subset mask when pi is the identity (0) or an increasing cycle through r.

    Walks the orbit of r once; returns None for any other permutation.
    """
    mask = 0
    previous = 0
    x = pi[r - 1]
    steps = 0
    while x != r:
        if x <= previous or steps >= r:
            return None
        mask |= 1 << (x - 1)
        previous = x
        x = pi[x - 1]
        steps += 1
    for j in range(1, r):
        if not (mask >> (j - 1)) & 1 and pi[j - 1] != j:
            return None
    return mask


def family_sign_masks(mask: int, r: int) -> Dict[FamilyKind, int]:
    """Sign masks of the family members sharing the permutation for `mask`."""
    negatives_below_r = (1 << (r - 1)) - 1
    if mask == 0:
        return {FamilyKind.W0: negatives_below_r}
    top = mask.bit_length()
    return {
        FamilyKind.C: negatives_below_r,
        FamilyKind.D: ((1 << r) - 1) ^ (1 << (top - 1)),
    }


def recognize(u: SignedPerm) -> RecognitionResult:
    r = u.rank
    check_odd_rank(r)
    mask = cycle_subset(u.pi, r)
    if mask is None:
        return RecognitionResult(FamilyKind.NOT_RATIONAL)
    for kind, eps in family_sign_masks(mask, r).items():
        if u.eps == eps:
            subset = None if kind is FamilyKind.W0 else SubsetIndex(r, mask)
            return RecognitionResult(kind, subset)
    return RecognitionResult(FamilyKind.NOT_RATIONAL)


def family_elements(r: int) -> List[RecognitionResult]:
    """All of F_r: w_0, then c_I by ascending mask, then d_I by ascending mask."""
    check_odd_rank(r)
    subsets = all_subsets(r)
    return (
        [RecognitionResult(FamilyKind.W0)]
        + [RecognitionResult(FamilyKind.C, s) for s in subsets]
        + [RecognitionResult(FamilyKind.D, s) for s in subsets]
    )


def unsigned_lifts(r: int) -> Dict[bytes, List[SignedPerm]]:
    lifts: Dict[bytes, List[SignedPerm]] = {}
    for result in family_elements(r):
        element = result.element(r)
        lifts.setdefault(element.pi, []).append(element)
    return lifts


class ExtremeElements(NamedTuple):
    top: List[SignedPerm]
    second: List[SignedPerm]
    minimal: List[SignedPerm]


def extreme_elements(r: int) -> ExtremeElements:
    check_odd_rank(r)
    by_length: Dict[int, List[SignedPerm]] = {}
    for result in family_elements(r):
        ell = family_length(result.subset or SubsetIndex(r))
        by_length.setdefault(ell, []).append(result.element(r))
    lengths = sorted(by_length)
    return ExtremeElements(
        top=by_length[lengths[-1]],
        second=by_length[lengths[-2]],
        minimal=by_length[lengths[0]],
    )


def allowed_moves(half: Half, subset: SubsetIndex) -> FrozenSet[int]:
    """Simple indices a with s_a * (family element) rational."""
    r = subset.rank
    moves = {a for a in range(1, r - 1) if a + 1 in subset}
    if subset.is_empty():
        moves |= {r - 1, r}
    else:
        moves.add(r - 1 if half is Half.C else r)
    return frozenset(moves)


def move_target(half: Half, subset: SubsetIndex, a: int) -> Tuple[Half, SubsetIndex]:
    """The family element reached by an allowed move s_a."""
    r = subset.rank
    if a not in allowed_moves(half, subset):
        raise InadmissibleToggleError(f"s_{a} is not a rational move from {subset!s}")
    if subset.is_empty():
        half = Half.C if a == r - 1 else Half.D
    toggled = r - 1 if a >= r - 1 else a
    return half, subset.toggle(toggled)


def _c_half_certificate(subset: SubsetIndex, a: int) -> Certificate:
    r = subset.rank
    if a <= r - 2:
        if subset.is_empty() or a not in subset:
            return Certificate.loop(simple_root(a, r))
        return Certificate.loop(Root(RootKind.MINUS, a, subset.next_in(a)))
    first = subset.min()
    if r - 1 not in subset:
        return Certificate.loop(Root(RootKind.PLUS, first, r - 1))
    if len(subset) > 1:
        return Certificate.loop(Root(RootKind.PLUS, first, r))
    return Certificate.two_cycle(simple_root(r - 1, r), simple_root(r, r))


def forbidden_move_certificate(half: Half, subset: SubsetIndex, a: int) -> Certificate:
    """Catalogue certificate of non-rationality for s_a times c_I or d_I."""
    r = subset.rank
    check_odd_rank(r)
    if not 1 <= a <= r:
        raise ValueError(f"simple index must lie in 1..{r}, got {a}")
    if a in allowed_moves(half, subset):
        raise AllowedMoveError(
            f"s_{a} is an allowed move from {half.value}_{{{subset!s}}}"
        )
    if half is Half.C:
        return _c_half_certificate(subset, a)
    # the D-half is the tau-image of the C-half, spin indices swapped
    mirrored = a if a <= r - 2 else (2 * r - 1 - a)
    certificate = _c_half_certificate(subset, mirrored)
    return Certificate(
        certificate.kind, tuple(tau_root(root, r) for root in certificate.roots)
    )


def forbidden_moves(r: int) -> List[Tuple[Half, SubsetIndex, int]]:
    check_odd_rank(r)
    moves: List[Tuple[Half, SubsetIndex, int]] = []
    for result in family_elements(r):
        half = Half.D if result.kind is FamilyKind.D else Half.C
        subset = result.subset or SubsetIndex(r)
        allowed = allowed_moves(half, subset)
        moves.extend((half, subset, a) for a in range(1, r + 1) if a not in allowed)
    return moves


def is_admissible_toggle(subset: SubsetIndex, a: int) -> bool:
    n = subset.rank - 1
    if a == n:
        return True
    return 1 <= a < n and a + 1 in subset


def toggle_length_delta(subset: SubsetIndex, a: int) -> int:
    """l(c_J) - l(c_I) for J = I with a toggled, from the defect closed form."""
    r = subset.rank
    if not is_admissible_toggle(subset, a):
        raise InadmissibleToggleError(
            f"toggling {a} in {{{subset!s}}} is not admissible"
        )
    toggled = subset.toggle(a)
    if a == r - 1:
        if subset.is_empty():
            return -1
        if r - 1 not in subset:
            return 1
        return 1 if len(subset) == 1 else -1
    return 2 * (toggled.min() - subset.min()) + (len(toggled) - len(subset))
