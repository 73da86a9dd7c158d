"""
Exhaustive verification of the rational elements of W(D_r).

The enumeration never consults the closed-form families when deciding
rationality: every element is tested against its root-poset graph. For a fixed
permutation all 2^(r-1) even sign masks are handled at once as numpy arrays,
rejecting first on self-loops, then on two-cycles, and finally peeling the
graph level by level until it is empty (acyclic) or stable (a cycle remains).
"""

import logging
import math
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import (
    Any,
    Callable,
    Dict,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np
from pydantic import BaseModel, Field

from weylrat import log
from weylrat.cyclic_family import (
    cycle_subset,
    defect_polynomial,
    family_elements,
    family_sign_masks,
    forbidden_move_certificate,
    forbidden_moves,
    recognize,
)
from weylrat.rationality import StabilizationError, is_rational, rational_ascents
from weylrat.rationality_graph import GammaVertex
from weylrat.root_system import RootTable, check_odd_rank, check_rank, root_table
from weylrat.signed_perm import (
    SignedPerm,
    compose,
    format_one_line,
    length,
    longest_element,
    parse_one_line,
    simple_reflection,
)
from weylrat.util import (
    even_sign_masks,
    next_permutation,
    split_range,
    unrank_permutation,
)

logger = logging.getLogger(__name__)


def enumerate_group(r: int, visitor: Callable[[SignedPerm], None]) -> None:
    check_rank(r)
    for u in _elements_in_span(r, 0, math.factorial(r)):
        visitor(u)


def _permutations_in_span(r: int, start: int, stop: int) -> Iterator[Tuple[int, ...]]:
    perm: Optional[Tuple[int, ...]] = unrank_permutation(start, r)
    for _ in range(start, stop):
        assert perm is not None
        yield perm
        perm = next_permutation(perm)


def _elements_in_span(r: int, start: int, stop: int) -> Iterator[SignedPerm]:
    masks = even_sign_masks(r)
    for perm in _permutations_in_span(r, start, stop):
        pi = bytes(perm)
        for mask in masks:
            yield SignedPerm(r, pi, mask)


def scan_permutation(
    pi: Sequence[int], table: RootTable, masks: np.ndarray
) -> np.ndarray:
    """Rationality verdict for every sign mask over the permutation pi."""
    images = np.asarray(pi, dtype=np.int64) - 1
    p = images[table.i_index]
    q = images[table.j_index]
    swap = p > q
    low = np.where(swap, q, p)
    high = np.where(swap, p, q)

    # bit set means the coefficient is negative
    neg_i = (masks[:, None] >> table.i_index[None, :]) & 1
    neg_j = ((masks[:, None] >> table.j_index[None, :]) & 1) ^ table.is_minus[None, :]
    neg_low = np.where(swap, neg_j, neg_i)
    neg_high = np.where(swap, neg_i, neg_j)
    kind = 1 - (neg_low ^ neg_high)
    image = table.code[low[None, :], high[None, :], kind]
    positive = neg_low == 0

    rational = np.zeros(len(masks), dtype=bool)
    loops = positive & table.leq[np.arange(table.size)[None, :], image]
    rows = np.flatnonzero(~loops.any(axis=1))
    if rows.size == 0:
        return rational

    # arcs[k, b, c]: u(b) -> u(c) in the graph of sign mask rows[k]
    pos = positive[rows]
    arcs = table.leq[:, image[rows]].transpose(1, 0, 2)
    arcs &= pos[:, :, None] & pos[:, None, :]
    survivors = ~(arcs & arcs.transpose(0, 2, 1)).any(axis=(1, 2))
    rows, arcs, level = rows[survivors], arcs[survivors], pos[survivors]
    if rows.size == 0:
        return rational

    for _ in range(table.size + 1):
        following = (arcs & level[:, None, :]).any(axis=2)
        if np.array_equal(following, level):
            break
        level = following
    else:
        raise StabilizationError(
            f"level peeling did not stabilise for permutation {tuple(pi)}"
        )
    rational[rows] = ~level.any(axis=1)
    return rational


@dataclass
class ChunkResult:
    visited: int = 0
    found: int = 0
    rational: List[Tuple[str, int]] = field(default_factory=list)
    mismatches: List[str] = field(default_factory=list)


def scan_span(span: Tuple[int, int, int]) -> ChunkResult:
    """Scan permutation ranks [start, stop) at rank r; runs inside workers."""
    r, start, stop = span
    table = root_table(r)
    masks = np.array(even_sign_masks(r), dtype=np.int64)
    result = ChunkResult()
    for perm in _permutations_in_span(r, start, stop):
        pi = bytes(perm)
        verdicts = scan_permutation(perm, table, masks)
        result.visited += len(masks)
        found = {int(m) for m in masks[verdicts]}
        result.found += len(found)
        family_mask = cycle_subset(pi, r)
        expected = (
            set()
            if family_mask is None
            else set(family_sign_masks(family_mask, r).values())
        )
        for mask in sorted(found ^ expected):
            result.mismatches.append(format_one_line(SignedPerm(r, pi, mask)))
        for mask in sorted(found & expected):
            u = SignedPerm(r, pi, mask)
            recognised = recognize(u)
            if not recognised.rational or recognised.element(r) != u:
                result.mismatches.append(format_one_line(u))
                continue
            result.rational.append((format_one_line(u), length(u)))
    return result


class EnumerationReport(BaseModel):
    rank: int
    group_order: int
    visited: int = 0
    rational_count: int = 0
    expected_count: int = 0
    rational_elements: List[str] = Field(default_factory=list)
    defect_histogram: List[int] = Field(default_factory=list)
    mismatches: List[str] = Field(default_factory=list)
    elapsed: float = Field(default=0.0, ge=0.0)
    worker_count: int = Field(default=1, ge=1)

    @property
    def ok(self) -> bool:
        return (
            self.visited == self.group_order
            and not self.mismatches
            and self.rational_count == self.expected_count
            and self.defect_histogram == defect_polynomial(self.rank)
        )

    def deterministic_view(self) -> Dict[str, Any]:
        return self.model_dump(exclude={"elapsed", "worker_count"})


def group_order(r: int) -> int:
    return 2 ** (r - 1) * math.factorial(r)


def _run_spans(
    spans: List[Tuple[int, int, int]], workers: int, progress: bool
) -> Iterator[ChunkResult]:
    if workers == 1:
        results: Iterable[ChunkResult] = map(scan_span, spans)
        if progress:
            results = log.track(results, "Scanning permutations", len(spans))
        yield from results
        return
    with Pool(processes=workers) as pool:
        results = pool.imap(scan_span, spans)
        if progress:
            results = log.track(results, "Scanning permutations", len(spans))
        yield from results


def brute_force_verify(
    r: int,
    workers: int = 1,
    progress: bool = False,
    progress_interval: int = 1 << 20,
    chunks_per_worker: int = 8,
) -> EnumerationReport:
    check_odd_rank(r)
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    started = time.perf_counter()
    spans = [
        (r, lo, hi)
        for lo, hi in split_range(math.factorial(r), workers * chunks_per_worker)
    ]
    logger.debug(f"scanning W(D_{r}) in {len(spans)} spans on {workers} workers")

    visited = found = 0
    rational: List[Tuple[str, int]] = []
    mismatches: List[str] = []
    for chunk in _run_spans(spans, workers, progress):
        before = visited // progress_interval
        visited += chunk.visited
        found += chunk.found
        if visited // progress_interval > before:
            logger.debug(f"visited {visited:,d} elements, {found} rational so far")
        rational.extend(chunk.rational)
        mismatches.extend(chunk.mismatches)

    top = r * (r - 1)
    histogram = [0] * (2 * r - 2)
    for _, ell in rational:
        histogram[top - ell] += 1
    return EnumerationReport(
        rank=r,
        group_order=group_order(r),
        visited=visited,
        rational_count=found,
        expected_count=2**r - 1,
        rational_elements=[text for text, _ in rational],
        defect_histogram=histogram,
        mismatches=sorted(mismatches),
        elapsed=time.perf_counter() - started,
        worker_count=workers,
    )


class CheckResult(BaseModel):
    name: str
    checked: int = 0
    failures: List[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_descent(
    r: int, elements: Optional[Iterable[SignedPerm]] = None
) -> CheckResult:
    """Every rational u other than w_0 has a rational length-increasing s_a u."""
    check_odd_rank(r)
    if elements is None:
        elements = (result.element(r) for result in family_elements(r))
    top = longest_element(r)
    check = CheckResult(name="descent")
    for u in elements:
        if u == top:
            continue
        check.checked += 1
        if not rational_ascents(u):
            check.failures.append(format_one_line(u))
    return check


def verify_certificates(r: int) -> CheckResult:
    check_odd_rank(r)
    check = CheckResult(name="certificates")
    for half, subset, a in forbidden_moves(r):
        check.checked += 1
        element = GammaVertex.on_half(half, subset).element()
        moved = compose(simple_reflection(a, r), element)
        certificate = forbidden_move_certificate(half, subset, a)
        if not certificate.validate(moved) or is_rational(moved):
            prefix = "w0" if subset.is_empty() else f"{half.value}_{{{subset!s}}}"
            check.failures.append(f"s{a} * {prefix}: {certificate}")
    return check


def verify_family_closure(report: EnumerationReport) -> bool:
    r = report.rank
    family = {format_one_line(result.element(r)) for result in family_elements(r)}
    return set(report.rational_elements) == family


class VerificationSummary(BaseModel):
    report: EnumerationReport
    descent: CheckResult
    certificates: CheckResult
    family_closure: bool

    @property
    def ok(self) -> bool:
        return (
            self.report.ok
            and self.descent.ok
            and self.certificates.ok
            and self.family_closure
        )


def run_verification(
    r: int,
    workers: int = 1,
    progress: bool = False,
    progress_interval: int = 1 << 20,
    chunks_per_worker: int = 8,
) -> VerificationSummary:
    report = brute_force_verify(
        r,
        workers=workers,
        progress=progress,
        progress_interval=progress_interval,
        chunks_per_worker=chunks_per_worker,
    )
    elements = [parse_one_line(text) for text in report.rational_elements]
    return VerificationSummary(
        report=report,
        descent=verify_descent(r, elements),
        certificates=verify_certificates(r),
        family_closure=verify_family_closure(report),
    )

