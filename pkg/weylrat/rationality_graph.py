import logging
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from weylrat.cyclic_family import (
    FamilyKind,
    Half,
    InadmissibleToggleError,
    RecognitionResult,
    SubsetIndex,
    all_subsets,
    is_admissible_toggle,
)
from weylrat.rationality import is_rational
from weylrat.root_system import check_odd_rank
from weylrat.signed_perm import (
    SignedPerm,
    compose,
    format_one_line,
    simple_reflection,
    tau_conjugate,
)

logger = logging.getLogger(__name__)


class DisconnectedGraphError(RuntimeError):
    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(self.message)


class EdgeValidationError(RuntimeError):
    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(self.message)


@dataclass(frozen=True)
class GammaVertex:
    kind: FamilyKind
    subset: SubsetIndex

    def __post_init__(self) -> None:
        if self.kind is FamilyKind.NOT_RATIONAL:
            raise ValueError("non-rational elements are not vertices")
        if (self.kind is FamilyKind.W0) != self.subset.is_empty():
            raise ValueError(
                f"{self.kind.value} vertex with subset {{{self.subset!s}}}"
            )

    @classmethod
    def w0(cls, r: int) -> "GammaVertex":
        return cls(FamilyKind.W0, SubsetIndex(r))

    @classmethod
    def c(cls, subset: SubsetIndex) -> "GammaVertex":
        return cls(FamilyKind.C, subset)

    @classmethod
    def d(cls, subset: SubsetIndex) -> "GammaVertex":
        return cls(FamilyKind.D, subset)

    @classmethod
    def on_half(cls, half: Half, subset: SubsetIndex) -> "GammaVertex":
        if subset.is_empty():
            return cls.w0(subset.rank)
        return cls(FamilyKind.C if half is Half.C else FamilyKind.D, subset)

    @classmethod
    def from_recognition(cls, result: RecognitionResult, r: int) -> "GammaVertex":
        return cls(result.kind, result.subset or SubsetIndex(r))

    @property
    def rank(self) -> int:
        return self.subset.rank

    @property
    def half(self) -> Optional[Half]:
        if self.kind is FamilyKind.W0:
            return None
        return Half.C if self.kind is FamilyKind.C else Half.D

    @property
    def name(self) -> str:
        if self.kind is FamilyKind.W0:
            return "w0"
        return f"{self.kind.value}_{self.subset.label()}"

    def sort_key(self) -> Tuple[int, int]:
        order = {FamilyKind.W0: 0, FamilyKind.C: 1, FamilyKind.D: 2}
        return (order[self.kind], self.subset.mask)

    def element(self) -> SignedPerm:
        result = RecognitionResult(
            self.kind, None if self.kind is FamilyKind.W0 else self.subset
        )
        return result.element(self.rank)

    def tau(self) -> "GammaVertex":
        if self.kind is FamilyKind.W0:
            return self
        kind = FamilyKind.D if self.kind is FamilyKind.C else FamilyKind.C
        return GammaVertex(kind, self.subset)

    def __str__(self) -> str:
        return self.name


def spin_label(half: Half, r: int) -> int:
    return r - 1 if half is Half.C else r


def neighbour_toggles(subset: SubsetIndex) -> List[int]:
    """Q(I): the admissible toggles of I inside the subset graph."""
    n = subset.rank - 1
    return [a for a in range(1, n + 1) if is_admissible_toggle(subset, a)]


def _vertex_neighbours(vertex: GammaVertex) -> List[Tuple[GammaVertex, int]]:
    r = vertex.rank
    if vertex.kind is FamilyKind.W0:
        top = SubsetIndex.from_members([r - 1], r)
        return [(GammaVertex.c(top), r - 1), (GammaVertex.d(top), r)]
    half = vertex.half
    assert half is not None
    neighbours = []
    for a in neighbour_toggles(vertex.subset):
        label = spin_label(half, r) if a == r - 1 else a
        target = GammaVertex.on_half(half, vertex.subset.toggle(a))
        neighbours.append((target, label))
    return neighbours


class GammaGraph:
    """The graph on the rational elements of W(D_r), edges labelled by s_a."""

    def __init__(self, rank: int, vertices: Iterable[GammaVertex]) -> None:
        self.rank = rank
        self.vertices: Tuple[GammaVertex, ...] = tuple(
            sorted(vertices, key=GammaVertex.sort_key)
        )
        self._order = {v: k for k, v in enumerate(self.vertices)}
        self.graph = nx.Graph()
        self.graph.add_nodes_from(self.vertices)

    def add_edge(self, u: GammaVertex, v: GammaVertex, label: int) -> None:
        if self.graph.has_edge(u, v) and self.graph.edges[u, v]["label"] != label:
            raise EdgeValidationError(f"conflicting labels on edge {u} -- {v}")
        self.graph.add_edge(u, v, label=label)

    def has_edge(self, u: GammaVertex, v: GammaVertex) -> bool:
        return self.graph.has_edge(u, v)

    def label(self, u: GammaVertex, v: GammaVertex) -> int:
        return self.graph.edges[u, v]["label"]

    def edges(self) -> List[Tuple[GammaVertex, GammaVertex, int]]:
        ordered = []
        for u, v, label in self.graph.edges(data="label"):
            if self._order[u] > self._order[v]:
                u, v = v, u
            ordered.append((u, v, label))
        ordered.sort(key=lambda e: (self._order[e[0]], self._order[e[1]]))
        return ordered

    def edge_count(self) -> int:
        return self.graph.number_of_edges()

    def neighbours(self, v: GammaVertex) -> List[GammaVertex]:
        return sorted(self.graph.neighbors(v), key=self._order.__getitem__)

    def adjacency_degree(self, v: GammaVertex) -> int:
        return self.graph.degree(v)

    def degree_distribution(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for v in self.vertices:
            d = self.adjacency_degree(v)
            counts[d] = counts.get(d, 0) + 1
        return dict(sorted(counts.items()))


def validate_edges(gamma: GammaGraph) -> List[str]:
    """Check each edge as a rational left multiplication s_a u = v."""
    rational: Dict[GammaVertex, bool] = {}
    failures = []
    for u, v, label in gamma.edges():
        for vertex in (u, v):
            if vertex not in rational:
                rational[vertex] = is_rational(vertex.element())
        moved = compose(simple_reflection(label, gamma.rank), u.element())
        if moved != v.element() or not (rational[u] and rational[v]):
            failures.append(f"{u.name} -- {v.name} [s{label}]")
    return failures


def build_gamma(r: int, validate: bool = True) -> GammaGraph:
    check_odd_rank(r)
    vertices = (
        [GammaVertex.w0(r)]
        + [GammaVertex.c(s) for s in all_subsets(r)]
        + [GammaVertex.d(s) for s in all_subsets(r)]
    )
    gamma = GammaGraph(r, vertices)
    for vertex in gamma.vertices:
        for neighbour, label in _vertex_neighbours(vertex):
            gamma.add_edge(vertex, neighbour, label)
    logger.debug(
        f"built Gamma(D_{r}) with {len(gamma.vertices)} vertices, "
        f"{gamma.edge_count()} edges"
    )
    if validate:
        failures = validate_edges(gamma)
        if failures:
            raise EdgeValidationError(
                f"{len(failures)} edges of Gamma(D_{r}) fail: {', '.join(failures)}"
            )
    return gamma


def missing_edges(gamma: GammaGraph) -> List[Tuple[GammaVertex, int]]:
    """Rational simple moves from a vertex that the graph does not record."""
    missing = []
    for vertex in gamma.vertices:
        element = vertex.element()
        neighbours = {n.element(): n for n in gamma.neighbours(vertex)}
        for a in range(1, gamma.rank + 1):
            moved = compose(simple_reflection(a, gamma.rank), element)
            if moved in neighbours and gamma.label(vertex, neighbours[moved]) == a:
                continue
            if is_rational(moved):
                missing.append((vertex, a))
    return missing


def degree(v: GammaVertex) -> int:
    if v.kind is FamilyKind.W0:
        return 2
    return 1 + sum(1 for a in v.subset if 2 <= a <= v.rank - 1)


def edge_count(r: int) -> int:
    check_odd_rank(r)
    return 2 ** (r - 1) + (r - 2) * 2 ** (r - 2)


def leaves(r: int) -> FrozenSet[GammaVertex]:
    gamma = build_gamma(r, validate=False)
    return frozenset(v for v in gamma.vertices if gamma.adjacency_degree(v) == 1)


def label_edges(
    gamma: GammaGraph, label: int, half: Optional[Half] = None
) -> Set[FrozenSet[GammaVertex]]:
    """E_a: edges carrying label a, optionally restricted to one half."""
    selected = set()
    for u, v, edge_label in gamma.edges():
        if edge_label != label:
            continue
        if half is not None and not any(x.half is half for x in (u, v)):
            continue
        selected.add(frozenset((u, v)))
    return selected


def half_isomorphism(gamma: GammaGraph) -> bool:
    """tau carries every edge to an edge, fixing ordinary labels, swapping spin ones."""
    r = gamma.rank
    swap = {r - 1: r, r: r - 1}
    for u, v, label in gamma.edges():
        tu, tv = u.tau(), v.tau()
        if not gamma.has_edge(tu, tv):
            return False
        if gamma.label(tu, tv) != swap.get(label, label):
            return False
        if tau_conjugate(u.element()) != tu.element():
            return False
    return True


def distances_from(gamma: GammaGraph, source: GammaVertex) -> Dict[GammaVertex, int]:
    lengths = nx.single_source_shortest_path_length(gamma.graph, source)
    if len(lengths) != len(gamma.vertices):
        raise DisconnectedGraphError(
            f"only {len(lengths)} of {len(gamma.vertices)} vertices reachable "
            f"from {source}"
        )
    return {v: lengths[v] for v in gamma.vertices}


def distance_bound(subset: SubsetIndex) -> int:
    """Length of the deletion word, an upper bound for dist(c_I, w_0)."""
    n = subset.rank - 1
    return sum(2 * (n - a) + 1 for a in subset)


def deletion_word(subset: SubsetIndex) -> Tuple[int, ...]:
    """Toggle labels carrying I to the empty set in the subset graph on [n].

    Here n = rank - 1. The word removes members from the largest down; each
    omega_m is n, n-1, ..., m, m+1, ..., n.
    """
    n = subset.rank - 1
    word: List[int] = []
    for m in reversed(subset.members):
        if m == n:
            word.append(n)
        else:
            word.extend(range(n, m - 1, -1))
            word.extend(range(m + 1, n + 1))
    return tuple(word)


def apply_toggles(subset: SubsetIndex, word: Iterable[int]) -> List[SubsetIndex]:
    """Walk a toggle word from I, returning every subset visited."""
    path = [subset]
    for a in word:
        if not is_admissible_toggle(path[-1], a):
            raise InadmissibleToggleError(
                f"toggle {a} is not admissible at {{{path[-1]!s}}}"
            )
        path.append(path[-1].toggle(a))
    return path


def subset_graph(n: int) -> nx.Graph:
    """The abstract toggle graph on subsets of {1, ..., n}, nodes as SubsetIndex."""
    graph = nx.Graph()
    subsets = all_subsets(n + 1, include_empty=True)
    graph.add_nodes_from(subsets)
    for subset in subsets:
        for a in neighbour_toggles(subset):
            graph.add_edge(subset, subset.toggle(a), label=a)
    return graph


def subset_degree(subset: SubsetIndex) -> int:
    return 1 + sum(1 for a in subset if a >= 2)


def subset_edge_count(n: int) -> int:
    return 2 ** (n - 1) + (n - 1) * 2 ** (n - 2) if n >= 2 else 1


def to_dot(gamma: GammaGraph) -> str:
    lines = [f'graph "Gamma(D{gamma.rank})" {{', "  node [shape=ellipse];"]
    lines.extend(f'  "{v.name}";' for v in gamma.vertices)
    lines.extend(
        f'  "{u.name}" -- "{v.name}" [label="s{label}"];'
        for u, v, label in gamma.edges()
    )
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(gamma: GammaGraph) -> Dict[str, Any]:
    return {
        "rank": gamma.rank,
        "vertices": [
            {
                "name": v.name,
                "kind": v.kind.value,
                "subset": v.subset.to_json(),
                "element": format_one_line(v.element()),
                "degree": gamma.adjacency_degree(v),
            }
            for v in gamma.vertices
        ],
        "edges": [
            {"source": u.name, "target": v.name, "label": f"s{label}"}
            for u, v, label in gamma.edges()
        ],
    }
