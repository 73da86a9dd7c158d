import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Set, Tuple

from weylrat.root_system import Root, adj, root_from_text, root_table, tau_root
from weylrat.signed_perm import (
    SignedPerm,
    apply,
    compose,
    inverse,
    is_ascent,
    simple_reflection,
    tau_conjugate,
)

logger = logging.getLogger(__name__)


class NotRationalError(ValueError):
    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(self.message)


class StabilizationError(RuntimeError):
    def __init__(self, message: str) -> None:
        self.message = message
        super().__init__(self.message)


def _positive_images(u: SignedPerm, roots: FrozenSet[Root]) -> FrozenSet[Root]:
    images = (apply(u, beta) for beta in roots)
    return frozenset(image for image in images if image.positive)


def nu0(u: SignedPerm) -> FrozenSet[Root]:
    return _positive_images(u, frozenset(root_table(u.rank).roots))


@dataclass(frozen=True)
class NuSequence:
    levels: Tuple[FrozenSet[Root], ...]

    @property
    def stable(self) -> FrozenSet[Root]:
        return self.levels[-1]

    def is_descending(self) -> bool:
        return all(
            later <= earlier for earlier, later in zip(self.levels, self.levels[1:])
        )

    def depth(self) -> int:
        """Index of the first empty level, or -1 when the sequence never empties."""
        for k, level in enumerate(self.levels):
            if not level:
                return k
        return -1


def nu_sequence(u: SignedPerm) -> NuSequence:
    r = u.rank
    levels: List[FrozenSet[Root]] = [nu0(u)]
    if not levels[0]:
        return NuSequence(tuple(levels))
    # at most one map application per positive root
    cap = root_table(r).size
    for _ in range(cap):
        levels.append(_positive_images(u, adj(levels[-1], r)))
        if not levels[-1] or levels[-1] == levels[-2]:
            return NuSequence(tuple(levels))
    raise StabilizationError(
        f"nu-sequence of {u} did not stabilise within {cap} iterations"
    )


@dataclass(frozen=True)
class RationalityGraph:
    """Gamma_u: vertices nu_0(u), arcs alpha -> beta iff u^{-1}(alpha) <= beta."""

    rank: int
    vertices: Tuple[Root, ...]
    arcs: Dict[Root, Tuple[Root, ...]]
    preimages: Dict[Root, Root]

    def has_arc(self, source: Root, target: Root) -> bool:
        return target in self.arcs.get(source, ())

    def arc_count(self) -> int:
        return sum(len(targets) for targets in self.arcs.values())

    def arc_pairs(self) -> List[Tuple[Root, Root]]:
        return [(s, t) for s in self.vertices for t in self.arcs[s]]

    def self_loops(self) -> List[Root]:
        return [v for v in self.vertices if self.has_arc(v, v)]


def build_graph(u: SignedPerm) -> RationalityGraph:
    table = root_table(u.rank)
    vertices = table.canonical(nu0(u))
    u_inv = inverse(u)
    preimages = {alpha: apply(u_inv, alpha) for alpha in vertices}
    arcs = {
        alpha: tuple(
            beta for beta in vertices if table.is_leq(preimages[alpha], beta)
        )
        for alpha in vertices
    }
    return RationalityGraph(u.rank, vertices, arcs, preimages)


class CertificateKind(str, Enum):
    LOOP = "loop"
    TWO_CYCLE = "two_cycle"
    CYCLE = "cycle"


@dataclass(frozen=True)
class Certificate:
    """A directed cycle of Gamma_u, given by its vertices in traversal order."""

    kind: CertificateKind
    roots: Tuple[Root, ...]

    @classmethod
    def loop(cls, root: Root) -> "Certificate":
        return cls(CertificateKind.LOOP, (root,))

    @classmethod
    def two_cycle(cls, first: Root, second: Root) -> "Certificate":
        return cls(CertificateKind.TWO_CYCLE, (first, second))

    @classmethod
    def cycle(cls, roots: Tuple[Root, ...]) -> "Certificate":
        if len(roots) < 3:
            raise ValueError("long cycles need at least three vertices")
        return cls(CertificateKind.CYCLE, roots)

    def validate(self, u: SignedPerm) -> bool:
        table = root_table(u.rank)
        if any(root.j > u.rank for root in self.roots):
            return False
        vertices = nu0(u)
        if not all(root in vertices for root in self.roots):
            return False
        u_inv = inverse(u)
        n = len(self.roots)
        return all(
            table.is_leq(apply(u_inv, self.roots[k]), self.roots[(k + 1) % n])
            for k in range(n)
        )

    def to_json(self) -> Dict[str, Any]:
        if self.kind is CertificateKind.LOOP:
            return {"kind": self.kind.value, "root": str(self.roots[0])}
        return {"kind": self.kind.value, "roots": [str(root) for root in self.roots]}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "Certificate":
        kind = CertificateKind(data["kind"])
        if kind is CertificateKind.LOOP:
            return cls.loop(root_from_text(data["root"]))
        return cls(kind, tuple(root_from_text(text) for text in data["roots"]))

    def __str__(self) -> str:
        return " -> ".join(str(root) for root in self.roots + self.roots[:1])


def _first_two_cycle(graph: RationalityGraph) -> Optional[Certificate]:
    order = {v: k for k, v in enumerate(graph.vertices)}
    for alpha in graph.vertices:
        for beta in graph.arcs[alpha]:
            if order[beta] > order[alpha] and graph.has_arc(beta, alpha):
                return Certificate.two_cycle(alpha, beta)
    return None


def _first_back_edge_cycle(graph: RationalityGraph) -> Optional[Certificate]:
    # iterative three-colour DFS: 0 white, 1 on stack, 2 finished
    colour: Dict[Root, int] = {v: 0 for v in graph.vertices}
    for start in graph.vertices:
        if colour[start]:
            continue
        path: List[Root] = [start]
        cursors: List[int] = [0]
        colour[start] = 1
        while path:
            node = path[-1]
            targets = graph.arcs[node]
            if cursors[-1] == len(targets):
                colour[node] = 2
                path.pop()
                cursors.pop()
                continue
            nxt = targets[cursors[-1]]
            cursors[-1] += 1
            if colour[nxt] == 1:
                cycle = tuple(path[path.index(nxt) :])
                if len(cycle) == 1:
                    return Certificate.loop(nxt)
                if len(cycle) == 2:
                    return Certificate.two_cycle(*cycle)
                return Certificate.cycle(cycle)
            if colour[nxt] == 0:
                colour[nxt] = 1
                path.append(nxt)
                cursors.append(0)
    return None


def certificate_of_graph(graph: RationalityGraph) -> Optional[Certificate]:
    loops = graph.self_loops()
    if loops:
        return Certificate.loop(loops[0])
    return _first_two_cycle(graph) or _first_back_edge_cycle(graph)


def find_certificate(u: SignedPerm) -> Optional[Certificate]:
    return certificate_of_graph(build_graph(u))


def is_rational(u: SignedPerm) -> bool:
    table = root_table(u.rank)
    u_inv = inverse(u)
    vertices = nu0(u)
    for alpha in vertices:
        if table.is_leq(apply(u_inv, alpha), alpha):
            return False
    return _first_back_edge_cycle(build_graph(u)) is None


def rational_ascents(u: SignedPerm) -> FrozenSet[int]:
    if not is_rational(u):
        raise NotRationalError(f"{u} is not rational")
    return frozenset(
        a
        for a in range(1, u.rank + 1)
        if is_ascent(u, a) and is_rational(compose(simple_reflection(a, u.rank), u))
    )


def tau_invariance(u: SignedPerm) -> bool:
    """nu_0 and rationality commute with conjugation by the spin automorphism."""
    r = u.rank
    conjugate = tau_conjugate(u)
    mapped: Set[Root] = {tau_root(alpha, r) for alpha in nu0(u)}
    return nu0(conjugate) == mapped and is_rational(conjugate) == is_rational(u)
