import pytest

from weylrat.cyclic_family import FamilyKind, Half, SubsetIndex, all_subsets
from weylrat.rationality_graph import (
    GammaGraph,
    GammaVertex,
    apply_toggles,
    build_gamma,
    degree,
    deletion_word,
    distance_bound,
    distances_from,
    edge_count,
    half_isomorphism,
    label_edges,
    leaves,
    missing_edges,
    neighbour_toggles,
    subset_degree,
    subset_edge_count,
    subset_graph,
    to_dot,
    to_json,
    validate_edges,
)
from weylrat.root_system import InvalidRankError
from weylrat.signed_perm import longest_element


def subset(text: str, r: int = 5) -> SubsetIndex:
    return SubsetIndex.parse(text, r)


@pytest.fixture(scope="module")
def gamma5() -> GammaGraph:
    return build_gamma(5)


def test_vertices(gamma5: GammaGraph) -> None:
    assert len(gamma5.vertices) == 31
    assert gamma5.vertices[0] == GammaVertex.w0(5)
    assert gamma5.vertices[1] == GammaVertex.c(subset("1"))
    assert GammaVertex.w0(5).element() == longest_element(5)
    assert GammaVertex.c(subset("1,3")).name == "c_1_3"
    assert GammaVertex.d(subset("4")).name == "d_4"
    assert GammaVertex.w0(5).name == "w0"


def test_vertex_rejects_mismatched_subsets() -> None:
    with pytest.raises(ValueError):
        GammaVertex(FamilyKind.W0, subset("1"))
    with pytest.raises(ValueError):
        GammaVertex(FamilyKind.C, SubsetIndex(5))


def test_vertex_tau() -> None:
    assert GammaVertex.c(subset("1,3")).tau() == GammaVertex.d(subset("1,3"))
    assert GammaVertex.w0(5).tau() == GammaVertex.w0(5)
    assert GammaVertex.on_half(Half.D, subset("2")).half is Half.D


def test_edge_count(gamma5: GammaGraph) -> None:
    assert gamma5.edge_count() == 40
    assert edge_count(5) == 40
    assert edge_count(7) == 224


def test_gamma_at_seven() -> None:
    gamma = build_gamma(7)
    assert gamma.edge_count() == 224
    assert len(distances_from(gamma, GammaVertex.w0(7))) == 127
    assert half_isomorphism(gamma)


def test_edges_are_valid(gamma5: GammaGraph) -> None:
    assert validate_edges(gamma5) == []
    assert missing_edges(gamma5) == []


def test_spin_edges_from_w0(gamma5: GammaGraph) -> None:
    w0 = GammaVertex.w0(5)
    assert gamma5.neighbours(w0) == [
        GammaVertex.c(subset("4")),
        GammaVertex.d(subset("4")),
    ]
    assert gamma5.label(w0, GammaVertex.c(subset("4"))) == 4
    assert gamma5.label(w0, GammaVertex.d(subset("4"))) == 5


def test_degrees(gamma5: GammaGraph) -> None:
    assert gamma5.degree_distribution() == {1: 2, 2: 13, 3: 12, 4: 4}
    for v in gamma5.vertices:
        assert degree(v) == gamma5.adjacency_degree(v)
    assert leaves(5) == frozenset(
        {GammaVertex.c(subset("1")), GammaVertex.d(subset("1"))}
    )


def test_label_edges(gamma5: GammaGraph) -> None:
    assert len(label_edges(gamma5, 4, Half.C)) == 8
    assert len(label_edges(gamma5, 5, Half.D)) == 8
    assert len(label_edges(gamma5, 4, Half.D)) == 0
    for a in (1, 2, 3):
        assert len(label_edges(gamma5, a, Half.C)) == 4
        assert len(label_edges(gamma5, a)) == 8


def test_half_isomorphism(gamma5: GammaGraph) -> None:
    assert half_isomorphism(gamma5)


def test_distances(gamma5: GammaGraph) -> None:
    distances = distances_from(gamma5, GammaVertex.w0(5))
    assert distances[GammaVertex.w0(5)] == 0
    assert distances[GammaVertex.c(subset("4"))] == 1
    for s in all_subsets(5):
        assert distances[GammaVertex.c(s)] <= distance_bound(s)
        assert distances[GammaVertex.d(s)] == distances[GammaVertex.c(s)]


def test_deletion_word() -> None:
    word = deletion_word(subset("2"))
    assert word == (4, 3, 2, 3, 4)
    assert distance_bound(subset("2")) == len(word)
    assert deletion_word(subset("4")) == (4,)
    for s in all_subsets(7):
        path = apply_toggles(s, deletion_word(s))
        assert path[0] == s
        assert path[-1].is_empty()
        assert len(path) == distance_bound(s) + 1


def test_neighbour_toggles() -> None:
    assert neighbour_toggles(subset("2")) == [1, 4]
    assert neighbour_toggles(SubsetIndex(5)) == [4]
    assert neighbour_toggles(subset("1,2,3,4")) == [1, 2, 3, 4]


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_subset_graph(n: int) -> None:
    graph = subset_graph(n)
    assert graph.number_of_nodes() == 2**n
    assert graph.number_of_edges() == subset_edge_count(n)
    for node in graph.nodes:
        if not node.is_empty():
            assert graph.degree(node) == subset_degree(node)


def test_build_gamma_needs_odd_rank() -> None:
    with pytest.raises(InvalidRankError):
        build_gamma(6)
    with pytest.raises(InvalidRankError):
        build_gamma(3)


def test_to_dot(gamma5: GammaGraph) -> None:
    dot = to_dot(gamma5)
    lines = dot.splitlines()
    assert lines[0] == 'graph "Gamma(D5)" {'
    assert lines[1] == "  node [shape=ellipse];"
    assert '  "w0" -- "c_4" [label="s4"];' in lines
    assert '  "w0" -- "d_4" [label="s5"];' in lines
    assert lines[-1] == "}"
    assert sum(1 for line in lines if " -- " in line) == 40


def test_to_json(gamma5: GammaGraph) -> None:
    data = to_json(gamma5)
    assert data["rank"] == 5
    assert len(data["vertices"]) == 31
    assert len(data["edges"]) == 40
    assert data["vertices"][0] == {
        "name": "w0",
        "kind": "w0",
        "subset": [],
        "element": "(-1,-2,-3,-4,5)",
        "degree": 2,
    }
    assert {"source": "w0", "target": "c_4", "label": "s4"} in data["edges"]


D5_DEGREES = {
    "1": 1,
    "2": 2,
    "3": 2,
    "4": 2,
    "1,2": 2,
    "1,3": 2,
    "1,4": 2,
    "2,3": 3,
    "2,4": 3,
    "3,4": 3,
    "1,2,3": 3,
    "1,2,4": 3,
    "1,3,4": 3,
    "2,3,4": 4,
    "1,2,3,4": 4,
}


def test_d5_degree_table(gamma5: GammaGraph) -> None:
    for members, expected in D5_DEGREES.items():
        s = subset(members)
        assert gamma5.adjacency_degree(GammaVertex.c(s)) == expected
        assert gamma5.adjacency_degree(GammaVertex.d(s)) == expected
    assert gamma5.adjacency_degree(GammaVertex.w0(5)) == 2


def test_paths_between_halves_pass_through_w0(gamma5: GammaGraph) -> None:
    w0 = GammaVertex.w0(5)
    from_w0 = distances_from(gamma5, w0)
    for s in all_subsets(5):
        distances = distances_from(gamma5, GammaVertex.c(s))
        for t in all_subsets(5):
            d = GammaVertex.d(t)
            assert distances[d] == distances[w0] + from_w0[d]
