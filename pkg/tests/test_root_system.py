import numpy as np
import pytest

from weylrat.root_system import (
    InvalidRankError,
    NonLatticeVectorError,
    Root,
    RootKind,
    adj,
    audit_order,
    coefficient_vector,
    elementary_order_test,
    positive_roots,
    root_from_text,
    root_leq,
    root_leq_closed_form,
    root_table,
    simple_root,
    tau_root,
)


def minus(i: int, j: int) -> Root:
    return Root(RootKind.MINUS, i, j)


def plus(i: int, j: int) -> Root:
    return Root(RootKind.PLUS, i, j)


def test_positive_roots_count_and_order() -> None:
    roots = positive_roots(5)
    assert len(roots) == 20
    assert len(set(roots)) == 20
    assert roots[0] == minus(1, 2)
    assert all(root.kind is RootKind.MINUS for root in roots[:10])
    assert all(root.kind is RootKind.PLUS for root in roots[10:])


def test_rank_below_two_is_rejected() -> None:
    with pytest.raises(InvalidRankError):
        positive_roots(1)


def test_simple_roots() -> None:
    assert simple_root(1, 5) == minus(1, 2)
    assert simple_root(4, 5) == minus(4, 5)
    assert simple_root(5, 5) == plus(4, 5)
    with pytest.raises(ValueError):
        simple_root(6, 5)


def test_root_text_round_trip() -> None:
    root = minus(1, 3)
    assert str(root) == "e1-e3"
    assert str(root.negate()) == "-(e1-e3)"
    assert root_from_text("e1-e3") == root
    assert root_from_text("-(e2+e5)") == plus(2, 5).negate()
    with pytest.raises(ValueError):
        root_from_text("e1-e3)")


def test_invalid_root_indices() -> None:
    with pytest.raises(ValueError):
        Root(RootKind.MINUS, 3, 3)
    with pytest.raises(ValueError):
        Root(RootKind.PLUS, 1, 2, sign=2)


def test_coefficient_vector() -> None:
    assert coefficient_vector(minus(1, 3).coordinates(5), 5).m == (1, 1, 0, 0, 0)
    assert coefficient_vector(plus(4, 5).coordinates(5), 5).m == (0, 0, 0, 0, 1)
    highest = coefficient_vector(plus(1, 2).coordinates(5), 5)
    assert highest.m == (1, 2, 2, 1, 1)
    assert highest.to_coordinates() == plus(1, 2).coordinates(5)


def test_coefficient_vector_rejects_non_lattice_vectors() -> None:
    with pytest.raises(NonLatticeVectorError):
        coefficient_vector((1, 0, 0, 0, 0), 5)


def test_root_order_examples() -> None:
    assert root_leq(minus(1, 2), minus(1, 3), 5)
    assert not root_leq(minus(1, 2), minus(2, 3), 5)
    assert not root_leq(minus(4, 5), plus(4, 5), 5)
    assert not root_leq(plus(4, 5), minus(4, 5), 5)
    assert all(root_leq(root, plus(1, 2), 5) for root in positive_roots(5))


def test_root_order_needs_positive_roots() -> None:
    with pytest.raises(ValueError):
        root_leq(minus(1, 2).negate(), minus(1, 3), 5)


@pytest.mark.parametrize("r", [5, 7])
def test_closed_form_order_matches_coefficients(r: int) -> None:
    audit = audit_order(r)
    assert audit.pairs == (r * (r - 1)) ** 2
    assert audit.disagreements == []


def test_elementary_order_test_agrees_where_it_applies() -> None:
    r = 7
    decided = 0
    for rho in positive_roots(r):
        for eta in positive_roots(r):
            verdict = elementary_order_test(rho, eta, r)
            if verdict is None:
                continue
            decided += 1
            assert verdict == root_leq_closed_form(rho, eta, r)
    assert decided > 0


def test_tau_swaps_spin_simple_roots() -> None:
    assert tau_root(minus(4, 5), 5) == plus(4, 5)
    assert tau_root(plus(4, 5), 5) == minus(4, 5)
    assert tau_root(minus(1, 3), 5) == minus(1, 3)


def test_root_table() -> None:
    table = root_table(5)
    assert table.size == 20
    assert table.leq.shape == (20, 20)
    assert bool(np.all(np.diag(table.leq)))
    assert table.is_leq(minus(2, 3), minus(1, 4))
    assert table.below(simple_root(1, 5)) == frozenset({simple_root(1, 5)})
    assert table.canonical([plus(1, 2), minus(2, 3)]) == (minus(2, 3), plus(1, 2))
    assert root_table(5) is table


def test_adj_is_the_lower_closure() -> None:
    closure = adj([minus(1, 3)], 5)
    assert closure == frozenset({minus(1, 2), minus(2, 3), minus(1, 3)})
    with pytest.raises(ValueError):
        adj([minus(1, 3).negate()], 5)


def test_root_order_is_a_partial_order() -> None:
    roots = positive_roots(5)
    for rho in roots:
        assert root_leq(rho, rho, 5)
        for eta in roots:
            if root_leq(rho, eta, 5) and root_leq(eta, rho, 5):
                assert rho == eta
            if not root_leq(rho, eta, 5):
                continue
            for zeta in roots:
                if root_leq(eta, zeta, 5):
                    assert root_leq(rho, zeta, 5)


def test_adj_is_idempotent_and_monotone() -> None:
    roots = positive_roots(5)
    for rho in roots:
        closure = adj([rho], 5)
        assert rho in closure
        assert adj(closure, 5) == closure
        for eta in roots:
            assert closure <= adj([rho, eta], 5)
            if root_leq(eta, rho, 5):
                assert adj([eta], 5) <= closure
