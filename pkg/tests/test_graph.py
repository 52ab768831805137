import numpy as np
import pytest

from phformation.graph import (
    build_tournament_graph,
    custom_graph,
    edge_endpoints,
    incidence_matrix,
    matrix_rank,
    verify_full_column_rank,
)


def test_smallest_tournament():
    graph = build_tournament_graph(2)
    assert graph.edges == ((1, 2),)
    assert graph.edge_count == 1


def test_three_agent_edge_order():
    graph = build_tournament_graph(3)
    assert graph.edges == ((1, 2), (1, 3), (2, 3))


def test_eight_agent_structure():
    graph = build_tournament_graph(8)
    assert graph.edge_count == 28
    assert all(tail == 1 for tail, _ in graph.edges[:7])
    assert [head for _, head in graph.edges[:7]] == list(range(2, 9))


def test_rejects_fewer_than_two_agents():
    with pytest.raises(ValueError):
        build_tournament_graph(1)


def test_incidence_two_agents():
    matrix = incidence_matrix(build_tournament_graph(2))
    assert matrix.entries.tolist() == [[1], [-1]]


def test_incidence_three_agents():
    matrix = incidence_matrix(build_tournament_graph(3))
    assert matrix.entries.tolist() == [[1, 1, 0], [-1, 0, 1], [0, -1, -1]]


def test_incidence_eight_agents_first_block():
    # columns 1..7 stack a row of ones over a negated identity
    matrix = incidence_matrix(build_tournament_graph(8)).entries
    expected = np.vstack([np.ones(7, dtype=np.int64), -np.eye(7, dtype=np.int64)])
    assert np.array_equal(matrix[:, :7], expected)


def test_full_column_rank_only_for_two_agents():
    # Oracle: for N=3 the columns obey c1 - c2 + c3 = 0 exactly, so the
    # matrix cannot have more than two independent columns.  Any incidence
    # column sums to zero, so rank is at most N - 1 in general.
    matrix = incidence_matrix(build_tournament_graph(3)).entries
    dependency = matrix[:, 0] - matrix[:, 1] + matrix[:, 2]
    assert np.array_equal(dependency, np.zeros(3, dtype=np.int64))
    assert matrix_rank(matrix) == 2
    assert not verify_full_column_rank(matrix)
    assert verify_full_column_rank(incidence_matrix(build_tournament_graph(2)))


def test_directed_cycle_is_rank_deficient():
    # head-to-tail orientation: columns sum to the zero vector
    cycle = custom_graph(3, [(1, 2), (2, 3), (3, 1)])
    matrix = incidence_matrix(cycle).entries
    assert np.array_equal(matrix.sum(axis=1), np.zeros(3, dtype=np.int64))
    assert not verify_full_column_rank(matrix)
    assert matrix_rank(matrix) == 2


@pytest.mark.parametrize("count", range(2, 13))
def test_tournament_structure_sweep(count):
    graph = build_tournament_graph(count)
    assert graph.edge_count == count * (count - 1) // 2
    matrix = incidence_matrix(graph).entries
    assert ((matrix == 1).sum(axis=0) == 1).all()
    assert ((matrix == -1).sum(axis=0) == 1).all()
    # agent 1 is always a tail, agent N always a head
    assert matrix[0].sum() == count - 1
    assert matrix[-1].sum() == -(count - 1)
    # every edge ascends, so 1..N is a topological order and the graph is
    # directed-acyclic; the incidence rank is N - 1 as for any connected graph
    assert all(tail < head for tail, head in graph.edges)
    assert matrix_rank(matrix) == count - 1
    assert verify_full_column_rank(matrix) == (count == 2)


def test_unordered_pairs_appear_exactly_once():
    graph = build_tournament_graph(6)
    pairs = {frozenset(edge) for edge in graph.edges}
    assert len(pairs) == graph.edge_count


def test_edge_endpoints():
    graph = build_tournament_graph(3)
    assert edge_endpoints(graph, 1) == (1, 2)
    assert edge_endpoints(graph, 3) == (2, 3)
    assert edge_endpoints(build_tournament_graph(2), 1) == (1, 2)
    with pytest.raises(ValueError):
        edge_endpoints(graph, 0)
    with pytest.raises(ValueError):
        edge_endpoints(graph, 4)


def test_custom_graph_validation():
    with pytest.raises(ValueError):
        custom_graph(3, [(1, 1)])
    with pytest.raises(ValueError):
        custom_graph(3, [(1, 2), (2, 1)])
    with pytest.raises(ValueError):
        custom_graph(3, [(1, 4)])
    with pytest.raises(ValueError):
        custom_graph(3, [])
    graph = custom_graph(4, [(1, 2), (2, 3), (3, 4)])
    assert graph.edge_count == 3
    # a path graph is a tree: full column rank holds
    assert verify_full_column_rank(incidence_matrix(graph))


def test_matrix_rank_validation():
    with pytest.raises(ValueError):
        matrix_rank(np.eye(3), tolerance=0.0)
    with pytest.raises(ValueError):
        matrix_rank(np.ones(3))
    assert matrix_rank(np.zeros((3, 2))) == 0
    assert matrix_rank(np.eye(4)) == 4
