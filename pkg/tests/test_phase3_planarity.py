"""
Unit tests for Phase 3: face tracing, planarity and embedding trees
"""
from unittest.mock import patch

import pytest

from cdplan.models.multigraph import MultiGraph
from cdplan.models.orders import CyclicOrder
from cdplan.services import pqtree_ops
from cdplan.services.errors import ArgumentError, CapacityError, PreconditionError
from cdplan.services.planarity import (
    embedding_tree, find_planar_rotation, is_planar, iter_planar_rotations, order_realizable,
    realizable_orders, rotation_is_planar, search_space, st_ordering
)
from tests.builders import complete, cycle, graph, k33, small_graphs


def wheel(k):
    rim = [str(i) for i in range(1, k + 1)]
    return graph([('h', x) for x in rim] + [(rim[i], rim[(i + 1) % k]) for i in range(k)])


def k2n(n):
    return graph([(end, f"x{i}") for end in ('v', 'y') for i in range(1, n + 1)])


class TestFaceTracing:
    """Test Euler-based planarity of rotation systems"""

    def test_planar_witness_checks_out(self):
        for g in (complete('1234'), wheel(5), cycle('abcde'), k2n(3)):
            rotation = is_planar(g)
            assert rotation is not None
            assert rotation_is_planar(g, rotation)

    def test_k4_has_two_planar_rotations(self):
        rotations = list(iter_planar_rotations(complete('1234')))
        assert len(rotations) == 2
        first, second = rotations
        assert all(second[v] == first[v].reversed() for v in first)

    def test_nonplanar_graphs(self):
        assert is_planar(k33()) is None
        assert is_planar(complete('12345')) is None
        assert find_planar_rotation(k33()) is None

    def test_isolated_vertex(self):
        g = MultiGraph(['a', 'b', 'c'], [('x', 'a', 'b')])
        rotation = {'a': CyclicOrder(['x']), 'b': CyclicOrder(['x']), 'c': CyclicOrder()}
        assert rotation_is_planar(g, rotation)

    def test_parallel_edges(self):
        g = MultiGraph(['u', 'v'], [('x', 'u', 'v'), ('y', 'u', 'v'), ('z', 'u', 'v')])
        rotation = is_planar(g)
        assert rotation is not None
        assert rotation_is_planar(g, rotation)

    def test_partial_rotation_rejected(self):
        g = cycle('abc')
        with pytest.raises(ArgumentError):
            rotation_is_planar(g, {'a': CyclicOrder(['a-b', 'c-a'])})

    def test_search_space_and_stats(self):
        g = complete('1234')
        assert search_space(g) == 16
        stats = {}
        list(iter_planar_rotations(g, stats=stats))
        assert stats['assignments'] == 16

    def test_candidates_restrict_search(self):
        g = complete('1234')
        fixed = is_planar(g)
        found = list(iter_planar_rotations(g, {'1': [fixed['1']]}))
        assert len(found) == 1
        assert found[0]['1'] == fixed['1']

    @patch('cdplan.services.planarity.setting', return_value=10)
    def test_capacity_bound(self, mock_setting):
        with pytest.raises(CapacityError) as info:
            find_planar_rotation(complete('1234'))
        assert info.value.needed == 16
        assert info.value.bound == 10


class TestRealizableOrders:
    """Test wheel probes for vertex rotations"""

    def test_wheel_hub_is_rigid(self):
        g = wheel(5)
        expected = CyclicOrder(['h-1', 'h-2', 'h-3', 'h-4', 'h-5'])
        assert realizable_orders(g, 'h') == {expected, expected.reversed()}

    def test_k2n_is_free(self):
        assert len(realizable_orders(k2n(4), 'v')) == 6

    def test_probe_on_single_order(self):
        g = wheel(4)
        assert order_realizable(g, 'h', CyclicOrder(['h-1', 'h-2', 'h-3', 'h-4']))
        assert not order_realizable(g, 'h', CyclicOrder(['h-1', 'h-3', 'h-2', 'h-4']))


class TestStOrdering:
    """Test st-orderings of biconnected graphs"""

    @pytest.mark.parametrize('g,s,t', [
        (cycle('abcd'), 'a', 'b'),
        (complete('12345'), '1', '5'),
        (wheel(6), '3', 'h'),
        (k2n(3), 'v', 'x2'),
    ])
    def test_st_property(self, g, s, t):
        order = st_ordering(g, s, t)
        assert order[0] == s and order[-1] == t
        assert sorted(order) == sorted(g.vertices)
        position = {u: i for i, u in enumerate(order)}
        for u in order[1:-1]:
            around = [position[w] for w in g.neighbors(u)]
            assert min(around) < position[u] < max(around)

    def test_non_adjacent_rejected(self):
        with pytest.raises(ArgumentError):
            st_ordering(cycle('abcd'), 'a', 'c')


class TestEmbeddingTree:
    """Test embedding trees of non-cutvertices"""

    def test_degree_two_vertex(self):
        tree = embedding_tree(cycle('abcd'), 'a')
        assert tree.labels == frozenset({'a-b', 'd-a'})
        assert len(pqtree_ops.orders(tree)) == 1

    def test_wheel_hub_gives_q_node(self):
        tree = embedding_tree(wheel(5), 'h')
        assert tree.count('Q') == 1
        assert len(pqtree_ops.orders(tree)) == 2

    @pytest.mark.parametrize('g,v', [
        (wheel(4), 'h'),
        (wheel(5), '1'),
        (complete('1234'), '1'),
        (k2n(4), 'v'),
        (cycle('abcde'), 'c'),
    ])
    def test_methods_agree(self, g, v):
        expected = realizable_orders(g, v)
        methods = ('pctree', 'probe') if g.number_of_edges() > 8 else ('pctree', 'enumerate', 'probe')
        for method in methods:
            tree = embedding_tree(g, v, method=method)
            assert pqtree_ops.orders(tree) == expected, method

    def test_preconditions(self):
        bowtie = graph(['a-b', 'b-c', 'c-a', 'c-d', 'd-e', 'e-c'])
        with pytest.raises(PreconditionError):
            embedding_tree(bowtie, 'c')
        with pytest.raises(PreconditionError):
            embedding_tree(complete('12345'), '1')
        with pytest.raises(PreconditionError):
            embedding_tree(MultiGraph(['a', 'b'], []), 'a')
        with pytest.raises(ArgumentError):
            embedding_tree(cycle('abc'), 'a', method='magic')

    def test_enumeration_oracle_edge_limit(self):
        with pytest.raises(CapacityError) as info:
            embedding_tree(wheel(5), '1', method='enumerate')
        assert info.value.needed == 10
        assert info.value.bound == 8


SMALL_FAMILIES = [(3, 7, 3), (4, 7, 2), (5, 7, 1)]


class TestSmallGraphs:
    """Test planarity and embedding trees against exhaustive rotation search"""

    @pytest.mark.parametrize('n,max_edges,multiplicity', SMALL_FAMILIES)
    def test_is_planar_matches_exhaustive_search(self, n, max_edges, multiplicity):
        for g in small_graphs(n, max_edges, multiplicity):
            rotation = is_planar(g)
            assert (rotation is not None) == (find_planar_rotation(g) is not None), g.edges
            if rotation is not None:
                assert rotation_is_planar(g, rotation)

    @pytest.mark.parametrize('g', [k33(), complete('12345')])
    def test_exhaustive_search_rejects_kuratowski_graphs(self, g):
        assert is_planar(g) is None
        assert find_planar_rotation(g) is None

    @pytest.mark.parametrize('n,max_edges,multiplicity', [(3, 6, 3), (4, 8, 2), (5, 8, 1)])
    def test_pctree_matches_projected_rotations(self, n, max_edges, multiplicity):
        checked = 0
        for g in small_graphs(n, max_edges, multiplicity):
            if is_planar(g) is None:
                continue
            rotations = list(iter_planar_rotations(g))
            for v in g.vertices:
                try:
                    tree = embedding_tree(g, v)
                except PreconditionError:
                    continue
                assert pqtree_ops.orders(tree) == {r[v] for r in rotations}, (g.edges, v)
                checked += 1
        assert checked
