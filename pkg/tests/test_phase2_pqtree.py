"""
Unit tests for Phase 2: PQ-trees, consecutivity reduction and gadgets
"""
from itertools import combinations
from unittest.mock import patch

import pytest

from cdplan.models.orders import CyclicOrder, all_cyclic_orders, is_consecutive
from cdplan.models.pqtree import PQTree
from cdplan.services import pqtree_ops
from cdplan.services.errors import ArgumentError, CapacityError
from cdplan.services.planarity import realizable_orders
from tests.builders import pq_shapes

SMALL_TREES = [
    'P(a, b, c)',
    'Q(a, b, c, d)',
    'P(a, b, c, d)',
    'P(a, b, Q(c, d, e))',
    'Q(a, b, P(c, d), e)',
    'Q(a, b, c, d, e, f)',
    'P(a, P(b, c), P(d, e))',
    'Q(a, P(b, c), d, P(e, f))',
]


class TestPQTreeModel:
    """Test construction, normalization and the text format"""

    def test_universal_orders(self):
        tree = pqtree_ops.universal('abcd')
        assert len(pqtree_ops.orders(tree)) == 6

    def test_single_q_orders(self):
        tree = pqtree_ops.single_q(['a', 'b', 'c', 'd'])
        assert pqtree_ops.orders(tree) == {CyclicOrder('abcd'), CyclicOrder('dcba')}

    def test_ternary_q_node_is_p_node(self):
        tree = pqtree_ops.single_q(['a', 'b', 'c'])
        assert tree.count('Q') == 0
        assert len(pqtree_ops.orders(tree)) == 2

    def test_nested_p_nodes_stay_apart(self):
        nested = PQTree.from_text('P(a, b, P(c, d))')
        assert nested.count('P') == 2
        assert len(pqtree_ops.orders(nested)) == 4
        reduced = pqtree_ops.reduce(pqtree_ops.universal('abcd'), {'c', 'd'})
        assert reduced.count('P') == 2
        assert pqtree_ops.equivalent(reduced, nested)

    def test_text_round_trip(self):
        for text in SMALL_TREES:
            tree = PQTree.from_text(text)
            again = PQTree.from_text(tree.to_text())
            assert pqtree_ops.equivalent(tree, again)

    def test_quoted_labels(self):
        tree = PQTree.from_text('P("a b", c, "P")')
        assert tree.labels == frozenset({'a b', 'c', 'P'})
        assert PQTree.from_text(tree.to_text()).labels == tree.labels

    def test_malformed_text(self):
        for text in ('', 'P(a, b', 'P(a,, b)', 'P(a, a, b)'):
            with pytest.raises(ArgumentError):
                PQTree.from_text(text)

    def test_empty_label_set_rejected(self):
        with pytest.raises(ArgumentError):
            pqtree_ops.universal([])

    @patch('cdplan.services.pqtree_ops.setting', return_value=4)
    def test_enumeration_bound(self, mock_setting):
        tree = pqtree_ops.universal('abcdef')
        with pytest.raises(CapacityError) as info:
            pqtree_ops.orders(tree)
        assert info.value.needed == 6


class TestReduce:
    """Test circular-consecutivity reduction against filtering"""

    def test_reduce_universal(self):
        tree = pqtree_ops.reduce(pqtree_ops.universal('abcd'), {'a', 'b'})
        result = pqtree_ops.orders(tree)
        assert len(result) == 4
        assert all(is_consecutive(o, {'a', 'b'}) for o in result)

    def test_reduce_to_nothing(self):
        assert pqtree_ops.reduce(pqtree_ops.single_q('abcd'), {'a', 'c'}) is None

    def test_unknown_labels_rejected(self):
        with pytest.raises(ArgumentError):
            pqtree_ops.reduce(pqtree_ops.universal('abc'), {'z'})

    def test_reduce_agrees_with_filtering(self):
        for text in SMALL_TREES:
            tree = PQTree.from_text(text)
            everything = pqtree_ops.orders(tree)
            labels = sorted(tree.labels)
            for size in range(1, len(labels) + 1):
                for subset in combinations(labels, size):
                    expected = {o for o in everything if is_consecutive(o, subset)}
                    reduced = pqtree_ops.reduce(tree, subset)
                    got = pqtree_ops.orders(reduced) if reduced is not None else set()
                    assert got == expected, (text, subset)

    def test_replace_consecutive(self):
        tree = PQTree.from_text('Q(a, b, c, d, e)')
        replaced = pqtree_ops.replace_consecutive(tree, {'b', 'c'}, ['x', 'y'])
        assert replaced.labels == frozenset({'a', 'x', 'y', 'd', 'e'})
        for o in pqtree_ops.orders(replaced):
            assert is_consecutive(o, {'x', 'y'})

    def test_replace_non_consecutive_rejected(self):
        with pytest.raises(ArgumentError):
            pqtree_ops.replace_consecutive(pqtree_ops.single_q('abcd'), {'a', 'c'}, ['x'])


class TestMembership:
    """Test permits() and from_orders()"""

    def test_permits_matches_orders(self):
        for text in SMALL_TREES:
            tree = PQTree.from_text(text)
            represented = pqtree_ops.orders(tree)
            for o in all_cyclic_orders(tree.labels):
                assert pqtree_ops.permits(tree, o) == (o in represented), (text, o)

    def test_permits_label_mismatch(self):
        with pytest.raises(ArgumentError):
            pqtree_ops.permits(pqtree_ops.universal('abc'), CyclicOrder('abd'))

    def test_from_orders_recovers_trees(self):
        for text in SMALL_TREES:
            tree = PQTree.from_text(text)
            rebuilt = pqtree_ops.from_orders(pqtree_ops.orders(tree))
            assert rebuilt is not None
            assert pqtree_ops.equivalent(tree, rebuilt)

    def test_from_orders_not_representable(self):
        # one order without its reversal
        assert pqtree_ops.from_orders([CyclicOrder('abcd')]) is None


class TestGadget:
    """Test that gadgets realize exactly the orders of their tree"""

    def test_gadget_structure(self):
        tree = PQTree.from_text('P(a, b, Q(c, d, e, f))')
        gadget, apex, leaf_edges = pqtree_ops.gadget(tree, prefix='g')
        assert apex == 'g#apex'
        assert set(leaf_edges) == {'a', 'b', 'c', 'd', 'e', 'f'}
        assert sorted(gadget.incident(apex)) == ['a', 'b', 'c', 'd', 'e', 'f']

    def test_gadget_round_trip(self):
        for text in SMALL_TREES:
            tree = PQTree.from_text(text)
            gadget, apex, _ = pqtree_ops.gadget(tree)
            assert realizable_orders(gadget, apex) == pqtree_ops.orders(tree), text


class TestAllShapes:
    """Test reduce, permits and gadgets on every tree shape with few leaves"""

    @pytest.mark.parametrize('n', [3, 4, 5, 6, 7])
    def test_reduce_agrees_with_filtering(self, n):
        for text in pq_shapes(n):
            tree = PQTree.from_text(text)
            everything = pqtree_ops.orders(tree)
            labels = sorted(tree.labels)
            for size in range(1, n + 1):
                for subset in combinations(labels, size):
                    expected = {o for o in everything if is_consecutive(o, subset)}
                    reduced = pqtree_ops.reduce(tree, subset)
                    got = pqtree_ops.orders(reduced) if reduced is not None else set()
                    assert got == expected, (text, subset)

    @pytest.mark.parametrize('n', [3, 4, 5, 6, 7])
    def test_permits_exactly_the_members(self, n):
        for text in pq_shapes(n):
            tree = PQTree.from_text(text)
            represented = pqtree_ops.orders(tree)
            for o in all_cyclic_orders(tree.labels):
                assert pqtree_ops.permits(tree, o) == (o in represented), (text, o)

    @pytest.mark.parametrize('n', [3, 4, 5, 6])
    def test_gadget_round_trip(self, n):
        for text in pq_shapes(n):
            tree = PQTree.from_text(text)
            gadget, apex, _ = pqtree_ops.gadget(tree)
            assert realizable_orders(gadget, apex) == pqtree_ops.orders(tree), text

    def test_shape_counts(self):
        assert pq_shapes(3) == ['P(a, b, c)']
        assert sorted(pq_shapes(4)) == ['P(a, b, P(c, d))', 'P(a, b, c, d)', 'Q(a, b, c, d)']
