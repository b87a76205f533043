"""
Unit tests for Phase 5: order-constraints and brute-force constrained planarity
"""
from unittest.mock import patch

import pytest

from cdplan.models.constraints import (
    ConstrainedInstance, ExplicitConstraint, FullConstraint, PQConstraint, PartitionConstraint,
    PartitionedConstraint
)
from cdplan.models.orders import CyclicOrder, all_cyclic_orders
from cdplan.models.pqtree import PQTree
from cdplan.services import pqtree_ops
from cdplan.services.constraints import allows, constrained_planar_bruteforce, equivalent, to_explicit
from cdplan.services.errors import ArgumentError, CapacityError
from cdplan.services.planarity import rotation_is_planar
from tests.builders import complete, graph


def wheel(k):
    rim = [str(i) for i in range(1, k + 1)]
    return graph([('h', x) for x in rim] + [(rim[i], rim[(i + 1) % k]) for i in range(k)])


class TestMembership:
    """Test allows() for every constraint family"""

    def test_partition_forbids_alternation(self):
        c = PartitionConstraint([['a', 'b'], ['c', 'd']])
        assert allows(c, CyclicOrder('abcd'))
        assert allows(c, CyclicOrder('acdb'))
        assert not allows(c, CyclicOrder('acbd'))
        assert not allows(c, CyclicOrder('adbc'))
        assert len(to_explicit(c)) == 4

    def test_single_block_allows_everything(self):
        c = PartitionConstraint([['a', 'b', 'c', 'd']])
        assert all(allows(c, o) for o in all_cyclic_orders('abcd'))

    def test_full(self):
        c = FullConstraint(['a', 'b', 'c'])
        assert allows(c, CyclicOrder('bca'))
        assert not allows(c, CyclicOrder('acb'))
        assert to_explicit(c).orders == frozenset({CyclicOrder('abc')})

    def test_pq_matches_tree(self):
        tree = PQTree.from_text('P(a, b, Q(c, d, e, f))')
        c = PQConstraint(tree)
        expected = pqtree_ops.orders(tree)
        for o in all_cyclic_orders(tree.labels):
            assert allows(c, o) == (o in expected)

    def test_partitioned_with_inner_full(self):
        c = PartitionedConstraint([(['a', 'b'], None), (['c', 'd', 'e'], FullConstraint(['c', 'd', 'e']))])
        explicit = to_explicit(c)
        assert len(explicit) == 6
        for o in explicit.orders:
            assert o.restricted({'c', 'd', 'e'}) == CyclicOrder('cde')

    def test_partitioned_inner_must_cover_block(self):
        with pytest.raises(ArgumentError):
            PartitionedConstraint([(['a', 'b'], FullConstraint(['a', 'c']))])

    def test_ground_mismatch_rejected(self):
        with pytest.raises(ArgumentError):
            allows(PartitionConstraint([['a', 'b'], ['c']]), CyclicOrder('abd'))

    def test_overlapping_blocks_rejected(self):
        with pytest.raises(ArgumentError):
            PartitionConstraint([['a', 'b'], ['b', 'c']])

    def test_explicit_orders_must_cover_ground(self):
        with pytest.raises(ArgumentError):
            ExplicitConstraint(['a', 'b', 'c'], [CyclicOrder('ab')])

    def test_equivalent_across_families(self):
        assert equivalent(PartitionConstraint([['a', 'b', 'c', 'd']]), PQConstraint(pqtree_ops.universal('abcd')))
        assert not equivalent(PartitionConstraint([['a', 'b'], ['c', 'd']]),
                              PQConstraint(pqtree_ops.universal('abcd')))

    @patch('cdplan.services.constraints.setting', return_value=3)
    def test_enumeration_bound(self, mock_setting):
        with pytest.raises(CapacityError) as info:
            to_explicit(PartitionConstraint([['a', 'b'], ['c', 'd']]))
        assert info.value.needed == 4


class TestBruteForce:
    """Test the constrained-planarity decider"""

    def test_unconstrained_k4(self):
        g = complete('1234')
        rotation = constrained_planar_bruteforce(ConstrainedInstance(g))
        assert rotation is not None
        assert rotation_is_planar(g, rotation)

    def test_full_constraint_is_respected(self):
        g = complete('1234')
        order = CyclicOrder(['1-2', '1-4', '1-3'])
        rotation = constrained_planar_bruteforce(ConstrainedInstance(g, {'1': FullConstraint(order)}))
        assert rotation['1'] == order

    def test_unrealizable_hub_order(self):
        g = wheel(4)
        c = FullConstraint(['h-1', 'h-3', 'h-2', 'h-4'])
        assert constrained_planar_bruteforce(ConstrainedInstance(g, {'h': c})) is None

    def test_partition_on_hub(self):
        g = wheel(4)
        ok = PartitionConstraint([['h-1', 'h-2'], ['h-3', 'h-4']])
        assert constrained_planar_bruteforce(ConstrainedInstance(g, {'h': ok})) is not None
        bad = PartitionConstraint([['h-1', 'h-3'], ['h-2', 'h-4']])
        assert constrained_planar_bruteforce(ConstrainedInstance(g, {'h': bad})) is None

    def test_infeasible_marker(self):
        ci = ConstrainedInstance(complete('123'), infeasible=True, reason='empty constraint')
        assert constrained_planar_bruteforce(ci) is None

    def test_stats_are_collected(self):
        stats = {}
        constrained_planar_bruteforce(ConstrainedInstance(complete('1234')), stats)
        assert stats['assignments'] >= 1

    def test_constraint_ground_must_match_incidence(self):
        with pytest.raises(ArgumentError):
            ConstrainedInstance(complete('1234'), {'1': FullConstraint(['1-2', '1-3'])})
