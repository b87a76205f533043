"""
Unit tests for Phase 7: reductions between flat c-planarity and constrained planarity
"""
import networkx as nx
import pytest

from cdplan.models.clustered_graph import ClusteredGraph
from cdplan.models.constraints import (
    ConstrainedInstance, ConstraintKind, PQConstraint, PartitionConstraint
)
from cdplan.models.multigraph import MultiGraph
from cdplan.services import pqtree_ops, solver
from cdplan.services.constraints import constrained_planar_bruteforce
from cdplan.services.errors import ArgumentError, PreconditionError
from cdplan.services.planarity import is_planar
from cdplan.services.reductions import (
    FlatInstance, constrained_to_flat, flat_to_constrained, reduce_instance, saturate_two_clusters
)
from cdplan.utils.instance_io import to_data
from tests.builders import complete, fixture, graph


def feasible(ci):
    return constrained_planar_bruteforce(ci) is not None


def with_embedding(cg):
    return ClusteredGraph(cg.graph, cg.children, root=cg.root, embedding=is_planar(cg.graph))


class TestFlatToConstrained:
    """Test the reduction to constrained planarity"""

    def test_hexagon_variant_i(self):
        ci = flat_to_constrained(fixture('hexagon.json'), 'i')
        assert sorted(ci.graph.vertices) == ['A', 'B', 'C']
        assert ci.graph.number_of_edges() == 6
        assert len(ci.constraints) == 3
        for c in ci.constraints.values():
            assert c.kind == ConstraintKind.PARTITION
            assert sorted(len(block) for block in c.blocks) == [2, 2]
        assert not feasible(ci)

    def test_path_variant_ii(self):
        ci = flat_to_constrained(fixture('path2clusters.json'), 'ii')
        assert ci.graph.edges == {'b-c': ('X', 'Y')}
        assert all(c.kind == ConstraintKind.PQ for c in ci.constraints.values())
        assert feasible(ci)

    def test_cycle_variant_iii(self):
        ci = flat_to_constrained(with_embedding(fixture('cycle4.json')), 'iii')
        assert ci.constraint('P').kind == ConstraintKind.PARTITIONED
        assert len(ci.constraint('P').blocks) == 2
        assert feasible(ci)

    def test_hexagon_variant_iv(self):
        ci = flat_to_constrained(fixture('hexagon.json'), 'iv')
        assert all(c.kind == ConstraintKind.PARTITIONED for c in ci.constraints.values())
        assert not feasible(ci)

    def test_variant_preconditions(self):
        with pytest.raises(PreconditionError):
            flat_to_constrained(fixture('path2clusters.json'), 'i')
        with pytest.raises(PreconditionError):
            flat_to_constrained(fixture('hexagon.json'), 'ii')
        with pytest.raises(PreconditionError):
            flat_to_constrained(fixture('cycle4.json'), 'iii')

    def test_nested_clusters_rejected(self):
        g = graph(['a-b', 'b-c', 'c-d', 'd-e'])
        cg = ClusteredGraph(g, {'root': ['O', 'e'], 'O': ['I', 'c', 'd'], 'I': ['a', 'b']})
        with pytest.raises(PreconditionError):
            flat_to_constrained(cg, 'iv')

    def test_unknown_variant(self):
        with pytest.raises(ArgumentError):
            flat_to_constrained(fixture('hexagon.json'), 'v')


class TestConstrainedToFlat:
    """Test the reduction back to flat clustered graphs"""

    @pytest.mark.parametrize('name,variant', [
        ('hexagon.json', 'i'),
        ('path2clusters.json', 'ii'),
        ('hexagon.json', 'iv'),
        ('path2clusters.json', 'iv'),
    ])
    def test_round_trip_preserves_answer(self, name, variant):
        cg = fixture(name)
        expected = solver.test_exact(cg).c_planar
        ci = flat_to_constrained(cg, variant)
        assert feasible(ci) == expected
        flat = constrained_to_flat(ci, variant)
        assert not flat.infeasible
        assert flat.clustered.is_flat()
        assert solver.test_exact(flat.clustered).c_planar == expected

    def test_round_trip_with_fixed_embedding(self):
        ci = flat_to_constrained(with_embedding(fixture('cycle4.json')), 'iii')
        flat = constrained_to_flat(ci, 'iii')
        assert flat.embedding is not None
        assert solver.decide(flat.clustered).c_planar

    def test_partition_on_k4(self):
        ci = ConstrainedInstance(complete('1234'), {'1': PartitionConstraint([['1-2'], ['1-3', '1-4']])})
        flat = constrained_to_flat(ci, 'i')
        cg = flat.clustered
        assert cg.children['1#C'] == ('1#b0', '1#b1')
        assert solver.test_exact(cg).c_planar == feasible(ci)

    def test_parallel_edges_keep_their_origin(self):
        g = MultiGraph(['u', 'v', 'w'], [('e1', 'u', 'v'), ('e2', 'u', 'v'), ('e3', 'v', 'w'), ('e4', 'u', 'w')])
        ci = ConstrainedInstance(g, {'w': PartitionConstraint([['e3'], ['e4']])})
        flat = constrained_to_flat(ci, 'i')
        h = flat.clustered.graph
        assert 'e2/m' in h
        assert flat.provenance == {'e2/a': 'e2', 'e2/b': 'e2'}
        assert sorted({flat.edge_origin(e) for e in h.edges}) == ['e1', 'e2', 'e3', 'e4']
        assert to_data(flat)['provenance'] == {'e2/a': 'e2', 'e2/b': 'e2'}
        assert solver.test_exact(flat.clustered).c_planar == feasible(ci)

    def test_pq_constraint_becomes_gadget_cluster(self):
        tree = pqtree_ops.single_q(['1-2', '1-3', '1-4'])
        ci = ConstrainedInstance(complete('1234'), {'1': PQConstraint(tree)})
        cg = constrained_to_flat(ci, 'ii').clustered
        assert '1#C' in cg.children
        assert solver.decide(cg).c_planar

    def test_wrong_family_rejected(self):
        ci = ConstrainedInstance(complete('1234'), {'1': PQConstraint(pqtree_ops.universal(['1-2', '1-3', '1-4']))})
        with pytest.raises(ArgumentError):
            constrained_to_flat(ci, 'i')

    def test_infeasible_marker_passes_through(self):
        ci = ConstrainedInstance(complete('123'), infeasible=True, reason='no order left')
        flat = constrained_to_flat(ci, 'i')
        assert flat.infeasible
        assert flat.to_dict() == {'infeasible': True, 'reason': 'no order left'}


class TestSaturation:
    """Test saturation of two-vertex clusters"""

    def test_hexagon_becomes_k33(self):
        saturated = saturate_two_clusters(fixture('hexagon.json'))
        assert saturated.graph.number_of_edges() == 9
        assert nx.is_isomorphic(saturated.graph.to_simple_networkx(), nx.complete_bipartite_graph(3, 3))
        assert not saturated.proper_clusters()
        assert not solver.decide(saturated).c_planar

    def test_no_pairs_is_identity(self):
        cg = ClusteredGraph.root_only(complete('1234'))
        assert saturate_two_clusters(cg) is cg

    def test_adjacent_pair_adds_no_edge(self):
        saturated = saturate_two_clusters(fixture('path2clusters.json'))
        assert saturated.graph.number_of_edges() == 3
        assert solver.decide(saturated).c_planar


class TestReduceInstance:
    """Test the direction-checked entry point"""

    def test_directions(self):
        assert isinstance(reduce_instance(fixture('hexagon.json'), 'i', 'to-constrained'), ConstrainedInstance)
        ci = flat_to_constrained(fixture('hexagon.json'), 'i')
        assert isinstance(reduce_instance(ci, 'i', 'to-clustered'), FlatInstance)

    def test_kind_mismatch(self):
        with pytest.raises(ArgumentError):
            reduce_instance(fixture('hexagon.json'), 'i', 'to-clustered')
        with pytest.raises(ArgumentError):
            reduce_instance(flat_to_constrained(fixture('hexagon.json'), 'i'), 'i', 'to-constrained')
        with pytest.raises(ArgumentError):
            reduce_instance(fixture('hexagon.json'), 'i', 'sideways')
