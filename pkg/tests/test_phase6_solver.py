"""
Unit tests for Phase 6: c-planarity deciders, certificates and classification
"""
import json
from unittest.mock import patch

import pytest

from cdplan.models.clustered_graph import ClusteredGraph
from cdplan.models.constraints import ConstrainedInstance, ExplicitConstraint, FullConstraint
from cdplan.models.multigraph import MultiGraph
from cdplan.models.orders import CyclicOrder
from cdplan.models.verdict import Algorithm
from cdplan.services import solver
from cdplan.services.cdtree_builder import build, reroot
from cdplan.services.certificate import certify
from cdplan.services.errors import (
    ArgumentError, CapacityError, CertificationError, PreconditionError, SchemaError
)
from cdplan.services.planarity import is_planar
from cdplan.services.reductions import FlatInstance
from tests.builders import complete, cycle, fixture

EXPECTED = [
    ('hexagon.json', False),
    ('path2clusters.json', True),
    ('cycle4.json', True),
    ('rootonly_k4.json', True),
    ('rootonly_k33.json', False),
]


class TestPhiExplicit:
    """Test the constrained-embedding step on single skeletons"""

    def test_parallel_edges_mirror_the_fixed_end(self):
        g = MultiGraph(['u', 'v'], [(f"e{i}", 'u', 'v') for i in range(1, 5)])
        fixed = ExplicitConstraint(g.incident('u'), [CyclicOrder(['e1', 'e2', 'e3', 'e4'])])
        result = solver.phi_explicit(g, 'v', {'u': fixed})
        assert result.orders == {CyclicOrder(['e4', 'e3', 'e2', 'e1'])}

    def test_degree_two_vertex_has_one_order(self):
        result = solver.phi_explicit(cycle('abcd'), 'a', {})
        assert len(result) == 1

    def test_empty_constraint_is_infeasible(self):
        g = cycle('abc')
        result = solver.phi_explicit(g, 'a', {'b': ExplicitConstraint(g.incident('b'), [])})
        assert result.is_empty()

    def test_designated_vertex_cannot_be_constrained(self):
        g = cycle('abc')
        with pytest.raises(ArgumentError):
            solver.phi_explicit(g, 'a', {'a': ExplicitConstraint(g.incident('a'), [])})


class TestVerdicts:
    """Test the deciders on small known instances"""

    @pytest.mark.parametrize('name,expected', EXPECTED)
    def test_exact(self, name, expected):
        assert solver.test_exact(fixture(name)).c_planar == expected

    @pytest.mark.parametrize('name,expected', EXPECTED)
    def test_naive_oracle(self, name, expected):
        verdict = solver.naive_decide(fixture(name))
        assert verdict.c_planar == expected
        assert verdict.algorithm == Algorithm.NAIVE

    @pytest.mark.parametrize('name', ['path2clusters.json', 'rootonly_k4.json', 'rootonly_k33.json'])
    def test_connected_agrees_with_exact(self, name):
        cg = fixture(name)
        assert solver.test_connected(cg).c_planar == solver.test_exact(cg).c_planar

    def test_connected_needs_connected_clusters(self):
        with pytest.raises(PreconditionError):
            solver.test_connected(fixture('hexagon.json'))

    def test_auto_dispatch(self):
        assert solver.decide(fixture('path2clusters.json')).algorithm == Algorithm.CONNECTED
        assert solver.decide(fixture('hexagon.json')).algorithm == Algorithm.EXACT
        witnessed = solver.decide(fixture('path2clusters.json'), emit_witness=True)
        assert witnessed.algorithm == Algorithm.EXACT
        assert witnessed.witness is not None

    def test_auto_reports_progress(self):
        seen = []
        verdict = solver.test_auto(fixture('hexagon.json'), progress_callback=lambda p, m: seen.append(p))
        assert verdict.c_planar is False
        assert verdict.algorithm == Algorithm.EXACT
        assert seen

    def test_bad_algorithm_choices(self):
        with pytest.raises(ArgumentError):
            solver.decide(fixture('path2clusters.json'), 'connected', emit_witness=True)
        with pytest.raises(ArgumentError):
            solver.decide(fixture('path2clusters.json'), 'magic')

    def test_negative_verdict_has_reason(self):
        verdict = solver.test_exact(fixture('rootonly_k33.json'))
        assert not verdict
        assert verdict.reason

    @pytest.mark.parametrize('name,expected', EXPECTED[:3])
    def test_reroot_invariance(self, name, expected):
        cg = fixture(name)
        for node in build(cg).nodes:
            assert solver.test_exact(cg, root=node).c_planar == expected

    def test_progress_reported(self):
        updates = []
        solver.test_exact(fixture('cycle4.json'), progress_callback=lambda p, m: updates.append((p, m)))
        assert len(updates) == 3
        assert updates[-1][0] == 100


class TestFixedEmbedding:
    """Test deciding with the rotation system of G fixed"""

    def test_planar_embedding(self):
        g = complete('1234')
        cg = ClusteredGraph.root_only(g, embedding=is_planar(g))
        verdict = solver.decide(cg)
        assert verdict.c_planar
        assert verdict.algorithm == Algorithm.EXACT

    def test_non_planar_embedding(self):
        g = complete('1234')
        rotation = is_planar(g)
        rotation['1'] = rotation['1'].reversed()
        assert not solver.decide(ClusteredGraph.root_only(g, embedding=rotation)).c_planar

    def test_connected_test_rejects_embedding(self):
        g = complete('1234')
        with pytest.raises(PreconditionError):
            solver.test_connected(ClusteredGraph.root_only(g, embedding=is_planar(g)))


class TestWitness:
    """Test witness reconstruction and certification"""

    @pytest.mark.parametrize('name', ['path2clusters.json', 'cycle4.json', 'rootonly_k4.json'])
    def test_witness_certifies(self, name):
        cg = fixture(name)
        verdict = solver.test_exact(cg, emit_witness=True)
        certificate = certify(build(cg), verdict.witness)
        assert all(certificate.checks.values())

    def test_witness_on_rerooted_tree(self):
        cg = fixture('cycle4.json')
        verdict = solver.test_exact(cg, root='P', emit_witness=True)
        certificate = certify(reroot(build(cg), 'P'), verdict.witness)
        assert len(certificate.cycles) == 2

    def test_twin_orders_match(self):
        cg = fixture('cycle4.json')
        verdict = solver.test_exact(cg, emit_witness=True)
        ct = build(cg)
        for row in verdict.twin_orders:
            above = verdict.witness[row['parent']][ct.child_vertex(row['parent'], row['node'])]
            assert above.to_list() == row['order']

    def test_tampered_witness_rejected(self):
        cg = fixture('cycle4.json')
        witness = solver.test_exact(cg, emit_witness=True).witness
        witness['root']['@P'] = witness['root']['@P'].reversed()
        with pytest.raises(CertificationError) as info:
            certify(build(cg), witness)
        assert info.value.tree_edge == ('root', 'P')

    def test_missing_node_rejected(self):
        cg = fixture('path2clusters.json')
        witness = solver.test_exact(cg, emit_witness=True).witness
        del witness['Y']
        with pytest.raises(CertificationError):
            certify(build(cg), witness)

    def test_json_round_trip(self):
        cg = fixture('cycle4.json')
        ct = build(cg)
        witness = solver.test_exact(cg, emit_witness=True).witness
        data = json.loads(json.dumps(solver.witness_to_json(ct, witness)))
        assert solver.witness_from_json(data) == witness

    def test_malformed_witness_json(self):
        with pytest.raises(SchemaError):
            solver.witness_from_json({'rotations': []})
        with pytest.raises(SchemaError):
            solver.witness_from_json({'rotations': {'root': {'a': 'not a list'}}})


class TestCapacity:
    """Test capacity errors and their cut sizes"""

    @patch('cdplan.services.planarity.setting', return_value=1)
    def test_exact_reports_cut_size(self, mock_setting):
        with pytest.raises(CapacityError) as info:
            solver.test_exact(fixture('hexagon.json'))
        assert info.value.cut_size == 4

    @patch('cdplan.services.solver.setting', return_value=10)
    def test_naive_bound(self, mock_setting):
        with pytest.raises(CapacityError) as info:
            solver.naive_decide(fixture('hexagon.json'))
        assert info.value.needed == 216
        assert info.value.to_dict()['bound'] == 10


class TestClassify:
    """Test the cluster profile"""

    def test_hexagon_profile(self):
        profile = solver.classify(fixture('hexagon.json'))
        assert not profile.all_connected
        assert profile.two_components_each
        assert profile.bounded_outgoing
        assert profile.two_blocks_per_cut
        assert not profile.parent_cutvertex_free
        assert profile.connectivity_consistent
        assert profile.flat
        assert profile.clusters['A'] == {'size': 2, 'components': 2, 'outgoing': 4}
        assert profile.max_cut_degree == 4
        assert profile.max_virtual_per_skeleton == 3

    def test_connected_profile(self):
        profile = solver.classify(fixture('path2clusters.json'))
        assert profile.all_connected
        assert profile.parent_cutvertex_free
        assert profile.separation_violations == []

    def test_instance_stats(self):
        data = solver.instance_stats(fixture('hexagon.json'))
        assert data['vertices'] == 6
        assert data['edges'] == 6
        assert data['cluster_count'] == 3
        assert data['size_c'] == 18
        assert data['twice_cut_total'] == 24
        assert data['parameters'] == {'d': 4, 'k': 3}


class TestSolve:
    """Test the instance-kind dispatcher"""

    def test_constrained_instance(self):
        g = complete('1234')
        order = ['1-2', '1-4', '1-3']
        verdict = solver.solve(ConstrainedInstance(g, {'1': FullConstraint(order)}), emit_witness=True)
        assert verdict.c_planar
        assert verdict.algorithm == Algorithm.ENUMERATION
        assert verdict.to_dict()['rotation']['1'] in (order, ['1-4', '1-3', '1-2'], ['1-3', '1-2', '1-4'])

    def test_infeasible_flat_instance(self):
        verdict = solver.solve(FlatInstance(infeasible=True, reason='empty constraint at v'))
        assert not verdict.c_planar
        assert verdict.reason == 'empty constraint at v'

    def test_flat_instance_unwraps(self):
        assert solver.solve(FlatInstance(fixture('path2clusters.json'))).c_planar
