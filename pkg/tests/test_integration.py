"""
Integration tests for cdplan
Seeded sweeps comparing the deciders, the reductions and the structural checks
on generated instances. CDPLAN_SWEEP sets the number of seeds per sweep;
CDPLAN_ORACLE_INSTANCES, CDPLAN_VARIANT_INSTANCES and CDPLAN_REROOT_RUNS set
how many compared instances, admissible instances per variant and re-rootings
the counting sweeps must reach.
"""
import os
from itertools import combinations
from unittest.mock import patch

import networkx as nx
import pytest

from cdplan.models.clustered_graph import ClusteredGraph, flat_clustering
from cdplan.services import solver
from cdplan.services.cdtree_builder import build, cut_total, size_c
from cdplan.services.certificate import certify
from cdplan.services.constraints import constrained_planar_bruteforce
from cdplan.services.errors import CapacityError, GeneratorError, PreconditionError
from cdplan.services.generator import GeneratorConfig, generate
from cdplan.services.planarity import is_planar
from cdplan.services.reductions import constrained_to_flat, flat_to_constrained
from tests.builders import complete, cycle, graph

SWEEP = int(os.environ.get('CDPLAN_SWEEP', '30'))
SEEDS = range(SWEEP)
ORACLE_INSTANCES = int(os.environ.get('CDPLAN_ORACLE_INSTANCES', '500'))
VARIANT_INSTANCES = int(os.environ.get('CDPLAN_VARIANT_INSTANCES', '200'))
REROOT_RUNS = int(os.environ.get('CDPLAN_REROOT_RUNS', '1000'))

# naive searches above this many assignments are skipped by the sweeps
ORACLE_BOUND = 20000


def small(seed, **knobs):
    options = {'n': 6, 'clusters': 2, 'extra_edges': 2, 'max_outgoing': 4, 'seed': seed}
    options.update(knobs)
    return generate(GeneratorConfig(**options))


def two_cluster_family(g):
    """Every clustering of g into two disjoint two-vertex clusters"""
    pairs = list(combinations(g.vertices, 2))
    for first, second in combinations(pairs, 2):
        if set(first) & set(second):
            continue
        yield flat_clustering(g, {'K1': first, 'K2': second})


def connected_planar_graphs(max_vertices):
    """Every connected planar graph with 2..max_vertices vertices, up to isomorphism"""
    for atlas_graph in nx.graph_atlas_g():
        n = atlas_graph.number_of_nodes()
        if not 2 <= n <= max_vertices or not nx.is_connected(atlas_graph):
            continue
        g = graph([(str(u), str(v)) for u, v in atlas_graph.edges()], vertices=[str(x) for x in atlas_graph.nodes])
        if is_planar(g) is not None:
            yield g


def small_clusterings(g):
    """One cluster over each vertex subset (size 3 and holding '0' on six vertices), then two-pair clusterings"""
    names = list(g.vertices)
    n = len(names)
    sizes = [3] if n == 6 else range(2, n)
    for size in sizes:
        for members in combinations(names, size):
            if n == 6 and '0' not in members:
                continue
            yield flat_clustering(g, {'K1': members})
    if n <= 5:
        yield from two_cluster_family(g)


def agrees_with_oracle(cg):
    """Exact test against the naive oracle; None when the oracle is over ORACLE_BOUND"""
    try:
        expected = solver.naive_decide(cg).c_planar
    except CapacityError:
        return None
    return solver.test_exact(cg).c_planar == expected


@patch('cdplan.services.solver.setting', return_value=ORACLE_BOUND)
class TestOracleAgreement:
    """Exact test against the naive oracle"""

    @pytest.mark.parametrize('g', [
        cycle('abcdef'),
        complete('1234'),
        graph(['a-x', 'a-y', 'a-z', 'b-x', 'b-y', 'b-z']),
    ])
    def test_exhaustive_two_cluster_family(self, mock_setting, g):
        for cg in two_cluster_family(g):
            assert agrees_with_oracle(cg) is not False, cg.children

    def test_every_connected_graph_up_to_six_vertices(self, mock_setting):
        compared = 0
        for g in connected_planar_graphs(6):
            for cg in small_clusterings(g):
                outcome = agrees_with_oracle(cg)
                assert outcome is not False, (g.edges, cg.children)
                compared += outcome is True
        assert compared >= 500

    def test_random_instances(self, mock_setting):
        compared = 0
        for seed in range(4 * ORACLE_INSTANCES):
            if compared == ORACLE_INSTANCES:
                break
            try:
                cg = small(seed, n=4 + seed % 6, extra_edges=seed % 4)
            except GeneratorError:
                continue
            outcome = agrees_with_oracle(cg)
            assert outcome is not False, seed
            compared += outcome is True
        assert compared == ORACLE_INSTANCES

    @pytest.mark.parametrize('seed', SEEDS)
    def test_connected_agrees_with_exact(self, mock_setting, seed):
        cg = generate(GeneratorConfig(n=8, clusters=3, force_connected=True, seed=seed))
        assert solver.test_connected(cg).c_planar == solver.test_exact(cg).c_planar

    def test_root_invariance(self, mock_setting):
        runs = 0
        for seed in range(REROOT_RUNS):
            if runs >= REROOT_RUNS:
                break
            try:
                cg = small(seed, n=6 + seed % 4, mode='nested', clusters=3)
            except GeneratorError:
                continue
            expected = solver.test_exact(cg).c_planar
            for node in build(cg).nodes:
                assert solver.test_exact(cg, root=node).c_planar == expected, (seed, node)
                runs += 1
        assert runs >= REROOT_RUNS

    @pytest.mark.parametrize('seed', SEEDS)
    def test_witnesses_certify(self, mock_setting, seed):
        cg = small(seed, n=7)
        verdict = solver.test_exact(cg, emit_witness=True)
        if verdict.c_planar:
            assert all(certify(build(cg), verdict.witness).checks.values())


def variant_instance(seed, variant):
    """Generated flat instance shaped for the variant"""
    knobs = {'n': 5 + seed % 3, 'max_size': 3}
    if variant == 'i':
        knobs['edgeless_clusters'] = True
    if variant == 'ii':
        knobs['force_connected'] = True
    cg = small(seed, **knobs)
    if variant == 'iii':
        cg = ClusteredGraph(cg.graph, cg.children, root=cg.root, embedding=is_planar(cg.graph))
    return cg


class TestReductionRoundTrips:
    """Answers survive both reduction directions"""

    @pytest.mark.parametrize('variant', ['i', 'ii', 'iii', 'iv'])
    def test_round_trip(self, variant):
        admitted = 0
        for seed in range(4 * VARIANT_INSTANCES):
            if admitted == VARIANT_INSTANCES:
                break
            try:
                cg = variant_instance(seed, variant)
                ci = flat_to_constrained(cg, variant)
                feasible = constrained_planar_bruteforce(ci) is not None
            except (GeneratorError, PreconditionError, CapacityError):
                continue
            expected = solver.test_exact(cg).c_planar
            assert feasible == expected, seed

            flat = constrained_to_flat(ci, variant)
            if flat.infeasible:
                assert not feasible, seed
            else:
                assert solver.test_exact(flat.clustered).c_planar == feasible, seed
            admitted += 1
        assert admitted == VARIANT_INSTANCES


class TestStructure:
    """Structural claims on every generated instance"""

    @pytest.mark.parametrize('seed', SEEDS)
    @pytest.mark.parametrize('mode', ['flat', 'nested'])
    def test_connectivity_matches_parent_cutvertices(self, seed, mode):
        cg = generate(GeneratorConfig(n=9, mode=mode, clusters=3, extra_edges=4, seed=seed))
        profile = solver.classify(cg)
        assert profile.connectivity_consistent
        assert profile.small_cut_violations == []
        assert profile.separation_violations == []

    @pytest.mark.parametrize('seed', SEEDS)
    def test_flat_size_bound(self, seed):
        cg = generate(GeneratorConfig(n=10, clusters=3, extra_edges=6, seed=seed))
        ct = build(cg)
        edges = cg.graph.number_of_edges()
        assert size_c(ct) == edges + cut_total(ct)
        assert size_c(ct) <= 3 * edges

    @pytest.mark.parametrize('seed', SEEDS)
    def test_nested_size_bound(self, seed):
        cg = generate(GeneratorConfig(n=10, mode='nested', clusters=4, extra_edges=6, seed=seed))
        assert size_c(build(cg)) <= len(cg.graph.vertices) * cg.graph.number_of_edges()
