"""
Solver service: c-planarity deciders over the cd-tree, classification and the naive oracle

test_exact matches twin orders exactly: the twin of a virtual vertex carries
the same cyclic order in the witness, and odd-depth skeletons are read as
mirror images when the embeddings are glued.
"""
from itertools import product
from math import factorial, prod
from typing import Callable, Dict, List, Mapping, Optional, Union

from cdplan.models.cdtree import CdTree, virtual_name
from cdplan.models.clustered_graph import ClusteredGraph
from cdplan.models.constraints import ConstrainedInstance, ExplicitConstraint
from cdplan.models.multigraph import MultiGraph
from cdplan.models.orders import CyclicOrder, RotationSystem, all_cyclic_orders, rotation_from_dict, rotation_to_dict
from cdplan.models.verdict import Algorithm, ClusterProfile, Verdict, Witness
from cdplan.services import pqtree_ops
from cdplan.services.cdtree_builder import build, cut_total, separation_violations, pertinent, reroot, size_c
from cdplan.services.constraints import constrained_planar_bruteforce
from cdplan.services.errors import (
    ArgumentError, CapacityError, CertificationError, PreconditionError, SchemaError, UnsupportedInputError
)
from cdplan.services.graph_core import blocks, components, is_connected
from cdplan.services.planarity import embedding_tree, find_planar_rotation, is_planar, iter_planar_rotations
from cdplan.services.reductions import FlatInstance
from cdplan.utils.context import get_logger, setting

ProgressCallback = Callable[[int, str], None]


def phi_explicit(g: MultiGraph, v: str, child_constraints: Mapping[str, ExplicitConstraint],
                 fixed: Optional[Mapping[str, List[CyclicOrder]]] = None,
                 stats: Optional[dict] = None) -> ExplicitConstraint:
    """Orders at v over planar rotation systems of g that respect the given constraints"""
    if v not in g:
        raise ArgumentError(f"Unknown vertex: {v}")
    if v in child_constraints:
        raise ArgumentError(f"The designated vertex {v} cannot be constrained")
    candidates = {x: list(c.orders) for x, c in child_constraints.items()}
    candidates.update(fixed or {})
    if any(not orders for orders in candidates.values()):
        return ExplicitConstraint(g.incident(v), [])
    found = {rotation[v] for rotation in iter_planar_rotations(g, candidates, stats)}
    return ExplicitConstraint(g.incident(v), found)


def _fixed_orders(ct: CdTree, embedding: Optional[RotationSystem], name: str) -> Dict[str, List[CyclicOrder]]:
    """Single-candidate orders for real vertices under a fixed embedding of G"""
    if embedding is None:
        return {}
    mirrored = ct.depth(name) % 2 == 1
    return {
        v: [embedding[v].reversed() if mirrored else embedding[v]]
        for v in ct.nodes[name].real_vertices
    }


def _report(progress_callback: Optional[ProgressCallback], done: int, total: int, name: str):
    if progress_callback:
        progress_callback(int(100 * done / max(total, 1)), f"Processed cluster {name}")


def _with_cut_size(error: CapacityError, ct: CdTree, name: str) -> CapacityError:
    skeleton = ct.skeleton(name)
    error.cut_size = max((skeleton.degree(x) for x in ct.nodes[name].virtual_vertices), default=0)
    return error


def test_exact(cg: ClusteredGraph, root: Optional[str] = None, emit_witness: bool = False,
               progress_callback: Optional[ProgressCallback] = None) -> Verdict:
    """Bottom-up DP over explicit sets of feasible parent-twin orders"""
    log = get_logger()
    ct = build(cg)
    if root is not None:
        ct = reroot(ct, root)
    embedding = cg.embedding
    stats = {'nodes': 0, 'assignments': 0, 'orders': 0}
    feasible: Dict[str, ExplicitConstraint] = {}
    order = ct.postorder
    root_rotation = None
    c_planar = True
    reason = None

    for done, name in enumerate(order, start=1):
        skeleton = ct.skeleton(name)
        children = {ct.child_vertex(name, c): feasible[c] for c in ct.children(name)}
        fixed = _fixed_orders(ct, embedding, name)
        try:
            if name == ct.root:
                candidates = {x: list(c.orders) for x, c in children.items()}
                candidates.update(fixed)
                root_rotation = find_planar_rotation(skeleton, candidates, stats)
                if root_rotation is None:
                    c_planar = False
                    reason = f"Root skeleton {name} has no planar rotation matching its children"
            else:
                result = phi_explicit(skeleton, ct.parent_vertex(name), children, fixed, stats)
                feasible[name] = result
                stats['orders'] += len(result)
                log.debug(f"Cluster {name}: {len(result)} feasible parent orders")
                if result.is_empty():
                    c_planar = False
                    reason = f"Cluster {name} admits no feasible order at its parent vertex"
        except CapacityError as e:
            log.error(f"Exact test exceeded capacity at {name}: {str(e)}")
            raise _with_cut_size(e, ct, name)
        stats['nodes'] += 1
        _report(progress_callback, done, len(order), name)
        if not c_planar:
            break

    log.info(f"Exact test: {'c-planar' if c_planar else 'not c-planar'} ({stats['nodes']} nodes)")
    if not c_planar or not emit_witness:
        return Verdict(c_planar, Algorithm.EXACT, stats=stats, reason=reason)

    witness = _replay(ct, embedding, feasible, root_rotation)
    return Verdict(True, Algorithm.EXACT, witness=witness, twin_orders=twin_table(ct, witness), stats=stats)


def _replay(ct: CdTree, embedding, feasible: Dict[str, ExplicitConstraint], root_rotation: RotationSystem) -> Witness:
    """Top-down witness reconstruction with the parent's twin order fixed"""
    witness = {ct.root: root_rotation}
    for name in ct.preorder[1:]:
        parent = ct.parent(name)
        target = witness[parent][ct.child_vertex(parent, name)]
        candidates = {ct.child_vertex(name, c): list(feasible[c].orders) for c in ct.children(name)}
        candidates.update(_fixed_orders(ct, embedding, name))
        candidates[ct.parent_vertex(name)] = [target]
        rotation = find_planar_rotation(ct.skeleton(name), candidates)
        if rotation is None:
            raise CertificationError(f"Witness replay failed at cluster {name}", tree_edge=(parent, name))
        witness[name] = rotation
    return witness


def twin_table(ct: CdTree, witness: Witness) -> List[dict]:
    return [
        {'node': child, 'parent': parent, 'order': witness[child][ct.parent_vertex(child)].to_list()}
        for parent, child in ct.tree_edges()
    ]


def _substitute(skeleton: MultiGraph, trees: Mapping[str, tuple]) -> MultiGraph:
    """Replace child virtual vertices by their PQ-tree gadgets (apex removed)"""
    attach: Dict[str, Dict[str, str]] = {}
    vertices = [x for x in skeleton.vertices if x not in trees]
    edges = []
    for x, (tree, prefix) in trees.items():
        gadget, apex, leaf_edges = pqtree_ops.gadget(tree, prefix)
        vertices.extend(y for y in gadget.vertices if y != apex)
        attach[x] = {}
        for label, e in leaf_edges.items():
            attach[x][label] = gadget.other(e, apex)
        edges.extend(t for t in gadget.triples() if apex not in t[1:])

    for e, (u, v) in skeleton.edges.items():
        a = attach[u][e] if u in attach else u
        b = attach[v][e] if v in attach else v
        edges.append((e, a, b))
    return MultiGraph(vertices, edges, labels=skeleton.labels)


def test_connected(cg: ClusteredGraph, root: Optional[str] = None,
                   progress_callback: Optional[ProgressCallback] = None) -> Verdict:
    """Polynomial test for instances whose clusters are all connected.

    Each node passes an embedding tree of its parent vertex upward; the
    parent substitutes it by its gadget.
    """
    log = get_logger()
    if cg.embedding is not None:
        raise PreconditionError("The connected-cluster test does not support fixed embeddings")
    ct = build(cg)
    if root is not None:
        ct = reroot(ct, root)
    for name in ct.preorder[1:]:
        if not is_connected(pertinent(ct, name)):
            log.error(f"Cluster {name} is not connected")
            raise PreconditionError(f"Cluster {name} is not connected")

    stats = {'nodes': 0, 'q_nodes': 0, 'p_nodes': 0}
    trees = {}
    order = ct.postorder
    c_planar = True
    reason = None
    for done, name in enumerate(order, start=1):
        substituted = _substitute(ct.skeleton(name), {
            ct.child_vertex(name, c): (trees[c], virtual_name(c)) for c in ct.children(name)
        })
        stats['nodes'] += 1
        if is_planar(substituted) is None:
            c_planar = False
            reason = f"Skeleton of {name} with child gadgets is not planar"
        elif name != ct.root:
            tree = embedding_tree(substituted, ct.parent_vertex(name))
            trees[name] = tree
            stats['q_nodes'] += tree.count('Q')
            stats['p_nodes'] += tree.count('P')
            log.debug(f"Cluster {name}: embedding tree {tree.to_text()}")
        _report(progress_callback, done, len(order), name)
        if not c_planar:
            break

    log.info(f"Connected test: {'c-planar' if c_planar else 'not c-planar'} ({stats['nodes']} nodes)")
    return Verdict(c_planar, Algorithm.CONNECTED, stats=stats, reason=reason)


def clusters_connected(cg: ClusteredGraph) -> bool:
    g = cg.graph
    return all(is_connected(g.subgraph(cg.vertices_of(c))) for c in cg.proper_clusters())


def decide(cg: ClusteredGraph, algorithm: str = 'auto', emit_witness: bool = False, root: Optional[str] = None,
           progress_callback: Optional[ProgressCallback] = None) -> Verdict:
    """Dispatch to a decider; ``auto`` prefers the connected-cluster test when it applies"""
    if algorithm == 'auto':
        simple = cg.embedding is None and not emit_witness and clusters_connected(cg)
        algorithm = 'connected' if simple else 'exact'
        get_logger().info(f"Dispatching to the {algorithm} test")
    if algorithm == 'connected':
        if emit_witness:
            raise ArgumentError("The connected-cluster test does not produce witnesses")
        return test_connected(cg, root=root, progress_callback=progress_callback)
    if algorithm == 'exact':
        return test_exact(cg, root=root, emit_witness=emit_witness, progress_callback=progress_callback)
    if algorithm == 'naive':
        return naive_decide(cg)
    raise ArgumentError(f"Unknown algorithm: {algorithm}")


def test_auto(cg: ClusteredGraph, progress_callback: Optional[ProgressCallback] = None) -> Verdict:
    return decide(cg, 'auto', progress_callback=progress_callback)


def classify(cg: ClusteredGraph) -> ClusterProfile:
    """Component, block and cut statistics of every cluster and skeleton"""
    g = cg.graph
    ct = build(cg)
    normal = cg.normalized()
    everything = set(g.vertices)
    profile = ClusterProfile()

    for cluster in normal.proper_clusters():
        members = normal.vertices_of(cluster)
        comps = len(components(g.subgraph(members)))
        outgoing = sum(1 for u, v in g.edges.values() if (u in members) != (v in members))
        co = len(components(g.subgraph(everything - members)))
        profile.clusters[cluster] = {'size': len(members), 'components': comps, 'outgoing': outgoing}
        profile.co_clusters[cluster] = co
        profile.all_connected &= comps == 1
        profile.two_components_each &= comps <= 2 and co <= 2
        profile.bounded_outgoing &= outgoing <= 5
    profile.flat = normal.is_flat()

    for name in ct.preorder:
        node = ct.nodes[name]
        decomposition = blocks(node.skeleton)
        profile.max_virtual_per_skeleton = max(profile.max_virtual_per_skeleton, len(node.virtual_vertices))
        for v in node.virtual_vertices:
            key = f"{name}:{v}"
            nontrivial = decomposition.nontrivial_at(v)
            degree = node.skeleton.degree(v)
            profile.virtual_blocks[key] = nontrivial
            profile.virtual_degrees[key] = degree
            profile.max_cut_degree = max(profile.max_cut_degree, degree)
            if nontrivial > 2:
                profile.two_blocks_per_cut = False
                if degree <= 5:
                    profile.small_cut_violations.append(key)
        parent_vertex = ct.parent_vertex(name)
        if parent_vertex is not None and decomposition.is_cutvertex(parent_vertex):
            profile.parent_cutvertex_free = False

    profile.size_c = size_c(ct)
    profile.cut_total = cut_total(ct)
    profile.separation_violations = separation_violations(ct)
    if not profile.connectivity_consistent:
        get_logger().warning("Cluster connectivity and parent cutvertices disagree")
    return profile


def naive_decide(cg: ClusteredGraph) -> Verdict:
    """Independent oracle: search planar embeddings of G with one cycle per cluster boundary.

    Every edge is subdivided where it crosses cluster boundaries; for every
    choice of cyclic order of the crossings of each cluster a ring joins them,
    with the cluster side of every crossing edge kept on the same side of the
    ring. No cd-tree is involved.
    """
    g = cg.graph
    if not g.vertices:
        raise ArgumentError("Cannot decide an empty graph")
    if not is_connected(g):
        raise UnsupportedInputError("Clustered graph is disconnected")
    normal = cg.normalized()
    proper = normal.proper_clusters()
    depth = {normal.root: 0}
    for cluster in normal.clusters[1:]:
        depth[cluster] = depth[normal.parent_of(cluster)] + 1

    crossings = {}
    pieces = {}
    for e, (u, v) in g.edges.items():
        leaving = [c for c in proper if u in normal.vertices_of(c) and v not in normal.vertices_of(c)]
        entering = [c for c in proper if v in normal.vertices_of(c) and u not in normal.vertices_of(c)]
        crossings[e] = sorted(leaving, key=lambda c: -depth[c]) + sorted(entering, key=lambda c: depth[c])
        pieces[e] = [f"{e}|{i}" for i in range(len(crossings[e]) + 1)]
    cuts = {c: [e for e in g.edges if c in crossings[e]] for c in proper}

    bound = setting('BRUTEFORCE_BOUND', 3628800)
    needed = prod(factorial(max(len(cut) - 1, 1)) for cut in cuts.values())
    if cg.embedding is None:
        needed *= prod(factorial(max(g.degree(v) - 1, 1)) for v in g.vertices)
    if needed > bound:
        raise CapacityError(f"Naive search needs {needed} assignments (bound {bound})", needed=needed, bound=bound,
                            cut_size=max((len(cut) for cut in cuts.values()), default=0))

    def end_piece(e, x):
        return pieces[e][0] if g.edges[e][0] == x else pieces[e][-1]

    vertices = list(g.vertices)
    edges = []
    for e, (u, v) in g.edges.items():
        chain = [u] + [f"@x/{c}/{e}" for c in crossings[e]] + [v]
        vertices.extend(chain[1:-1])
        edges.extend((pieces[e][i], chain[i], chain[i + 1]) for i in range(len(chain) - 1))

    real_candidates = {}
    for v in g.vertices:
        if cg.embedding is not None:
            options = [cg.embedding[v]]
        else:
            options = all_cyclic_orders(g.incident(v))
        real_candidates[v] = [CyclicOrder(end_piece(e, v) for e in o) for o in options]

    stats = {'assignments': 0, 'ring_choices': 0}
    for rings in product(*(all_cyclic_orders(cuts[c]) for c in proper)):
        ring_vertices = []
        ring_edges = []
        candidates = dict(real_candidates)
        for cluster, ring in zip(proper, rings):
            seq = list(ring)
            members = normal.vertices_of(cluster)
            for j, e in enumerate(seq):
                mid = f"@m/{cluster}/{j}"
                ring_vertices.append(mid)
                ring_edges.append((f"@r/{cluster}/{j}a", f"@x/{cluster}/{e}", mid))
                ring_edges.append((f"@r/{cluster}/{j}b", mid, f"@x/{cluster}/{seq[(j + 1) % len(seq)]}"))
            for j, e in enumerate(seq):
                i = crossings[e].index(cluster)
                toward_u, toward_v = pieces[e][i], pieces[e][i + 1]
                inside, outside = (toward_u, toward_v) if g.edges[e][0] in members else (toward_v, toward_u)
                candidates[f"@x/{cluster}/{e}"] = [CyclicOrder([
                    f"@r/{cluster}/{j - 1 if j else len(seq) - 1}b", inside, f"@r/{cluster}/{j}a", outside
                ])]
        plus = MultiGraph(vertices + ring_vertices, edges + ring_edges)
        stats['ring_choices'] += 1
        if find_planar_rotation(plus, candidates, stats) is not None:
            get_logger().info("Naive oracle: c-planar")
            return Verdict(True, Algorithm.NAIVE, stats=stats)
    get_logger().info("Naive oracle: not c-planar")
    return Verdict(False, Algorithm.NAIVE, stats=stats)


def witness_to_json(ct: CdTree, witness: Witness) -> dict:
    return {
        'rotations': {name: rotation_to_dict(witness[name]) for name in ct.preorder},
        'twins': twin_table(ct, witness)
    }


def witness_from_json(data) -> Witness:
    """Parse the ``rotations`` table of a witness document"""
    if not isinstance(data, dict) or not isinstance(data.get('rotations'), dict):
        raise SchemaError("Witness must be an object with a 'rotations' object", field='rotations')
    witness = {}
    for name, rotation in data['rotations'].items():
        if not isinstance(rotation, dict) or not all(isinstance(o, list) for o in rotation.values()):
            raise SchemaError("Rotation must map vertices to edge lists", field=f"rotations.{name}")
        try:
            witness[name] = rotation_from_dict(rotation)
        except ArgumentError as e:
            raise SchemaError(str(e), field=f"rotations.{name}")
    return witness


def solve(instance: Union[ClusteredGraph, ConstrainedInstance, FlatInstance], algorithm: str = 'auto', emit_witness: bool = False,
          progress_callback: Optional[ProgressCallback] = None) -> Verdict:
    """Decide a clustered graph, or the feasibility of a constrained instance"""
    if isinstance(instance, FlatInstance):
        if instance.infeasible:
            return Verdict(False, Algorithm.EXACT, reason=instance.reason)
        instance = instance.clustered
    if isinstance(instance, ConstrainedInstance):
        stats = {'assignments': 0}
        rotation = constrained_planar_bruteforce(instance, stats)
        reason = instance.reason if instance.infeasible else None
        if rotation is None and reason is None:
            reason = "No planar rotation system satisfies the constraints"
        return Verdict(rotation is not None, Algorithm.ENUMERATION, stats=stats, reason=reason,
                       rotation=rotation if emit_witness else None)
    return decide(instance, algorithm, emit_witness=emit_witness, progress_callback=progress_callback)


def instance_stats(cg: ClusteredGraph) -> dict:
    """Sizes, cluster profile and the parameters bounding the exact test"""
    data = classify(cg).to_dict()
    data['vertices'] = len(cg.graph.vertices)
    data['edges'] = cg.graph.number_of_edges()
    data['cluster_count'] = len(cg.normalized().proper_clusters())
    return data
