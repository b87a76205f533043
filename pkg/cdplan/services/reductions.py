"""
Reduction service: flat c-planarity <-> constrained planarity in four variants,
and saturation of two-vertex clusters

Variants:
    i    clusters of isolated vertices      <-> partition constraints
    ii   connected clusters                 <-> PQ constraints
    iii  fixed embedding of G               <-> partitioned full constraints
    iv   arbitrary flat clusters            <-> partitioned PQ constraints
"""
from collections import Counter
from typing import Dict, List, Optional, Tuple

from cdplan.models.clustered_graph import ClusteredGraph
from cdplan.models.constraints import (
    ConstrainedInstance, FullConstraint, OrderConstraint, PQConstraint, PartitionConstraint,
    PartitionedConstraint
)
from cdplan.models.multigraph import MultiGraph
from cdplan.models.orders import CyclicOrder, RotationSystem
from cdplan.services import pqtree_ops
from cdplan.services.cdtree_builder import build
from cdplan.services.errors import ArgumentError, PreconditionError, UnsupportedInputError
from cdplan.services.graph_core import blocks, is_connected
from cdplan.services.planarity import embedding_tree, is_planar, rotation_is_planar
from cdplan.utils.context import get_logger

VARIANTS = ('i', 'ii', 'iii', 'iv')


class FlatInstance:
    """Result of a reduction to flat c-planarity.

    ``infeasible`` is set when the constraints are already known to be
    unsatisfiable and no clustered graph is emitted. ``provenance`` maps the
    halves of subdivided edges back to the constrained edge they replace.
    """

    def __init__(self, clustered: Optional[ClusteredGraph] = None, infeasible: bool = False,
                 reason: Optional[str] = None, provenance: Optional[Dict[str, str]] = None):
        self.clustered = clustered
        self.infeasible = infeasible
        self.reason = reason
        self.provenance: Dict[str, str] = dict(provenance or {})

    def edge_origin(self, edge_id: str) -> str:
        """Constrained edge id behind an edge of the flat instance"""
        return self.provenance.get(edge_id, edge_id)

    @property
    def embedding(self) -> Optional[RotationSystem]:
        return self.clustered.embedding if self.clustered is not None else None

    def to_dict(self):
        if self.infeasible:
            return {'infeasible': True, 'reason': self.reason}
        data = self.clustered.to_dict()
        if self.provenance:
            data['provenance'] = dict(self.provenance)
        return data


def _check_variant(variant: str):
    if variant not in VARIANTS:
        raise ArgumentError(f"Unknown reduction variant: {variant}")


# -- flat clustered graph -> constrained instance ------------------------------

def _trace_block_order(skeleton: MultiGraph, rotation: RotationSystem, tau: str,
                       block: frozenset) -> Optional[CyclicOrder]:
    """Order of the block's edges at tau induced by the rotations of the other block vertices.

    None when the faces through tau do not close up into a single cyclic order.
    """
    at_tau = [e for e in skeleton.incident(tau) if e in block]
    restricted = {x: rotation[x].restricted(block) for x in skeleton.vertices if x != tau}
    succ = {}
    for f in at_tau:
        e, w = f, skeleton.other(f, tau)
        for _ in range(2 * len(block) + 1):
            if w == tau:
                break
            e = restricted[w].successor(e)
            w = skeleton.other(e, w)
        if w != tau:
            return None
        succ[e] = f
    start = at_tau[0]
    sequence = [start]
    while len(sequence) < len(at_tau):
        nxt = succ[sequence[-1]]
        if nxt in sequence:
            return None
        sequence.append(nxt)
    return CyclicOrder(sequence)


def flat_to_constrained(cg: ClusteredGraph, variant: str,
                        fixed_embedding: Optional[RotationSystem] = None) -> ConstrainedInstance:
    """Constrained multigraph on the root skeleton, one constraint per cluster vertex"""
    _check_variant(variant)
    log = get_logger()
    if not cg.is_flat():
        raise PreconditionError("Reductions need a flat clustered graph")
    fixed_embedding = fixed_embedding if fixed_embedding is not None else cg.embedding
    if variant == 'iii':
        if fixed_embedding is None:
            raise PreconditionError("Variant iii needs a fixed embedding of G")
        if not rotation_is_planar(cg.graph, fixed_embedding):
            raise PreconditionError("The fixed embedding of G is not planar")

    ct = build(cg)
    root = ct.root
    # cluster vertices are named after their clusters
    names = {ct.child_vertex(root, child): child for child in ct.children(root)}
    root_skeleton = ct.skeleton(root)
    graph = MultiGraph([names.get(x, x) for x in root_skeleton.vertices],
                       [(e, names.get(u, u), names.get(v, v)) for e, u, v in root_skeleton.triples()])
    constraints: Dict[str, OrderConstraint] = {}

    def infeasible(reason):
        log.info(f"Reduction {variant}: {reason}")
        return ConstrainedInstance(graph, constraints, infeasible=True, reason=reason)

    for child in ct.children(root):
        skeleton = ct.skeleton(child)
        tau = ct.parent_vertex(child)
        members = [x for x in skeleton.vertices if x != tau]
        inner = cg.graph.subgraph(members)

        if variant == 'i':
            if inner.number_of_edges():
                raise PreconditionError(f"Cluster {child} is not edgeless")
            groups: Dict[str, List[str]] = {}
            for e in skeleton.incident(tau):
                groups.setdefault(skeleton.other(e, tau), []).append(e)
            constraints[child] = PartitionConstraint(groups.values())
            continue

        if variant == 'ii' and not is_connected(inner):
            raise PreconditionError(f"Cluster {child} is not connected")
        if is_planar(skeleton) is None:
            return infeasible(f"Skeleton of cluster {child} is not planar")

        if variant == 'ii':
            constraints[child] = PQConstraint(embedding_tree(skeleton, tau))
            continue

        decomposition = blocks(skeleton)
        pieces = [decomposition.blocks[i] for i in decomposition.blocks_at(tau)]
        if variant == 'iv':
            entries = []
            for block in pieces:
                sub = skeleton.edge_subgraph(block)
                entries.append(([e for e in sub.incident(tau)], PQConstraint(embedding_tree(sub, tau))))
            constraints[child] = PartitionedConstraint(entries)
            continue

        # variant iii: contract the outside of the cluster in the fixed embedding
        rotation = {x: fixed_embedding[x] for x in members}
        traced = [_trace_block_order(skeleton, rotation, tau, block) for block in pieces]
        if None in traced:
            return infeasible(f"Fixed embedding does not contract to a rotation at the boundary of {child}")
        rotation[tau] = CyclicOrder([e for order in traced for e in order])
        if not rotation_is_planar(skeleton, rotation):
            return infeasible(f"Fixed embedding does not induce a planar embedding of cluster {child}")
        constraints[child] = PartitionedConstraint(
            (order.labels, FullConstraint(order.reversed())) for order in traced
        )

    if variant == 'iii':
        for v in ct.nodes[root].real_vertices:
            constraints[v] = FullConstraint(fixed_embedding[v])

    log.info(f"Reduction {variant}: {len(constraints)} constrained vertices on the root skeleton")
    return ConstrainedInstance(graph, constraints)


# -- constrained instance -> flat clustered graph ------------------------------

def _family_error(v: str, variant: str, constraint) -> ArgumentError:
    kind = constraint.kind.value if constraint is not None else 'none'
    return ArgumentError(f"Constraint at {v} ({kind}) does not belong to variant {variant}")


def _check_family(ci: ConstrainedInstance, variant: str):
    for v in ci.graph.vertices:
        c = ci.constraint(v)
        if variant == 'i':
            ok = c is None or isinstance(c, PartitionConstraint)
        elif variant == 'ii':
            ok = c is None or isinstance(c, PQConstraint)
        elif variant == 'iii':
            if c is None:
                ok = ci.graph.degree(v) <= 2
            elif isinstance(c, PartitionedConstraint):
                ok = all(isinstance(inner, FullConstraint) for inner in c.inner)
            else:
                ok = isinstance(c, FullConstraint)
        else:
            ok = c is None or (isinstance(c, PartitionedConstraint)
                               and all(inner is None or isinstance(inner, PQConstraint) for inner in c.inner))
        if not ok:
            raise _family_error(v, variant, c)


def constrained_to_flat(ci: ConstrainedInstance, variant: str) -> FlatInstance:
    """Flat clustered graph (with fixed embedding for iii) equivalent to ci"""
    _check_variant(variant)
    log = get_logger()
    _check_family(ci, variant)
    if ci.infeasible:
        return FlatInstance(infeasible=True, reason=ci.reason)
    g = ci.graph

    vertices: List[str] = []
    edges: List[Tuple[str, str, str]] = []
    attach: Dict[Tuple[str, str], str] = {}
    clusters: Dict[str, List[str]] = {}
    top: List[str] = []
    rotation: Dict[str, List[str]] = {}

    def add_gadget(tree, prefix, owner):
        gadget, apex, leaf_edges = pqtree_ops.gadget(tree, prefix)
        inside = [x for x in gadget.vertices if x != apex]
        vertices.extend(inside)
        edges.extend(t for t in gadget.triples() if apex not in t[1:])
        for label, e in leaf_edges.items():
            attach[(owner, label)] = gadget.other(e, apex)
        return inside

    for v in g.vertices:
        c = ci.constraint(v)
        if c is None or isinstance(c, FullConstraint):
            vertices.append(v)
            top.append(v)
            for e in g.incident(v):
                attach[(v, e)] = v
            if variant == 'iii':
                rotation[v] = list(c.order) if c is not None else list(g.incident(v))
            continue
        name = f"{v}#C"
        if isinstance(c, PartitionConstraint):
            members = []
            for j, block in enumerate(c.blocks):
                b = f"{v}#b{j}"
                members.append(b)
                for e in block:
                    attach[(v, e)] = b
            vertices.extend(members)
            clusters[name] = members
        elif isinstance(c, PQConstraint):
            clusters[name] = add_gadget(c.tree, v, v)
        elif variant == 'iii':
            members = []
            for j, (block, inner) in enumerate(zip(c.blocks, c.inner)):
                b = f"{v}#b{j}"
                members.append(b)
                rotation[b] = list(inner.order)
                for e in block:
                    attach[(v, e)] = b
            vertices.extend(members)
            clusters[name] = members
        else:
            members = []
            for j, (block, inner) in enumerate(zip(c.blocks, c.inner)):
                tree = inner.tree if inner is not None else pqtree_ops.universal(block)
                members.extend(add_gadget(tree, f"{v}#b{j}", v))
            clusters[name] = members

    taken = set(g.vertices)
    for x in vertices:
        if x in g and x not in top:
            raise ArgumentError(f"Generated vertex {x} collides with an input vertex")
    if len(set(vertices)) != len(vertices) or set(clusters) & set(vertices):
        raise ArgumentError("Generated names collide; rename the input vertices")

    # subdivide edges that would become parallel
    pair_count: Counter = Counter()
    renamed: Dict[Tuple[str, str], str] = {}
    provenance: Dict[str, str] = {}
    for e, (u, w) in g.edges.items():
        a, b = attach[(u, e)], attach[(w, e)]
        key = frozenset((a, b))
        pair_count[key] += 1
        if pair_count[key] == 1:
            edges.append((e, a, b))
            renamed[(a, e)] = e
            renamed[(b, e)] = e
        else:
            middle = f"{e}/m"
            if middle in taken:
                raise ArgumentError(f"Subdivision vertex {middle} collides with an input vertex")
            vertices.append(middle)
            top.append(middle)
            edges.append((f"{e}/a", a, middle))
            edges.append((f"{e}/b", middle, b))
            renamed[(a, e)] = f"{e}/a"
            renamed[(b, e)] = f"{e}/b"
            rotation[middle] = [f"{e}/a", f"{e}/b"]
            provenance[f"{e}/a"] = e
            provenance[f"{e}/b"] = e

    h = MultiGraph(vertices, edges)
    if not is_connected(h):
        raise UnsupportedInputError("Reduction produced a disconnected graph")

    root = 'root'
    while root in taken or root in clusters or root in h:
        root = f"_{root}"
    children = {name: tuple(members) for name, members in clusters.items()}
    children[root] = tuple(top) + tuple(clusters)

    embedding = None
    if variant == 'iii':
        embedding = {}
        for x in h.vertices:
            if x in rotation:
                embedding[x] = CyclicOrder(renamed.get((x, e), e) for e in rotation[x])
        if not rotation_is_planar(h, embedding):
            log.info("Reduction iii: prescribed rotations are not jointly planar")
            return FlatInstance(infeasible=True, reason="Prescribed rotations are not jointly planar")

    clustered = ClusteredGraph(h, children, root=root, embedding=embedding)
    log.info(f"Reduction {variant}: flat instance with {len(h.vertices)} vertices and {len(clusters)} clusters")
    return FlatInstance(clustered, provenance=provenance)


def saturate_two_clusters(cg: ClusteredGraph) -> ClusteredGraph:
    """Replace every two-vertex cluster {u, v} by the edge uv"""
    normal = cg.normalized()
    g = normal.graph
    pairs = [c for c in normal.proper_clusters() if len(normal.vertices_of(c)) == 2]
    if not pairs:
        return cg

    dropped = set(pairs)
    extra = []
    ids = set(g.edges)
    for cluster in pairs:
        u, v = sorted(normal.vertices_of(cluster), key=g.vertices.index)
        if g.edges_between(u, v) or any({u, v} == {a, b} for _, a, b in extra):
            continue
        edge_id = f"{u}-{v}"
        while edge_id in ids:
            edge_id = f"{edge_id}'"
        ids.add(edge_id)
        extra.append((edge_id, u, v))

    def spliced(cluster):
        result = []
        for child in normal.children[cluster]:
            if child in dropped:
                result.extend(spliced(child))
            else:
                result.append(child)
        return result

    children = {c: tuple(spliced(c)) for c in normal.children if c not in dropped}
    embedding = normal.embedding if not extra else None
    if normal.embedding is not None and extra:
        get_logger().warning("Saturation added edges; the fixed embedding is dropped")
    get_logger().info(f"Saturated {len(pairs)} two-vertex clusters, added {len(extra)} edges")
    return ClusteredGraph(g.with_edges(extra), children, root=normal.root, embedding=embedding)


DIRECTIONS = ('to-constrained', 'to-clustered')


def reduce_instance(instance, variant: str, direction: str):
    """Apply a reduction in the given direction, checking the instance kind"""
    if direction == 'to-constrained':
        if not isinstance(instance, ClusteredGraph):
            raise ArgumentError("Reducing to a constrained instance needs a clustered graph")
        return flat_to_constrained(instance, variant)
    if direction == 'to-clustered':
        if not isinstance(instance, ConstrainedInstance):
            raise ArgumentError("Reducing to a clustered graph needs a constrained instance")
        return constrained_to_flat(instance, variant)
    raise ArgumentError(f"Unknown reduction direction: {direction}")
