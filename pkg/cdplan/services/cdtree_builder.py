"""
cd-tree service: construction from a clustered graph, validation, expansion
and pertinent graphs, size accounting and rerooting
"""
from collections import Counter
from typing import FrozenSet, List

from cdplan.models.cdtree import CdNode, CdTree, virtual_name
from cdplan.models.clustered_graph import ClusteredGraph
from cdplan.models.multigraph import MultiGraph
from cdplan.services.errors import ArgumentError, UnsupportedInputError
from cdplan.services.graph_core import blocks, components, contract, is_connected
from cdplan.utils.context import get_logger


def build(cg: ClusteredGraph) -> CdTree:
    """Contract the vertex sets behind every tree edge of the (normalized) inclusion tree.

    Single-vertex clusters are absorbed, so every vertex of G is a real vertex
    of exactly one skeleton.
    """
    g = cg.graph
    if not g.vertices:
        raise ArgumentError("Cannot build a cd-tree of an empty graph")
    if not is_connected(g):
        raise UnsupportedInputError("Clustered graph is disconnected")

    normal = cg.normalized()
    everything = set(g.vertices)
    nodes = {}
    for cluster in normal.clusters:
        parts = {}
        twins = {}
        parent = normal.parent_of(cluster)
        if parent is not None:
            parts[virtual_name(parent)] = everything - normal.vertices_of(cluster)
            twins[virtual_name(parent)] = (parent, virtual_name(cluster))
        for child in normal.children[cluster]:
            if normal.is_cluster(child):
                parts[virtual_name(child)] = normal.vertices_of(child)
                twins[virtual_name(child)] = (child, virtual_name(cluster))
        nodes[cluster] = CdNode(cluster, contract(g, parts), twins)

    ct = CdTree(g, nodes, normal.root)
    get_logger().info(f"Built cd-tree with {len(nodes)} nodes, size_c={size_c(ct)}")
    return ct


def side_vertices(ct: CdTree, node: str, vertex: str) -> FrozenSet[str]:
    """Vertices of G that are real in the subtree behind a virtual vertex"""
    start, _ = ct.twin(node, vertex)
    found = set()
    seen = {node, start}
    stack = [start]
    while stack:
        x = stack.pop()
        found.update(ct.nodes[x].real_vertices)
        for y in ct.nodes[x].neighbors:
            if y in ct.nodes and y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(found)


def expansion(ct: CdTree, node: str, vertex: str) -> MultiGraph:
    """Subgraph of G represented by a virtual vertex"""
    if not ct.node(node).is_virtual(vertex):
        raise ArgumentError(f"{vertex} is not a virtual vertex of {node}")
    return ct.graph.subgraph(side_vertices(ct, node, vertex))


def pertinent(ct: CdTree, node: str) -> MultiGraph:
    """Cluster represented by node in the rooted cd-tree; G itself at the root"""
    parent = ct.parent(node)
    if parent is None:
        ct.node(node)
        return ct.graph
    return expansion(ct, parent, ct.child_vertex(parent, node))


def size_c(ct: CdTree) -> int:
    """Total number of skeleton edges"""
    return sum(n.skeleton.number_of_edges() for n in ct.nodes.values())


def cut_total(ct: CdTree) -> int:
    """Total number of edges crossing the cuts of all tree edges"""
    return sum(ct.skeleton(child).degree(ct.parent_vertex(child)) for _, child in ct.tree_edges())


def reroot(ct: CdTree, node: str) -> CdTree:
    rerooted = ct.rerooted(node)
    get_logger().debug(f"Rerooted cd-tree at {node}")
    return rerooted


def validate(ct: CdTree) -> List[str]:
    """Every violated cd-tree invariant, as human-readable diagnostics"""
    report = []
    g = ct.graph

    for name, node in ct.nodes.items():
        for v, (other, w) in node.twins.items():
            if v not in node.skeleton:
                report.append(f"Virtual vertex {name}:{v} is missing from its skeleton")
                continue
            if other not in ct.nodes:
                report.append(f"Virtual vertex {name}:{v} points to unknown node {other}")
                continue
            back = ct.nodes[other].twins.get(w)
            if back != (name, v):
                report.append(f"Twin link of {name}:{v} is not an involution: twin of {other}:{w} is {back}")
                continue
            if w not in ct.nodes[other].skeleton:
                continue
            here = Counter(node.skeleton.label(e) for e in node.skeleton.incident(v))
            there = Counter(ct.nodes[other].skeleton.label(e) for e in ct.nodes[other].skeleton.incident(w))
            if here != there:
                report.append(f"Edge label multisets of {name}:{v} and {other}:{w} differ")

    links = sum(len(n.twins) for n in ct.nodes.values())
    if links != 2 * (len(ct.nodes) - 1) or len(ct.preorder) != len(ct.nodes):
        report.append("Tree links do not form a tree over all nodes")
        return report

    placement = Counter(v for n in ct.nodes.values() for v in n.real_vertices)
    for v in g.vertices:
        if placement[v] != 1:
            report.append(f"Vertex {v} is real in {placement[v]} skeletons")
    for v in placement:
        if v not in g:
            report.append(f"Skeleton vertex {v} is neither virtual nor a vertex of G")

    present = {n.skeleton.label(e) for n in ct.nodes.values() for e in n.skeleton.edges}
    for e in g.edges:
        if e not in present:
            report.append(f"Edge {e} of G appears in no skeleton")

    for parent, child in ct.tree_edges():
        v = ct.parent_vertex(child)
        behind = side_vertices(ct, child, v)
        crossing = {e for e, (a, b) in g.edges.items() if (a in behind) != (b in behind)}
        labels = {ct.skeleton(child).label(e) for e in ct.skeleton(child).incident(v)}
        if labels != crossing:
            report.append(f"Edges at {child}:{v} are not the cut of tree edge {parent}-{child}")

    if is_connected(g):
        for name, node in ct.nodes.items():
            if not is_connected(node.skeleton):
                report.append(f"Skeleton of {name} is disconnected")

    for line in report:
        get_logger().debug(f"cd-tree validation: {line}")
    return report


def separation_violations(ct: CdTree) -> List[str]:
    """Check that blocks separated at a virtual cutvertex stay separated in G.

    When a virtual vertex v is a cutvertex of its skeleton, the expansions of
    skeleton parts in different components of skel - v must lie in different
    components of the expansion of twin(v).
    """
    problems = []
    for name, node in ct.nodes.items():
        skeleton = node.skeleton
        decomposition = blocks(skeleton)
        for v in node.virtual_vertices:
            if not decomposition.is_cutvertex(v):
                continue
            other, w = node.twins[v]
            beyond = expansion(ct, other, w)
            owner = {}
            for index, comp in enumerate(components(beyond)):
                for x in comp:
                    owner[x] = index
            rest = skeleton.subgraph(x for x in skeleton.vertices if x != v)
            seen = {}
            for index, part in enumerate(components(rest)):
                touched = set()
                for x in part:
                    members = side_vertices(ct, name, x) if node.is_virtual(x) else {x}
                    touched.update(owner[y] for y in members)
                for comp in touched:
                    if comp in seen and seen[comp] != index:
                        problems.append(f"Parts of skel({name}) - {v} share a component of the expansion of {other}:{w}")
                    seen[comp] = index
    return problems
