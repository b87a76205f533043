"""
Certificate service: glue witness skeleton embeddings into the embedded graph G+
"""
from typing import Dict, List, Tuple

import networkx as nx

from cdplan.models.cdtree import CdTree
from cdplan.models.multigraph import MultiGraph
from cdplan.models.verdict import CertificateGraph, Witness
from cdplan.services.errors import CertificationError
from cdplan.services.planarity import ends_planar
from cdplan.utils.context import get_logger


def _subdivision(child: str, edge: str) -> str:
    return f"@sub/{child}/{edge}"


def certify(ct: CdTree, witness: Witness) -> CertificateGraph:
    """Build G+ from a witness and check its four defining properties.

    Skeletons at odd depth are mirrored so that equal twin orders become
    opposite orientations on the two sides of each cut cycle.
    """
    log = get_logger()
    for name in ct.nodes:
        if name not in witness:
            raise CertificationError(f"Witness has no rotation for node {name}")

    # twin orders must agree exactly
    for parent, child in ct.tree_edges():
        above = witness[parent][ct.child_vertex(parent, child)]
        below = witness[child][ct.parent_vertex(child)]
        if above != below:
            log.error(f"Twin orders differ on tree edge {parent}-{child}")
            raise CertificationError(f"Twin orders differ on tree edge {parent}-{child}",
                                     tree_edge=(parent, child))

    def geometric(name, x):
        order = witness[name][x]
        return order.reversed() if ct.depth(name) % 2 else order

    def end_image(name, x, e):
        """G+ vertex standing for skeleton vertex x on edge e of skel(name)"""
        node = ct.nodes[name]
        if not node.is_virtual(x):
            return x
        other = node.twins[x][0]
        child = other if ct.parent(other) == name else name
        return _subdivision(child, e)

    vertices: List[str] = []
    edges: Dict[str, Tuple[str, str]] = {}
    labels: Dict[str, str] = {}
    seg_at: Dict[Tuple[str, str], str] = {}
    segments: Dict[str, List[str]] = {e: [] for e in ct.graph.edges}

    for name in ct.preorder:
        skeleton = ct.skeleton(name)
        vertices.extend(ct.nodes[name].real_vertices)
        for e, (u, v) in skeleton.edges.items():
            inner = not (ct.nodes[name].is_virtual(u) or ct.nodes[name].is_virtual(v))
            seg = e if inner else f"@seg/{name}/{e}"
            edges[seg] = (end_image(name, u, e), end_image(name, v, e))
            labels[seg] = skeleton.label(e)
            seg_at[(name, e)] = seg
            segments[skeleton.label(e)].append(seg)

    def seg_end(name, e, x):
        seg = seg_at[(name, e)]
        u, _ = ct.skeleton(name).edges[e]
        return seg, 0 if u == x else 1

    rotation: Dict[str, List[Tuple[str, int]]] = {}
    for name in ct.preorder:
        for v in ct.nodes[name].real_vertices:
            rotation[v] = [seg_end(name, e, v) for e in geometric(name, v)]

    cycles: Dict[Tuple[str, str], List[str]] = {}
    for parent, child in ct.tree_edges():
        if ct.depth(parent) % 2 == 0:
            even, even_vertex = parent, ct.child_vertex(parent, child)
            odd, odd_vertex = child, ct.parent_vertex(child)
        else:
            even, even_vertex = child, ct.parent_vertex(child)
            odd, odd_vertex = parent, ct.child_vertex(parent, child)
        cut = list(witness[even][even_vertex])
        length = len(cut)
        ring = [f"@cyc/{child}/{j}" for j in range(length)]
        for j, e in enumerate(cut):
            s = _subdivision(child, e)
            vertices.append(s)
            edges[ring[j]] = (s, _subdivision(child, cut[(j + 1) % length]))
            labels[ring[j]] = ring[j]
            rotation[s] = [
                (ring[j - 1], 1),
                seg_end(even, e, even_vertex),
                (ring[j], 0),
                seg_end(odd, e, odd_vertex)
            ]
        cycles[(parent, child)] = ring

    graph = MultiGraph(vertices, [(e, u, v) for e, (u, v) in edges.items()], labels=labels, allow_loops=True)
    certificate = CertificateGraph(graph, rotation, segments, cycles)
    _check(ct, certificate)
    log.info(f"Certificate built: {len(vertices)} vertices, {len(edges)} edges, {len(cycles)} cut cycles")
    return certificate


def _check(ct: CdTree, certificate: CertificateGraph):
    graph = certificate.graph
    checks = certificate.checks

    checks['planar'] = ends_planar(graph.vertices, graph.edges, certificate.rotation)

    paths_ok = True
    for e, (u, v) in ct.graph.edges.items():
        path = nx.MultiGraph()
        path.add_edges_from(graph.edges[seg] for seg in certificate.segments[e])
        degrees = dict(path.degree())
        if (u not in path or v not in path or not nx.is_connected(path)
                or path.number_of_edges() != path.number_of_nodes() - 1
                or degrees[u] != 1 or degrees[v] != 1
                or any(d != 2 for x, d in degrees.items() if x not in (u, v))):
            paths_ok = False
            break
    checks['subdivision'] = paths_ok

    cycles_ok = True
    seen = set()
    disjoint = True
    for (parent, child), ring in certificate.cycles.items():
        cut = ct.skeleton(child).incident(ct.parent_vertex(child))
        expected = {_subdivision(child, e) for e in cut}
        cycle = nx.MultiGraph()
        cycle.add_edges_from(graph.edges[e] for e in ring)
        if (set(cycle.nodes) != expected or not nx.is_connected(cycle)
                or any(d != 2 for _, d in cycle.degree())):
            cycles_ok = False
        if seen & expected:
            disjoint = False
        seen |= expected
    checks['cut_cycles'] = cycles_ok
    checks['disjoint'] = disjoint

    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        get_logger().error(f"Certificate checks failed: {failed}")
        raise CertificationError(f"Certificate checks failed: {', '.join(failed)}")
