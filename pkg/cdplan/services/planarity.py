"""
Planarity service: face tracing of rotation systems, planarity testing, the
rotation enumeration engine and embedding trees of non-cutvertices

Face tracing convention: a dart leaves a vertex through one end of an edge;
after arriving at w through edge e, the walk continues with the successor of e
in the rotation of w. A rotation system is planar iff V - E + F = 2C, where an
isolated vertex counts as one face.
"""
from itertools import product
from math import factorial, prod
from typing import Dict, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from cdplan.models.multigraph import MultiGraph
from cdplan.models.orders import CyclicOrder, RotationSystem, all_cyclic_orders
from cdplan.models.pqtree import PQTree
from cdplan.services.errors import ArgumentError, CapacityError, PreconditionError
from cdplan.services.graph_core import blocks, is_cutvertex
from cdplan.services import pqtree_ops
from cdplan.utils.context import get_logger, setting

End = Tuple[Hashable, int]


def count_faces(edges: Mapping[Hashable, Tuple[Hashable, Hashable]],
                rotation: Mapping[Hashable, Sequence[End]]) -> int:
    """Number of faces traced by an end-level rotation (loops allowed)"""
    index: Dict[End, int] = {}
    for i, e in enumerate(edges):
        index[(e, 0)] = 2 * i
        index[(e, 1)] = 2 * i + 1
    succ = [-1] * len(index)
    for v, ends in rotation.items():
        for j, end in enumerate(ends):
            succ[index[end]] = index[ends[(j + 1) % len(ends)]]
    if -1 in succ:
        raise ArgumentError("Rotation does not cover every edge end")
    return _cycles(succ)


def _cycles(succ: List[int]) -> int:
    seen = bytearray(len(succ))
    faces = 0
    for start in range(len(succ)):
        if seen[start]:
            continue
        faces += 1
        x = start
        while not seen[x]:
            seen[x] = 1
            x = succ[x ^ 1]
    return faces


def _euler_target(vertices: Iterable[Hashable], edges: Mapping[Hashable, Tuple[Hashable, Hashable]]) -> int:
    """Face count a planar rotation must reach (isolated vertices excluded)"""
    graph = nx.Graph()
    vertices = list(vertices)
    graph.add_nodes_from(vertices)
    graph.add_edges_from((u, v) for u, v in edges.values() if u != v)
    touched = {x for pair in edges.values() for x in pair}
    isolated = sum(1 for v in vertices if v not in touched)
    c = nx.number_connected_components(graph)
    return 2 * c - len(vertices) + len(edges) - isolated


def ends_planar(vertices: Iterable[Hashable], edges: Mapping[Hashable, Tuple[Hashable, Hashable]],
                rotation: Mapping[Hashable, Sequence[End]]) -> bool:
    """Euler check for an end-level rotation system"""
    vertices = list(vertices)
    for v, ends in rotation.items():
        for e, side in ends:
            if e not in edges or edges[e][side] != v:
                raise ArgumentError(f"End ({e}, {side}) is not incident to {v}")
    return count_faces(edges, rotation) == _euler_target(vertices, edges)


def rotation_ends(g: MultiGraph, rotation: RotationSystem) -> Dict[str, List[End]]:
    ends = {}
    for v in g.vertices:
        ends[v] = [(e, 0 if g.edges[e][0] == v else 1) for e in rotation[v]]
    return ends


def rotation_is_planar(g: MultiGraph, rotation: RotationSystem) -> bool:
    """True iff every component of the embedding satisfies Euler's formula"""
    for v in g.vertices:
        if v not in rotation or rotation[v].labels != set(g.incident(v)):
            raise ArgumentError(f"Rotation system is partial at vertex {v}")
    return ends_planar(g.vertices, g.edges, rotation_ends(g, rotation))


def is_planar(g: MultiGraph) -> Optional[RotationSystem]:
    """Planar witness rotation, or None when g is not planar"""
    planar, embedding = nx.check_planarity(g.to_simple_networkx())
    if not planar:
        return None
    position = {v: i for i, v in enumerate(g.vertices)}
    rotation = {}
    for v in g.vertices:
        seq = []
        if v in embedding and g.degree(v):
            for w in embedding.neighbors_cw_order(v):
                bundle = sorted(g.edges_between(v, w))
                seq.extend(bundle if position[v] < position[w] else reversed(bundle))
        rotation[v] = CyclicOrder(seq)
    return rotation


def _candidate_orders(g: MultiGraph, v: str, candidates: Mapping[str, Iterable[CyclicOrder]], bound: int):
    incident = set(g.incident(v))
    if v in candidates:
        chosen = list(dict.fromkeys(candidates[v]))
        for order in chosen:
            if order.labels != incident:
                raise ArgumentError(f"Candidate order {order} does not match the edges of {v}")
        return chosen
    if len(incident) > 2 and factorial(len(incident) - 1) > bound:
        raise CapacityError(f"Vertex {v} has {factorial(len(incident) - 1)} rotations (bound {bound})",
                            needed=factorial(len(incident) - 1), bound=bound)
    return all_cyclic_orders(incident)


def search_space(g: MultiGraph, candidates: Optional[Mapping[str, Iterable[CyclicOrder]]] = None) -> int:
    """Number of rotation assignments the engine would try"""
    candidates = candidates or {}
    total = 1
    for v in g.vertices:
        if v in candidates:
            total *= len(set(candidates[v]))
        elif g.degree(v) > 2:
            total *= factorial(g.degree(v) - 1)
    return total


def iter_planar_rotations(g: MultiGraph, candidates: Optional[Mapping[str, Iterable[CyclicOrder]]] = None,
                          stats: Optional[dict] = None) -> Iterator[RotationSystem]:
    """Enumerate planar rotation systems, vertices restricted to their candidate orders"""
    candidates = candidates or {}
    bound = setting('BRUTEFORCE_BOUND', 3628800)
    index = {e: i for i, e in enumerate(g.edges)}

    def end(e, v):
        return 2 * index[e] + (0 if g.edges[e][0] == v else 1)

    options = []
    for v in g.vertices:
        choices = []
        for order in _candidate_orders(g, v, candidates, bound):
            seq = [end(e, v) for e in order]
            choices.append((order, [(seq[j], seq[(j + 1) % len(seq)]) for j in range(len(seq))]))
        options.append(choices)

    total = prod(len(choices) for choices in options)
    if total > bound:
        raise CapacityError(f"Rotation search needs {total} assignments (bound {bound})",
                            needed=total, bound=bound)
    if total == 0:
        return

    target = _euler_target(g.vertices, g.edges)
    succ = [0] * (2 * len(g.edges))
    for choice in product(*options):
        for _, pairs in choice:
            for a, b in pairs:
                succ[a] = b
        if stats is not None:
            stats['assignments'] = stats.get('assignments', 0) + 1
        if _cycles(succ) == target:
            yield {v: choice[i][0] for i, v in enumerate(g.vertices)}


def find_planar_rotation(g: MultiGraph, candidates: Optional[Mapping[str, Iterable[CyclicOrder]]] = None,
                         stats: Optional[dict] = None) -> Optional[RotationSystem]:
    return next(iter_planar_rotations(g, candidates, stats), None)


def order_realizable(g: MultiGraph, v: str, order: CyclicOrder) -> bool:
    """Some planar embedding of g has rotation order (or its mirror) at v.

    The vertex is replaced by a wheel whose rim carries its edges in the given
    order; the wheel is rigid, so the probe is a plain planarity test.
    """
    if order.labels != set(g.incident(v)):
        raise ArgumentError(f"Order {order} does not match the edges of {v}")
    simple = g.subgraph(x for x in g.vertices if x != v).to_simple_networkx()
    k = len(order)
    if k >= 3:
        hub = ('wheel-hub', v)
        rim = [('wheel', v, i) for i in range(k)]
        for i, e in enumerate(order):
            simple.add_edge(rim[i], rim[(i + 1) % k])
            simple.add_edge(hub, rim[i])
            simple.add_edge(rim[i], g.other(e, v))
    else:
        simple = g.to_simple_networkx()
    return nx.check_planarity(simple)[0]


def realizable_orders(g: MultiGraph, v: str) -> frozenset:
    """All rotations of v over planar embeddings of g, by wheel probes"""
    bound = setting('ENUMERATION_BOUND', 9)
    if g.degree(v) > bound:
        raise CapacityError(f"Vertex {v} has degree {g.degree(v)} (bound {bound})",
                            needed=g.degree(v), bound=bound)
    return frozenset(o for o in all_cyclic_orders(g.incident(v)) if order_realizable(g, v, o))


def st_ordering(g: MultiGraph, s: str, t: str) -> List[str]:
    """st-ordering of a biconnected graph containing the edge st (DFS + low points)"""
    position = {v: i for i, v in enumerate(g.vertices)}
    adjacency = {u: sorted(g.neighbors(u), key=position.get) for u in g.vertices}
    if t not in adjacency[s]:
        raise ArgumentError(f"{s} and {t} are not adjacent")
    adjacency[s].remove(t)
    adjacency[s].insert(0, t)

    pre = {s: 0}
    parent: Dict[str, Optional[str]] = {s: None}
    low = {s: s}
    preorder = [s]
    stack = [(s, iter(adjacency[s]))]
    while stack:
        u, neighbors = stack[-1]
        advanced = False
        for w in neighbors:
            if w not in pre:
                pre[w] = len(preorder)
                preorder.append(w)
                parent[w] = u
                low[w] = w
                stack.append((w, iter(adjacency[w])))
                advanced = True
                break
            if w != parent[u] and pre[w] < pre[low[u]]:
                low[u] = w
        if not advanced:
            stack.pop()
            p = parent[u]
            if p is not None and pre[low[u]] < pre[low[p]]:
                low[p] = low[u]

    if len(preorder) != len(g.vertices) or preorder[1] != t:
        raise PreconditionError("st-ordering needs a connected graph")

    sign = {s: -1}
    after = {s: t, t: None}
    before = {s: None, t: s}
    for u in preorder[2:]:
        p = parent[u]
        if sign[low[u]] == -1:
            a = before[p]
            before[u], after[u] = a, p
            before[p] = u
            if a is not None:
                after[a] = u
            sign[p] = 1
        else:
            b = after[p]
            before[u], after[u] = p, b
            after[p] = u
            if b is not None:
                before[b] = u
            sign[p] = -1

    order = []
    x = s
    while x is not None:
        order.append(x)
        x = after[x]
    return order


def embedding_tree(g: MultiGraph, v: str, method: str = 'pctree') -> PQTree:
    """PQ-tree of the rotations of the non-cutvertex v over all planar embeddings of g.

    ``pctree`` runs vertex addition along an st-ordering that ends in v;
    ``enumerate`` projects all planar rotation systems (small graphs only);
    ``probe`` tests every cyclic order with a wheel probe.
    """
    if v not in g:
        raise ArgumentError(f"Unknown vertex: {v}")
    if g.degree(v) == 0:
        raise PreconditionError(f"Vertex {v} has no incident edges")
    if is_planar(g) is None:
        raise PreconditionError("Embedding trees need a planar graph")
    if is_cutvertex(g, v):
        raise PreconditionError(f"Vertex {v} is a cutvertex")

    if method == 'enumerate':
        limit = setting('EMBEDDING_TREE_ORACLE_EDGES', 8)
        if g.number_of_edges() > limit:
            raise CapacityError(f"Enumeration oracle limited to {limit} edges, graph has {g.number_of_edges()}",
                                needed=g.number_of_edges(), bound=limit)
        projected = {rotation[v] for rotation in iter_planar_rotations(g)}
        tree = pqtree_ops.from_orders(projected)
    elif method == 'probe':
        tree = pqtree_ops.from_orders(realizable_orders(g, v))
    elif method == 'pctree':
        tree = _vertex_addition(g, v)
    else:
        raise ArgumentError(f"Unknown embedding tree method: {method}")

    if tree is None:
        raise PreconditionError(f"Rotations at {v} are not PQ-representable")
    return tree


def _vertex_addition(g: MultiGraph, v: str) -> PQTree:
    decomposition = blocks(g)
    index = decomposition.block_of_edge(g.incident(v)[0])
    block = g.edge_subgraph(decomposition.blocks[index])
    if len(block.vertices) == 2:
        return pqtree_ops.universal(g.incident(v))

    s = block.neighbors(v)[0]
    order = st_ordering(block, s, v)
    position = {u: i for i, u in enumerate(order)}
    tree = pqtree_ops.universal(block.incident(s))
    for u in order[1:-1]:
        incoming = [e for e in block.incident(u) if position[block.other(e, u)] < position[u]]
        outgoing = [e for e in block.incident(u) if position[block.other(e, u)] > position[u]]
        reduced = pqtree_ops.reduce(tree, incoming)
        if reduced is None:
            raise PreconditionError("Vertex addition failed: graph is not planar")
        tree = pqtree_ops.replace_consecutive(reduced, incoming, outgoing)
    get_logger().debug(f"Embedding tree at {v}: {tree.to_text()}")
    return tree
