"""
Graph core service: contraction, connectivity and block decomposition of multigraphs
"""
from typing import Dict, FrozenSet, Iterable, List, Mapping, Union

import networkx as nx

from cdplan.models.multigraph import MultiGraph
from cdplan.services.errors import ArgumentError


class BlockDecomposition:
    """Blocks of a multigraph as edge sets, with cutvertices and block incidence"""

    def __init__(self, blocks: List[FrozenSet[str]], block_vertices: List[FrozenSet[str]],
                 cutvertices: FrozenSet[str]):
        self.blocks = blocks
        self.block_vertices = block_vertices
        self.cutvertices = cutvertices
        self.nontrivial = [len(block) > 1 for block in blocks]

        incidence: Dict[str, set] = {}
        for index, vertices in enumerate(block_vertices):
            for v in vertices:
                incidence.setdefault(v, set()).add(index)
        self.incidence: Dict[str, FrozenSet[int]] = {v: frozenset(ix) for v, ix in incidence.items()}

    def blocks_at(self, vertex: str) -> List[int]:
        return sorted(self.incidence.get(vertex, ()))

    def nontrivial_at(self, vertex: str) -> int:
        """Number of non-trivial blocks (not a single bridge) incident to vertex"""
        return sum(1 for i in self.blocks_at(vertex) if self.nontrivial[i])

    def block_of_edge(self, edge_id: str) -> int:
        for index, block in enumerate(self.blocks):
            if edge_id in block:
                return index
        raise ArgumentError(f"Unknown edge: {edge_id}")

    def is_cutvertex(self, vertex: str) -> bool:
        return vertex in self.cutvertices

    def to_dict(self) -> dict:
        return {
            'blocks': [sorted(block) for block in self.blocks],
            'nontrivial': list(self.nontrivial),
            'cutvertices': sorted(self.cutvertices)
        }


def contract(g: MultiGraph, parts: Union[Mapping[str, Iterable[str]], Iterable[Iterable[str]]]) -> MultiGraph:
    """Contract each part into one fresh vertex.

    Edges inside a part disappear, parallel edges survive, edge ids and labels
    are kept. ``parts`` is either a mapping new-name -> vertices or a sequence
    of vertex sets (names ``#0``, ``#1``, ... are generated).
    """
    if isinstance(parts, Mapping):
        named = {name: frozenset(members) for name, members in parts.items()}
    else:
        named = {f"#{i}": frozenset(members) for i, members in enumerate(parts)}

    owner: Dict[str, str] = {}
    for name, members in named.items():
        if not members:
            raise ArgumentError(f"Part {name} is empty")
        for v in members:
            if v not in g:
                raise ArgumentError(f"Part {name} contains unknown vertex {v}")
            if v in owner:
                raise ArgumentError(f"Parts {owner[v]} and {name} overlap in vertex {v}")
            owner[v] = name

    for name, members in named.items():
        if name in g and name not in members:
            raise ArgumentError(f"Contracted vertex name {name} collides with an existing vertex")

    def image(v):
        return owner.get(v, v)

    vertices = list(dict.fromkeys(image(v) for v in g.vertices))
    edges = []
    for e, (u, v) in g.edges.items():
        a, b = image(u), image(v)
        if a != b:
            edges.append((e, a, b))

    provenance = {v: p for v, p in g.provenance.items() if v not in owner}
    for name, members in named.items():
        origin = set()
        for v in members:
            origin |= g.provenance.get(v, {v})
        provenance[name] = frozenset(origin)

    return MultiGraph(vertices, edges, labels=g.labels, provenance=provenance)


def components(g: MultiGraph) -> List[FrozenSet[str]]:
    """Connected components as vertex sets, ordered by first vertex"""
    found = [frozenset(c) for c in nx.connected_components(g.to_simple_networkx())]
    position = {v: i for i, v in enumerate(g.vertices)}
    return sorted(found, key=lambda c: min(position[v] for v in c))


def is_connected(g: MultiGraph) -> bool:
    return len(components(g)) <= 1


def blocks(g: MultiGraph) -> BlockDecomposition:
    """Block-cutvertex decomposition; a bundle of parallel edges is one non-trivial block"""
    simple = g.to_simple_networkx()
    pair_block: Dict[FrozenSet[str], int] = {}
    block_vertices: List[FrozenSet[str]] = []
    for index, block_edges in enumerate(nx.biconnected_component_edges(simple)):
        vertices = set()
        for u, v in block_edges:
            pair_block[frozenset((u, v))] = index
            vertices.update((u, v))
        block_vertices.append(frozenset(vertices))

    members: List[set] = [set() for _ in block_vertices]
    for e, (u, v) in g.edges.items():
        if u == v:
            continue
        members[pair_block[frozenset((u, v))]].add(e)

    cutvertices = frozenset(nx.articulation_points(simple))
    return BlockDecomposition([frozenset(m) for m in members], block_vertices, cutvertices)


def is_cutvertex(g: MultiGraph, vertex: str) -> bool:
    """Removing vertex increases the number of components"""
    if vertex not in g:
        raise ArgumentError(f"Unknown vertex: {vertex}")
    before = len(components(g))
    rest = g.subgraph(v for v in g.vertices if v != vertex)
    after = len(components(rest))
    return after > before - (1 if g.degree(vertex) == 0 else 0)
