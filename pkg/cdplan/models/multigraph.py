"""
Multigraph with stable edge identities
"""
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx

from cdplan.services.errors import ArgumentError


class MultiGraph:
    """Undirected multigraph whose edges are addressed by id, never by endpoint pair.

    Values are treated as immutable: operations return new graphs. Loops are
    rejected unless ``allow_loops`` is set (only certificate graphs use them).
    ``labels`` maps edge ids to the G-edge they stand for; ``provenance`` maps
    contracted vertices to the original vertices they replace.
    """

    def __init__(self, vertices: Iterable[str] = (), edges: Iterable[Tuple[str, str, str]] = (),
                 labels: Optional[Dict[str, str]] = None,
                 provenance: Optional[Dict[str, FrozenSet[str]]] = None,
                 allow_loops: bool = False):
        self.vertices: Tuple[str, ...] = tuple(dict.fromkeys(vertices))
        known = set(self.vertices)
        self.edges: Dict[str, Tuple[str, str]] = {}
        self._incident: Dict[str, List[str]] = {v: [] for v in self.vertices}

        for edge_id, u, v in edges:
            if edge_id in self.edges:
                raise ArgumentError(f"Duplicate edge id: {edge_id}")
            if u not in known or v not in known:
                raise ArgumentError(f"Edge {edge_id} has unknown endpoint ({u}, {v})")
            if u == v and not allow_loops:
                raise ArgumentError(f"Loop at {u} (edge {edge_id}) is not allowed")
            self.edges[edge_id] = (u, v)
            self._incident[u].append(edge_id)
            if u != v:
                self._incident[v].append(edge_id)

        self.labels: Dict[str, str] = {e: (labels or {}).get(e, e) for e in self.edges}
        self.provenance: Dict[str, FrozenSet[str]] = dict(provenance or {})
        self.allow_loops = allow_loops

    def __repr__(self):
        return f"MultiGraph(|V|={len(self.vertices)}, |E|={len(self.edges)})"

    def __contains__(self, vertex):
        return vertex in self._incident

    @property
    def edge_ids(self) -> List[str]:
        return list(self.edges)

    def number_of_edges(self) -> int:
        return len(self.edges)

    def incident(self, vertex: str) -> List[str]:
        """Edge ids incident to vertex, in insertion order"""
        return list(self._incident[vertex])

    def degree(self, vertex: str) -> int:
        return len(self._incident[vertex])

    def endpoints(self, edge_id: str) -> Tuple[str, str]:
        return self.edges[edge_id]

    def other(self, edge_id: str, vertex: str) -> str:
        u, v = self.edges[edge_id]
        return v if vertex == u else u

    def label(self, edge_id: str) -> str:
        return self.labels[edge_id]

    def neighbors(self, vertex: str) -> List[str]:
        return list(dict.fromkeys(self.other(e, vertex) for e in self._incident[vertex]))

    def edges_between(self, u: str, v: str) -> List[str]:
        return [e for e in self._incident[u] if self.other(e, u) == v]

    def is_simple(self) -> bool:
        seen = set()
        for u, v in self.edges.values():
            key = frozenset((u, v))
            if u == v or key in seen:
                return False
            seen.add(key)
        return True

    def triples(self) -> List[Tuple[str, str, str]]:
        return [(e, u, v) for e, (u, v) in self.edges.items()]

    def subgraph(self, vertices: Iterable[str]) -> 'MultiGraph':
        """Induced subgraph, edge ids and labels preserved"""
        keep = set(vertices)
        return MultiGraph(
            [v for v in self.vertices if v in keep],
            [(e, u, v) for e, (u, v) in self.edges.items() if u in keep and v in keep],
            labels=self.labels,
            provenance={v: p for v, p in self.provenance.items() if v in keep},
            allow_loops=self.allow_loops
        )

    def edge_subgraph(self, edge_ids: Iterable[str]) -> 'MultiGraph':
        """Subgraph formed by the given edges and their endpoints"""
        wanted = set(edge_ids)
        chosen = [e for e in self.edges if e in wanted]
        touched = {x for e in chosen for x in self.edges[e]}
        return MultiGraph(
            [v for v in self.vertices if v in touched],
            [(e, *self.edges[e]) for e in chosen],
            labels=self.labels,
            allow_loops=self.allow_loops
        )

    def with_edges(self, extra: Iterable[Tuple[str, str, str]]) -> 'MultiGraph':
        return MultiGraph(self.vertices, self.triples() + list(extra),
                          labels=self.labels, provenance=self.provenance,
                          allow_loops=self.allow_loops)

    def to_networkx(self) -> nx.MultiGraph:
        """networkx view keyed by edge id"""
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices)
        for e, (u, v) in self.edges.items():
            graph.add_edge(u, v, key=e)
        return graph

    def to_simple_networkx(self) -> nx.Graph:
        """Underlying simple graph (parallel edges merged, loops dropped)"""
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from((u, v) for u, v in self.edges.values() if u != v)
        return graph

    def to_dict(self) -> dict:
        return {
            'vertices': list(self.vertices),
            'edges': [[e, u, v] for e, (u, v) in self.edges.items()],
            'labels': {e: l for e, l in self.labels.items() if l != e}
        }
