"""
Clustered graph model
Holds a simple connected-or-not graph together with its cluster inclusion tree
"""
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence

from cdplan.models.multigraph import MultiGraph
from cdplan.models.orders import CyclicOrder, RotationSystem, rotation_to_dict
from cdplan.services.errors import ArgumentError


class ClusteredGraph:
    """Graph G plus a rooted inclusion tree whose leaves are exactly the vertices of G.

    ``children`` maps every cluster name (the root included) to the ordered
    tuple of its children; a child is either a vertex name or another cluster
    name. ``embedding`` optionally fixes the rotation system of G.
    """

    def __init__(self, graph: MultiGraph, children: Mapping[str, Sequence[str]], root: str = 'root',
                 embedding: Optional[RotationSystem] = None):
        self.graph = graph
        self.root = root
        self.children: Dict[str, tuple] = {c: tuple(kids) for c, kids in children.items()}
        self.embedding = dict(embedding) if embedding is not None else None
        self._vertex_sets: Dict[str, FrozenSet[str]] = {}
        self._parents: Dict[str, str] = {}
        self._validate()

    @classmethod
    def root_only(cls, graph: MultiGraph, root: str = 'root', embedding=None) -> 'ClusteredGraph':
        return cls(graph, {root: tuple(graph.vertices)}, root=root, embedding=embedding)

    def _validate(self):
        g = self.graph
        if not g.is_simple():
            raise ArgumentError("Clustered graphs need a simple graph")
        for name in list(g.vertices) + list(self.children):
            if not name or name.startswith('@'):
                raise ArgumentError(f"Invalid name {name!r}: names may not be empty or start with '@'")
        clash = set(self.children) & set(g.vertices)
        if clash:
            raise ArgumentError(f"Cluster names collide with vertex names: {sorted(clash)}")
        if self.root not in self.children:
            raise ArgumentError(f"Root cluster {self.root} is not defined")

        seen = set()
        stack = [self.root]
        visited_clusters = {self.root}
        while stack:
            cluster = stack.pop()
            if not self.children[cluster]:
                raise ArgumentError(f"Cluster {cluster} is empty")
            for child in self.children[cluster]:
                if child in self._parents:
                    raise ArgumentError(f"{child} appears in more than one cluster")
                self._parents[child] = cluster
                if child in self.children:
                    if child in visited_clusters:
                        raise ArgumentError(f"Cluster tree has a cycle through {child}")
                    visited_clusters.add(child)
                    stack.append(child)
                elif child in g:
                    seen.add(child)
                else:
                    raise ArgumentError(f"Cluster {cluster} refers to unknown vertex {child}")

        unused = set(self.children) - visited_clusters
        if unused:
            raise ArgumentError(f"Clusters not reachable from the root: {sorted(unused)}")
        missing = set(g.vertices) - seen
        if missing:
            raise ArgumentError(f"Vertices not placed in the cluster tree: {sorted(missing)}")

        if self.embedding is not None:
            for v in g.vertices:
                order = self.embedding.get(v)
                if order is None or order.labels != set(g.incident(v)):
                    raise ArgumentError(f"Embedding is partial at vertex {v}")

    # -- queries ------------------------------------------------------------

    def is_cluster(self, name: str) -> bool:
        return name in self.children

    @property
    def clusters(self) -> List[str]:
        """Cluster names in pre-order, root first"""
        order = []
        stack = [self.root]
        while stack:
            cluster = stack.pop()
            order.append(cluster)
            stack.extend(c for c in reversed(self.children[cluster]) if c in self.children)
        return order

    def parent_of(self, name: str) -> Optional[str]:
        return self._parents.get(name)

    def vertices_of(self, cluster: str) -> FrozenSet[str]:
        if cluster not in self._vertex_sets:
            members = set()
            for child in self.children[cluster]:
                if child in self.children:
                    members |= self.vertices_of(child)
                else:
                    members.add(child)
            self._vertex_sets[cluster] = frozenset(members)
        return self._vertex_sets[cluster]

    def proper_clusters(self) -> List[str]:
        """Clusters that are neither the whole graph nor a single vertex"""
        n = len(self.graph.vertices)
        return [c for c in self.clusters if c != self.root and 2 <= len(self.vertices_of(c)) < n]

    def normalized(self) -> 'ClusteredGraph':
        """Drop single-vertex clusters and clusters spanning all of G"""
        n = len(self.graph.vertices)

        def flatten(cluster) -> List[str]:
            result = []
            for child in self.children[cluster]:
                if child not in self.children:
                    result.append(child)
                elif len(self.vertices_of(child)) == 1:
                    result.extend(self.vertices_of(child))
                elif len(self.vertices_of(child)) == n:
                    result.extend(flatten(child))
                else:
                    result.append(child)
            return result

        children = {}
        stack = [self.root]
        while stack:
            cluster = stack.pop()
            children[cluster] = tuple(flatten(cluster))
            stack.extend(c for c in children[cluster] if c in self.children)
        return ClusteredGraph(self.graph, children, root=self.root, embedding=self.embedding)

    def is_flat(self) -> bool:
        """Every proper cluster is a child of the root and contains no proper cluster"""
        proper = set(self.proper_clusters())
        for cluster in proper:
            below = self._descendant_clusters(cluster)
            if below & proper:
                return False
        return True

    def _descendant_clusters(self, cluster: str) -> set:
        found = set()
        stack = [c for c in self.children[cluster] if c in self.children]
        while stack:
            c = stack.pop()
            found.add(c)
            stack.extend(x for x in self.children[c] if x in self.children)
        return found

    def cluster_tree(self, cluster: Optional[str] = None) -> dict:
        """Nested ``{"name", "children"}`` form of the inclusion tree"""
        cluster = cluster or self.root
        return {
            'name': cluster,
            'children': [self.cluster_tree(c) if c in self.children else c for c in self.children[cluster]]
        }

    def to_dict(self) -> dict:
        data = {
            'vertices': list(self.graph.vertices),
            'edges': [[e, u, v] for e, (u, v) in self.graph.edges.items()],
            'clusters': self.cluster_tree()
        }
        if self.embedding is not None:
            data['embedding'] = rotation_to_dict(self.embedding)
        return data

    def __repr__(self):
        return f"ClusteredGraph(|V|={len(self.graph.vertices)}, clusters={len(self.children) - 1})"


def flat_clustering(graph: MultiGraph, clusters: Mapping[str, Iterable[str]], root: str = 'root',
                    embedding: Optional[Dict[str, CyclicOrder]] = None) -> ClusteredGraph:
    """Flat instance: the given disjoint clusters below the root, all other vertices at the root"""
    clustered = set()
    children = {}
    for name, members in clusters.items():
        wanted = set(members)
        unknown = wanted - set(graph.vertices)
        if unknown:
            raise ArgumentError(f"Cluster {name} refers to unknown vertices {sorted(unknown)}")
        children[name] = tuple(v for v in graph.vertices if v in wanted)
        clustered |= wanted
    top = [v for v in graph.vertices if v not in clustered] + list(clusters)
    children[root] = tuple(top)
    return ClusteredGraph(graph, children, root=root, embedding=embedding)
