"""
cd-tree model: one skeleton multigraph per cluster, virtual vertices linked to their twins
"""
from typing import Dict, List, Optional, Tuple

from cdplan.models.multigraph import MultiGraph
from cdplan.services.errors import ArgumentError

VIRTUAL_PREFIX = '@'


def virtual_name(neighbor: str) -> str:
    """Id of the virtual vertex that stands for the tree neighbor"""
    return f"{VIRTUAL_PREFIX}{neighbor}"


class CdNode:
    """One cd-tree node: its skeleton and the twin link of every virtual vertex"""

    def __init__(self, name: str, skeleton: MultiGraph, twins: Dict[str, Tuple[str, str]]):
        self.name = name
        self.skeleton = skeleton
        # virtual vertex -> (neighbor node, twin vertex in the neighbor's skeleton)
        self.twins = dict(twins)

    @property
    def virtual_vertices(self) -> List[str]:
        return [v for v in self.skeleton.vertices if v in self.twins]

    @property
    def real_vertices(self) -> List[str]:
        return [v for v in self.skeleton.vertices if v not in self.twins]

    @property
    def neighbors(self) -> List[str]:
        return [self.twins[v][0] for v in self.virtual_vertices]

    def is_virtual(self, vertex: str) -> bool:
        return vertex in self.twins

    def vertex_toward(self, neighbor: str) -> str:
        for v, (node, _) in self.twins.items():
            if node == neighbor:
                return v
        raise ArgumentError(f"Node {self.name} has no tree neighbor {neighbor}")

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'real_vertices': self.real_vertices,
            'virtual': [
                {'vertex': v, 'twin_node': self.twins[v][0], 'twin_vertex': self.twins[v][1],
                 'degree': self.skeleton.degree(v)}
                for v in self.virtual_vertices
            ],
            'edges': [[e, u, v] for e, (u, v) in self.skeleton.edges.items()]
        }

    def __repr__(self):
        return f"CdNode({self.name}, {self.skeleton!r})"


class CdTree:
    """cd-tree of a clustered graph, rooted at one of its nodes.

    Nodes and skeletons are shared between rerooted copies; only the parent
    relation depends on the root.
    """

    def __init__(self, graph: MultiGraph, nodes: Dict[str, CdNode], root: str):
        if root not in nodes:
            raise ArgumentError(f"Unknown cd-tree node: {root}")
        self.graph = graph
        self.nodes = nodes
        self.root = root
        self._parent: Dict[str, Optional[str]] = {root: None}
        self._depth: Dict[str, int] = {root: 0}
        self._preorder: List[str] = []
        stack = [root]
        while stack:
            x = stack.pop()
            self._preorder.append(x)
            for y in reversed(nodes[x].neighbors):
                if y in nodes and y not in self._parent:
                    self._parent[y] = x
                    self._depth[y] = self._depth[x] + 1
                    stack.append(y)

    def __contains__(self, name):
        return name in self.nodes

    def __len__(self):
        return len(self.nodes)

    def node(self, name: str) -> CdNode:
        if name not in self.nodes:
            raise ArgumentError(f"Unknown cd-tree node: {name}")
        return self.nodes[name]

    def skeleton(self, name: str) -> MultiGraph:
        return self.node(name).skeleton

    def parent(self, name: str) -> Optional[str]:
        return self._parent.get(name)

    def children(self, name: str) -> List[str]:
        return [y for y in self.nodes[name].neighbors if self._parent.get(y) == name]

    def depth(self, name: str) -> int:
        return self._depth[name]

    @property
    def preorder(self) -> List[str]:
        return list(self._preorder)

    @property
    def postorder(self) -> List[str]:
        return list(reversed(self._preorder))

    def parent_vertex(self, name: str) -> Optional[str]:
        """Virtual vertex of skel(name) that represents the parent node"""
        parent = self.parent(name)
        return None if parent is None else self.nodes[name].vertex_toward(parent)

    def child_vertex(self, name: str, child: str) -> str:
        return self.nodes[name].vertex_toward(child)

    def twin(self, name: str, vertex: str) -> Tuple[str, str]:
        node = self.node(name)
        if vertex not in node.twins:
            raise ArgumentError(f"{vertex} is not a virtual vertex of {name}")
        return node.twins[vertex]

    def tree_edges(self) -> List[Tuple[str, str]]:
        """(parent, child) pairs in pre-order"""
        return [(self._parent[x], x) for x in self._preorder if self._parent[x] is not None]

    def rerooted(self, name: str) -> 'CdTree':
        return CdTree(self.graph, self.nodes, name)

    def to_dict(self) -> dict:
        nodes = []
        for name in self._preorder:
            data = self.nodes[name].to_dict()
            data['parent'] = self.parent(name)
            data['parent_vertex'] = self.parent_vertex(name)
            data['depth'] = self.depth(name)
            nodes.append(data)
        return {'root': self.root, 'nodes': nodes}

    def __repr__(self):
        return f"CdTree(root={self.root}, nodes={len(self.nodes)})"
