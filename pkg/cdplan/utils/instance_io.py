"""
Instance file codec

Format 1 (JSON)::

    {
      "format": 1,
      "kind": "clustered" | "constrained",
      "vertices": ["a", "b", ...],
      "edges": [["a", "b"], ["e7", "b", "c"], ...],
      "clusters": {"name": "root", "children": ["a", {"name": "C1", "children": ["b", "c"]}]},
      "embedding": {"a": ["a-b", ...], ...},
      "constraints": {"a": {"type": "partition", "blocks": [["a-b"], ["e9"]]}, ...},
      "infeasible": false,
      "reason": null
    }

A two-element edge [u, v] gets the id "u-v". ``clusters`` and ``embedding`` belong
to clustered instances (a missing cluster tree means every vertex sits at the
root); ``constraints``, ``infeasible`` and ``reason`` to constrained ones.
"""
import json
from typing import Dict, List, Optional, Tuple, Union

from cdplan.models.clustered_graph import ClusteredGraph
from cdplan.models.constraints import (
    ConstrainedInstance, ExplicitConstraint, FullConstraint, OrderConstraint, PQConstraint,
    PartitionConstraint, PartitionedConstraint
)
from cdplan.models.multigraph import MultiGraph
from cdplan.models.orders import CyclicOrder, rotation_to_dict
from cdplan.models.pqtree import PQTree
from cdplan.services.errors import ArgumentError, SchemaError
from cdplan.services.reductions import FlatInstance

FORMAT_VERSION = 1
KINDS = ('clustered', 'constrained')

Instance = Union[ClusteredGraph, ConstrainedInstance]
Document = Union[ClusteredGraph, ConstrainedInstance, FlatInstance]


def locate(text: Optional[str], token, occurrence: int = 1, after: Optional[str] = None) -> Optional[int]:
    """1-based line of the n-th occurrence of a JSON-encoded token, optionally past a key"""
    if not text:
        return None
    needle = json.dumps(token)
    position = text.find(json.dumps(after)) if after is not None else -1
    for _ in range(occurrence):
        position = text.find(needle, position + 1)
        if position < 0:
            return None
    return text.count('\n', 0, position) + 1


class _Reader:
    """Walks a decoded document, raising SchemaError with field path and source line"""

    def __init__(self, data, text: Optional[str] = None):
        self.data = data
        self.text = text

    def fail(self, message: str, field: str, token=None, occurrence: int = 1, after: Optional[str] = None):
        line = locate(self.text, token, occurrence, after) if token is not None else None
        if line is None and field:
            line = locate(self.text, field.split('.')[0].split('[')[0])
        raise SchemaError(message, field=field, line=line)

    def string_list(self, value, field: str) -> List[str]:
        if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
            self.fail("Expected a list of strings", field)
        return value

    def graph(self) -> MultiGraph:
        data = self.data
        vertices = self.string_list(data.get('vertices'), 'vertices')
        seen = set()
        for v in vertices:
            if v in seen:
                self.fail(f"Duplicate vertex {v}", 'vertices', v, 2)
            seen.add(v)

        raw_edges = data.get('edges', [])
        if not isinstance(raw_edges, list):
            self.fail("Expected a list of edges", 'edges')
        triples = []
        ids = set()
        for i, raw in enumerate(raw_edges):
            field = f"edges[{i}]"
            if not isinstance(raw, list) or len(raw) not in (2, 3) or not all(isinstance(x, str) for x in raw):
                self.fail("An edge is [u, v] or [id, u, v] with string entries", field)
            edge_id, u, v = raw if len(raw) == 3 else (f"{raw[0]}-{raw[1]}", raw[0], raw[1])
            for x in (u, v):
                if x not in seen:
                    self.fail(f"Edge refers to unknown vertex {x}", field, edge_id)
            if edge_id in ids:
                self.fail(f"Duplicate edge id {edge_id}", field, edge_id if len(raw) == 3 else None, 2)
            ids.add(edge_id)
            triples.append((edge_id, u, v))
        try:
            return MultiGraph(vertices, triples)
        except ArgumentError as e:
            self.fail(str(e), 'edges')

    def order(self, value, field: str) -> CyclicOrder:
        return CyclicOrder(self.string_list(value, field))

    def embedding(self, graph: MultiGraph) -> Optional[Dict[str, CyclicOrder]]:
        raw = self.data.get('embedding')
        if raw is None:
            return None
        if not isinstance(raw, dict):
            self.fail("Embedding must map vertices to edge lists", 'embedding')
        rotation = {}
        for v, edges in raw.items():
            field = f"embedding.{v}"
            if v not in graph:
                self.fail(f"Embedding refers to unknown vertex {v}", field, v)
            order = self.order(edges, field)
            if len(order) != len(edges) or order.labels != set(graph.incident(v)):
                self.fail(f"Rotation at {v} must list each incident edge once", field, v)
            rotation[v] = order
        return rotation

    def cluster_children(self, graph: MultiGraph) -> Tuple[Dict[str, List[str]], str]:
        raw = self.data.get('clusters')
        if raw is None:
            return {'root': list(graph.vertices)}, 'root'

        children: Dict[str, List[str]] = {}
        placed: Dict[str, int] = {}

        def walk(node, field):
            if not isinstance(node, dict) or not isinstance(node.get('name'), str):
                self.fail("A cluster is an object with a string 'name' and a 'children' list", field)
            name = node['name']
            if name in children or name in graph:
                self.fail(f"Cluster name {name} is used twice", f"{field}.name", name, 2, after="clusters")
            kids = node.get('children')
            if not isinstance(kids, list) or not kids:
                self.fail(f"Cluster {name} needs a nonempty 'children' list", f"{field}.children", name)
            children[name] = []
            for i, kid in enumerate(kids):
                kid_field = f"{field}.children[{i}]"
                if isinstance(kid, str):
                    if kid not in graph:
                        self.fail(f"Cluster {name} refers to unknown vertex {kid}", kid_field, kid, after="clusters")
                    placed[kid] = placed.get(kid, 0) + 1
                    if placed[kid] > 1:
                        self.fail(f"Vertex {kid} appears in more than one cluster", kid_field, kid, 2, after="clusters")
                    children[name].append(kid)
                else:
                    children[name].append(walk(kid, kid_field))
            return name

        root = walk(raw, 'clusters')
        missing = [v for v in graph.vertices if v not in placed]
        if missing:
            self.fail(f"Vertices not placed in the cluster tree: {missing}", "clusters")
        return children, root

    def constraint(self, raw, field: str, allow_composite: bool = True) -> OrderConstraint:
        if not isinstance(raw, dict) or not isinstance(raw.get('type'), str):
            self.fail("A constraint is an object with a string 'type'", field)
        kind = raw['type']
        try:
            if kind == 'partition' and allow_composite:
                blocks = raw.get('blocks')
                if not isinstance(blocks, list):
                    self.fail("Partition constraint needs 'blocks'", f"{field}.blocks")
                return PartitionConstraint(self.string_list(b, f"{field}.blocks[{i}]") for i, b in enumerate(blocks))
            if kind == 'pq':
                if not isinstance(raw.get('tree'), str):
                    self.fail("PQ constraint needs a 'tree' in text form", f"{field}.tree")
                return PQConstraint(PQTree.from_text(raw['tree']))
            if kind == 'full':
                return FullConstraint(self.order(raw.get('order'), f"{field}.order"))
            if kind == 'partitioned' and allow_composite:
                entries = raw.get('blocks')
                if not isinstance(entries, list):
                    self.fail("Partitioned constraint needs 'blocks'", f"{field}.blocks")
                pairs = []
                for i, entry in enumerate(entries):
                    entry_field = f"{field}.blocks[{i}]"
                    if not isinstance(entry, dict):
                        self.fail("A partitioned block is an object with 'edges' and 'inner'", entry_field)
                    edges = self.string_list(entry.get('edges'), f"{entry_field}.edges")
                    inner = entry.get('inner')
                    if inner is not None:
                        inner = self.constraint(inner, f"{entry_field}.inner", allow_composite=False)
                    pairs.append((edges, inner))
                return PartitionedConstraint(pairs)
            if kind == 'explicit' and allow_composite:
                ground = self.string_list(raw.get('ground'), f"{field}.ground")
                orders = raw.get('orders')
                if not isinstance(orders, list):
                    self.fail("Explicit constraint needs 'orders'", f"{field}.orders")
                return ExplicitConstraint(ground, [self.order(o, f"{field}.orders[{i}]") for i, o in enumerate(orders)])
        except ArgumentError as e:
            self.fail(str(e), field)
        self.fail(f"Unknown constraint type {kind}", f"{field}.type", kind)

    def clustered(self) -> ClusteredGraph:
        graph = self.graph()
        if not graph.is_simple():
            self.fail("Clustered instances need a simple graph", 'edges')
        children, root = self.cluster_children(graph)
        embedding = self.embedding(graph)
        if embedding is not None and len(embedding) != len(graph.vertices):
            missing = [v for v in graph.vertices if v not in embedding]
            self.fail(f"Embedding misses vertices {missing}", 'embedding')
        try:
            return ClusteredGraph(graph, children, root=root, embedding=embedding)
        except ArgumentError as e:
            self.fail(str(e), 'clusters')

    def constrained(self) -> ConstrainedInstance:
        graph = self.graph()
        raw = self.data.get('constraints', {})
        if not isinstance(raw, dict):
            self.fail("Constraints must map vertices to constraint objects", 'constraints')
        constraints = {}
        for v, c in raw.items():
            field = f"constraints.{v}"
            if v not in graph:
                self.fail(f"Constraint on unknown vertex {v}", field, v)
            constraints[v] = self.constraint(c, field)
        infeasible = self.data.get('infeasible', False)
        if not isinstance(infeasible, bool):
            self.fail("'infeasible' must be a boolean", 'infeasible')
        try:
            return ConstrainedInstance(graph, constraints, infeasible=infeasible, reason=self.data.get('reason'))
        except ArgumentError as e:
            self.fail(str(e), 'constraints')


def from_data(data, text: Optional[str] = None) -> Document:
    """Build an instance from a decoded JSON document"""
    if not isinstance(data, dict):
        raise SchemaError("Instance document must be a JSON object", field='', line=1)
    reader = _Reader(data, text)
    version = data.get('format', FORMAT_VERSION)
    if version != FORMAT_VERSION:
        reader.fail(f"Unsupported format version {version}", 'format', version)
    kind = data.get('kind', 'constrained' if 'constraints' in data else 'clustered')
    if kind not in KINDS:
        reader.fail(f"Unknown instance kind {kind}", 'kind', kind)
    if kind == 'clustered' and data.get('infeasible') is True:
        return FlatInstance(infeasible=True, reason=data.get('reason'))
    return reader.clustered() if kind == 'clustered' else reader.constrained()


def parse(text: str) -> Document:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"Invalid JSON: {e.msg}", field='', line=e.lineno)
    return from_data(data, text)


def load(path: str) -> Document:
    with open(path, encoding='utf-8') as handle:
        return parse(handle.read())


def _edge_entries(graph: MultiGraph) -> List[list]:
    return [[u, v] if e == f"{u}-{v}" else [e, u, v] for e, (u, v) in graph.edges.items()]


def to_data(instance: Document) -> dict:
    """Format-1 document for a clustered or constrained instance or a reduction result"""
    if isinstance(instance, ClusteredGraph):
        data = {
            'format': FORMAT_VERSION,
            'kind': 'clustered',
            'vertices': list(instance.graph.vertices),
            'edges': _edge_entries(instance.graph),
            'clusters': instance.cluster_tree()
        }
        if instance.embedding is not None:
            data['embedding'] = rotation_to_dict(instance.embedding)
        return data
    if isinstance(instance, ConstrainedInstance):
        data = {
            'format': FORMAT_VERSION,
            'kind': 'constrained',
            'vertices': list(instance.graph.vertices),
            'edges': _edge_entries(instance.graph),
            'constraints': {v: c.to_dict() for v, c in instance.constraints.items()}
        }
        if instance.infeasible:
            data['infeasible'] = True
            data['reason'] = instance.reason
        return data
    if isinstance(instance, FlatInstance):
        if instance.infeasible:
            return {'format': FORMAT_VERSION, 'kind': 'clustered', 'infeasible': True, 'reason': instance.reason}
        data = to_data(instance.clustered)
        if instance.provenance:
            data['provenance'] = dict(instance.provenance)
        return data
    raise ArgumentError(f"Cannot serialize {type(instance).__name__}")


def serialize(instance: Document) -> str:
    return json.dumps(to_data(instance), indent=2)
