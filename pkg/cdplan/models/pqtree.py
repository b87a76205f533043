"""
Unrooted PQ-trees over string labels

Inner nodes are integers, leaves are their labels. A P-node allows any cyclic
arrangement of its neighbors; a Q-node stores one cyclic neighbor sequence
that may only be reversed. Trees over one or two labels are a single P-node.

Text format::

    tree  := node
    node  := 'P(' node (',' node)* ')' | 'Q(' node (',' node)* ')' | label
    label := bare word without spaces, commas or parentheses, or a "quoted" string

The outermost node lists all of its neighbors; a nested node lists its
neighbors other than its parent, for a Q-node in the order that follows the
parent in its cyclic sequence.
"""
import re
from typing import Dict, FrozenSet, Iterable, List, Tuple, Union

from cdplan.services.errors import ArgumentError

Ref = Union[int, str]

P_NODE = 'P'
Q_NODE = 'Q'


class PQTree:
    """Immutable, normalized unrooted PQ-tree"""

    def __init__(self, kinds: Dict[int, str], adjacency: Dict[int, List[Ref]]):
        kinds, adjacency = _normalize(dict(kinds), {x: list(n) for x, n in adjacency.items()})
        self._kinds = kinds
        self._adj = {x: tuple(n) for x, n in adjacency.items()}
        self._leaf_parent: Dict[str, int] = {}
        for x, nbrs in self._adj.items():
            for ref in nbrs:
                if isinstance(ref, str):
                    if ref in self._leaf_parent:
                        raise ArgumentError(f"Leaf {ref} appears twice")
                    self._leaf_parent[ref] = x
        if not self._leaf_parent:
            raise ArgumentError("A PQ-tree needs at least one leaf")
        self._check_tree()

    # -- construction -----------------------------------------------------

    @classmethod
    def single_node(cls, kind: str, labels: Iterable[str]) -> 'PQTree':
        labels = list(labels)
        if not labels:
            raise ArgumentError("Cannot build a PQ-tree over an empty label set")
        for label in labels:
            if not isinstance(label, str):
                raise ArgumentError(f"PQ-tree labels must be strings, got {label!r}")
        return cls({0: kind}, {0: labels})

    @classmethod
    def from_text(cls, text: str) -> 'PQTree':
        tokens = _tokenize(text)
        if not tokens:
            raise ArgumentError("Empty PQ-tree text")
        kinds: Dict[int, str] = {}
        adjacency: Dict[int, List[Ref]] = {}
        position, root = _parse_node(tokens, 0, kinds, adjacency, parent=None)
        if position != len(tokens):
            raise ArgumentError(f"Trailing input in PQ-tree text: {text!r}")
        if isinstance(root, str):
            return cls.single_node(P_NODE, [root])
        return cls(kinds, adjacency)

    # -- queries ------------------------------------------------------------

    @property
    def labels(self) -> FrozenSet[str]:
        return frozenset(self._leaf_parent)

    def __len__(self):
        return len(self._leaf_parent)

    @property
    def inner_nodes(self) -> List[int]:
        return sorted(self._kinds)

    def kind(self, node: int) -> str:
        return self._kinds[node]

    def neighbors(self, ref: Ref) -> Tuple[Ref, ...]:
        if isinstance(ref, str):
            return (self._leaf_parent[ref],)
        return self._adj[ref]

    def structure(self) -> Tuple[Dict[int, str], Dict[int, List[Ref]]]:
        """Mutable copies of the node kinds and adjacency lists"""
        return dict(self._kinds), {x: list(n) for x, n in self._adj.items()}

    def side_leaves(self, a: Ref, b: Ref) -> FrozenSet[str]:
        """Leaves reachable from b without passing through a"""
        found = set()
        stack = [(b, a)]
        while stack:
            node, came_from = stack.pop()
            if isinstance(node, str):
                found.add(node)
                continue
            for nxt in self._adj[node]:
                if nxt != came_from:
                    stack.append((nxt, node))
        return frozenset(found)

    def tree_edges(self) -> List[Tuple[Ref, Ref]]:
        edges = []
        for x in self.inner_nodes:
            for ref in self._adj[x]:
                if isinstance(ref, str) or ref > x:
                    edges.append((x, ref))
        return edges

    def count(self, kind: str) -> int:
        return sum(1 for k in self._kinds.values() if k == kind)

    # -- text -----------------------------------------------------------------

    def to_text(self) -> str:
        root = self.inner_nodes[0]
        return self._node_text(root, parent=None)

    def _node_text(self, node: Ref, parent) -> str:
        if isinstance(node, str):
            return _quote(node)
        nbrs = list(self._adj[node])
        if parent is not None:
            i = nbrs.index(parent)
            nbrs = nbrs[i + 1:] + nbrs[:i]
        inner = ', '.join(self._node_text(child, node) for child in nbrs)
        return f"{self._kinds[node]}({inner})"

    def __repr__(self):
        return f"PQTree({self.to_text()})"

    def to_dict(self) -> dict:
        return {'text': self.to_text(), 'leaves': sorted(self.labels)}

    # -- internals ----------------------------------------------------------

    def _check_tree(self):
        inner_edges = sum(1 for x in self._adj for ref in self._adj[x] if isinstance(ref, int))
        if inner_edges != 2 * (len(self._kinds) - 1):
            raise ArgumentError("PQ-tree structure is not a tree")
        for x, nbrs in self._adj.items():
            for ref in nbrs:
                if isinstance(ref, int) and x not in self._adj.get(ref, ()):
                    raise ArgumentError(f"PQ-tree adjacency of nodes {x} and {ref} is not symmetric")
        seen = {self.inner_nodes[0]}
        stack = [self.inner_nodes[0]]
        while stack:
            x = stack.pop()
            for ref in self._adj[x]:
                if isinstance(ref, int) and ref not in seen:
                    seen.add(ref)
                    stack.append(ref)
        if len(seen) != len(self._kinds):
            raise ArgumentError("PQ-tree structure is disconnected")


def _normalize(kinds: Dict[int, str], adj: Dict[int, List[Ref]]):
    """Dissolve degree-2 inner nodes, turn 3-ary Q-nodes into P-nodes, renumber.

    Adjacent P-nodes are kept apart: merging them would enlarge the order set.
    """
    leaves = [ref for nbrs in adj.values() for ref in nbrs if isinstance(ref, str)]
    if len(leaves) <= 2:
        return {0: P_NODE}, {0: sorted(leaves)}

    changed = True
    while changed:
        changed = False
        for x in list(kinds):
            nbrs = adj[x]
            if len(nbrs) == 1 and isinstance(nbrs[0], int):
                other = nbrs[0]
                adj[other].remove(x)
                del kinds[x], adj[x]
                changed = True
            elif len(nbrs) == 2:
                u, w = nbrs
                for a, b in ((u, w), (w, u)):
                    if isinstance(a, int):
                        adj[a][adj[a].index(x)] = b
                del kinds[x], adj[x]
                changed = True
            elif len(nbrs) == 3 and kinds[x] == Q_NODE:
                kinds[x] = P_NODE
                changed = True

    renumber = {old: new for new, old in enumerate(sorted(kinds))}
    return (
        {renumber[x]: k for x, k in kinds.items()},
        {renumber[x]: [renumber[r] if isinstance(r, int) else r for r in nbrs] for x, nbrs in adj.items()}
    )


_TOKEN = re.compile(r'\s*(?:(?P<open>[PQ]\()|(?P<close>\))|(?P<comma>,)|"(?P<quoted>[^"]*)"|(?P<word>[^\s(),"]+))')


def _tokenize(text: str) -> List[Tuple[str, str]]:
    tokens = []
    position = 0
    text = text.strip()
    while position < len(text):
        match = _TOKEN.match(text, position)
        if not match or match.end() == position:
            raise ArgumentError(f"Cannot parse PQ-tree text near: {text[position:]!r}")
        position = match.end()
        kind = match.lastgroup
        if kind == 'open':
            tokens.append(('open', match.group('open')[0]))
        elif kind == 'quoted':
            tokens.append(('label', match.group('quoted')))
        elif kind == 'word':
            tokens.append(('label', match.group('word')))
        else:
            tokens.append((kind, match.group(kind)))
    return tokens


def _parse_node(tokens, position, kinds, adjacency, parent):
    kind, value = tokens[position]
    if kind == 'label':
        return position + 1, value
    if kind != 'open':
        raise ArgumentError(f"Unexpected token {value!r} in PQ-tree text")
    node = len(kinds)
    kinds[node] = value
    adjacency[node] = [] if parent is None else [parent]
    position += 1
    while True:
        position, child = _parse_node(tokens, position, kinds, adjacency, node)
        adjacency[node].append(child)
        if position >= len(tokens):
            raise ArgumentError("Unterminated PQ-tree node")
        kind, value = tokens[position]
        position += 1
        if kind == 'close':
            break
        if kind != 'comma':
            raise ArgumentError(f"Expected ',' or ')' in PQ-tree text, got {value!r}")
    return position, node


def _quote(label: str) -> str:
    if re.fullmatch(r'[^\s(),"]+', label) and label not in ('P', 'Q'):
        return label
    return f'"{label}"'
