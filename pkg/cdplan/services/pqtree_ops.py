"""
PQ-tree service: universal trees, circular-consecutivity reduction, membership,
order enumeration and wheel gadgets
"""
from itertools import permutations, product
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from cdplan.models.multigraph import MultiGraph
from cdplan.models.orders import CyclicOrder, is_consecutive
from cdplan.models.pqtree import P_NODE, Q_NODE, PQTree, Ref
from cdplan.services.errors import ArgumentError, CapacityError
from cdplan.utils.context import get_logger, setting

FULL = 'full'
EMPTY = 'empty'
MIXED = 'mixed'


def universal(labels: Iterable[str]) -> PQTree:
    """Single P-node: every cyclic order of the labels"""
    labels = sorted(set(labels))
    if not labels:
        raise ArgumentError("universal() needs at least one label")
    return PQTree.single_node(P_NODE, labels)


def single_q(labels: Iterable[str]) -> PQTree:
    """Single Q-node: the given cyclic order and its reversal"""
    return PQTree.single_node(Q_NODE, list(labels))


class _SideCounts:
    """Full-leaf counts for both sides of every tree edge, for one label subset"""

    def __init__(self, t: PQTree, subset: FrozenSet[str]):
        self.t = t
        self.total_full = len(subset)
        self.total = len(t)
        root = t.inner_nodes[0]
        self.parent: Dict[Ref, Optional[Ref]] = {root: None}
        order = [root]
        stack = [root]
        while stack:
            x = stack.pop()
            if isinstance(x, str):
                continue
            for ref in t.neighbors(x):
                if ref != self.parent[x]:
                    self.parent[ref] = x
                    order.append(ref)
                    stack.append(ref)
        self.full: Dict[Ref, int] = {}
        self.size: Dict[Ref, int] = {}
        for x in reversed(order):
            if isinstance(x, str):
                self.full[x] = 1 if x in subset else 0
                self.size[x] = 1
            else:
                children = [r for r in t.neighbors(x) if r != self.parent[x]]
                self.full[x] = sum(self.full[c] for c in children)
                self.size[x] = sum(self.size[c] for c in children)
        self.nonroot = [x for x in order if self.parent[x] is not None]

    def side(self, a: Ref, b: Ref) -> Tuple[int, int]:
        """(full, size) of the leaves beyond b as seen from a"""
        if self.parent.get(b) == a:
            return self.full[b], self.size[b]
        return self.total_full - self.full[a], self.total - self.size[a]

    def state(self, a: Ref, b: Ref) -> str:
        full, size = self.side(a, b)
        if full == size:
            return FULL
        if full == 0:
            return EMPTY
        return MIXED

    def is_terminal(self, x: Ref) -> bool:
        p = self.parent[x]
        return self.state(p, x) == MIXED and self.state(x, p) == MIXED


def _cyclic_run(flags: List[bool]) -> bool:
    changes = sum(1 for i in range(len(flags)) if flags[i] != flags[i - 1])
    return changes <= 2


def _split(seq: List[Ref], states: Dict[Ref, str], first: str, second: str):
    """Split seq into first* second*, or None when it has another shape"""
    if any(states[b] == MIXED for b in seq):
        return None
    i = 0
    while i < len(seq) and states[seq[i]] == first:
        i += 1
    if all(states[b] == second for b in seq[i:]):
        return seq[:i], seq[i:]
    return None


def _after(nbrs: List[Ref], ref: Ref) -> List[Ref]:
    i = nbrs.index(ref)
    return nbrs[i + 1:] + nbrs[:i]


def _terminal_path(edges: List[Tuple[Ref, Ref]]) -> Optional[List[Ref]]:
    adjacency: Dict[Ref, List[Ref]] = {}
    for a, b in edges:
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)
    if any(len(n) > 2 for n in adjacency.values()):
        return None
    ends = sorted(x for x, n in adjacency.items() if len(n) == 1)
    if len(ends) != 2:
        return None
    path = [ends[0]]
    previous = None
    while True:
        step = [y for y in adjacency[path[-1]] if y != previous]
        if not step:
            break
        previous = path[-1]
        path.append(step[0])
    return path if len(path) == len(adjacency) else None


def reduce(t: PQTree, subset: Iterable[str]) -> Optional[PQTree]:
    """Restrict t to the orders in which subset is consecutive; None when none remain"""
    s = frozenset(subset)
    if not s <= t.labels:
        raise ArgumentError(f"Labels {sorted(s - t.labels)} are not leaves of the tree")
    n = len(t)
    if len(s) <= 1 or len(s) >= n - 1 or n <= 3:
        return t

    counts = _SideCounts(t, s)
    for x in counts.nonroot:
        full, size = counts.full[x], counts.size[x]
        if (full == size == len(s)) or (full == 0 and size == n - len(s)):
            return t

    kinds, adj = t.structure()
    next_id = max(kinds) + 1
    terminal = [(counts.parent[x], x) for x in counts.nonroot if counts.is_terminal(x)]

    if not terminal:
        center = next(x for x in t.inner_nodes
                      if all(counts.state(x, b) != MIXED for b in t.neighbors(x)))
        full_nbrs = [b for b in adj[center] if counts.state(center, b) == FULL]
        if kinds[center] == Q_NODE:
            flags = [b in full_nbrs for b in adj[center]]
            return t if _cyclic_run(flags) else None
        empty_nbrs = [b for b in adj[center] if counts.state(center, b) == EMPTY]
        split_node = next_id
        kinds[split_node] = P_NODE
        adj[split_node] = full_nbrs + [center]
        adj[center] = empty_nbrs + [split_node]
        for b in full_nbrs:
            if isinstance(b, int):
                adj[b][adj[b].index(center)] = split_node
        return PQTree(kinds, adj)

    path = _terminal_path(terminal)
    if path is None:
        return None

    merged = next_id
    next_id += 1
    full_groups = []
    empty_groups = []
    last = len(path) - 1
    for i, x in enumerate(path):
        prev = path[i - 1] if i > 0 else None
        nxt = path[i + 1] if i < last else None
        nbrs = adj[x]
        states = {b: counts.state(x, b) for b in nbrs if b != prev and b != nxt}
        if kinds[x] == P_NODE:
            if MIXED in states.values():
                return None
            fi = [b for b in nbrs if states.get(b) == FULL]
            ei = [b for b in nbrs if states.get(b) == EMPTY]
        elif i == 0:
            seq = _after(nbrs, nxt)
            split = _split(seq, states, EMPTY, FULL) or _split(seq[::-1], states, EMPTY, FULL)
            if split is None:
                return None
            ei, fi = split
        elif i == last:
            seq = _after(nbrs, prev)
            split = _split(seq, states, FULL, EMPTY) or _split(seq[::-1], states, FULL, EMPTY)
            if split is None:
                return None
            fi, ei = split
        else:
            seq = _after(nbrs, prev)
            j = seq.index(nxt)
            arc_a, arc_b = seq[:j], seq[j + 1:]
            if MIXED in states.values():
                return None
            if all(states[b] == FULL for b in arc_a) and all(states[b] == EMPTY for b in arc_b):
                fi, ei = arc_a, arc_b
            elif all(states[b] == EMPTY for b in arc_a) and all(states[b] == FULL for b in arc_b):
                fi, ei = arc_b[::-1], arc_a[::-1]
            else:
                return None
        full_groups.append((x, fi))
        empty_groups.append((x, ei))

    def attach(x, members):
        nonlocal next_id
        if kinds[x] == P_NODE and len(members) >= 2:
            group = next_id
            next_id += 1
            kinds[group] = P_NODE
            adj[group] = list(members) + [merged]
            for b in members:
                if isinstance(b, int):
                    adj[b][adj[b].index(x)] = group
            return [group]
        for b in members:
            if isinstance(b, int):
                adj[b][adj[b].index(x)] = merged
        return list(members)

    entries: List[Ref] = []
    for x, members in full_groups:
        entries.extend(attach(x, members))
    for x, members in reversed(empty_groups):
        entries.extend(attach(x, members))
    for x in path:
        del kinds[x], adj[x]
    kinds[merged] = Q_NODE
    adj[merged] = entries
    return PQTree(kinds, adj)


def _drop_side(kinds, adj, a: Ref, b: Ref):
    stack = [(b, a)]
    while stack:
        node, came_from = stack.pop()
        if isinstance(node, str):
            continue
        for nxt in adj[node]:
            if nxt != came_from:
                stack.append((nxt, node))
        del kinds[node], adj[node]


def replace_consecutive(t: PQTree, subset: Iterable[str], new_labels: Iterable[str]) -> PQTree:
    """Replace the consecutive leaf set subset by fresh leaves in free order at its position"""
    s = frozenset(subset)
    new = list(new_labels)
    if not s or not s <= t.labels:
        raise ArgumentError("replace_consecutive() needs a nonempty subset of the leaves")
    if set(new) & (t.labels - s) or len(set(new)) != len(new):
        raise ArgumentError("Replacement labels collide with remaining leaves")
    if s == t.labels:
        return universal(new)

    n = len(t)
    counts = _SideCounts(t, s)
    kinds, adj = t.structure()
    next_id = max(kinds) + 1

    def entry(anchor):
        if not new:
            return None
        if len(new) == 1:
            return new[0]
        kinds[next_id] = P_NODE
        adj[next_id] = [anchor] + new
        return next_id

    for x in counts.nonroot:
        p = counts.parent[x]
        full, size = counts.full[x], counts.size[x]
        if full == size == len(s):
            a, b = p, x
        elif full == 0 and n - size == len(s):
            a, b = x, p
        else:
            continue
        if isinstance(a, str):
            return universal([a] + new)
        _drop_side(kinds, adj, a, b)
        position = adj[a].index(b)
        replacement = entry(a)
        if replacement is None:
            del adj[a][position]
        else:
            adj[a][position] = replacement
        return PQTree(kinds, adj)

    for x in t.inner_nodes:
        if kinds[x] != Q_NODE:
            continue
        nbrs = list(adj[x])
        states = [counts.state(x, b) for b in nbrs]
        if MIXED in states:
            continue
        flags = [state == FULL for state in states]
        if sum(flags) < 2 or not _cyclic_run(flags):
            continue
        start = next(i for i in range(len(nbrs)) if flags[i] and not flags[i - 1])
        rotated = nbrs[start:] + nbrs[:start]
        run, rest = rotated[:sum(flags)], rotated[sum(flags):]
        for b in run:
            _drop_side(kinds, adj, x, b)
        replacement = entry(x)
        adj[x] = ([replacement] if replacement is not None else []) + rest
        return PQTree(kinds, adj)

    raise ArgumentError(f"Labels {sorted(s)} are not consecutive in the tree")


def permits(t: PQTree, o: CyclicOrder) -> bool:
    """True iff o is one of the cyclic orders represented by t"""
    if o.labels != t.labels or len(o) != len(t):
        raise ArgumentError("Order and tree have different label sets")
    for a, b in t.tree_edges():
        if not is_consecutive(o, t.side_leaves(a, b)):
            return False
    for x in t.inner_nodes:
        if t.kind(x) != Q_NODE:
            continue
        owner = {}
        nbrs = t.neighbors(x)
        for i, b in enumerate(nbrs):
            for label in t.side_leaves(x, b):
                owner[label] = i
        blocks = []
        for label in o:
            if not blocks or blocks[-1] != owner[label]:
                blocks.append(owner[label])
        if len(blocks) > 1 and blocks[0] == blocks[-1]:
            blocks.pop()
        seen = CyclicOrder(blocks)
        expected = CyclicOrder(range(len(nbrs)))
        if seen != expected and seen != expected.reversed():
            return False
    return True


def orders(t: PQTree) -> FrozenSet[CyclicOrder]:
    """Exact set of represented cyclic orders (bounded by ENUMERATION_BOUND leaves)"""
    bound = setting('ENUMERATION_BOUND', 9)
    if len(t) > bound:
        raise CapacityError(f"Cannot enumerate orders of a tree with {len(t)} leaves (bound {bound})",
                            needed=len(t), bound=bound)

    def linear(node: Ref, parent: Ref) -> List[Tuple[str, ...]]:
        if isinstance(node, str):
            return [(node,)]
        children = _after(list(t.neighbors(node)), parent)
        return _arrange(t.kind(node), [linear(c, node) for c in children], cyclic=False)

    root = t.inner_nodes[0]
    child_seqs = [linear(c, root) for c in t.neighbors(root)]
    return frozenset(CyclicOrder(seq) for seq in _arrange(t.kind(root), child_seqs, cyclic=True))


def _arrange(kind: str, child_seqs: List[List[Tuple[str, ...]]], cyclic: bool) -> List[Tuple[str, ...]]:
    k = len(child_seqs)
    if kind == Q_NODE:
        arrangements = [tuple(range(k)), tuple(reversed(range(k)))]
    elif cyclic and k > 0:
        arrangements = [(0,) + perm for perm in permutations(range(1, k))]
    else:
        arrangements = list(permutations(range(k)))
    results = []
    for arrangement in arrangements:
        for combo in product(*(child_seqs[j] for j in arrangement)):
            results.append(tuple(label for part in combo for label in part))
    return results


def equivalent(t1: PQTree, t2: PQTree) -> bool:
    """Extensional equality: same represented order set"""
    return t1.labels == t2.labels and orders(t1) == orders(t2)


def from_orders(order_set: Iterable[CyclicOrder]) -> Optional[PQTree]:
    """PQ-tree representing exactly order_set, or None when it is not PQ-representable"""
    wanted = set(order_set)
    if not wanted:
        return None
    reference = min(wanted, key=lambda o: [str(x) for x in o])
    labels = reference.labels
    if any(o.labels != labels for o in wanted):
        raise ArgumentError("Orders are over different label sets")
    n = len(reference)
    tree = universal(labels)
    items = list(reference)
    for length in range(2, n - 1):
        for start in range(n):
            interval = {items[(start + i) % n] for i in range(length)}
            if all(is_consecutive(o, interval) for o in wanted):
                tree = reduce(tree, interval)
                if tree is None:
                    return None
    if orders(tree) != frozenset(wanted):
        get_logger().debug(f"Order set over {sorted(labels)} is not PQ-representable")
        return None
    return tree


def gadget(t: PQTree, prefix: str = 'g') -> Tuple[MultiGraph, str, Dict[str, str]]:
    """Planar graph whose apex vertex realizes exactly the orders of t.

    P-nodes become single vertices, Q-nodes become wheels (hub, rim cycle in Q
    order, spokes), tree edges connect attachment vertices and every leaf
    becomes an edge to the apex named by its label.
    Returns (graph, apex, leaf label -> edge id).
    """
    apex = f"{prefix}#apex"
    vertices = [apex]
    edges = []

    def attachment(x: int, ref: Ref) -> str:
        if t.kind(x) == P_NODE:
            return f"{prefix}#p{x}"
        return f"{prefix}#q{x}.{t.neighbors(x).index(ref)}"

    for x in t.inner_nodes:
        if t.kind(x) == P_NODE:
            vertices.append(f"{prefix}#p{x}")
            continue
        hub = f"{prefix}#q{x}"
        k = len(t.neighbors(x))
        rim = [f"{prefix}#q{x}.{j}" for j in range(k)]
        vertices.append(hub)
        vertices.extend(rim)
        for j in range(k):
            edges.append((f"{prefix}#r{x}.{j}", rim[j], rim[(j + 1) % k]))
            edges.append((f"{prefix}#s{x}.{j}", hub, rim[j]))

    leaf_edges = {}
    for x, ref in t.tree_edges():
        if isinstance(ref, str):
            edges.append((ref, attachment(x, ref), apex))
            leaf_edges[ref] = ref
        else:
            edges.append((f"{prefix}#t{x}-{ref}", attachment(x, ref), attachment(ref, x)))

    return MultiGraph(vertices, edges), apex, leaf_edges
