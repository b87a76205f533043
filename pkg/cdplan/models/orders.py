"""
Cyclic orders and rotation systems
"""
from itertools import permutations
from typing import Dict, Hashable, Iterable, List, Tuple

from cdplan.services.errors import ArgumentError


class CyclicOrder:
    """Sequence of distinct items identified up to rotation (never up to reversal)"""

    __slots__ = ('_items',)

    def __init__(self, items: Iterable[Hashable] = ()):
        seq = tuple(items)
        if len(set(seq)) != len(seq):
            raise ArgumentError(f"Cyclic order has repeated items: {list(seq)}")
        if seq:
            start = seq.index(min(seq, key=str))
            seq = seq[start:] + seq[:start]
        self._items = seq

    @property
    def items(self) -> Tuple:
        """Canonical rotation of the order"""
        return self._items

    @property
    def labels(self) -> frozenset:
        return frozenset(self._items)

    def __iter__(self):
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def __contains__(self, item):
        return item in self._items

    def __eq__(self, other):
        if not isinstance(other, CyclicOrder):
            return NotImplemented
        return self._items == other._items

    def __hash__(self):
        return hash(self._items)

    def __repr__(self):
        return f"CyclicOrder({', '.join(map(str, self._items))})"

    def reversed(self) -> 'CyclicOrder':
        return CyclicOrder(reversed(self._items))

    def restricted(self, subset: Iterable[Hashable]) -> 'CyclicOrder':
        """Induced cyclic sub-order on the given items"""
        keep = set(subset)
        return CyclicOrder(x for x in self._items if x in keep)

    def successor(self, item):
        i = self._items.index(item)
        return self._items[(i + 1) % len(self._items)]

    def renamed(self, mapping: Dict) -> 'CyclicOrder':
        return CyclicOrder(mapping.get(x, x) for x in self._items)

    def to_list(self) -> List:
        return list(self._items)


# Vertex -> cyclic order of its incident edge ids
RotationSystem = Dict[str, CyclicOrder]


def all_cyclic_orders(items: Iterable[Hashable]) -> List[CyclicOrder]:
    """Every cyclic order of the items, (k-1)! of them for k >= 1"""
    seq = sorted(set(items), key=str)
    if len(seq) <= 2:
        return [CyclicOrder(seq)]
    first, rest = seq[0], seq[1:]
    return [CyclicOrder((first,) + perm) for perm in permutations(rest)]


def is_consecutive(order: CyclicOrder, subset: Iterable[Hashable]) -> bool:
    """True when the items of subset form one circular interval of order"""
    inside = set(subset)
    flags = [x in inside for x in order]
    changes = sum(1 for i in range(len(flags)) if flags[i] != flags[i - 1])
    return changes <= 2


def rotation_to_dict(rotation: RotationSystem) -> Dict[str, List]:
    return {v: order.to_list() for v, order in rotation.items()}


def rotation_from_dict(data: Dict[str, Iterable]) -> RotationSystem:
    return {v: CyclicOrder(items) for v, items in data.items()}
