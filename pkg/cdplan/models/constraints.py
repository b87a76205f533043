"""
Order-constraint models
An order-constraint on a vertex restricts the cyclic orders of its incident edges
"""
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from cdplan.models.multigraph import MultiGraph
from cdplan.models.orders import CyclicOrder
from cdplan.models.pqtree import PQTree
from cdplan.services.errors import ArgumentError


class ConstraintKind(Enum):
    """Constraint family enumeration"""
    PARTITION = 'partition'
    PQ = 'pq'
    FULL = 'full'
    PARTITIONED = 'partitioned'
    EXPLICIT = 'explicit'


def _check_blocks(blocks: Iterable[Iterable[str]]) -> Tuple[FrozenSet[str], ...]:
    result = []
    seen = set()
    for block in blocks:
        block = frozenset(block)
        if not block:
            raise ArgumentError("Partition blocks must be nonempty")
        if block & seen:
            raise ArgumentError(f"Partition blocks overlap in {sorted(block & seen)}")
        seen |= block
        result.append(block)
    return tuple(result)


class OrderConstraint:
    """Base class: a set of allowed cyclic orders over a ground set of edge ids"""

    kind: ConstraintKind = None
    # compact families are described in size linear in the ground set
    compact = True

    @property
    def ground(self) -> FrozenSet[str]:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))

    def __repr__(self):
        return f"{type(self).__name__}({self.to_dict()})"


class PartitionConstraint(OrderConstraint):
    """No two blocks may alternate"""

    kind = ConstraintKind.PARTITION

    def __init__(self, blocks: Iterable[Iterable[str]]):
        self.blocks = _check_blocks(blocks)

    @property
    def ground(self):
        return frozenset().union(*self.blocks)

    def to_dict(self):
        return {'type': self.kind.value, 'blocks': sorted(sorted(b) for b in self.blocks)}


class PQConstraint(OrderConstraint):
    """Orders represented by a PQ-tree"""

    kind = ConstraintKind.PQ

    def __init__(self, tree: PQTree):
        self.tree = tree

    @property
    def ground(self):
        return self.tree.labels

    def to_dict(self):
        return {'type': self.kind.value, 'tree': self.tree.to_text()}


class FullConstraint(OrderConstraint):
    """Exactly one cyclic order"""

    kind = ConstraintKind.FULL

    def __init__(self, order: Union[CyclicOrder, Sequence[str]]):
        self.order = order if isinstance(order, CyclicOrder) else CyclicOrder(order)

    @property
    def ground(self):
        return self.order.labels

    def to_dict(self):
        return {'type': self.kind.value, 'order': self.order.to_list()}


InnerConstraint = Union[FullConstraint, PQConstraint]


class PartitionedConstraint(OrderConstraint):
    """Partition rule plus an optional Full or PQ constraint inside every block"""

    kind = ConstraintKind.PARTITIONED

    def __init__(self, blocks: Iterable[Tuple[Iterable[str], Optional[InnerConstraint]]]):
        pairs = list(blocks)
        self.blocks = _check_blocks(b for b, _ in pairs)
        self.inner: Tuple[Optional[InnerConstraint], ...] = tuple(inner for _, inner in pairs)
        for block, inner in zip(self.blocks, self.inner):
            if inner is None:
                continue
            if not isinstance(inner, (FullConstraint, PQConstraint)):
                raise ArgumentError("Inner constraints of a partitioned constraint must be full or PQ")
            if inner.ground != block:
                raise ArgumentError(f"Inner constraint does not cover block {sorted(block)}")

    @property
    def ground(self):
        return frozenset().union(*self.blocks)

    def to_dict(self):
        entries = [
            {'edges': sorted(block), 'inner': inner.to_dict() if inner is not None else None}
            for block, inner in zip(self.blocks, self.inner)
        ]
        return {'type': self.kind.value, 'blocks': sorted(entries, key=lambda x: x['edges'])}


class ExplicitConstraint(OrderConstraint):
    """Explicitly listed orders, deduplicated; the empty set means infeasible"""

    kind = ConstraintKind.EXPLICIT
    compact = False

    def __init__(self, ground: Iterable[str], orders: Iterable[CyclicOrder]):
        self._ground = frozenset(ground)
        self.orders: FrozenSet[CyclicOrder] = frozenset(orders)
        for order in self.orders:
            if order.labels != self._ground:
                raise ArgumentError(f"Order {order} does not cover the ground set {sorted(self._ground)}")

    @property
    def ground(self):
        return self._ground

    def __len__(self):
        return len(self.orders)

    def is_empty(self) -> bool:
        return not self.orders

    def to_dict(self):
        return {
            'type': self.kind.value,
            'ground': sorted(self._ground),
            'orders': sorted(order.to_list() for order in self.orders)
        }


class ConstrainedInstance:
    """Multigraph with an optional order-constraint per vertex.

    ``infeasible`` marks instances that a reduction already knows to be
    unsatisfiable; ``reason`` says why.
    """

    def __init__(self, graph: MultiGraph, constraints: Optional[Dict[str, OrderConstraint]] = None,
                 infeasible: bool = False, reason: Optional[str] = None):
        self.graph = graph
        self.constraints: Dict[str, OrderConstraint] = dict(constraints or {})
        self.infeasible = infeasible
        self.reason = reason
        for v, constraint in self.constraints.items():
            if v not in graph:
                raise ArgumentError(f"Constraint on unknown vertex {v}")
            if constraint.ground != set(graph.incident(v)):
                raise ArgumentError(f"Constraint ground set at {v} differs from its incident edges")

    def constraint(self, v: str) -> Optional[OrderConstraint]:
        return self.constraints.get(v)

    def kinds(self) -> List[ConstraintKind]:
        return sorted({c.kind for c in self.constraints.values()}, key=lambda k: k.value)

    def to_dict(self) -> dict:
        data = {
            'vertices': list(self.graph.vertices),
            'edges': [[e, u, v] for e, (u, v) in self.graph.edges.items()],
            'constraints': {v: c.to_dict() for v, c in self.constraints.items()}
        }
        if self.infeasible:
            data['infeasible'] = True
            data['reason'] = self.reason
        return data

    def __repr__(self):
        return f"ConstrainedInstance({self.graph!r}, constrained={len(self.constraints)})"
