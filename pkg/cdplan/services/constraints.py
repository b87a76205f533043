"""
Constraint service: membership tests, explicit enumeration and the brute-force
constrained-planarity decider
"""
from itertools import combinations
from typing import Optional

from cdplan.models.constraints import (
    ConstrainedInstance, ConstraintKind, ExplicitConstraint, FullConstraint, OrderConstraint, PQConstraint
)
from cdplan.models.orders import CyclicOrder, RotationSystem, all_cyclic_orders
from cdplan.services import pqtree_ops
from cdplan.services.errors import ArgumentError, CapacityError
from cdplan.services.planarity import find_planar_rotation
from cdplan.utils.context import get_logger, setting


def _no_alternation(blocks, o: CyclicOrder) -> bool:
    for a, b in combinations(blocks, 2):
        seq = [x in a for x in o if x in a or x in b]
        changes = sum(1 for i in range(len(seq)) if seq[i] != seq[i - 1])
        if changes > 2:
            return False
    return True


def _inner_allows(inner, o: CyclicOrder) -> bool:
    if inner is None:
        return True
    if isinstance(inner, FullConstraint):
        return o == inner.order
    return pqtree_ops.permits(inner.tree, o)


def allows(c: OrderConstraint, o: CyclicOrder) -> bool:
    """Membership of a total cyclic order in the constraint"""
    if o.labels != c.ground or len(o) != len(c.ground):
        raise ArgumentError(f"Order {o} does not match the constraint ground set {sorted(c.ground)}")
    if c.kind == ConstraintKind.PARTITION:
        return _no_alternation(c.blocks, o)
    if c.kind == ConstraintKind.PQ:
        return pqtree_ops.permits(c.tree, o)
    if c.kind == ConstraintKind.FULL:
        return o == c.order
    if c.kind == ConstraintKind.PARTITIONED:
        if not _no_alternation(c.blocks, o):
            return False
        return all(_inner_allows(inner, o.restricted(block)) for block, inner in zip(c.blocks, c.inner))
    return o in c.orders


def to_explicit(c: OrderConstraint) -> ExplicitConstraint:
    """Enumerate the allowed orders (ground sets up to ENUMERATION_BOUND)"""
    if isinstance(c, ExplicitConstraint):
        return c
    if isinstance(c, FullConstraint):
        return ExplicitConstraint(c.ground, [c.order])
    if isinstance(c, PQConstraint):
        return ExplicitConstraint(c.ground, pqtree_ops.orders(c.tree))
    bound = setting('ENUMERATION_BOUND', 9)
    if len(c.ground) > bound:
        raise CapacityError(f"Cannot enumerate a constraint over {len(c.ground)} edges (bound {bound})",
                            needed=len(c.ground), bound=bound)
    return ExplicitConstraint(c.ground, [o for o in all_cyclic_orders(c.ground) if allows(c, o)])


def equivalent(a: OrderConstraint, b: OrderConstraint) -> bool:
    """Extensional equality on the allowed order sets"""
    return a.ground == b.ground and to_explicit(a).orders == to_explicit(b).orders


def constrained_planar_bruteforce(ci: ConstrainedInstance, stats: Optional[dict] = None) -> Optional[RotationSystem]:
    """Planar rotation system satisfying every vertex constraint, or None"""
    if ci.infeasible:
        get_logger().info(f"Constrained instance flagged infeasible: {ci.reason}")
        return None
    candidates = {v: list(to_explicit(c).orders) for v, c in ci.constraints.items()}
    witness = find_planar_rotation(ci.graph, candidates, stats)
    get_logger().info(f"Constrained planarity by enumeration: {'feasible' if witness else 'infeasible'}")
    return witness
