"""
Solver result models: verdicts, cluster profiles and certificate graphs
"""
from enum import Enum
from typing import Dict, List, Optional, Tuple

from cdplan.models.multigraph import MultiGraph
from cdplan.models.orders import RotationSystem, rotation_to_dict


class Algorithm(Enum):
    """Decision procedure enumeration"""
    EXACT = 'exact'
    CONNECTED = 'connected'
    NAIVE = 'naive'
    ENUMERATION = 'enumeration'


# cd-tree node -> rotation system of its skeleton
Witness = Dict[str, RotationSystem]


class Verdict:
    """Outcome of a c-planarity test"""

    def __init__(self, c_planar: bool, algorithm: Algorithm, witness: Optional[Witness] = None,
                 twin_orders: Optional[List[dict]] = None, stats: Optional[dict] = None,
                 reason: Optional[str] = None, rotation: Optional[RotationSystem] = None):
        self.c_planar = c_planar
        self.algorithm = algorithm
        self.witness = witness
        self.twin_orders = twin_orders or []
        self.stats = stats or {}
        self.reason = reason
        # planar rotation of a constrained instance
        self.rotation = rotation

    def __bool__(self):
        return self.c_planar

    def to_dict(self):
        data = {
            'c_planar': self.c_planar,
            'algorithm': self.algorithm.value,
            'stats': dict(self.stats),
            'reason': self.reason
        }
        if self.witness is not None:
            data['witness'] = {
                'rotations': {node: rotation_to_dict(r) for node, r in self.witness.items()},
                'twins': list(self.twin_orders)
            }
        if self.rotation is not None:
            data['rotation'] = rotation_to_dict(self.rotation)
        return data

    def __repr__(self):
        return f"Verdict(c_planar={self.c_planar}, algorithm={self.algorithm.value})"


class ClusterProfile:
    """Structural classification of a clustered graph"""

    def __init__(self):
        self.clusters: Dict[str, dict] = {}
        self.co_clusters: Dict[str, int] = {}
        self.virtual_blocks: Dict[str, int] = {}
        self.virtual_degrees: Dict[str, int] = {}
        self.all_connected = True
        self.flat = True
        self.two_blocks_per_cut = True
        self.two_components_each = True
        self.bounded_outgoing = True
        self.parent_cutvertex_free = True
        self.separation_violations: List[str] = []
        self.small_cut_violations: List[str] = []
        self.max_cut_degree = 0
        self.max_virtual_per_skeleton = 0
        self.size_c = 0
        self.cut_total = 0

    @property
    def connectivity_consistent(self) -> bool:
        """All clusters connected exactly when no parent vertex is a cutvertex"""
        return self.all_connected == self.parent_cutvertex_free

    def to_dict(self):
        return {
            'clusters': self.clusters,
            'co_clusters': self.co_clusters,
            'virtual_blocks': self.virtual_blocks,
            'flags': {
                'all_connected': self.all_connected,
                'flat': self.flat,
                'two_blocks_per_cut': self.two_blocks_per_cut,
                'two_components_each': self.two_components_each,
                'bounded_outgoing': self.bounded_outgoing,
                'parent_cutvertex_free': self.parent_cutvertex_free,
                'connectivity_consistent': self.connectivity_consistent
            },
            'separation_violations': list(self.separation_violations),
            'small_cut_violations': list(self.small_cut_violations),
            'parameters': {
                'd': self.max_cut_degree,
                'k': self.max_virtual_per_skeleton
            },
            'size_c': self.size_c,
            'cut_total': self.cut_total,
            'twice_cut_total': 2 * self.cut_total
        }


class CertificateGraph:
    """Embedded multigraph G+ gluing the skeleton embeddings along cut cycles.

    ``rotation`` lists the edge ends (edge id, side) around every vertex;
    ``segments`` maps each edge of G to the edges of its subdivision path and
    ``cycles`` maps each tree edge (parent, child) to its cut cycle.
    """

    def __init__(self, graph: MultiGraph, rotation: Dict[str, List[Tuple[str, int]]],
                 segments: Dict[str, List[str]], cycles: Dict[Tuple[str, str], List[str]]):
        self.graph = graph
        self.rotation = rotation
        self.segments = segments
        self.cycles = cycles
        self.checks: Dict[str, bool] = {}

    def to_dict(self):
        return {
            'vertices': list(self.graph.vertices),
            'edges': [[e, u, v] for e, (u, v) in self.graph.edges.items()],
            'rotation': {v: [[e, side] for e, side in ends] for v, ends in self.rotation.items()},
            'segments': self.segments,
            'cycles': [{'parent': p, 'child': c, 'edges': edges} for (p, c), edges in self.cycles.items()],
            'checks': self.checks
        }
