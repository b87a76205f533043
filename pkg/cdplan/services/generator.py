"""
Generator service: seeded random clustered graphs with planar underlying graphs
"""
import random
from itertools import combinations
from typing import Dict, List, Optional, Set

import networkx as nx

from cdplan.models.clustered_graph import ClusteredGraph
from cdplan.models.multigraph import MultiGraph
from cdplan.services.errors import ArgumentError, GeneratorError
from cdplan.utils.context import get_logger, setting

MODES = ('flat', 'nested')


class GeneratorConfig:
    """Knobs of the random instance generator"""

    def __init__(self, n: int = 8, mode: str = 'flat', clusters: int = 2, min_size: int = 2,
                 max_size: Optional[int] = None, extra_edges: int = 3, force_connected: bool = False,
                 max_outgoing: Optional[int] = None, seed: int = 0, planar: bool = True,
                 edgeless_clusters: bool = False):
        self.n = n
        self.mode = mode
        self.clusters = clusters
        self.min_size = min_size
        self.max_size = max_size if max_size is not None else max(n - 1, 1)
        self.extra_edges = extra_edges
        self.force_connected = force_connected
        self.max_outgoing = max_outgoing
        self.seed = seed
        self.planar = planar
        self.edgeless_clusters = edgeless_clusters
        self._validate()

    def _validate(self):
        if self.n < 1:
            raise ArgumentError("Generator needs at least one vertex")
        if self.mode not in MODES:
            raise ArgumentError(f"Unknown generator mode: {self.mode}")
        if self.clusters < 0 or self.extra_edges < 0:
            raise ArgumentError("Cluster and extra edge counts must be non-negative")
        if self.clusters and not 2 <= self.min_size <= self.max_size:
            raise ArgumentError(f"Invalid cluster size bounds [{self.min_size}, {self.max_size}]")
        if self.max_outgoing is not None and self.max_outgoing < 0:
            raise ArgumentError("max_outgoing must be non-negative")
        if self.force_connected and self.edgeless_clusters:
            raise ArgumentError("Clusters cannot be both connected and edgeless")

    def to_dict(self):
        return {
            'n': self.n,
            'mode': self.mode,
            'clusters': self.clusters,
            'min_size': self.min_size,
            'max_size': self.max_size,
            'extra_edges': self.extra_edges,
            'force_connected': self.force_connected,
            'max_outgoing': self.max_outgoing,
            'seed': self.seed,
            'planar': self.planar,
            'edgeless_clusters': self.edgeless_clusters
        }


def _random_graph(cfg: GeneratorConfig, rng: random.Random) -> nx.Graph:
    """Random spanning tree plus extra edges, each kept only while the graph stays planar"""
    g = nx.Graph()
    names = [f"v{i}" for i in range(cfg.n)]
    g.add_nodes_from(names)
    for i in range(1, cfg.n):
        g.add_edge(names[rng.randrange(i)], names[i])

    pairs = [(u, v) for u, v in combinations(names, 2) if not g.has_edge(u, v)]
    rng.shuffle(pairs)
    added = 0
    for u, v in pairs:
        if added == cfg.extra_edges:
            break
        g.add_edge(u, v)
        if cfg.planar and not nx.is_planar(g):
            g.remove_edge(u, v)
            continue
        added += 1
    return g


def _grow(g: nx.Graph, pool: Set[str], size: int, cfg: GeneratorConfig, rng: random.Random) -> Optional[Set[str]]:
    if size > len(pool):
        return None
    if cfg.edgeless_clusters:
        chosen: Set[str] = set()
        while len(chosen) < size:
            free = sorted(u for u in pool - chosen if not any(w in chosen for w in g.neighbors(u)))
            if not free:
                return None
            chosen.add(rng.choice(free))
        return chosen
    if not cfg.force_connected:
        return set(rng.sample(sorted(pool), size))
    chosen = {rng.choice(sorted(pool))}
    while len(chosen) < size:
        frontier = sorted({w for u in chosen for w in g.neighbors(u) if w in pool and w not in chosen})
        if not frontier:
            return None
        chosen.add(rng.choice(frontier))
    return chosen


def _outgoing(g: nx.Graph, members: Set[str]) -> int:
    return sum(1 for u, v in g.edges() if (u in members) != (v in members))


def _place_clusters(cfg: GeneratorConfig, g: nx.Graph, rng: random.Random) -> Optional[Dict[str, List[str]]]:
    """Laminar cluster family as a children table, or None when this attempt fails"""
    vertices = set(g.nodes)
    members: Dict[str, Set[str]] = {'root': set(vertices)}
    direct: Dict[str, Set[str]] = {'root': set(vertices)}
    parent_of: Dict[str, str] = {}

    for i in range(1, cfg.clusters + 1):
        name = f"C{i}"
        parent = 'root' if cfg.mode == 'flat' else rng.choice(sorted(members))
        pool = direct[parent]
        upper = min(cfg.max_size, len(members[parent]) - 1, len(pool))
        if upper < cfg.min_size:
            return None
        chosen = _grow(g, pool, rng.randint(cfg.min_size, upper), cfg, rng)
        if chosen is None:
            return None
        if cfg.max_outgoing is not None and _outgoing(g, chosen) > cfg.max_outgoing:
            return None
        members[name] = chosen
        direct[name] = set(chosen)
        direct[parent] -= chosen
        parent_of[name] = parent

    children: Dict[str, List[str]] = {c: sorted(direct[c]) for c in members}
    for name in sorted(parent_of, key=lambda c: int(c[1:])):
        children[parent_of[name]].append(name)
    return children


def generate(cfg: GeneratorConfig) -> ClusteredGraph:
    """Seeded random clustered graph meeting every knob of the configuration"""
    log = get_logger()
    rng = random.Random(cfg.seed)
    retries = setting('GENERATOR_RETRIES', 200)

    for attempt in range(retries):
        g = _random_graph(cfg, rng)
        children = _place_clusters(cfg, g, rng)
        if children is None:
            continue
        graph = MultiGraph(sorted(g.nodes, key=lambda x: int(x[1:])),
                           [(f"{u}-{v}", u, v) for u, v in sorted(g.edges())])
        log.info(f"Generated instance after {attempt + 1} attempts: {cfg.n} vertices, "
                 f"{graph.number_of_edges()} edges, {cfg.clusters} clusters")
        return ClusteredGraph(graph, children)

    log.error(f"Generator gave up after {retries} attempts: {cfg.to_dict()}")
    raise GeneratorError(f"No instance satisfies the configuration after {retries} attempts")
