"""Exhaustive families of small instances.

A family is every seller-rooted connected network on up to ``max_agents``
agents (up to relabelling), crossed with every assignment of integer
valuations ``0..bid_max`` (up to the network's automorphisms). Networks are
undirected by default, as social ties are; ``shapes="directed"`` enumerates
seller-rooted digraphs instead and is only practical for three agents or
fewer.
"""
from __future__ import annotations

import itertools
import string
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher, GraphMatcher

from ..model import Instance

ROOT = "s"


def agent_names(n: int) -> List[str]:
    return list(string.ascii_lowercase[:n])


def _root_match(a, b):
    return a.get("root", False) == b.get("root", False)


def _dedupe(graphs, directed):
    buckets = {}
    out = []
    for g in graphs:
        h = nx.weisfeiler_lehman_graph_hash(g, node_attr="tag")
        bucket = buckets.setdefault(h, [])
        if any(nx.is_isomorphic(g, o, node_match=_root_match) for o in bucket):
            continue
        bucket.append(g)
        out.append(g)
    return out


def _tagged(g):
    for v in g:
        g.nodes[v]["root"] = v == ROOT
        g.nodes[v]["tag"] = "s" if v == ROOT else "a"
    return g


@lru_cache(maxsize=None)
def _undirected_shapes(n: int) -> Tuple[nx.Graph, ...]:
    if n == 0:
        g = nx.Graph()
        g.add_node(ROOT)
        return (_tagged(g),)
    # every connected rooted graph loses a non-root non-cut vertex and stays
    # connected, so extending the smaller shapes by one vertex is exhaustive
    cands = []
    for base in _undirected_shapes(n - 1):
        old = sorted(base.nodes, key=str)
        for r in range(1, len(old) + 1):
            for attach in itertools.combinations(old, r):
                g = base.copy()
                g.add_node(n - 1)
                g.add_edges_from((n - 1, u) for u in attach)
                cands.append(_tagged(g))
    return tuple(_dedupe(cands, directed=False))


@lru_cache(maxsize=None)
def _directed_shapes(n: int) -> Tuple[nx.DiGraph, ...]:
    nodes = [ROOT] + list(range(n))
    arcs = [(ROOT, j) for j in range(n)] + [(i, j) for i in range(n) for j in range(n) if i != j]
    cands = []
    for mask in range(1 << len(arcs)):
        g = nx.DiGraph()
        g.add_nodes_from(nodes)
        g.add_edges_from(a for k, a in enumerate(arcs) if mask >> k & 1)
        if len(nx.descendants(g, ROOT)) != n:
            continue
        cands.append(_tagged(g))
    return tuple(_dedupe(cands, directed=True))


@dataclass(frozen=True)
class Shape:
    """A rooted network with agents relabelled ``a, b, ...`` in BFS order."""

    n: int
    seller_neighbors: Tuple[str, ...]
    neighbors: Tuple[Tuple[str, Tuple[str, ...]], ...]
    automorphisms: Tuple[Tuple[int, ...], ...]  # permutations of agent positions


def _as_shape(g, directed: bool) -> Shape:
    agents = [v for v in g if v != ROOT]
    dist = nx.single_source_shortest_path_length(g, ROOT)
    order = sorted(agents, key=lambda v: (dist[v], v))
    names = agent_names(len(order))
    rename = {v: names[k] for k, v in enumerate(order)}
    succ = g.successors if directed else g.neighbors
    seller = tuple(sorted(rename[v] for v in succ(ROOT)))
    nbrs = tuple(
        (rename[v], tuple(sorted(rename[u] for u in succ(v) if u != ROOT)))
        for v in order
    )
    matcher = (DiGraphMatcher if directed else GraphMatcher)(g, g, node_match=_root_match)
    pos = {v: k for k, v in enumerate(order)}
    autos = set()
    for iso in matcher.isomorphisms_iter():
        autos.add(tuple(pos[iso[v]] for v in order))
    return Shape(len(order), seller, nbrs, tuple(sorted(autos)))


@lru_cache(maxsize=None)
def shapes(n: int, directed: bool = False) -> Tuple[Shape, ...]:
    graphs = _directed_shapes(n) if directed else _undirected_shapes(n)
    return tuple(_as_shape(g, directed) for g in graphs)


def _orbit_minimal(bids: tuple, autos) -> bool:
    for perm in autos:
        image = tuple(bids[perm[k]] for k in range(len(bids)))
        if image < bids:
            return False
    return True


def shape_instance(shape: Shape, bids) -> Instance:
    names = agent_names(shape.n)
    return Instance(
        shape.seller_neighbors,
        dict(zip(names, bids)),
        dict(shape.neighbors),
    )


@dataclass(frozen=True)
class InstanceFamily:
    max_agents: int
    bid_max: int
    min_agents: int = 1
    shapes: str = "undirected"

    def __post_init__(self):
        if self.shapes not in ("undirected", "directed"):
            raise ValueError(f"unknown shape class {self.shapes!r}")
        if self.min_agents < 1 or self.max_agents < self.min_agents:
            raise ValueError("need 1 <= min_agents <= max_agents")
        if self.bid_max < 0:
            raise ValueError("bid_max must be non-negative")

    def shape_list(self) -> List[Shape]:
        directed = self.shapes == "directed"
        out = []
        for n in range(self.min_agents, self.max_agents + 1):
            out.extend(shapes(n, directed))
        return out

    def __iter__(self) -> Iterator[Instance]:
        for shape in self.shape_list():
            for bids in itertools.product(range(self.bid_max + 1), repeat=shape.n):
                if _orbit_minimal(bids, shape.automorphisms):
                    yield shape_instance(shape, bids)

    def count(self) -> int:
        return sum(1 for _ in self.iter_bid_vectors())

    def iter_bid_vectors(self):
        for shape in self.shape_list():
            for bids in itertools.product(range(self.bid_max + 1), repeat=shape.n):
                if _orbit_minimal(bids, shape.automorphisms):
                    yield shape, bids

    def describe(self) -> str:
        return f"{self.shapes} networks, {self.min_agents}..{self.max_agents} agents, bids 0..{self.bid_max}"
