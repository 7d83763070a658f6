"""Instances, reported profiles and spreading graphs.

Agents are addressed by string ids. Internally every instance fixes an index
order (sorted ids, which is also the tie-break order) and neighbour sets are
kept as integer bitmasks over that order, so reachability questions reduce to
a handful of bit operations. All the counterfactual quantities the mechanisms
need (``H`` of the profile with one agent removed, distances, cut sets) are
computed once per profile by :func:`analyze` and cached.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from .errors import NoActivatedBidder, UnknownAgent
from .money import Money, MoneyLike, as_money

logger = logging.getLogger(__name__)

SELLER = "s"


@dataclass(frozen=True)
class Report:
    """A present agent's report: a bid and the neighbours she informs."""

    bid: Money
    neighbors: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        bid = as_money(self.bid)
        if bid < 0:
            raise ValueError(f"bids must be non-negative, got {bid}")
        object.__setattr__(self, "bid", bid)
        object.__setattr__(self, "neighbors", frozenset(self.neighbors))


ABSENT = None  # the empty report: the agent does not attend


class Instance:
    """The true social network together with private valuations.

    ``valuations`` fixes the agent set (its iteration order is kept as the
    display order). Neighbour entries naming the seller or the agent herself
    are dropped with a warning; entries naming undeclared agents are errors.
    """

    __slots__ = (
        "agents", "declared", "valuations", "neighbors", "seller_neighbors",
        "_index", "_masks", "_seller_mask", "_hash",
    )

    def __init__(
        self,
        seller_neighbors: Iterable[str],
        valuations: Mapping[str, MoneyLike],
        neighbors: Optional[Mapping[str, Iterable[str]]] = None,
    ):
        neighbors = neighbors or {}
        declared = tuple(valuations)
        if SELLER in declared:
            raise ValueError(f"{SELLER!r} is reserved for the seller")
        ids = set(declared)
        for owner in neighbors:
            if owner not in ids:
                raise UnknownAgent(owner)
        vals = {}
        for agent in declared:
            v = as_money(valuations[agent])
            if v < 0:
                raise ValueError(f"valuation of {agent!r} is negative")
            vals[agent] = v
        nbrs = {}
        for agent in declared:
            kept = set()
            for other in neighbors.get(agent, ()):
                if other == agent or other == SELLER:
                    logger.warning("dropping neighbour %r of %r", other, agent)
                    continue
                if other not in ids:
                    raise UnknownAgent(other)
                kept.add(other)
            nbrs[agent] = frozenset(kept)
        seller = set()
        for other in seller_neighbors:
            if other == SELLER:
                logger.warning("dropping seller self-loop")
                continue
            if other not in ids:
                raise UnknownAgent(other)
            seller.add(other)

        self.declared = declared
        self.agents = tuple(sorted(declared))
        self.valuations = vals
        self.neighbors = nbrs
        self.seller_neighbors = frozenset(seller)
        self._index = {a: k for k, a in enumerate(self.agents)}
        self._masks = tuple(self.mask_of(nbrs[a]) for a in self.agents)
        self._seller_mask = self.mask_of(seller)
        self._hash = None

    def index(self, agent: str) -> int:
        try:
            return self._index[agent]
        except KeyError:
            raise UnknownAgent(agent) from None

    def mask_of(self, agents: Iterable[str]) -> int:
        mask = 0
        for a in agents:
            mask |= 1 << self._index[a]
        return mask

    def ids_of(self, mask: int) -> frozenset:
        return frozenset(self.agents[k] for k in bit_list(mask))

    def __len__(self):
        return len(self.agents)

    def __contains__(self, agent):
        return agent in self._index

    def _key(self):
        return (
            self.seller_neighbors,
            tuple((a, self.valuations[a], self.neighbors[a]) for a in self.agents),
        )

    def __eq__(self, other):
        return isinstance(other, Instance) and self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        return (
            f"Instance(seller_neighbors={sorted(self.seller_neighbors)}, "
            f"agents={{{', '.join(f'{a}: {self.valuations[a]}' for a in self.declared)}}})"
        )


class GlobalProfile:
    """One report (or :data:`ABSENT`) per agent of an instance."""

    __slots__ = ("instance", "reports", "_compact")

    def __init__(self, instance: Instance, reports: Mapping[str, Optional[Report]] = None):
        reports = dict(reports or {})
        for agent in reports:
            instance.index(agent)
        row = []
        for agent in instance.agents:
            if agent in reports:
                rep = reports[agent]
                if rep is not None:
                    rep = _clean_report(instance, agent, rep)
            else:
                rep = Report(instance.valuations[agent], instance.neighbors[agent])
            row.append(rep)
        self.instance = instance
        self.reports = tuple(row)
        self._compact = None

    @classmethod
    def truthful(cls, instance: Instance) -> "GlobalProfile":
        return cls(instance)

    def report(self, agent: str) -> Optional[Report]:
        return self.reports[self.instance.index(agent)]

    def replace(self, agent: str, report: Optional[Report]) -> "GlobalProfile":
        """The profile ``(report, a'_{-agent})``."""
        self.instance.index(agent)
        current = dict(zip(self.instance.agents, self.reports))
        current[agent] = report
        return GlobalProfile(self.instance, current)

    def as_mapping(self) -> Dict[str, Optional[Report]]:
        return dict(zip(self.instance.agents, self.reports))

    def is_truthful(self) -> bool:
        inst = self.instance
        return all(
            rep is not None
            and rep.bid == inst.valuations[a]
            and rep.neighbors == inst.neighbors[a]
            for a, rep in zip(inst.agents, self.reports)
        )

    @property
    def compact(self) -> Tuple[int, tuple, tuple]:
        """``(seller_mask, bids, out_masks)`` with ``None`` bids for absent agents."""
        if self._compact is None:
            inst = self.instance
            bids = tuple(None if r is None else r.bid for r in self.reports)
            adj = tuple(0 if r is None else inst.mask_of(r.neighbors) for r in self.reports)
            self._compact = (inst._seller_mask, bids, adj)
        return self._compact

    def analysis(self) -> "Analysis":
        return analyze(*self.compact)

    def __eq__(self, other):
        return (
            isinstance(other, GlobalProfile)
            and self.instance == other.instance
            and self.reports == other.reports
        )

    def __hash__(self):
        return hash((self.instance, self.reports))

    def __repr__(self):
        parts = []
        for a, r in zip(self.instance.agents, self.reports):
            parts.append(f"{a}: ∅" if r is None else f"{a}: ({r.bid}, {sorted(r.neighbors)})")
        return "GlobalProfile({" + ", ".join(parts) + "})"


def _clean_report(instance: Instance, agent: str, report: Report) -> Report:
    bad = [x for x in report.neighbors if x == agent or x == SELLER or x not in instance]
    if not bad:
        return report
    logger.warning("dropping reported neighbours %s of %r", sorted(bad), agent)
    return Report(report.bid, report.neighbors.difference(bad))


# --- bitmask engine ---------------------------------------------------------


@lru_cache(maxsize=None)
def bit_list(mask: int) -> Tuple[int, ...]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return tuple(out)


def reach(start: int, adj: tuple, blocked: int = 0) -> int:
    """Nodes reachable from the ``start`` set, never entering ``blocked``."""
    seen = start & ~blocked
    frontier = seen
    while frontier:
        nxt = 0
        for k in bit_list(frontier):
            nxt |= adj[k]
        frontier = nxt & ~seen & ~blocked
        seen |= frontier
    return seen


@lru_cache(maxsize=1 << 18)
def _structure(seller: int, adj: tuple):
    """Activated mask, BFS distances and, per activated agent, what survives her removal."""
    n = len(adj)
    dist = [-1] * n
    seen = seller
    frontier = seller
    d = 1
    while frontier:
        nxt = 0
        for k in bit_list(frontier):
            dist[k] = d
            nxt |= adj[k]
        frontier = nxt & ~seen
        seen |= frontier
        d += 1
    survivors = [0] * n
    for k in bit_list(seen):
        survivors[k] = reach(seller, adj, 1 << k)
    return seen, tuple(dist), tuple(survivors)


class Analysis:
    """Everything about one (implicitly trimmed) profile that mechanisms consume.

    ``h_removed[k]`` is ``H(a'_{-[k]})``; for agents that are not activated it
    equals ``top`` since removing them changes nothing.
    """

    __slots__ = (
        "bids", "adj", "seller", "activated", "bidders", "dist", "survivors",
        "top", "highest", "top_count", "h_removed",
    )

    def __init__(self, seller: int, bids: tuple, adj: tuple):
        present = 0
        for k, b in enumerate(bids):
            if b is not None:
                present |= 1 << k
        # absent agents relay nothing
        eff = tuple(a if b is not None else 0 for a, b in zip(adj, bids))
        activated, dist, survivors = _structure(seller, eff)
        bidders = activated & present
        self.bids = bids
        self.adj = eff
        self.seller = seller
        self.activated = activated
        self.bidders = bidders
        self.dist = dist
        self.survivors = survivors

        top = 0
        highest = None
        count = 0
        for k in bit_list(bidders):
            b = bids[k]
            if highest is None or b > top:
                top, highest, count = b, k, 1
            elif b == top:
                count += 1
        self.top = top
        self.highest = highest
        self.top_count = count

        h = [top] * len(bids)
        for k in bit_list(activated):
            best = 0
            for j in bit_list(survivors[k] & present):
                if bids[j] > best:
                    best = bids[j]
            h[k] = best
        self.h_removed = tuple(h)

    def h_detached(self, k: int):
        """``H(a'_{-(k)})``: the agent stays with her bid but informs nobody."""
        b = self.bids[k]
        h = self.h_removed[k]
        if b is None or not (self.activated >> k) & 1:
            return h
        return b if b > h else h

    def require_bidder(self) -> int:
        if self.highest is None:
            raise NoActivatedBidder("no activated agent submitted a bid")
        return self.highest


@lru_cache(maxsize=1 << 16)
def analyze(seller: int, bids: tuple, adj: tuple) -> Analysis:
    return Analysis(seller, bids, adj)


# --- public operations ------------------------------------------------------


@dataclass(frozen=True)
class SpreadingGraph:
    nodes: frozenset
    edges: frozenset  # (tail, head) pairs; the seller is SELLER
    distance: Mapping[str, int]

    def successors(self, node: str) -> List[str]:
        return sorted(h for t, h in self.edges if t == node)


def build_spreading_graph(profile: GlobalProfile) -> SpreadingGraph:
    an = profile.analysis()
    inst = profile.instance
    # absent agents do not attend, so they are not nodes even when informed
    nodes = {SELLER} | inst.ids_of(an.bidders)
    edges = {(SELLER, inst.agents[k]) for k in bit_list(an.seller & an.bidders)}
    for k in bit_list(an.bidders):
        for j in bit_list(an.adj[k] & an.bidders):
            edges.add((inst.agents[k], inst.agents[j]))
    distance = {SELLER: 0}
    for k in bit_list(an.bidders):
        distance[inst.agents[k]] = an.dist[k]
    return SpreadingGraph(frozenset(nodes), frozenset(edges), distance)


def activated(profile: GlobalProfile) -> frozenset:
    """Present agents reachable from the seller."""
    return profile.instance.ids_of(profile.analysis().bidders)


def trim(profile: GlobalProfile) -> GlobalProfile:
    """Set every unactivated agent's report to :data:`ABSENT`."""
    act = profile.analysis().activated
    inst = profile.instance
    reports = {
        a: (r if (act >> k) & 1 else None)
        for k, (a, r) in enumerate(zip(inst.agents, profile.reports))
    }
    return GlobalProfile(inst, reports)


def highest_bid(profile: GlobalProfile) -> Money:
    """``H(a')``; zero when no activated agent bids."""
    return Fraction(profile.analysis().top)


def highest_bidder(profile: GlobalProfile) -> str:
    """Activated agent with the top bid, smallest id on ties."""
    return profile.instance.agents[profile.analysis().require_bidder()]


class Removal(enum.Enum):
    REMOVED = "removed"    # a'_{-[i]}
    DETACHED = "detached"  # a'_{-(i)}


def counterfactual(profile: GlobalProfile, agent: str, mode: Removal) -> GlobalProfile:
    """Built explicitly (not from the cached analysis) so it can serve as an oracle."""
    rep = profile.report(agent)
    if mode is Removal.REMOVED or rep is None:
        new = None
    else:
        new = Report(rep.bid, frozenset())
    return trim(profile.replace(agent, new))


def iter_reports(profile: GlobalProfile) -> Iterator[Tuple[str, Optional[Report]]]:
    return zip(profile.instance.agents, profile.reports)
