"""Rewards, participation rewards and the critical structure of a profile."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import AmbiguousHighestBidder, NotCritical
from .model import Analysis, GlobalProfile, bit_list
from .money import Money


def reward(profile: GlobalProfile, agent: str) -> Money:
    """``H(a') - H(a'_{-[agent]})``."""
    k = profile.instance.index(agent)
    an = profile.analysis()
    return Fraction(an.top - an.h_removed[k])


def participation_reward(profile: GlobalProfile, agent: str) -> Money:
    """``H(a'_{-(agent)}) - H(a'_{-[agent]})``."""
    k = profile.instance.index(agent)
    an = profile.analysis()
    return Fraction(an.h_detached(k) - an.h_removed[k])


# index-level helpers shared with the mechanisms and the audit


def interruption_agents(an: Analysis) -> List[int]:
    """Agents with a positive participation reward.

    ``H(a'_{-(k)}) = max(bid_k, H(a'_{-[k]}))``, so the participation reward
    is positive exactly when the agent outbids everything left after removing
    her.
    """
    bids, h = an.bids, an.h_removed
    return [k for k in bit_list(an.bidders) if bids[k] > h[k]]


def critical_agents(an: Analysis) -> List[int]:
    top, h = an.top, an.h_removed
    return [k for k in bit_list(an.bidders) if h[k] < top]


def leading_index(an: Analysis) -> Optional[int]:
    """Closest interruption agent to the seller.

    Interruption agents form a chain of cut vertices, so two of them never
    share a distance; a tie would mean the model is broken.
    """
    best = None
    for k in interruption_agents(an):
        if best is None or an.dist[k] < an.dist[best]:
            best = k
        else:
            assert an.dist[k] != an.dist[best], "interruption agents at equal distance"
    return best


def sequence_indices(an: Analysis) -> List[int]:
    """Critical agents ordered by distance; ends at the unique highest bidder."""
    an.require_bidder()
    if an.top_count > 1:
        raise AmbiguousHighestBidder("the top bid is shared; no critical sequence")
    # a lone zero bid makes nobody critical, yet its bidder still ends the sequence
    seq = sorted(set(critical_agents(an)) | {an.highest}, key=lambda k: an.dist[k])
    assert seq[-1] == an.highest
    assert all(an.dist[a] < an.dist[b] for a, b in zip(seq, seq[1:]))
    return seq


@dataclass(frozen=True)
class AgentRewards:
    agent: str
    bid: Money
    distance: int
    rwd: Money
    prwd: Money

    @property
    def is_critical(self) -> bool:
        return self.rwd > 0

    @property
    def is_interruption(self) -> bool:
        return self.prwd > 0


@dataclass(frozen=True)
class RewardTable:
    rows: Tuple[AgentRewards, ...]
    leading: Optional[str]

    def __getitem__(self, agent: str) -> AgentRewards:
        for row in self.rows:
            if row.agent == agent:
                return row
        raise KeyError(agent)

    @property
    def critical(self) -> frozenset:
        return frozenset(r.agent for r in self.rows if r.is_critical)

    @property
    def interruption(self) -> frozenset:
        return frozenset(r.agent for r in self.rows if r.is_interruption)


def reward_table(profile: GlobalProfile) -> RewardTable:
    """Per activated bidder rewards, in the instance's declaration order."""
    an = profile.analysis()
    an.require_bidder()
    inst = profile.instance
    rows = []
    for agent in inst.declared:
        k = inst.index(agent)
        if not (an.bidders >> k) & 1:
            continue
        rows.append(AgentRewards(
            agent=agent,
            bid=Fraction(an.bids[k]),
            distance=an.dist[k],
            rwd=Fraction(an.top - an.h_removed[k]),
            prwd=Fraction(an.h_detached(k) - an.h_removed[k]),
        ))
    lead = leading_index(an)
    return RewardTable(tuple(rows), None if lead is None else inst.agents[lead])


def leading_agent(profile: GlobalProfile) -> Optional[str]:
    lead = leading_index(profile.analysis())
    return None if lead is None else profile.instance.agents[lead]


def is_critical_ancestor(profile: GlobalProfile, ancestor: str, descendant: str) -> bool:
    """True when removing ``ancestor`` cuts ``descendant`` off from the seller."""
    inst = profile.instance
    i, j = inst.index(ancestor), inst.index(descendant)
    an = profile.analysis()
    for agent, k in ((ancestor, i), (descendant, j)):
        if not an.h_removed[k] < an.top or not (an.bidders >> k) & 1:
            raise NotCritical(agent)
    if i == j:
        return False
    return not (an.survivors[i] >> j) & 1


def critical_sequence(profile: GlobalProfile, target: Optional[str] = None) -> List[str]:
    """Critical agents by increasing distance, ending at the highest bidder.

    ``target`` may be passed for clarity but must be the unique highest bidder.
    """
    an = profile.analysis()
    seq = sequence_indices(an)
    names = [profile.instance.agents[k] for k in seq]
    if target is not None and target != names[-1]:
        raise ValueError(f"{target!r} is not the unique highest bidder")
    return names
