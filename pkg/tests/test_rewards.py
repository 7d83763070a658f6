from fractions import Fraction

import pytest
from hypothesis import given, settings

from netauction.errors import AmbiguousHighestBidder, NotCritical, UnknownAgent
from netauction.model import GlobalProfile, Instance, Removal, counterfactual, highest_bid
from netauction.rewards import (
    critical_sequence, is_critical_ancestor, leading_agent, participation_reward,
    reward, reward_table,
)

import reference
from conftest import profiles, report_map


def truthful(inst):
    return GlobalProfile.truthful(inst)


def test_rewards_on_small_chains(e1, f3, w):
    assert reward(truthful(e1), "a") == 1
    assert reward(truthful(f3), "a") == 100
    assert reward(truthful(w), "x") == 0


def test_participation_rewards(f3, w):
    assert participation_reward(truthful(f3), "a") == 10
    assert participation_reward(truthful(w), "a") == 13
    assert participation_reward(truthful(w), "x") == 0


def test_reward_of_unknown_agent(w):
    with pytest.raises(UnknownAgent):
        reward(truthful(w), "nobody")


def test_two_branch_table(t2):
    table = reward_table(truthful(t2))
    assert table.critical == {"a", "c"}
    assert table.interruption == {"c"}
    assert table.leading == "c"
    assert (table["a"].rwd, table["c"].rwd) == (3, 2)
    assert (table["a"].prwd, table["c"].prwd) == (0, 2)


def test_deep_table(w):
    table = reward_table(truthful(w))
    assert table.interruption == {"j1", "a", "j2"}
    assert table.leading == "j1"
    assert [table[a].prwd for a in ("j1", "x", "a", "j2", "b")] == [4, 0, 13, 80, 0]


def test_tied_top_has_no_critical_agents():
    inst = Instance(["p", "q"], {"p": 5, "q": 5})
    table = reward_table(truthful(inst))
    assert table.critical == frozenset() and table.leading is None


def test_critical_ancestry(w, t2):
    assert is_critical_ancestor(truthful(w), "j1", "j2")
    assert not is_critical_ancestor(truthful(w), "j2", "j1")
    assert is_critical_ancestor(truthful(t2), "a", "c")


def test_ancestry_needs_critical_agents(w):
    with pytest.raises(NotCritical):
        is_critical_ancestor(truthful(w), "x", "j2")


def test_critical_sequences(w, t2):
    assert critical_sequence(truthful(w)) == ["j1", "a", "j2"]
    assert critical_sequence(truthful(t2), "c") == ["a", "c"]
    assert critical_sequence(truthful(Instance(["p"], {"p": 5}))) == ["p"]


def test_sequence_refuses_tied_top():
    with pytest.raises(AmbiguousHighestBidder):
        critical_sequence(truthful(Instance(["p", "q"], {"p": 5, "q": 5})))


def test_lone_zero_bid_sequence():
    assert critical_sequence(truthful(Instance(["p"], {"p": 0}))) == ["p"]


@settings(max_examples=300, deadline=None)
@given(profiles())
def test_rewards_match_reference(p):
    if highest_bid(p) == 0 and not reference.bidders(p.instance, report_map(p)):
        return
    reports = report_map(p)
    bids = reference.bidders(p.instance, reports)
    if not bids:
        return
    table = reward_table(p)
    for row in table.rows:
        assert row.rwd == reference.rwd(p.instance, reports, row.agent)
        assert row.prwd == reference.prwd(p.instance, reports, row.agent)
        assert 0 <= row.prwd <= row.rwd
        assert row.is_critical or not row.is_interruption
    assert table.leading == reference.leading(p.instance, reports)


@settings(max_examples=300, deadline=None)
@given(profiles())
def test_interruption_agents_win_when_detached(p):
    reports = report_map(p)
    if not reference.bidders(p.instance, reports):
        return
    table = reward_table(p)
    total = sum((r.prwd for r in table.rows), Fraction(0))
    assert total <= highest_bid(p)
    for a in table.interruption:
        d = counterfactual(p, a, Removal.DETACHED)
        bids = reference.bidders(p.instance, report_map(d))
        assert bids[a] == max(bids.values())
        assert sum(1 for x in bids.values() if x == bids[a]) == 1


@settings(max_examples=300, deadline=None)
@given(profiles())
def test_unique_top_bidder_sits_below_every_critical_agent(p):
    reports = report_map(p)
    bids = reference.bidders(p.instance, reports)
    if not bids or list(bids.values()).count(max(bids.values())) > 1:
        return
    seq = critical_sequence(p)
    target = seq[-1]
    for c in seq[:-1]:
        assert is_critical_ancestor(p, c, target)
