"""Named instances and hand-built counterexamples.

Every counterexample is a :class:`Witness` with hard-coded utilities; the
test suite replays each one through the public API.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict

from ..mechanisms import IDM, PVCG, VCG, delta_ivcg_id
from ..model import Instance, Report
from .engine import IC, WBB, Witness, fnp
from .falsename import Attack, AttackModel


def e1() -> Instance:
    """Chain s -> a -> b with a valued 0 and b valued 1."""
    return Instance(["a"], {"a": 0, "b": 1}, {"a": ["b"]})


def t2() -> Instance:
    """Two branches below the seller; c holds the top bid under a."""
    return Instance(["a", "b"], {"a": 1, "b": 1, "c": 4, "d": 2}, {"a": ["c", "d"]})


def w() -> Instance:
    """Five agents with a deep top bidder behind two cut vertices."""
    return Instance(
        ["j1"],
        {"j1": 4, "x": 7, "a": 20, "j2": 100, "b": 30},
        {"j1": ["x", "a"], "a": ["j2"], "j2": ["b"]},
    )


def f3() -> Instance:
    """Chain s -> a -> b with a valued 10 and b valued 100."""
    return Instance(["a"], {"a": 10, "b": 100}, {"a": ["b"]})


def gap_chain() -> Instance:
    """s -> j1 -> x -> j2 with bids 1, 2, 3: a delta-gap profile at delta 1."""
    return Instance(["j1"], {"j1": 1, "x": 2, "j2": 3}, {"j1": ["x"], "x": ["j2"]})


def idm_branch() -> Instance:
    """s -> a -> b -> t with bids 1, 0, 3."""
    return Instance(["a"], {"a": 1, "b": 0, "t": 3}, {"a": ["b"], "b": ["t"]})


NAMED = {"e1": e1, "t2": t2, "w": w, "f3": f3, "gap-chain": gap_chain, "idm-branch": idm_branch}


def _type2(attacker, replica, own_bid, own_next, replica_bid, replica_nbrs) -> Attack:
    return Attack(
        AttackModel("type2", 1), attacker, (replica,),
        ((attacker, Report(own_bid, frozenset({own_next}))),
         (replica, Report(replica_bid, frozenset(replica_nbrs)))),
    )


def counterexamples() -> Dict[str, Witness]:
    """Known violations, each with the utilities it should reproduce."""
    f3_attack = _type2("a", "a'", 10, "a'", 20, {"b"})
    gap_attack = _type2("j1", "j1'", 1, "j1'", Fraction(5, 2), {"x"})
    idm_attack = Attack(
        AttackModel("type1", 1), "a", ("a'",),
        (("a", Report(1, frozenset({"b", "a'"}))), ("a'", Report(2, frozenset()))),
    )
    return {
        "vcg-deficit": Witness(VCG, WBB, e1(), None, observed=Fraction(-1)),
        "vcg-chain-replica": Witness(VCG, fnp("type2:1"), f3(), "a", attack=f3_attack,
                                     expected=Fraction(100), observed=Fraction(190)),
        "pvcg-chain-replica": Witness(PVCG, fnp("type2:1"), f3(), "a", attack=f3_attack,
                                      expected=Fraction(10), observed=Fraction(20)),
        "pvcg-overbid": Witness(PVCG, IC, w(), "a", (("a", Report(25, frozenset({"j2"}))),),
                                expected=Fraction(13), observed=Fraction(18)),
        "delta-ivcg-gap-replica": Witness(delta_ivcg_id(1), fnp("type2:1"), gap_chain(), "j1",
                                          attack=gap_attack, expected=Fraction(1),
                                          observed=Fraction(3, 2)),
        "idm-parallel-replica": Witness(IDM, fnp("type1:1"), idm_branch(), "a", attack=idm_attack,
                                        expected=Fraction(1), observed=Fraction(2)),
    }
