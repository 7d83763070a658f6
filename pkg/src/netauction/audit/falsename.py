"""False-name (Sybil) attacks.

An attacker ``i`` adds replicas of herself. The coalition ``{i} ∪ RL`` may
report any bids and any neighbour subsets of ``r_i ∪ RL ∪ {i}``; everything
the replicas win or receive accrues to ``i``. Three attack families:

* ``type1`` -- replicas hang in parallel off the attacker, no edges between
  them, each informing a subset of the attacker's true neighbours;
* ``type2`` -- the attacker points only to ``rl_1``, which points only to
  ``rl_2`` and so on; the last replica informs a subset of ``r_i``;
* ``general`` -- every wiring at a given replica count.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from ..errors import MalformedAttack
from ..mechanisms import MechanismId, run
from ..model import SELLER, GlobalProfile, Instance, Report, bit_list, reach
from ..money import Money
from .deviations import submasks

KINDS = ("type1", "type2", "general")


@dataclass(frozen=True)
class AttackModel:
    kind: str
    k: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown attack model {self.kind!r}")
        if self.k < 0 or (self.k == 0 and self.kind != "general"):
            raise ValueError("replica count must be at least 1")

    @classmethod
    def parse(cls, text: str) -> "AttackModel":
        """``"type2:1"``, ``"type1:2"``, ``"general:2"``."""
        kind, _, k = text.partition(":")
        return cls(kind.strip().lower(), int(k or 1))

    def __str__(self):
        return f"{self.kind}:{self.k}"


def replica_ids(attacker: str, k: int) -> Tuple[str, ...]:
    return tuple(attacker + "'" * j for j in range(1, k + 1))


@dataclass(frozen=True)
class Attack:
    """A concrete attack: the coalition's reports, attacker's first."""

    model: AttackModel
    attacker: str
    replicas: Tuple[str, ...]
    reports: Tuple[Tuple[str, Report], ...]

    @property
    def coalition(self) -> Tuple[str, ...]:
        return (self.attacker,) + self.replicas

    def report_map(self) -> Dict[str, Report]:
        return dict(self.reports)


def _validate(instance: Instance, attack: Attack):
    i = attack.attacker
    if i not in instance:
        raise MalformedAttack(f"attacker {i!r} is not an agent")
    reps = attack.replicas
    if len(reps) != attack.model.k:
        raise MalformedAttack(f"{attack.model} needs {attack.model.k} replicas, got {len(reps)}")
    if len(set(reps)) != len(reps):
        raise MalformedAttack("duplicate replica ids")
    for r in reps:
        if r in instance or r == SELLER:
            raise MalformedAttack(f"replica id {r!r} collides with an existing node")
    reports = attack.report_map()
    if set(reports) != set(attack.coalition):
        raise MalformedAttack("every coalition member needs exactly one report")
    true = instance.neighbors[i]
    allowed = true | set(reps) | {i}
    for u, rep in reports.items():
        if not rep.neighbors <= allowed - {u}:
            raise MalformedAttack(f"{u!r} reports neighbours outside r_i ∪ RL ∪ {{i}}")
    kind = attack.model.kind
    if kind == "type1":
        if any(reports[r].neighbors - true for r in reps):
            raise MalformedAttack("type1 replicas may only inform the attacker's true neighbours")
        if reports[i].neighbors - true - set(reps):
            raise MalformedAttack("type1 attacker may only inform true neighbours and replicas")
    elif kind == "type2":
        chain = (i,) + reps
        for u, nxt in zip(chain, chain[1:]):
            if reports[u].neighbors != {nxt}:
                raise MalformedAttack(f"type2 requires {u!r} to inform only {nxt!r}")
        if reports[reps[-1]].neighbors - true:
            raise MalformedAttack("the last type2 replica may only inform true neighbours")


def false_name_transform(instance: Instance, attack: Attack) -> Instance:
    """The network after the attack.

    Replicas become agents valued at the attacker's valuation (a replica that
    wins is the attacker winning) and the coalition's neighbour sets become
    the attack wiring, so the truthful profile of the result is the attack
    up to the coalition's bids (see :func:`attack_profile`).
    """
    _validate(instance, attack)
    if not attack.replicas and attack.report_map()[attack.attacker] == Report(
            instance.valuations[attack.attacker], instance.neighbors[attack.attacker]):
        return instance
    v = instance.valuations[attack.attacker]
    reports = attack.report_map()
    valuations = {a: instance.valuations[a] for a in instance.declared}
    neighbors = {a: set(instance.neighbors[a]) for a in instance.declared}
    for r in attack.replicas:
        valuations[r] = v
    for u in attack.coalition:
        neighbors[u] = set(reports[u].neighbors)
    return Instance(instance.seller_neighbors, valuations, neighbors)


def attack_profile(instance: Instance, attack: Attack) -> GlobalProfile:
    """Profile on the transformed network; everyone outside the coalition is truthful."""
    return GlobalProfile(false_name_transform(instance, attack), attack.report_map())


def coalition_utility(mechanism: MechanismId, instance: Instance, attack: Attack) -> Money:
    outcome = run(mechanism, attack_profile(instance, attack))
    v = instance.valuations[attack.attacker]
    return sum((outcome.utility(u, v) for u in attack.coalition), Fraction(0))


class AttackSpace:
    """Index-level enumeration of one attack model for one attacker.

    Works in the index order of the transformed instance (sorted ids), so
    tie-breaking matches what :func:`attack_profile` would produce.
    """

    def __init__(self, instance: Instance, attacker: str, model: AttackModel):
        self.instance = instance
        self.attacker = attacker
        self.model = model
        self.replicas = replica_ids(attacker, model.k)
        for r in self.replicas:
            if r in instance:
                raise MalformedAttack(f"replica id {r!r} collides with an existing agent")
        self.ids = tuple(sorted(instance.agents + self.replicas))
        pos = {a: k for k, a in enumerate(self.ids)}
        self.pos = pos
        self.n = len(self.ids)
        self.members = tuple(pos[a] for a in (attacker,) + self.replicas)
        self.seller = 0
        for a in instance.seller_neighbors:
            self.seller |= 1 << pos[a]
        adj = [0] * self.n
        for a in instance.agents:
            m = 0
            for b in instance.neighbors[a]:
                m |= 1 << pos[b]
            adj[pos[a]] = m
        self.true_mask = adj[pos[attacker]]
        self.base_adj = adj

    def wirings(self) -> List[Tuple[int, ...]]:
        """Out-masks for (attacker, rl_1, ..., rl_k), deterministic order."""
        mem = self.members
        subs = submasks(self.true_mask)
        kind, k = self.model.kind, self.model.k
        rl = [1 << m for m in mem[1:]]
        out = []
        if kind == "type2":
            for s in subs:
                out.append(tuple([rl[0]] + rl[1:] + [s]))
        elif kind == "type1":
            all_rl = 0
            for b in rl:
                all_rl |= b
            for combo in itertools.product(subs, repeat=k + 1):
                out.append((combo[0] | all_rl,) + tuple(combo[1:]))
        else:
            coalition = 0
            for m in mem:
                coalition |= 1 << m
            me = 1 << mem[0]
            choices = []
            for m in mem:
                # edges back into the attacker never change who is reachable
                pool = (self.true_mask | coalition) & ~(1 << m) & ~me
                choices.append(submasks(pool))
            want = coalition & ~me
            for combo in itertools.product(*choices):
                sub_adj = [0] * self.n
                for m, a in zip(mem, combo):
                    sub_adj[m] = a & coalition
                if reach(me, tuple(sub_adj)) & want != want:
                    continue
                out.append(tuple(combo))
        return out

    def profile(self, wiring: Sequence[int], bids: Sequence, values: Sequence) -> Tuple[int, tuple, tuple]:
        """Compact profile: true agents report ``values`` (by instance index)."""
        b = [None] * self.n
        adj = list(self.base_adj)
        for a, v in zip(self.instance.agents, values):
            b[self.pos[a]] = v
        for m, w, x in zip(self.members, wiring, bids):
            adj[m] = w
            b[m] = x
        return self.seller, tuple(b), tuple(adj)

    def to_attack(self, wiring: Sequence[int], bids: Sequence[Fraction]) -> Attack:
        reports = []
        for m, w, x in zip(self.members, wiring, bids):
            nbrs = frozenset(self.ids[j] for j in bit_list(w))
            reports.append((self.ids[m], Report(Fraction(x), nbrs)))
        return Attack(self.model, self.attacker, self.replicas, tuple(reports))
