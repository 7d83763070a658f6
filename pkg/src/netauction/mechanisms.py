"""Single-item diffusion auction mechanisms.

Every mechanism maps a profile to a winner and signed payments (negative
means the agent receives money). The index-level :func:`settle` is the one
implementation; the named functions below wrap it for string agent ids.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from .errors import InvalidDelta
from .model import Analysis, GlobalProfile, bit_list
from .money import Money, MoneyLike, as_money, format_money
from .rewards import interruption_agents, leading_index, sequence_indices


class Kind(enum.Enum):
    VCG = "vcg"
    PVCG = "pvcg"
    IVCG = "ivcg"
    DELTA_IVCG = "delta-ivcg"
    IDM = "idm"
    DANMU = "danmu"


@dataclass(frozen=True)
class MechanismId:
    kind: Kind
    delta: Optional[Money] = None

    def __post_init__(self):
        if self.kind is Kind.DELTA_IVCG:
            if self.delta is None:
                raise InvalidDelta("delta-ivcg needs a delta")
            d = as_money(self.delta)
            if d <= 0:
                raise InvalidDelta(f"delta must be positive, got {d}")
            object.__setattr__(self, "delta", d)
        elif self.delta is not None:
            raise InvalidDelta(f"{self.kind.value} takes no delta")

    @classmethod
    def parse(cls, name: str, delta: Optional[MoneyLike] = None) -> "MechanismId":
        """``"ivcg"``, ``"delta-ivcg"`` (with ``delta``) or ``"delta-ivcg:1/2"``."""
        name = name.strip().lower().replace("_", "-")
        if ":" in name:
            name, _, text = name.partition(":")
            delta = text
        aliases = {"vcg-network": "vcg", "dan-mu": "danmu", "divcg": "delta-ivcg",
                   "δ-ivcg": "delta-ivcg"}
        name = aliases.get(name, name)
        try:
            kind = Kind(name)
        except ValueError:
            raise ValueError(f"unknown mechanism {name!r}") from None
        if kind is not Kind.DELTA_IVCG:
            delta = None
        return cls(kind, delta)

    def __str__(self):
        if self.kind is Kind.DELTA_IVCG:
            return f"delta-ivcg:{format_money(self.delta)}"
        return self.kind.value


VCG = MechanismId(Kind.VCG)
PVCG = MechanismId(Kind.PVCG)
IVCG = MechanismId(Kind.IVCG)
IDM = MechanismId(Kind.IDM)
DANMU = MechanismId(Kind.DANMU)


def delta_ivcg_id(delta: MoneyLike) -> MechanismId:
    return MechanismId(Kind.DELTA_IVCG, delta)


# --- index level ------------------------------------------------------------


def _vcg(an: Analysis):
    w = an.require_bidder()
    top, h = an.top, an.h_removed
    pay = {}
    for k in bit_list(an.bidders):
        m = top - h[k]
        if m:
            pay[k] = -m
    pay[w] = pay.get(w, 0) + an.bids[w]
    return w, pay


def _pvcg(an: Analysis):
    w = an.require_bidder()
    bids, h = an.bids, an.h_removed
    pay = {}
    for k in bit_list(an.bidders):
        if bids[k] > h[k]:
            pay[k] = h[k] - bids[k]
    pay[w] = pay.get(w, 0) + bids[w]
    return w, pay


def _ivcg(an: Analysis):
    w = an.require_bidder()
    lead = leading_index(an)
    if lead is None:
        return w, {w: an.bids[w]}
    return lead, {lead: an.h_removed[lead]}


def delta_gap_indices(an: Analysis, delta) -> Optional[Tuple[int, int]]:
    """``(j1, j2)`` when the profile is delta-gap, else ``None``.

    j1 is the leading agent and must be the seller's only (present) neighbour;
    j2 is the closest interruption agent cut off by j1's removal whose removal
    still leaves a bid at least ``delta`` above j1's.
    """
    lead = leading_index(an)
    if lead is None:
        return None
    present_seller = 0
    for k in bit_list(an.seller):
        if an.bids[k] is not None:
            present_seller |= 1 << k
    if present_seller != 1 << lead:
        return None
    floor = an.bids[lead] + delta
    cut_by_lead = an.survivors[lead]
    best = None
    for k in interruption_agents(an):
        if k == lead or (cut_by_lead >> k) & 1:
            continue
        if an.h_removed[k] < floor:
            continue
        if best is None or an.dist[k] < an.dist[best]:
            best = k
    if best is None:
        return None
    return lead, best


def _delta_ivcg(an: Analysis, delta):
    an.require_bidder()
    gap = delta_gap_indices(an, delta)
    if gap is None:
        return _ivcg(an)
    j1, j2 = gap
    h = an.h_removed
    return j2, {j2: h[j2], j1: -(h[j2] - delta - h[j1])}


def _idm(an: Analysis):
    seq = sequence_indices(an)
    h = an.h_removed
    nxt = [h[c] for c in seq[1:]] + [an.top]
    m = next(t for t, c in enumerate(seq) if an.bids[c] == nxt[t])
    pay = {}
    for t in range(m):
        pay[seq[t]] = h[seq[t]] - nxt[t]
    w = seq[m]
    pay[w] = h[w]
    return w, pay


def _danmu(an: Analysis):
    an.require_bidder()
    bids, h, dist = an.bids, an.h_removed, an.dist
    for k in sorted(bit_list(an.bidders), key=lambda k: (dist[k], k)):
        # h[k] is the top bid among agents still activated without k
        if bids[k] >= h[k]:
            return k, {k: h[k]}
    raise AssertionError("unreachable: the farthest top bidder always qualifies")


def settle(kind: Kind, an: Analysis, delta=None):
    """``(winner_index, {index: payment})``; zero payments are omitted."""
    if kind is Kind.VCG:
        w, pay = _vcg(an)
    elif kind is Kind.PVCG:
        w, pay = _pvcg(an)
    elif kind is Kind.IVCG:
        w, pay = _ivcg(an)
    elif kind is Kind.DELTA_IVCG:
        w, pay = _delta_ivcg(an, delta)
    elif kind is Kind.IDM:
        w, pay = _idm(an)
    elif kind is Kind.DANMU:
        w, pay = _danmu(an)
    else:
        raise ValueError(kind)
    return w, {k: v for k, v in pay.items() if v}


# --- public -----------------------------------------------------------------


@dataclass(frozen=True)
class Outcome:
    winner: str
    payments: Mapping[str, Money] = field(default_factory=dict)

    def payment(self, agent: str) -> Money:
        return self.payments.get(agent, Fraction(0))

    @property
    def revenue(self) -> Money:
        return sum(self.payments.values(), Fraction(0))

    def utility(self, agent: str, valuation: MoneyLike) -> Money:
        won = as_money(valuation) if agent == self.winner else Fraction(0)
        return won - self.payment(agent)


def _outcome(profile: GlobalProfile, kind: Kind, delta=None) -> Outcome:
    w, pay = settle(kind, profile.analysis(), delta)
    names = profile.instance.agents
    return Outcome(names[w], {names[k]: Fraction(v) for k, v in sorted(pay.items())})


def run(mechanism: MechanismId, profile: GlobalProfile) -> Outcome:
    if isinstance(mechanism, str):
        mechanism = MechanismId.parse(mechanism)
    return _outcome(profile, mechanism.kind, mechanism.delta)


def vcg_network(profile: GlobalProfile) -> Outcome:
    return _outcome(profile, Kind.VCG)


def pvcg(profile: GlobalProfile) -> Outcome:
    return _outcome(profile, Kind.PVCG)


def ivcg(profile: GlobalProfile) -> Outcome:
    return _outcome(profile, Kind.IVCG)


def delta_gap(profile: GlobalProfile, delta: MoneyLike) -> Optional[Tuple[str, str]]:
    delta = as_money(delta)
    if delta <= 0:
        raise InvalidDelta(f"delta must be positive, got {delta}")
    gap = delta_gap_indices(profile.analysis(), delta)
    if gap is None:
        return None
    names = profile.instance.agents
    return names[gap[0]], names[gap[1]]


def delta_ivcg(profile: GlobalProfile, delta: MoneyLike) -> Outcome:
    return run(delta_ivcg_id(delta), profile)


def idm(profile: GlobalProfile) -> Outcome:
    return _outcome(profile, Kind.IDM)


def dan_mu(profile: GlobalProfile) -> Outcome:
    return _outcome(profile, Kind.DANMU)
