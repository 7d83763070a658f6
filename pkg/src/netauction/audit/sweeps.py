"""Invariant sweeps over the truthful profiles of a family.

Each check is a predicate on one profile; a sweep counts how many profiles
each check saw and keeps the first few violations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence

from ..mechanisms import Kind, delta_gap_indices, settle
from ..model import Analysis, Instance, bit_list
from ..money import as_money

KEEP = 5


@dataclass
class CheckResult:
    name: str
    checked: int = 0
    violations: int = 0
    examples: List[Instance] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def tally(self, holds: bool, inst: Instance):
        self.checked += 1
        if not holds:
            self.violations += 1
            if len(self.examples) < KEEP:
                self.examples.append(inst)


def _revenue(pay) -> Fraction:
    return sum(pay.values(), 0)


def sweep(family: Iterable[Instance], deltas: Sequence = (1, Fraction(1, 2))) -> Dict[str, CheckResult]:
    deltas = [as_money(d) for d in deltas]
    names = [
        "participation-rewards-bounded",
        "removal-chain-monotone",
        "ivcg-revenue-dominates-idm",
        "ivcg-revenue-dominates-danmu",
        "pvcg-revenue-dominates-vcg",
        "pvcg-budget-balanced",
        "vcg-losers-get-reward",
        "pvcg-losers-get-participation-reward",
    ]
    for d in deltas:
        names.append(f"delta-gap-adds-delta[{d}]")
        names.append(f"delta-off-gap-unchanged[{d}]")
    res = {n: CheckResult(n) for n in names}
    for inst in family:
        v = tuple(inst.valuations[a] for a in inst.agents)
        an = Analysis(inst._seller_mask, v, tuple(inst._masks))
        if an.highest is None:
            continue
        top, h = an.top, an.h_removed
        bidders = bit_list(an.bidders)

        prwd = {k: an.h_detached(k) - h[k] for k in bidders}
        res["participation-rewards-bounded"].tally(sum(prwd.values()) <= top, inst)
        res["removal-chain-monotone"].tally(
            all(h[k] <= an.h_detached(k) <= top for k in bidders), inst)

        vw, vpay = settle(Kind.VCG, an)
        pw, ppay = settle(Kind.PVCG, an)
        iw, ipay = settle(Kind.IVCG, an)
        rev_ivcg = _revenue(ipay)
        res["pvcg-revenue-dominates-vcg"].tally(_revenue(ppay) >= _revenue(vpay), inst)
        res["pvcg-budget-balanced"].tally(_revenue(ppay) >= 0, inst)
        if an.top_count == 1:
            _, dpay = settle(Kind.IDM, an)
            _, npay = settle(Kind.DANMU, an)
            res["ivcg-revenue-dominates-idm"].tally(rev_ivcg >= _revenue(dpay), inst)
            res["ivcg-revenue-dominates-danmu"].tally(rev_ivcg >= _revenue(npay), inst)

        res["vcg-losers-get-reward"].tally(
            all(-vpay.get(k, 0) == top - h[k] for k in bidders if k != vw), inst)
        res["pvcg-losers-get-participation-reward"].tally(
            all(-ppay.get(k, 0) == prwd[k] for k in bidders if k != pw), inst)

        for d in deltas:
            w, pay = settle(Kind.DELTA_IVCG, an, d)
            if delta_gap_indices(an, d) is not None:
                res[f"delta-gap-adds-delta[{d}]"].tally(_revenue(pay) == rev_ivcg + d, inst)
            else:
                res[f"delta-off-gap-unchanged[{d}]"].tally((w, pay) == (iw, ipay), inst)
    return res
