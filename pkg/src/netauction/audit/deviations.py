"""Finite deviation spaces for unilateral incentive audits.

Every mechanism here decides winners and payments by comparing bids with
each other, with ``H`` of sub-profiles (which are bids) and, for delta-IVCG,
with bids shifted by delta. An agent's outcome is therefore constant while
her bid stays strictly between two consecutive breakpoints, so one
representative per open interval plus the breakpoints themselves covers
every outcome she can reach.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, List, Optional

from ..model import GlobalProfile, Instance, Report
from ..money import MoneyLike, as_money


def breakpoints(bids: Iterable, deltas: Iterable = ()) -> List[Fraction]:
    values = {Fraction(0)} | {Fraction(b) for b in bids if b is not None}
    shifted = set()
    for d in deltas:
        d = as_money(d)
        for v in values:
            shifted.add(v + d)
            if v - d >= 0:
                shifted.add(v - d)
    return sorted(values | shifted)


def grid_from_bids(bids: Iterable, deltas: Iterable = ()) -> List[Fraction]:
    points = breakpoints(bids, deltas)
    mids = [(lo + hi) / 2 for lo, hi in zip(points, points[1:])]
    return sorted(set(points) | set(mids) | {points[-1] + 1})


def bid_grid(profile: GlobalProfile, agent: Optional[str] = None,
             delta: Optional[MoneyLike] = None) -> List[Fraction]:
    """Outcome-complete bid choices for a deviating agent.

    The grid is ``{0}``, every reported bid, the midpoints between
    consecutive points, and one above the largest. With ``delta`` the
    breakpoints also include each bid shifted by plus and minus delta. The
    set does not depend on which agent deviates; ``agent`` is accepted for
    symmetry with :func:`deviations`.
    """
    if agent is not None:
        profile.instance.index(agent)
    bids = [r.bid for r in profile.reports if r is not None]
    return grid_from_bids(bids, () if delta is None else (delta,))


def submasks(mask: int) -> List[int]:
    out = []
    s = mask
    while True:
        out.append(s)
        if s == 0:
            break
        s = (s - 1) & mask
    out.reverse()
    return out


def deviations(instance: Instance, agent: str, prop: str,
               grid: Optional[List[Fraction]] = None,
               delta: Optional[MoneyLike] = None) -> Iterator[Optional[Report]]:
    """Reports the audit tries for ``agent``, in a fixed order.

    ``prop`` is ``"IC"`` (every grid bid, every subset of true neighbours,
    then absence) or ``"WIC"`` (bids up to the valuation, no absence).
    """
    prop = prop.upper()
    if prop not in ("IC", "WIC"):
        raise ValueError(f"no deviation space for {prop!r}")
    k = instance.index(agent)
    if grid is None:
        grid = bid_grid(GlobalProfile.truthful(instance), delta=delta)
    value = instance.valuations[agent]
    for bid in grid:
        if prop == "WIC" and bid > value:
            continue
        for sub in submasks(instance._masks[k]):
            yield Report(bid, instance.ids_of(sub))
    if prop == "IC":
        yield None
