"""Exhaustive property audits.

One pass over a family evaluates every requested (mechanism, property)
cell at once: each deviant or attacked profile is analysed a single time
and handed to every mechanism whose cells are still open. A cell closes at
its first witness, so the witness it reports is the first one in the fixed
enumeration order (instances in family order, then the truthful profile,
then agents in id order, then deviations in :func:`deviations` order).

Between two grid breakpoints every payment is affine in the deviating bid.
Each interval is therefore probed twice, and when the line through the two
probes crosses a property's threshold before the interval's end, the
crossing bid is evaluated too. Unilateral verdicts are thus exact over all
rational bids, not only over the grid.

Inside the loop money is scaled to integers by the least common multiple
of every denominator in play. All mechanisms are homogeneous of degree one
in bids, so scaling changes no comparison; witnesses are scaled back and
replayed through the public API before they are reported.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..errors import BudgetExceeded
from ..mechanisms import Kind, MechanismId, run, settle
from ..model import Analysis, GlobalProfile, Instance, Report
from ..money import Money, format_money
from .deviations import breakpoints, grid_from_bids, submasks
from ..io import instance_document
from .falsename import Attack, AttackModel, AttackSpace, attack_profile, false_name_transform

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Property:
    name: str
    attack: Optional[AttackModel] = None

    def __post_init__(self):
        if self.name not in ("IR", "IC", "WIC", "WBB", "EFFICIENCY", "FNP"):
            raise ValueError(f"unknown property {self.name!r}")
        if (self.name == "FNP") != (self.attack is not None):
            raise ValueError("FNP, and only FNP, carries an attack model")

    @classmethod
    def parse(cls, text: str) -> "Property":
        """``"ic"``, ``"efficiency"``, ``"fnp:type2:1"``."""
        name, _, rest = text.strip().partition(":")
        name = name.upper()
        if name == "EFF":
            name = "EFFICIENCY"
        if name == "FNP":
            return cls(name, AttackModel.parse(rest or "type2:1"))
        return cls(name)

    def __str__(self):
        return f"FNP[{self.attack}]" if self.attack else self.name


IR = Property("IR")
IC = Property("IC")
WIC = Property("WIC")
WBB = Property("WBB")
EFFICIENCY = Property("EFFICIENCY")


def fnp(model) -> Property:
    if isinstance(model, str):
        model = AttackModel.parse(model)
    return Property("FNP", model)


@dataclass(frozen=True)
class Witness:
    """A profile on which a property fails.

    ``reports`` lists the non-truthful reports (``None`` is absence); all
    other agents are truthful. For FNP the profile is given by ``attack``
    instead. ``expected`` and ``observed`` are, per property:

    * IC, WIC, FNP: truthful utility of ``agent`` and her utility after
      deviating (summed over her replicas for FNP);
    * IR: 0 and the truthful ``agent``'s utility;
    * WBB: 0 and the revenue;
    * EFFICIENCY: the highest bid and the winner's bid.
    """

    mechanism: MechanismId
    property: Property
    instance: Instance
    agent: Optional[str]
    reports: Tuple[Tuple[str, Optional[Report]], ...] = ()
    attack: Optional[Attack] = None
    expected: Money = Fraction(0)
    observed: Money = Fraction(0)

    def profile(self) -> GlobalProfile:
        if self.attack is not None:
            return attack_profile(self.instance, self.attack)
        return GlobalProfile(self.instance, dict(self.reports))

    def describe(self) -> str:
        p = self.property.name
        fmt = format_money
        def show(a, rep):
            if rep is None:
                return f"{a} absent"
            return f"{a} reports (bid {fmt(rep.bid)}, neighbors {sorted(rep.neighbors)})"

        context = "; ".join(show(a, r) for a, r in self.reports if a != self.agent)
        context = f" while {context}" if context else ""
        if p in ("IC", "WIC"):
            shown = show(self.agent, dict(self.reports)[self.agent])
            return f"{shown}{context}: utility {fmt(self.expected)} -> {fmt(self.observed)}"
        if p == "FNP":
            parts = []
            for u, rep in self.attack.reports:
                parts.append(f"{u}: bid {fmt(rep.bid)} -> {sorted(rep.neighbors)}")
            return (f"{self.agent} attacks with {self.attack.model} ({'; '.join(parts)}): "
                    f"utility {fmt(self.expected)} -> {fmt(self.observed)}")
        if p == "IR":
            return f"truthful {self.agent} gets utility {fmt(self.observed)}{context}"
        if p == "WBB":
            return f"revenue {fmt(self.observed)}{context}"
        return f"winner bids {fmt(self.observed)} below the highest bid {fmt(self.expected)}"


def replay(witness: Witness) -> Money:
    """Recompute the witness's ``observed`` value through the public API."""
    outcome = run(witness.mechanism, witness.profile())
    p = witness.property.name
    inst = witness.instance
    if p == "FNP":
        v = inst.valuations[witness.agent]
        return sum((outcome.utility(u, v) for u in witness.attack.coalition), Fraction(0))
    if p in ("IC", "WIC", "IR"):
        return outcome.utility(witness.agent, inst.valuations[witness.agent])
    if p == "WBB":
        return outcome.revenue
    return witness.profile().report(outcome.winner).bid


def confirms(witness: Witness) -> bool:
    """Whether replaying the witness reproduces a violation."""
    observed = replay(witness)
    if observed != witness.observed:
        return False
    p = witness.property.name
    if p in ("IR", "WBB"):
        return observed < 0
    if p == "EFFICIENCY":
        return observed < witness.expected
    return observed > witness.expected


def witness_document(witness: Witness) -> dict:
    """Instance document of the witnessed profile, plus a ``witness`` record.

    For an attack the document describes the network after the attack, so
    running the mechanism on it replays the witness directly.
    """
    if witness.attack is not None:
        inst = false_name_transform(witness.instance, witness.attack)
        reports = witness.attack.report_map()
    else:
        inst = witness.instance
        reports = dict(witness.reports)
    doc = instance_document(inst, reports)
    record = {
        "mechanism": str(witness.mechanism),
        "property": str(witness.property),
        "agent": witness.agent,
        "expected": format_money(witness.expected),
        "observed": format_money(witness.observed),
        "description": witness.describe(),
    }
    if witness.attack is not None:
        record["replicas"] = list(witness.attack.replicas)
    doc["witness"] = record
    return doc


@dataclass(frozen=True)
class PropertyVerdict:
    mechanism: MechanismId
    property: Property
    status: str
    witness: Optional[Witness] = None
    evaluations: int = 0

    @property
    def holds(self) -> Optional[bool]:
        return None if self.status == INCONCLUSIVE else self.status == HOLDS

    @property
    def symbol(self) -> str:
        return {HOLDS: "✓", FAILS: "✗", INCONCLUSIVE: "?"}[self.status]


# --- the inner loop ---------------------------------------------------------

class _Open:
    """Open cells of one mechanism during the pass over a single instance."""

    __slots__ = ("mech", "kind", "delta", "props", "attacks")

    def __init__(self, mech: MechanismId, props: set, attacks: list, scale: int):
        self.mech = mech
        self.kind = mech.kind
        self.delta = None if mech.delta is None else int(mech.delta * scale)
        self.props = props
        self.attacks = attacks


def _outcome(kind, an, delta):
    """``(winner, payments)``, or ``False`` when the mechanism is undefined here."""
    if an.highest is None:
        return None, {}
    if kind is Kind.IDM and an.top_count > 1:
        return False
    return settle(kind, an, delta)


class _Counter:
    __slots__ = ("n", "budget")

    def __init__(self, budget):
        self.n = 0
        self.budget = budget

    def tick(self):
        self.n += 1
        if self.budget is not None and self.n > self.budget:
            raise BudgetExceeded(f"more than {self.budget} profiles evaluated")


def _scale_for(values: Iterable[Fraction]) -> int:
    scale = 1
    for x in values:
        scale = math.lcm(scale, Fraction(x).denominator)
    return scale


def _audit_instance(inst: Instance, cells: Dict[MechanismId, Tuple[set, list]],
                    counter: _Counter, found: dict):
    """Look for witnesses in one instance; ``found`` maps (mech, prop) to witnesses."""
    deltas = sorted({m.delta for m in cells if m.delta is not None})
    vals = [inst.valuations[a] for a in inst.agents]
    grid = grid_from_bids(vals, deltas)
    # doubled so that the second probe inside each interval is integral too
    scale = 2 * _scale_for(list(grid) + vals + deltas)
    g = [int(x * scale) for x in grid]
    v = [int(x * scale) for x in vals]
    seller = inst._seller_mask
    adj = tuple(inst._masks)
    n = len(v)
    base = tuple(v)

    def money(x):
        return Fraction(x) / scale

    live = []
    for mech, (props, attacks) in cells.items():
        props = {p for p in props if (mech, p) not in found}
        attacks = [a for a in attacks if (mech, fnp(a)) not in found]
        if props or attacks:
            live.append(_Open(mech, props, attacks, scale))
    if not live:
        return

    def record(o, prop, agent, reports=(), attack=None, expected=0, observed=0):
        if prop.name == "FNP":
            o.attacks.remove(prop.attack)
        else:
            o.props.discard(prop)
        found[(o.mech, prop)] = Witness(
            o.mech, prop, inst, agent, tuple(reports), attack, money(expected), money(observed))

    # truthful profile
    counter.tick()
    an = Analysis(seller, base, adj)
    truth = {}
    for o in list(live):
        res = _outcome(o.kind, an, o.delta)
        if res is False:
            # a shared top bid leaves this mechanism undefined on the instance
            live.remove(o)
            continue
        w, pay = res
        u = [(v[k] if k == w else 0) - pay.get(k, 0) for k in range(n)]
        truth[o.mech] = (w, pay, u)
        _check_profile(o, an, w, pay, v, None, None, u, record, inst, money)

    # unilateral deviations; inside an open interval between breakpoints every
    # quantity is affine in the deviating bid, so a second probe gives the
    # slope and the limits at both ends are checked as well
    pts = [int(x * scale) for x in breakpoints(vals, deltas)]
    interval = {(lo + hi) // 2: (lo, hi) for lo, hi in zip(pts, pts[1:])}
    interval[pts[-1] + scale] = (pts[-1], None)
    uni = [o for o in live if o.props & {IC, WIC, IR, WBB, EFFICIENCY}]

    def evaluate(i, choice):
        counter.tick()
        b = list(base)
        a = list(adj)
        if choice is None:
            b[i] = None
            a[i] = 0
        else:
            b[i], a[i] = choice
        an = Analysis(seller, tuple(b), tuple(a))
        return an, {o.mech: _outcome(o.kind, an, o.delta) for o in uni}

    def check(i, choice, an, results):
        for o in list(uni):
            res = results[o.mech]
            if res is False:
                continue
            _check_profile(o, an, res[0], res[1], v, i, choice, truth[o.mech][2], record, inst, money)
            if not (o.props & {IC, WIC, IR, WBB, EFFICIENCY}):
                uni.remove(o)

    for i in range(n):
        if not uni:
            break
        subs = submasks(adj[i])
        need_ic = any(IC in o.props or IR in o.props or WBB in o.props or EFFICIENCY in o.props
                      for o in uni)
        choices = [(b, s) for b in g if need_ic or b <= v[i] for s in subs]
        if need_ic:
            choices.append(None)
        for choice in choices:
            if not uni:
                break
            an, results = evaluate(i, choice)
            check(i, choice, an, results)
            if not uni or choice is None or choice[0] not in interval:
                continue
            mid, s = choice
            lo, hi = interval[mid]
            probe = mid + scale if hi is None else (mid + hi) // 2
            _, far = evaluate(i, (probe, s))
            for o in list(uni):
                if o not in uni:
                    continue
                bid = _limit_bid(o, i, lo, hi, mid, probe, results[o.mech], far[o.mech],
                                 v, truth[o.mech][2])
                if bid is not None:
                    an2, results2 = evaluate(i, (bid, s))
                    check(i, (bid, s), an2, results2)

    # false-name attacks
    for o in live:
        if not o.attacks:
            continue
        for i in range(n):
            for model in list(o.attacks):
                if model not in o.attacks:
                    continue
                _attack_agent(o, inst, i, model, g, v, truth[o.mech][2][i], counter, record, money)


def _utilities(w, pay, v, agents):
    return [(v[k] if k == w else 0) - pay.get(k, 0) for k in agents]


def _beyond(lo, hi, mid, probe, f1, f2, t, above):
    """A bid in ``(lo, hi)`` where the affine quantity through ``(mid, f1)``
    and ``(probe, f2)`` is strictly above ``t`` (below, if not ``above``)."""
    if not above:
        f1, f2, t = -f1, -f2, -t
    slope = Fraction(f2 - f1) / (probe - mid)
    if slope == 0:
        return None
    cross = mid + (t - f1) / slope
    if slope > 0:
        if hi is None:
            return max(cross, Fraction(mid)) + 1
        if f1 + slope * (hi - mid) <= t:
            return None
        return (max(cross, lo) + hi) / 2
    if f1 + slope * (lo - mid) <= t:
        return None
    return (lo + (cross if hi is None else min(cross, hi))) / 2


def _limit_bid(o, i, lo, hi, mid, probe, near, far, v, u_truth):
    """A bid inside the interval that breaks an open property, if one exists."""
    if near is False or far is False or near[0] != far[0]:
        return None
    w, pay1 = near
    pay2 = far[1]
    props = o.props
    if IC in props or (WIC in props and hi is not None and hi <= v[i]):
        f1, f2 = (_utilities(w, p, v, [i])[0] for p in (pay1, pay2))
        bid = _beyond(lo, hi, mid, probe, f1, f2, u_truth[i], True)
        if bid is not None:
            return bid
    if IR in props:
        others = sorted((set(pay1) | set(pay2) | ({w} if w is not None else set())) - {i})
        for k in others:
            f1, f2 = (_utilities(w, p, v, [k])[0] for p in (pay1, pay2))
            bid = _beyond(lo, hi, mid, probe, f1, f2, 0, False)
            if bid is not None:
                return bid
    if WBB in props:
        bid = _beyond(lo, hi, mid, probe, sum(pay1.values()), sum(pay2.values()), 0, False)
        if bid is not None:
            return bid
    return None


def _check_profile(o, an, w, pay, v, i, choice, u_truth, record, inst, money):
    props = o.props
    names = inst.agents

    def deviant():
        if i is None:
            return ()
        rep = None if choice is None else Report(money(choice[0]), inst.ids_of(choice[1]))
        return ((names[i], rep),)
    if i is not None and (IC in props or WIC in props):
        u = (v[i] if w == i else 0) - pay.get(i, 0)
        if u > u_truth[i]:
            if IC in props:
                record(o, IC, names[i], deviant(), expected=u_truth[i], observed=u)
            in_wic = choice is not None and choice[0] <= v[i]
            if in_wic and WIC in props:
                record(o, WIC, names[i], deviant(), expected=u_truth[i], observed=u)
    if IR in props:
        for k in sorted(set(pay) | ({w} if w is not None else set())):
            if k == i:
                continue
            u = (v[k] if k == w else 0) - pay.get(k, 0)
            if u < 0:
                record(o, IR, names[k], deviant(), observed=u)
                break
    if WBB in props:
        rev = sum(pay.values())
        if rev < 0:
            record(o, WBB, None, deviant(), observed=rev)
    if EFFICIENCY in props and w is not None and an.bids[w] != an.top:
        record(o, EFFICIENCY, None, deviant(), expected=an.top, observed=an.bids[w])


def _attack_agent(o, inst, i, model, g, v, u_truth, counter, record, money):
    space = AttackSpace(inst, inst.agents[i], model)
    mem = space.members
    vi = v[i]
    values = v
    for wiring in space.wirings():
        for bids in itertools.product(g, repeat=model.k + 1):
            counter.tick()
            seller, b, adj = space.profile(wiring, bids, values)
            an = Analysis(seller, b, adj)
            res = _outcome(o.kind, an, o.delta)
            if res is False:
                continue
            w, pay = res
            u = 0
            for m in mem:
                if m == w:
                    u += vi
                u -= pay.get(m, 0)
            if u > u_truth:
                record(o, fnp(model), inst.agents[i], (), space.to_attack(wiring, [money(x) for x in bids]),
                       expected=u_truth, observed=u)
                return


# --- public entry points ----------------------------------------------------


def _normalise(cells) -> Dict[MechanismId, Tuple[set, list]]:
    out: Dict[MechanismId, Tuple[set, list]] = {}
    for mech, prop in cells:
        props, attacks = out.setdefault(mech, (set(), []))
        if prop.name == "FNP":
            if prop.attack not in attacks:
                attacks.append(prop.attack)
        else:
            props.add(prop)
    return out


def _scan(instances: Sequence[Instance], cells, budget) -> Tuple[dict, int, bool]:
    counter = _Counter(budget)
    found: dict = {}
    spec = _normalise(cells)
    try:
        for inst in instances:
            _audit_instance(inst, spec, counter, found)
            if len(found) == len(cells):
                break
    except BudgetExceeded:
        return found, counter.n, True
    return found, counter.n, False


def _scan_chunk(args):
    instances, cells, budget = args
    found, n, over = _scan(instances, cells, budget)
    return found, n, over


def audit(cells: Sequence[Tuple[MechanismId, Property]], family: Iterable[Instance],
          budget: Optional[int] = None, workers: int = 1) -> Dict[Tuple[MechanismId, Property], PropertyVerdict]:
    """Verdicts for every ``(mechanism, property)`` cell over ``family``.

    ``budget`` bounds the number of profiles evaluated; cells still open when
    it runs out are Inconclusive. With ``workers > 1`` the family is split
    into contiguous chunks and the earliest chunk's witness wins per cell, so
    the verdicts and witnesses equal the sequential ones.
    """
    cells = list(dict.fromkeys(cells))
    instances = list(family)
    if workers <= 1 or len(instances) < 2 * workers:
        found, n, over = _scan(instances, cells, budget)
    else:
        size = math.ceil(len(instances) / (4 * workers))
        chunks = [instances[k:k + size] for k in range(0, len(instances), size)]
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_scan_chunk, [(c, cells, budget) for c in chunks]))
        found, n, over = {}, 0, False
        for part, count, part_over in parts:
            n += count
            over = over or part_over
            for key, w in part.items():
                found.setdefault(key, w)
        if budget is not None and n > budget:
            over = True
    verdicts = {}
    for cell in cells:
        w = found.get(cell)
        if w is not None:
            status = FAILS
        else:
            status = INCONCLUSIVE if over else HOLDS
        verdicts[cell] = PropertyVerdict(cell[0], cell[1], status, w, n)
    return verdicts


def check_property(mechanism, prop, family: Iterable[Instance], budget: Optional[int] = None,
                   workers: int = 1) -> PropertyVerdict:
    if isinstance(mechanism, str):
        mechanism = MechanismId.parse(mechanism)
    if isinstance(prop, str):
        prop = Property.parse(prop)
    return audit([(mechanism, prop)], family, budget, workers)[(mechanism, prop)]


# --- arbitrary opponents ----------------------------------------------------


def _choices(inst: Instance, k: int, grid, wic: bool):
    v = inst.valuations[inst.agents[k]]
    out = [Report(b, inst.ids_of(s)) for b in grid if not wic or b <= v
           for s in submasks(inst._masks[k])]
    if not wic:
        out.append(None)
    return out


def audit_all_opponents(cells: Sequence[Tuple[MechanismId, Property]], family: Iterable[Instance],
                        budget: Optional[int] = None) -> Dict[Tuple[MechanismId, Property], PropertyVerdict]:
    """IR, IC and WIC where the other agents may report anything.

    For every agent and every joint report of the others (each drawn from
    their IC deviation space), IR asks that truth gives her a non-negative
    utility and IC/WIC that no deviation beats truth. Her own bid grid is
    rebuilt from the others' reported bids. The space is a product over
    agents, so this is meant for families of two or three agents.
    """
    cells = list(dict.fromkeys(cells))
    for _, p in cells:
        if p.name not in ("IR", "IC", "WIC"):
            raise ValueError(f"{p} is not audited against arbitrary opponents")
    counter = _Counter(budget)
    found = {}
    over = False
    try:
        for inst in family:
            _all_opponents_instance(inst, cells, counter, found)
            if len(found) == len(cells):
                break
    except BudgetExceeded:
        over = True
    return {c: PropertyVerdict(c[0], c[1], FAILS if c in found else INCONCLUSIVE if over else HOLDS,
                               found.get(c), counter.n) for c in cells}


def _all_opponents_instance(inst: Instance, cells, counter, found):
    deltas = sorted({m.delta for m, _ in cells if m.delta is not None})
    vals = [inst.valuations[a] for a in inst.agents]
    base_grid = grid_from_bids(vals, deltas)
    seller = inst._seller_mask
    n = len(vals)
    spaces = [_choices(inst, k, base_grid, wic=False) for k in range(n)]

    def outcome(mech, reports):
        bids = tuple(None if r is None else r.bid for r in reports)
        adj = tuple(0 if r is None else inst.mask_of(r.neighbors) for r in reports)
        counter.tick()
        return _outcome(mech.kind, Analysis(seller, bids, adj), mech.delta)

    def utility(res, i):
        w, pay = res
        return (vals[i] if w == i else 0) - pay.get(i, 0)

    for i in range(n):
        truth = Report(vals[i], inst.neighbors[inst.agents[i]])
        others = [spaces[k] if k != i else [truth] for k in range(n)]
        for joint in itertools.product(*others):
            open_cells = [c for c in cells if c not in found]
            if not open_cells:
                return
            reports = list(joint)
            shown = tuple((inst.agents[k], reports[k]) for k in range(n)
                          if k != i and reports[k] != Report(vals[k], inst.neighbors[inst.agents[k]]))
            grid = grid_from_bids([r.bid for r in reports if r is not None], deltas)
            mine = None
            for mech in dict.fromkeys(m for m, _ in open_cells):
                props = {p for m, p in open_cells if m == mech}
                base = outcome(mech, reports)
                if base is False:
                    continue
                u0 = utility(base, i)
                if IR in props and u0 < 0:
                    found[(mech, IR)] = Witness(mech, IR, inst, inst.agents[i], shown, observed=u0)
                if not props & {IC, WIC}:
                    continue
                if mine is None:
                    mine = _choices(inst, i, grid, wic=False)
                for rep in mine:
                    wic_ok = rep is not None and rep.bid <= vals[i]
                    if IC not in props and not (WIC in props and wic_ok):
                        continue
                    reports[i] = rep
                    res = outcome(mech, reports)
                    reports[i] = truth
                    if res is False or utility(res, i) <= u0:
                        continue
                    dev = shown + ((inst.agents[i], rep),)
                    for p in (IC, WIC):
                        if p in props and (p is IC or wic_ok):
                            found[(mech, p)] = Witness(mech, p, inst, inst.agents[i], dev,
                                                       expected=u0, observed=utility(res, i))
                            props.discard(p)
                    if not props & {IC, WIC}:
                        break
