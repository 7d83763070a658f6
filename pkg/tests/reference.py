"""Slow, literal re-implementation of the mechanisms used as a test oracle.

Everything works on plain dicts of reports with its own breadth-first
search, so it shares no code with the bitmask engine.
"""
from collections import deque
from fractions import Fraction

from netauction.errors import AmbiguousHighestBidder


def distances(inst, reports):
    dist = {}
    queue = deque()
    for a in sorted(inst.seller_neighbors):
        dist[a] = 1
        queue.append(a)
    while queue:
        u = queue.popleft()
        rep = reports[u]
        if rep is None:
            continue
        for w in sorted(rep.neighbors):
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def bidders(inst, reports):
    dist = distances(inst, reports)
    return {a: reports[a].bid for a in dist if reports[a] is not None}


def top(inst, reports):
    return max(bidders(inst, reports).values(), default=Fraction(0))


def removed(reports, i):
    out = dict(reports)
    out[i] = None
    return out


def detached(reports, i):
    out = dict(reports)
    if out[i] is not None:
        out[i] = type(out[i])(out[i].bid, frozenset())
    return out


def rwd(inst, reports, i):
    return top(inst, reports) - top(inst, removed(reports, i))


def prwd(inst, reports, i):
    return top(inst, detached(reports, i)) - top(inst, removed(reports, i))


def highest(inst, reports):
    b = bidders(inst, reports)
    h = max(b.values())
    return min(a for a, x in b.items() if x == h)


def vcg(inst, reports, participation=False):
    b = bidders(inst, reports)
    w = highest(inst, reports)
    pay = {}
    for a in b:
        r = prwd(inst, reports, a) if participation else rwd(inst, reports, a)
        pay[a] = (b[a] if a == w else 0) - r
    return w, pay


def leading(inst, reports):
    dist = distances(inst, reports)
    inter = [a for a in bidders(inst, reports) if prwd(inst, reports, a) > 0]
    if not inter:
        return None
    return min(inter, key=lambda a: (dist[a], a))


def ivcg(inst, reports):
    lead = leading(inst, reports)
    if lead is None:
        w = highest(inst, reports)
        return w, {w: reports[w].bid}
    return lead, {lead: top(inst, removed(reports, lead))}


def delta_gap(inst, reports, delta):
    lead = leading(inst, reports)
    if lead is None:
        return None
    present = [a for a in inst.seller_neighbors if reports[a] is not None]
    if present != [lead]:
        return None
    dist = distances(inst, reports)
    cut = distances(inst, removed(reports, lead))
    cands = [a for a in bidders(inst, reports)
             if a != lead and a not in cut and prwd(inst, reports, a) > 0
             and top(inst, removed(reports, a)) - reports[lead].bid >= delta]
    if not cands:
        return None
    return lead, min(cands, key=lambda a: (dist[a], a))


def delta_ivcg(inst, reports, delta):
    gap = delta_gap(inst, reports, delta)
    if gap is None:
        return ivcg(inst, reports)
    j1, j2 = gap
    h2 = top(inst, removed(reports, j2))
    return j2, {j2: h2, j1: -(h2 - delta - top(inst, removed(reports, j1)))}


def idm(inst, reports):
    b = bidders(inst, reports)
    h = max(b.values())
    if sum(1 for x in b.values() if x == h) > 1:
        raise AmbiguousHighestBidder("tied")
    dist = distances(inst, reports)
    w0 = highest(inst, reports)
    seq = sorted({a for a in b if rwd(inst, reports, a) > 0} | {w0}, key=lambda a: dist[a])
    nxt = [top(inst, removed(reports, c)) for c in seq[1:]] + [h]
    m = next(t for t, c in enumerate(seq) if b[c] == nxt[t])
    pay = {seq[t]: top(inst, removed(reports, seq[t])) - nxt[t] for t in range(m)}
    pay[seq[m]] = top(inst, removed(reports, seq[m]))
    return seq[m], pay


def danmu(inst, reports):
    b = bidders(inst, reports)
    dist = distances(inst, reports)
    for w in sorted(b, key=lambda a: (dist[a], a)):
        rest = bidders(inst, removed(reports, w))
        if all(b[w] >= x for x in rest.values()):
            return w, {w: top(inst, removed(reports, w))}
    raise AssertionError("no DAN-MU winner")


def outcome(kind, inst, reports, delta=None):
    fn = {"vcg": vcg, "pvcg": lambda i, r: vcg(i, r, True), "ivcg": ivcg,
          "delta-ivcg": lambda i, r: delta_ivcg(i, r, delta), "idm": idm, "danmu": danmu}[kind]
    w, pay = fn(inst, reports)
    return w, {a: Fraction(x) for a, x in pay.items() if x}
