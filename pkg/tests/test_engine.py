from fractions import Fraction

import pytest

from netauction.audit.engine import (EFFICIENCY, FAILS, HOLDS, IC, INCONCLUSIVE, IR, WBB, WIC,
                                     Property, _beyond, audit, audit_all_opponents,
                                     check_property, confirms, fnp, replay, witness_document)
from netauction.audit.family import InstanceFamily
from netauction.io import dumps, loads
from netauction.mechanisms import IDM, IVCG, PVCG, VCG, delta_ivcg_id, run
from netauction.model import Instance

F = Fraction


def test_property_parsing():
    assert Property.parse("ic") == IC
    assert Property.parse("eff") == EFFICIENCY
    p = Property.parse("fnp:type1:2")
    assert p == fnp("type1:2") and str(p) == "FNP[type1:2]"
    with pytest.raises(ValueError):
        Property.parse("bogus")
    with pytest.raises(ValueError):
        Property("FNP")


def test_vcg_runs_a_deficit():
    v = check_property(VCG, WBB, InstanceFamily(2, 1))
    assert v.status == FAILS and v.symbol == "✗"
    assert v.witness.observed < 0
    assert confirms(v.witness)


def test_pvcg_rewards_overbidding():
    v = check_property(PVCG, IC, InstanceFamily(3, 2))
    assert v.status == FAILS
    w = v.witness
    assert replay(w) == w.observed > w.expected
    assert confirms(w)


@pytest.mark.parametrize("prop", [IR, IC, WIC, WBB])
def test_ivcg_keeps_its_guarantees(prop):
    v = check_property(IVCG, prop, InstanceFamily(3, 2))
    assert v.status == HOLDS and v.witness is None and v.holds


def test_ivcg_resists_chain_replicas():
    assert check_property(IVCG, "fnp:type2:1", InstanceFamily(2, 2)).status == HOLDS


def test_vcg_falls_to_chain_replicas():
    v = check_property(VCG, "fnp:type2:1", InstanceFamily(2, 2))
    assert v.status == FAILS and confirms(v.witness)
    assert len(v.witness.attack.replicas) == 1


def test_idm_is_inefficient():
    v = check_property(IDM, EFFICIENCY, InstanceFamily(3, 2))
    assert v.status == FAILS and v.witness.observed < v.witness.expected
    assert confirms(v.witness)


def test_budget_makes_open_cells_inconclusive():
    v = check_property(IVCG, IC, InstanceFamily(3, 3), budget=50)
    assert v.status == INCONCLUSIVE and v.symbol == "?" and v.holds is None


def test_budget_does_not_hide_a_witness_found_in_time():
    v = check_property(VCG, WBB, InstanceFamily(2, 1), budget=10_000)
    assert v.status == FAILS


def test_parallel_audit_equals_sequential():
    family = InstanceFamily(3, 2)
    cells = [(m, p) for m in (VCG, PVCG, IVCG) for p in (IC, WBB, EFFICIENCY)]
    one = audit(cells, family)
    two = audit(cells, family, workers=2)
    for c in cells:
        assert one[c].status == two[c].status
        assert one[c].witness == two[c].witness


def test_witness_document_replays_through_the_cli_format():
    for prop in (WBB, fnp("type2:1")):
        w = check_property(VCG, prop, InstanceFamily(2, 2)).witness
        doc = witness_document(w)
        assert doc["witness"]["property"] == str(prop)
        _, profile = loads(dumps(doc))
        out = run(VCG, profile)
        if prop == WBB:
            assert out.revenue == w.observed
        else:
            v = w.instance.valuations[w.agent]
            got = sum(out.utility(u, v) for u in w.attack.coalition)
            assert got == w.observed


def test_all_opponents_mode():
    family = InstanceFamily(2, 2)
    cells = [(PVCG, IC), (IVCG, IC), (IVCG, IR), (VCG, IR)]
    res = audit_all_opponents(cells, family)
    assert res[(PVCG, IC)].status == FAILS and confirms(res[(PVCG, IC)].witness)
    assert res[(IVCG, IC)].status == HOLDS
    assert res[(IVCG, IR)].status == HOLDS
    assert res[(VCG, IR)].status == HOLDS
    with pytest.raises(ValueError):
        audit_all_opponents([(VCG, WBB)], family)


def test_delta_ivcg_rejects_tight_gaps_only():
    # the gap instance is a witness for the replica attack at delta 1
    v = check_property(delta_ivcg_id(1), "fnp:type2:1", InstanceFamily(3, 3))
    assert v.status == FAILS and confirms(v.witness)


def test_crossing_bid_lies_inside_the_interval():
    # rising line 0 at 5, 2 at 7: above 3 from 8 on, so the midpoint of (8, 10)
    assert _beyond(0, 10, 5, 7, 0, 2, 3, True) == 9
    # never reaches the threshold before 10
    assert _beyond(0, 10, 5, 7, 0, 2, 5, True) is None
    # falling line: below 0 near the top end
    assert _beyond(0, 10, 5, 7, 2, 1, 0, False) == F(19, 2)
    # flat
    assert _beyond(0, 10, 5, 7, 1, 1, 0, True) is None
    # unbounded interval with a rising line always crosses
    b = _beyond(4, None, 5, 6, 0, 1, 10, True)
    assert b > 15


def test_truthful_top_tie_leaves_idm_undefined():
    inst = Instance(["a", "b"], {"a": 2, "b": 2})
    v = check_property(IDM, IC, [inst])
    assert v.status == HOLDS and v.evaluations >= 1
