import json
import logging
from fractions import Fraction

import pytest

from netauction.errors import InstanceFormatError
from netauction.io import dumps, instance_document, loads, parse_instance, profile_document
from netauction.model import GlobalProfile, Report


def doc(**extra):
    base = {"seller_neighbors": ["a"],
            "agents": {"a": {"valuation": "0", "neighbors": ["b"]}, "b": {"valuation": "1"}}}
    base.update(extra)
    return json.dumps(base)


def test_round_trip(e1, tmp_path):
    path = tmp_path / "e1.json"
    path.write_text(dumps(instance_document(e1)))
    inst, profile = parse_instance(path)
    assert inst == e1 and profile.is_truthful()
    again = loads(dumps(instance_document(inst)))[0]
    assert again == inst


def test_null_report_means_absent():
    inst, profile = loads(doc(reports={"b": None}))
    assert profile.report("b") is None
    assert profile.report("a") == Report(0, frozenset({"b"}))


def test_decimal_bids_are_exact():
    _, profile = loads(doc(reports={"b": {"bid": "2.5", "neighbors": []}}))
    assert profile.report("b").bid == Fraction(5, 2)


def test_profile_document_keeps_only_deviations(e1):
    p = GlobalProfile(e1, {"b": Report(Fraction(1, 2), frozenset())})
    d = profile_document(p)
    assert d["reports"] == {"b": {"bid": "1/2", "neighbors": []}}
    assert loads(dumps(d))[1] == p


@pytest.mark.parametrize("text,path", [
    (doc(reports={"a": {"bid": "-1"}}), "reports.a.bid"),
    (doc(reports={"a": {"bid": 0.5}}), "reports.a.bid"),
    (doc(reports={"zz": None}), "reports.zz"),
    (json.dumps({"seller_neighbors": ["a"], "agents": {"a": {"valuation": "x"}}}), "agents.a.valuation"),
    (json.dumps({"seller_neighbors": ["q"], "agents": {"a": {"valuation": "1"}}}), "seller_neighbors[0]"),
    (json.dumps({"seller_neighbors": [], "agents": {"a": {"valuation": "1", "neighbors": ["q"]}}}),
     "agents.a.neighbors[0]"),
    (json.dumps({"agents": {}}), "seller_neighbors"),
    (json.dumps({"seller_neighbors": [], "agents": {}, "extra": 1}), "extra"),
])
def test_errors_carry_paths(text, path):
    with pytest.raises(InstanceFormatError) as info:
        loads(text)
    assert info.value.path == path


def test_syntax_errors_give_line_and_column():
    with pytest.raises(InstanceFormatError) as info:
        loads('{\n  "agents": }')
    assert info.value.path.startswith("line 2")


def test_report_neighbours_outside_the_network_are_dropped(caplog):
    with caplog.at_level(logging.WARNING):
        _, profile = loads(doc(reports={"a": {"bid": "0", "neighbors": ["b", "s", "a", "zz"]}}))
    assert profile.report("a").neighbors == {"b"}
    assert "zz" in caplog.text
