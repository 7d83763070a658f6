"""The instance/profile JSON document.

::

    {"seller_neighbors": ["j1"],
     "agents": {"j1": {"valuation": "4", "neighbors": ["x", "a"]}, ...},
     "reports": {"a": {"bid": "50", "neighbors": ["j2"]}, "b": null}}

``reports`` is optional; agents missing from it report truthfully and
``null`` means absent. Money values are decimal strings (``"2.5"``) or
``p/q`` fractions; JSON integers are accepted too.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from .errors import InstanceFormatError
from .model import SELLER, GlobalProfile, Instance, Report
from .money import as_money, format_money

logger = logging.getLogger(__name__)


def _money(value: Any, path: str):
    if isinstance(value, float) or isinstance(value, bool) or value is None:
        raise InstanceFormatError(path, f"expected a decimal string, got {json.dumps(value)}")
    try:
        m = as_money(value)
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(path, str(exc)) from None
    if m < 0:
        raise InstanceFormatError(path, f"negative amount {format_money(m)}")
    return m


def _id_list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise InstanceFormatError(path, "expected a list of agent ids")
    for k, x in enumerate(value):
        if not isinstance(x, str):
            raise InstanceFormatError(f"{path}[{k}]", "agent ids are strings")
    return value


def _declared_only(ids: list, declared: set, owner: str, path: str, strict: bool) -> list:
    kept = []
    for k, x in enumerate(ids):
        if x == SELLER or x == owner:
            logger.warning("%s: dropping %r", path, x)
        elif x not in declared:
            if strict:
                raise InstanceFormatError(f"{path}[{k}]", f"undeclared agent {x!r}")
            logger.warning("%s: dropping undeclared agent %r", path, x)
        else:
            kept.append(x)
    return kept


def load_document(doc: Mapping[str, Any]) -> Tuple[Instance, GlobalProfile]:
    if not isinstance(doc, dict):
        raise InstanceFormatError("", "top level must be an object")
    unknown = set(doc) - {"seller_neighbors", "agents", "reports", "witness"}
    if unknown:
        raise InstanceFormatError(sorted(unknown)[0], "unknown key")
    if "agents" not in doc:
        raise InstanceFormatError("agents", "missing")
    agents = doc["agents"]
    if not isinstance(agents, dict):
        raise InstanceFormatError("agents", "expected an object keyed by agent id")
    if SELLER in agents:
        raise InstanceFormatError(f"agents.{SELLER}", "reserved for the seller")
    declared = set(agents)
    valuations, neighbors = {}, {}
    for agent, spec in agents.items():
        path = f"agents.{agent}"
        if not isinstance(spec, dict):
            raise InstanceFormatError(path, "expected an object")
        extra = set(spec) - {"valuation", "neighbors"}
        if extra:
            raise InstanceFormatError(f"{path}.{sorted(extra)[0]}", "unknown key")
        if "valuation" not in spec:
            raise InstanceFormatError(f"{path}.valuation", "missing")
        valuations[agent] = _money(spec["valuation"], f"{path}.valuation")
        ids = _id_list(spec.get("neighbors", []), f"{path}.neighbors")
        neighbors[agent] = _declared_only(ids, declared, agent, f"{path}.neighbors", strict=True)
    if "seller_neighbors" not in doc:
        raise InstanceFormatError("seller_neighbors", "missing")
    seller = _id_list(doc["seller_neighbors"], "seller_neighbors")
    seller = _declared_only(seller, declared, SELLER, "seller_neighbors", strict=True)
    instance = Instance(seller, valuations, neighbors)

    raw = doc.get("reports") or {}
    if not isinstance(raw, dict):
        raise InstanceFormatError("reports", "expected an object")
    reports: Dict[str, Optional[Report]] = {}
    for agent, spec in raw.items():
        path = f"reports.{agent}"
        if agent not in declared:
            raise InstanceFormatError(path, f"undeclared agent {agent!r}")
        if spec is None:
            reports[agent] = None
            continue
        if not isinstance(spec, dict):
            raise InstanceFormatError(path, "expected an object or null")
        extra = set(spec) - {"bid", "neighbors"}
        if extra:
            raise InstanceFormatError(f"{path}.{sorted(extra)[0]}", "unknown key")
        if "bid" not in spec:
            raise InstanceFormatError(f"{path}.bid", "missing")
        bid = _money(spec["bid"], f"{path}.bid")
        ids = _id_list(spec.get("neighbors", []), f"{path}.neighbors")
        ids = _declared_only(ids, declared, agent, f"{path}.neighbors", strict=False)
        reports[agent] = Report(bid, frozenset(ids))
    return instance, GlobalProfile(instance, reports)


def loads(text: str) -> Tuple[Instance, GlobalProfile]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return load_document(doc)


def parse_instance(path: Union[str, Path]) -> Tuple[Instance, GlobalProfile]:
    return loads(Path(path).read_text())


def instance_document(instance: Instance, reports: Optional[Mapping[str, Optional[Report]]] = None) -> dict:
    doc: Dict[str, Any] = {
        "seller_neighbors": sorted(instance.seller_neighbors),
        "agents": {
            a: {"valuation": format_money(instance.valuations[a]),
                "neighbors": sorted(instance.neighbors[a])}
            for a in instance.declared
        },
    }
    if reports:
        doc["reports"] = {
            a: None if r is None else {"bid": format_money(r.bid), "neighbors": sorted(r.neighbors)}
            for a, r in sorted(reports.items())
        }
    return doc


def profile_document(profile: GlobalProfile) -> dict:
    """Document for a profile; only reports that differ from the truth are written."""
    inst = profile.instance
    diffs = {}
    for a, r in zip(inst.agents, profile.reports):
        if r is None or r.bid != inst.valuations[a] or r.neighbors != inst.neighbors[a]:
            diffs[a] = r
    return instance_document(inst, diffs)


def dumps(doc: Mapping[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"
