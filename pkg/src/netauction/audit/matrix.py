"""The mechanism-by-property comparison table."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

from ..mechanisms import IDM, IVCG, PVCG, VCG, Kind, MechanismId, delta_ivcg_id
from .engine import (EFFICIENCY, FAILS, HOLDS, IC, INCONCLUSIVE, IR, WBB, WIC,
                     PropertyVerdict, audit, fnp)
from .falsename import AttackModel
from .family import InstanceFamily

COLUMNS = ("EFFICIENCY", "IR", "IC", "WIC", "WBB", "FNP")

# published verdicts, in COLUMNS order
EXPECTED = {
    Kind.VCG: "✓✓✓✓✗✗",
    Kind.IDM: "✗✓✓✓✓✗",
    Kind.PVCG: "✓✓✗✓✓✗",
    Kind.IVCG: "✗✓✓✓✓✓",
    Kind.DELTA_IVCG: "✗✓✓✓✓✗",
}

DEFAULT_ATTACKS = ("type2:1", "type1:1")


def default_mechanisms(delta=1) -> List[MechanismId]:
    return [VCG, IDM, PVCG, IVCG, delta_ivcg_id(delta)]


def expected_symbol(mechanism: MechanismId, column: str) -> Optional[str]:
    row = EXPECTED.get(mechanism.kind)
    return None if row is None else row[COLUMNS.index(column)]


def _combine(verdicts: Sequence[PropertyVerdict]) -> PropertyVerdict:
    """One FNP cell from several attack models: the first failure wins."""
    for v in verdicts:
        if v.status == FAILS:
            return v
    for v in verdicts:
        if v.status == INCONCLUSIVE:
            return v
    return verdicts[0]


@dataclass
class PropertyMatrix:
    mechanisms: List[MechanismId]
    cells: Dict[MechanismId, Dict[str, PropertyVerdict]] = field(default_factory=dict)

    def verdict(self, mechanism: MechanismId, column: str) -> PropertyVerdict:
        return self.cells[mechanism][column]

    def row(self, mechanism: MechanismId) -> str:
        return "".join(self.cells[mechanism][c].symbol for c in COLUMNS)

    def mismatches(self) -> List[tuple]:
        out = []
        for m in self.mechanisms:
            for c in COLUMNS:
                want = expected_symbol(m, c)
                got = self.cells[m][c].symbol
                if want is not None and got != "?" and got != want:
                    out.append((m, c, want, got))
        return out

    def inconclusive(self) -> bool:
        return any(v.status == INCONCLUSIVE for row in self.cells.values() for v in row.values())

    def exit_code(self) -> int:
        if self.mismatches():
            return 1
        return 2 if self.inconclusive() else 0

    def render(self) -> str:
        width = max(len(str(m)) for m in self.mechanisms) + 2
        head = "mechanism".ljust(width) + "  ".join(c[:4].ljust(4) for c in COLUMNS) + "  expected"
        lines = [head]
        for m in self.mechanisms:
            row = "  ".join(self.cells[m][c].symbol.ljust(4) for c in COLUMNS)
            want = EXPECTED.get(m.kind, "")
            flag = "" if not want or self.row(m) == want else "  MISMATCH"
            lines.append(str(m).ljust(width) + row + "  " + want + flag)
        return "\n".join(lines)


def property_matrix(mechanisms: Optional[Sequence[MechanismId]] = None,
                    family: Optional[Iterable] = None,
                    fnp_family: Optional[Iterable] = None,
                    attacks: Sequence = DEFAULT_ATTACKS,
                    budget: Optional[int] = None, workers: int = 1) -> PropertyMatrix:
    """Audit every mechanism against the six columns.

    Unilateral properties run on ``family``; false-name attacks, whose space
    grows much faster, run on ``fnp_family`` (``family`` when omitted). The
    FNP column fails when any of ``attacks`` yields a witness.
    """
    mechanisms = list(mechanisms or default_mechanisms())
    family = list(family if family is not None else InstanceFamily(4, 4))
    fnp_family = family if fnp_family is None else list(fnp_family)
    models = [AttackModel.parse(a) if isinstance(a, str) else a for a in attacks]
    uni = [EFFICIENCY, IR, IC, WIC, WBB]
    verdicts = audit([(m, p) for m in mechanisms for p in uni], family, budget, workers)
    fnps = audit([(m, fnp(a)) for m in mechanisms for a in models], fnp_family, budget, workers)
    matrix = PropertyMatrix(mechanisms)
    for m in mechanisms:
        row = {p.name: verdicts[(m, p)] for p in uni}
        row["FNP"] = _combine([fnps[(m, fnp(a))] for a in models])
        matrix.cells[m] = row
    return matrix
