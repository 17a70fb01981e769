"""Tri-state verdicts shared by the criteria modules."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Dict, List, Optional, Tuple

from .seqcalc import Exponent, LqDecision, SeqExpr, lq_membership


class Status(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"

    @classmethod
    def of(cls, flag: bool) -> "Status":
        return cls.HOLDS if flag else cls.FAILS


@dataclass(frozen=True)
class Condition:
    """One membership test: ``sequence`` in l_``exponent``."""

    name: str
    sequence: SeqExpr
    exponent: Exponent
    decision: LqDecision

    @classmethod
    def test(cls, name: str, sequence: SeqExpr, q) -> "Condition":
        d = lq_membership(sequence, q)
        return cls(name, sequence, d.q, d)

    @property
    def member(self) -> bool:
        return self.decision.member


@dataclass(frozen=True)
class HypothesisLedger:
    """Geometric and index hypotheses; ``None`` marks an entry that does not apply."""

    porosity: Optional[Status] = None
    T1: Optional[Status] = None
    upind_h_negative: Optional[Status] = None
    E3a: Optional[Status] = None
    E3b: Optional[Status] = None
    lowind_tau_positive: Optional[Status] = None

    def as_dict(self) -> Dict[str, str]:
        return {f.name: getattr(self, f.name).value for f in fields(self) if getattr(self, f.name) is not None}

    def holds(self, *names: str) -> bool:
        return all(getattr(self, n) is Status.HOLDS for n in names)


@dataclass(frozen=True)
class Verdict:
    status: Status
    conditions: Tuple[Condition, ...] = ()
    hypotheses: HypothesisLedger = field(default_factory=HypothesisLedger)
    citation: str = ""
    notes: Tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Status.FAILS

    @property
    def inconclusive(self) -> bool:
        return self.status is Status.INCONCLUSIVE

    @property
    def hypotheses_assumed(self) -> List[str]:
        return [k for k, v in self.hypotheses.as_dict().items() if v == Status.HOLDS.value]


def verdict(status: Status, citation: str, conditions=(), hypotheses=None, notes=()) -> Verdict:
    return Verdict(
        status=status,
        conditions=tuple(conditions),
        hypotheses=hypotheses if hypotheses is not None else HypothesisLedger(),
        citation=citation,
        notes=tuple(notes),
    )
