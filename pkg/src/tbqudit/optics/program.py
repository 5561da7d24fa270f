"""Data model for compiled optical programs and its JSON layout."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Optional

from ..mzi import GateParams

# Internal time grid: half a bin period.
TICKS_PER_T = 2

SINGLE = "single"
CNOT = "cnot"

# Entry-switch path labels.
SQ_DELAYED = "delay"    # bit i = 0: waits 2^i T for its partner
SQ_DIRECT = "direct"    # bit i = 1
CX_LONG = "long"        # controls set, target 0: delayed 2^(n+1) T
CX_SHORT = "short"      # controls set, target 1: no delay
CX_BYPASS = "bypass"    # everything else: delayed 2^n T


def block_id(kind: str, qubit: int) -> str:
    return f"{'sq' if kind == SINGLE else 'cx'}{qubit}"


def loop_layout(num_qubits: int) -> list[tuple[str, int]]:
    """Physical order of the gate blocks inside the processing loop."""
    return [(SINGLE, i) for i in range(num_qubits)] + [(CNOT, n) for n in range(num_qubits)]


@dataclass(frozen=True)
class BlockSchedule:
    """Settings of one gate block for one loop pass.

    ``delays`` are in units of the bin period T.  Single-qubit blocks list
    ``(pre_delayed, pre_direct, post_port0, post_port1)``; CNOT blocks list
    ``(long, short, bypass)``.  ``routing`` gives the entry-switch path of
    every bin and is empty for a bypassed block.
    """

    kind: str
    qubit: int
    delays: tuple
    routing: tuple = ()
    mzi: Optional[GateParams] = None
    controls: tuple = ()
    common_latency: int = 0

    @property
    def block_id(self) -> str:
        return block_id(self.kind, self.qubit)

    def route_map(self) -> dict:
        return dict(self.routing)

    def to_dict(self, active: bool) -> dict:
        return {
            "block": self.block_id,
            "kind": self.kind,
            "qubit": self.qubit,
            "active": active,
            "delays_in_T": list(self.delays),
            "routing": [[j, label] for j, label in self.routing],
            "mzi": self.mzi.to_dict() if self.mzi is not None else None,
            "controls": list(self.controls),
            "common_latency_in_T": self.common_latency,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BlockSchedule":
        return cls(
            kind=doc["kind"],
            qubit=int(doc["qubit"]),
            delays=tuple(int(d) for d in doc["delays_in_T"]),
            routing=tuple((int(j), str(label)) for j, label in doc.get("routing", [])),
            mzi=GateParams.from_dict(doc["mzi"]) if doc.get("mzi") else None,
            controls=tuple(int(c) for c in doc.get("controls", [])),
            common_latency=int(doc["common_latency_in_T"]),
        )


@dataclass(frozen=True)
class BlockEntry:
    block_id: str
    active: bool
    schedule: BlockSchedule
    statement: Optional[int] = None  # index into the source circuit's statements

    def to_dict(self) -> dict:
        doc = self.schedule.to_dict(self.active)
        doc["statement"] = self.statement
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "BlockEntry":
        sched = BlockSchedule.from_dict(doc)
        return cls(doc.get("block", sched.block_id), bool(doc["active"]), sched, doc.get("statement"))


@dataclass(frozen=True)
class PrepSchedule:
    """Per-pass extraction settings of the preparation loop.

    On pass ``j`` the variable switch transmits amplitude fraction
    ``transmittances[j]`` and the output phase shifter adds ``phases[j]``.
    """

    transmittances: tuple
    phases: tuple

    def to_dict(self) -> dict:
        return {"transmittances": list(self.transmittances), "phases": list(self.phases)}

    @classmethod
    def from_dict(cls, doc: dict) -> "PrepSchedule":
        return cls(tuple(float(t) for t in doc["transmittances"]),
                   tuple(float(p) for p in doc["phases"]))


@dataclass(frozen=True)
class OpticalProgram:
    num_qubits: int
    bin_period: float = 1e-9
    passes: tuple = ()  # tuple of tuples of BlockEntry, loop_layout order
    prep: Optional[PrepSchedule] = None
    measured: bool = False

    @property
    def injection_pass(self) -> int:
        return 0

    @property
    def extraction_pass(self) -> int:
        return len(self.passes)

    def active_entries(self):
        """Yield ``(pass_index, entry)`` for every active block, in execution order."""
        for p, entries in enumerate(self.passes):
            for e in entries:
                if e.active:
                    yield p, e

    def with_passes(self, passes) -> "OpticalProgram":
        return replace(self, passes=tuple(tuple(p) for p in passes))

    def to_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "bin_period": self.bin_period,
            "io": {"injection_pass": self.injection_pass, "extraction_pass": self.extraction_pass},
            "measured": self.measured,
            "prep": self.prep.to_dict() if self.prep is not None else None,
            "passes": [[e.to_dict() for e in entries] for entries in self.passes],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, doc: dict) -> "OpticalProgram":
        return cls(
            num_qubits=int(doc["num_qubits"]),
            bin_period=float(doc.get("bin_period", 1e-9)),
            passes=tuple(tuple(BlockEntry.from_dict(b) for b in entries) for entries in doc["passes"]),
            prep=PrepSchedule.from_dict(doc["prep"]) if doc.get("prep") else None,
            measured=bool(doc.get("measured", False)),
        )

    @classmethod
    def from_json(cls, text: str) -> "OpticalProgram":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ElementCount:
    switches: int
    delay_lines: int
    phase_shifters: int
    beamsplitters: int
    distinct_delay_values: int
    path_elements: int = field(default=0, compare=False)

    @property
    def total(self) -> int:
        return self.switches + self.delay_lines + self.phase_shifters + self.beamsplitters

    def to_dict(self) -> dict:
        return {
            "switches": self.switches,
            "delay_lines": self.delay_lines,
            "phase_shifters": self.phase_shifters,
            "beamsplitters": self.beamsplitters,
            "distinct_delay_values": self.distinct_delay_values,
            "total": self.total,
            "path_elements": self.path_elements,
        }
