"""Check a compiled program against amplitude-level gate semantics."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..dsl import GATE_STATEMENTS, CircuitIR
from ..errors import ScheduleError
from ..gates import apply_permutation, apply_statement, controlled_permutation, controlled_u
from ..state import compare_vectors, from_amplitudes, random_state
from .compiler import block_gate
from .events import TICKS_PER_T, packets_state, simulate_block, state_packets
from .prep import simulate_prep
from .program import CNOT, OpticalProgram


@dataclass
class VerifyReport:
    passed: bool
    max_deviation: float = 0.0
    trials: int = 0
    blocks_checked: int = 0
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "trials": self.trials,
            "blocks_checked": self.blocks_checked,
            "failures": self.failures,
        }


def _entry_step(schedule):
    u, controls, target = block_gate(schedule)
    if schedule.kind == CNOT:
        def step(state):
            return apply_permutation(state, controlled_permutation(state.num_qubits, controls, target))
    else:
        def step(state):
            return controlled_u(state, controls, target, u)
    return step


def _reference_steps(program, ir, reference):
    entries = [e for _, e in program.active_entries()]
    if ir is not None:
        gates = [i for i, s in enumerate(ir.statements) if isinstance(s, GATE_STATEMENTS)]
        if [e.statement for e in entries] != gates:
            return None, (f"program activates statements {[e.statement for e in entries]}, "
                          f"circuit has gates at {gates}")
        return [lambda st, s=ir.statements[e.statement]: apply_statement(st, s) for e in entries], None
    source = reference if reference is not None else program
    ref_entries = [e for _, e in source.active_entries()]
    if len(ref_entries) != len(entries):
        return None, f"program has {len(entries)} active blocks, reference has {len(ref_entries)}"
    return [_entry_step(e.schedule) for e in ref_entries], None


def verify(program: OpticalProgram, ir: Optional[CircuitIR] = None, *,
           reference: Optional[OpticalProgram] = None, trials: int = 20, seed: int = 0,
           tol: float = 1e-9) -> VerifyReport:
    """Simulate ``program`` block by block on random inputs.

    After every active block the event-level state is compared (up to global
    phase) with the amplitude-level result of the corresponding circuit
    statement, so a failure names the first pass and block that went wrong.
    Without ``ir`` the reference is the gate implied by each block setting of
    ``reference`` (default: the program itself).
    """
    report = VerifyReport(passed=True, trials=trials)
    steps, problem = _reference_steps(program, ir, reference)
    if problem:
        report.passed = False
        report.failures.append({"pass": None, "block": None, "reason": problem})
        return report
    n = program.num_qubits
    rng = np.random.default_rng(seed)

    if program.prep is not None and ir is not None:
        prepared = ir.prepared(next(iter(ir.qudits)))
        if prepared is not None:
            target = from_amplitudes(prepared.amplitudes, normalize=True)
            dev = compare_vectors(simulate_prep(program.prep, n).amplitudes, target.amplitudes)
            report.max_deviation = max(report.max_deviation, dev.max_abs_diff)
            if dev.max_abs_diff > tol:
                report.passed = False
                report.failures.append({"pass": None, "block": "prep",
                                        "reason": f"prepared state deviates by {dev.max_abs_diff:.3g}"})

    loop_ticks = (1 << n) * TICKS_PER_T
    for _ in range(trials):
        ref = random_state(n, rng)
        packets, t0, k = state_packets(ref), 0, 0
        try:
            for p, entries in enumerate(program.passes):
                for entry in entries:
                    try:
                        packets, lat = simulate_block(packets, t0, entry, n)
                        t0 += lat * TICKS_PER_T
                        if not entry.active:
                            continue
                        ref = steps[k](ref)
                        k += 1
                        got = packets_state(packets, t0, n, lossy=True)
                    except ScheduleError as exc:
                        raise exc.located(p, entry.block_id) from None
                    dev = compare_vectors(got.amplitudes, ref.amplitudes).max_abs_diff
                    report.max_deviation = max(report.max_deviation, dev)
                    report.blocks_checked += 1
                    if dev > tol:
                        raise ScheduleError(f"output deviates from gate semantics by {dev:.3g}",
                                            p, entry.block_id)
                packets = {t + loop_ticks: a for t, a in packets.items()}
                t0 += loop_ticks
        except ScheduleError as exc:
            report.passed = False
            report.failures.append({"pass": exc.pass_index, "block": exc.block_id,
                                    "reason": exc.reason})
            break
    return report
