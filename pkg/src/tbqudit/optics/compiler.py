"""Lower a single-qudit circuit to per-pass gate-block settings."""
from __future__ import annotations

import numpy as np

from ..bits import bit_at, check_qubit, check_width
from ..dsl import CircuitIR, Cnot, ControlledU, CrossCz, Gate, Measure, Prepare, Qnd, Toffoli
from ..errors import BinRangeError, InvalidGateError, UnsupportedFeatureError
from ..mzi import decompose
from ..state import from_amplitudes
from .program import (CNOT, CX_BYPASS, CX_LONG, CX_SHORT, SINGLE, SQ_DELAYED, SQ_DIRECT,
                      BlockEntry, BlockSchedule, ElementCount, OpticalProgram, block_id,
                      loop_layout)

# Elements on every path through one block (switch, arm, ..., switch).
SQ_PATH = ("switch", "delay", "phase", "beamsplitter", "phase", "beamsplitter", "phase",
           "delay", "switch")
CX_PATH = ("switch", "delay", "switch")
BYPASS_PATH = ("switch", "switch")
LOOP_PATH = ("delay",)          # processing-loop fiber, once per pass
IO_PATH = ("switch", "switch")  # injection and readout switches


def sq_delays(i: int) -> tuple:
    d = 1 << i
    return (d, 0, 0, d)


def cx_delays(n: int) -> tuple:
    d = 1 << n
    return (2 * d, 0, d)


def schedule_single_qubit_block(i: int, u, num_qubits: int, controls=()) -> BlockSchedule:
    """Split on bit ``i``, delay the zero-set bins by ``2^i T`` so that each
    pair meets at the MZI, then delay output port 1 by the same amount."""
    check_width(num_qubits)
    check_qubit(i, num_qubits)
    controls = tuple(controls)
    for c in controls:
        check_qubit(c, num_qubits)
    if i in controls or len(set(controls)) != len(controls):
        raise InvalidGateError(f"controls {list(controls)} and target {i} must be distinct")
    routing = tuple((j, SQ_DELAYED if bit_at(j, i) == 0 else SQ_DIRECT)
                    for j in range(1 << num_qubits))
    return BlockSchedule(SINGLE, i, sq_delays(i), routing, decompose(u), controls, 1 << i)


def schedule_cnot_block(n: int, m, num_qubits: int) -> BlockSchedule:
    """Swap bins ``j <-> j + 2^n`` whose control bits are all 1.

    ``m`` is one control index or a sequence of them (Toffoli and wider).
    """
    check_width(num_qubits)
    check_qubit(n, num_qubits)
    controls = (m,) if isinstance(m, (int, np.integer)) else tuple(m)
    if not controls:
        raise InvalidGateError("a CNOT block needs at least one control")
    for c in controls:
        check_qubit(c, num_qubits)
    if n in controls or len(set(controls)) != len(controls):
        raise InvalidGateError(f"control(s) {list(controls)} collide with target {n}")
    mask = sum(1 << c for c in controls)
    routing = []
    for j in range(1 << num_qubits):
        if j & mask != mask:
            routing.append((j, CX_BYPASS))
        else:
            routing.append((j, CX_SHORT if bit_at(j, n) else CX_LONG))
    return BlockSchedule(CNOT, n, cx_delays(n), tuple(routing), None, controls, 1 << n)


def bypass_schedule(kind: str, qubit: int) -> BlockSchedule:
    delays = sq_delays(qubit) if kind == SINGLE else cx_delays(qubit)
    return BlockSchedule(kind, qubit, delays)


def statement_block(stmt, num_qubits: int) -> BlockSchedule:
    """The active block setting realizing one gate statement."""
    if isinstance(stmt, Gate):
        return schedule_single_qubit_block(stmt.qubit, stmt.matrix(), num_qubits)
    if isinstance(stmt, Cnot):
        return schedule_cnot_block(stmt.target, stmt.control, num_qubits)
    if isinstance(stmt, Toffoli):
        return schedule_cnot_block(stmt.target, (stmt.control1, stmt.control2), num_qubits)
    if isinstance(stmt, ControlledU):
        if stmt.name == "X" and stmt.controls:
            return schedule_cnot_block(stmt.target, stmt.controls, num_qubits)
        return schedule_single_qubit_block(stmt.target, stmt.matrix(), num_qubits, stmt.controls)
    raise UnsupportedFeatureError(f"{type(stmt).__name__} has no loop block")


def _assemble(num_qubits: int, group) -> tuple:
    """One pass: every block in loop order, with ``group`` entries active."""
    active = {e.block_id: e for e in group}
    out = []
    for kind, q in loop_layout(num_qubits):
        bid = block_id(kind, q)
        out.append(active.pop(bid) if bid in active else BlockEntry(bid, False, bypass_schedule(kind, q)))
    if active:
        raise ValueError(f"blocks {sorted(active)} are not part of the loop layout")
    return tuple(out)


def compile_circuit(ir: CircuitIR, bin_period: float = 1e-9, pack: bool = False) -> OpticalProgram:
    """One active block per pass, in circuit order (``pack=True`` merges passes)."""
    from .prep import prep_schedule

    if len(ir.qudits) != 1:
        raise UnsupportedFeatureError("the loop compiler handles exactly one qudit")
    n = ir.width()
    prep = None
    measured = False
    passes = []
    for idx, stmt in enumerate(ir.statements):
        if isinstance(stmt, (Qnd, CrossCz)):
            raise UnsupportedFeatureError(
                f"line {stmt.line}: spin protocols run on the cavity interface, not the loop")
        if isinstance(stmt, Prepare):
            prep = prep_schedule(from_amplitudes(stmt.amplitudes, normalize=True))
            continue
        if isinstance(stmt, Measure):
            measured = True
            continue
        for q in _qubits(stmt):
            if q >= n:
                raise BinRangeError(f"statement {idx} references qubit {q} >= {n}")
        sched = statement_block(stmt, n)
        passes.append(_assemble(n, [BlockEntry(sched.block_id, True, sched, idx)]))
    program = OpticalProgram(n, bin_period, tuple(passes), prep, measured)
    return pack_passes(program) if pack else program


def _qubits(stmt) -> tuple:
    if isinstance(stmt, Gate):
        return (stmt.qubit,)
    if isinstance(stmt, Cnot):
        return (stmt.control, stmt.target)
    if isinstance(stmt, Toffoli):
        return (stmt.control1, stmt.control2, stmt.target)
    if isinstance(stmt, ControlledU):
        return (*stmt.controls, stmt.target)
    return ()


def entry_qubits(entry: BlockEntry) -> set:
    return {entry.schedule.qubit, *entry.schedule.controls}


def pack_passes(program: OpticalProgram, verify_seed: int = 0) -> OpticalProgram:
    """Greedily merge consecutive active blocks into one pass.

    A block joins the current pass if it sits later in the loop than every
    block already there and touches none of their qubits.  The packed
    program is re-verified against the original; on mismatch the original
    is returned.
    """
    from .verify import verify

    order = {block_id(k, q): pos for pos, (k, q) in enumerate(loop_layout(program.num_qubits))}
    groups = []
    for _, entry in program.active_entries():
        cur = groups[-1] if groups else None
        if (cur and order[entry.block_id] > order[cur[-1].block_id]
                and not any(entry_qubits(entry) & entry_qubits(e) for e in cur)):
            cur.append(entry)
        else:
            groups.append([entry])
    packed = program.with_passes(_assemble(program.num_qubits, g) for g in groups)
    if len(packed.passes) == len(program.passes):
        return program
    if not verify(packed, reference=program, trials=4, seed=verify_seed).passed:
        return program
    return packed


def count_elements(num_qubits: int) -> ElementCount:
    """Hardware inventory of the full loop layout.

    Each single-qubit block: entry and exit switches, two delay lines of
    ``2^i T``, two beamsplitters and three balanced phase-shifter pairs.
    Each CNOT block: two switches and two delay lines (``2^(n+1) T`` and the
    ``2^n T`` bypass; the third arm has zero length).  Fixed overhead: the
    loop fiber, injection and readout switches, and the preparation loop
    (fiber, input switch, variable extraction switch, phase shifter).
    """
    check_width(num_qubits)
    n = num_qubits
    distinct = len({cx_delays(q) for q in range(n)})
    path = n * len(SQ_PATH) + n * len(CX_PATH) + len(LOOP_PATH) + len(IO_PATH)
    return ElementCount(
        switches=2 * n + 2 * n + 2 + 2,
        delay_lines=2 * n + 2 * n + 1 + 1,
        phase_shifters=6 * n + 1,
        beamsplitters=2 * n,
        distinct_delay_values=distinct,
        path_elements=path,
    )


def block_gate(schedule: BlockSchedule):
    """``(matrix, controls, target)`` implied by an active block's settings."""
    from ..matrices import gate_matrix
    from ..mzi import cell_matrix

    if schedule.kind == SINGLE:
        return cell_matrix(schedule.mzi), schedule.controls, schedule.qubit
    return gate_matrix("X"), schedule.controls, schedule.qubit

