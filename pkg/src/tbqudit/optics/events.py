"""Event-level propagation of time-bin amplitudes through the loop hardware.

Amplitudes live on (wire, absolute time) pairs.  Time is an integer count of
half bin periods, so a schedule error that shifts a bin by a non-integer
number of periods shows up as a misalignment instead of silent interference.
Every slot of the input register is propagated, zero amplitudes included, so
routing and collisions depend on the schedule only.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import numpy as np

from ..errors import ScheduleCollisionError, ScheduleError
from ..mzi import IDENTITY_PARAMS
from ..state import QuditState, basis_state
from .compiler import BYPASS_PATH, CX_PATH, IO_PATH, LOOP_PATH, SQ_PATH
from .program import (CNOT, CX_BYPASS, CX_LONG, CX_SHORT, SINGLE, SQ_DELAYED, SQ_DIRECT,
                      TICKS_PER_T, BlockEntry, OpticalProgram)
ELEMENT_KINDS = ("switch", "delay", "phase", "beamsplitter")

Packets = dict  # absolute tick -> complex amplitude


class LossModel:
    """Power transmission per element kind; amplitudes scale by its square root."""

    def __init__(self, transmission: Union[float, Mapping[str, float], None] = None):
        if transmission is None:
            transmission = 1.0
        if isinstance(transmission, Mapping):
            unknown = set(transmission) - set(ELEMENT_KINDS)
            if unknown:
                raise ValueError(f"unknown element kinds {sorted(unknown)}")
            self.power = {k: float(transmission.get(k, 1.0)) for k in ELEMENT_KINDS}
        else:
            self.power = {k: float(transmission) for k in ELEMENT_KINDS}
        for k, t in self.power.items():
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"transmission of {k} must lie in [0, 1], got {t}")
        self.amp = {k: math.sqrt(t) for k, t in self.power.items()}

    @property
    def lossless(self) -> bool:
        return all(t == 1.0 for t in self.power.values())

    def path_factor(self, path) -> float:
        return math.prod(self.amp[k] for k in path)


@dataclass
class LatencyReport:
    block_latency_T: list = field(default_factory=list)  # per pass, excluding loop fiber
    loop_transit_T: int = 0
    total_time_T: int = 0
    total_storage_time_s: float = 0.0
    elements_traversed: int = 0
    survival_probability: float = 1.0
    collisions: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "pass_latency_in_T": self.block_latency_T,
            "loop_transit_in_T": self.loop_transit_T,
            "total_time_in_T": self.total_time_T,
            "total_storage_time_s": self.total_storage_time_s,
            "elements_traversed": self.elements_traversed,
            "survival_probability": self.survival_probability,
            "collisions": self.collisions,
        }


def _put(wire: Packets, t: int, amp: complex, where: str):
    if t in wire:
        raise ScheduleCollisionError(f"two amplitudes collide at {where}, tick {t}")
    wire[t] = amp


def _shift(wire: Packets, ticks: int, factor: float = 1.0) -> Packets:
    return {t + ticks: a * factor for t, a in wire.items()}


def _slot(t: int, t0: int, num_bins: int, where: str) -> int:
    rel = t - t0
    if rel % TICKS_PER_T or not 0 <= rel // TICKS_PER_T < num_bins:
        raise ScheduleError(f"amplitude at tick {t} falls outside every switch window of {where}")
    return rel // TICKS_PER_T


def _split(packets, t0, routing, labels, num_bins, factor, where):
    arms = {lab: {} for lab in labels}
    for t in sorted(packets):
        j = _slot(t, t0, num_bins, where)
        try:
            lab = routing[j]
        except KeyError:
            raise ScheduleError(f"bin {j} has no route in {where}") from None
        if lab not in arms:
            raise ScheduleError(f"unknown path label {lab!r} in {where}")
        _put(arms[lab], t, packets[t] * factor, f"{where}:{lab}")
    return arms


def _merge(wires, factor, where):
    out = {}
    for w in wires:
        for t, a in w.items():
            _put(out, t, a * factor, f"{where}:exit")
    return out


def _mzi(arm0, arm1, t0, sched, num_bins, loss: LossModel, where):
    """Two-port MZI cell with time-gated phase shifters.

    The pair whose lower bin is ``j`` meets here at ``t0 + (j + 2^i) T``; in
    that window the shifters hold the gate setting (or the identity setting
    when the pair fails the control condition).  Outside every window they
    idle at the identity setting.
    """
    d = 1 << sched.qubit
    mask = sum(1 << c for c in sched.controls)
    r = math.sqrt(0.5) * loss.amp["beamsplitter"]
    tp = loss.amp["phase"]
    gate_ph = _cell_phases(sched.mzi, tp)
    idle_ph = _cell_phases(IDENTITY_PARAMS, tp)
    out0, out1 = {}, {}
    for t in sorted(set(arm0) | set(arm1)):
        rel = t - t0 - d * TICKS_PER_T
        lo = rel // TICKS_PER_T
        ph = idle_ph
        if (rel % TICKS_PER_T == 0 and 0 <= lo < num_bins and not (lo >> sched.qubit) & 1
                and lo & mask == mask):
            ph = gate_ph
        e_phi, e_theta, e_psi0, e_psi1, tref = ph
        x0 = arm0.get(t, 0j) * e_phi
        x1 = arm1.get(t, 0j) * tref
        y0, y1 = r * (x0 + 1j * x1), r * (1j * x0 + x1)
        y0, y1 = y0 * e_theta, y1 * tref
        z0, z1 = r * (y0 + 1j * y1), r * (1j * y0 + y1)
        _put(out0, t, z0 * e_psi0, f"{where}:mzi0")
        _put(out1, t, z1 * e_psi1, f"{where}:mzi1")
    return out0, out1


def _cell_phases(p, tp):
    """Shifter factors including the shifters' amplitude transmission ``tp``."""
    return (tp * cmath.exp(1j * p.phi), tp * cmath.exp(1j * p.theta),
            tp * cmath.exp(1j * p.psi0), tp * cmath.exp(1j * p.psi1), tp)


def simulate_block(packets: Packets, t0: int, entry: BlockEntry, num_qubits: int,
                   loss: Optional[LossModel] = None):
    """Propagate one block; returns ``(packets, latency_in_T)``.

    ``t0`` is the tick at which bin 0 reaches the block's entry switch.
    """
    loss = loss or LossModel()
    sched = entry.schedule
    where = entry.block_id
    num_bins = 1 << num_qubits
    sw, dl = loss.amp["switch"], loss.amp["delay"]
    if not entry.active:
        return _shift(packets, 0, loss.path_factor(BYPASS_PATH)), 0
    routing = sched.route_map()
    if sched.kind == SINGLE:
        pre0, pre1, post0, post1 = (x * TICKS_PER_T for x in sched.delays)
        arms = _split(packets, t0, routing, (SQ_DELAYED, SQ_DIRECT), num_bins, sw, where)
        a0 = _shift(arms[SQ_DELAYED], pre0, dl)
        a1 = _shift(arms[SQ_DIRECT], pre1, dl)
        o0, o1 = _mzi(a0, a1, t0, sched, num_bins, loss, where)
        out = _merge([_shift(o0, post0, dl), _shift(o1, post1, dl)], sw, where)
    elif sched.kind == CNOT:
        long_, short, bypass = (x * TICKS_PER_T for x in sched.delays)
        arms = _split(packets, t0, routing, (CX_LONG, CX_SHORT, CX_BYPASS), num_bins, sw, where)
        out = _merge([_shift(arms[CX_LONG], long_, dl), _shift(arms[CX_SHORT], short, dl),
                      _shift(arms[CX_BYPASS], bypass, dl)], sw, where)
    else:
        raise ScheduleError(f"unknown block kind {sched.kind!r}", block_id=where)
    latency = _check_latency(packets, out, where)
    if latency != sched.common_latency:
        raise ScheduleError(
            f"measured latency {latency} T differs from scheduled {sched.common_latency} T",
            block_id=where)
    return out, latency


def _check_latency(inp: Packets, out: Packets, where: str) -> int:
    tin, tout = sorted(inp), sorted(out)
    if len(tin) != len(tout):
        raise ScheduleError(f"{len(tin)} bins entered but {len(tout)} left", block_id=where)
    shifts = {b - a for a, b in zip(tin, tout)}
    if len(shifts) != 1:
        raise ScheduleError("latency is not uniform across bins", block_id=where)
    (ticks,) = shifts
    if ticks % TICKS_PER_T:
        raise ScheduleError(f"latency of {ticks} half-periods is not a whole period", block_id=where)
    return ticks // TICKS_PER_T


def state_packets(state: QuditState, t0: int = 0) -> Packets:
    return {t0 + TICKS_PER_T * j: complex(a) for j, a in enumerate(state.amplitudes)}


def packets_state(packets: Packets, t0: int, num_qubits: int, lossy: bool) -> QuditState:
    num_bins = 1 << num_qubits
    amps = np.zeros(num_bins, dtype=np.complex128)
    for t, a in packets.items():
        amps[_slot(t, t0, num_bins, "readout")] += a
    if len(packets) != num_bins:
        raise ScheduleError(f"readout received {len(packets)} bins, expected {num_bins}")
    return QuditState(num_qubits, amps, lossy=lossy)


def run_pass(packets, t0, entries, num_qubits, loss, pass_index):
    """Propagate one pass through the blocks; returns ``(packets, t0, block_latency)``."""
    latency = 0
    for entry in entries:
        try:
            packets, lat = simulate_block(packets, t0, entry, num_qubits, loss)
        except ScheduleError as exc:
            raise exc.located(pass_index, exc.block_id or entry.block_id) from None
        latency += lat
        t0 += lat * TICKS_PER_T
    return packets, t0, latency


def pass_path(entries) -> list:
    path = []
    for e in entries:
        if not e.active:
            path += BYPASS_PATH
        elif e.schedule.kind == SINGLE:
            path += SQ_PATH
        else:
            path += CX_PATH
    return path + list(LOOP_PATH)


def program_path_length(program: OpticalProgram) -> int:
    """Optical elements the photon crosses from injection to readout."""
    return len(IO_PATH) + sum(len(pass_path(entries)) for entries in program.passes)


def simulate_program(program: OpticalProgram, state: Optional[QuditState] = None,
                     loss=None) -> tuple[QuditState, LatencyReport]:
    """Run the whole program at the event level.

    Without an explicit input the photon comes from the preparation loop
    when the program has one, otherwise it is injected in bin 0.
    """
    from .prep import simulate_prep

    loss = loss if isinstance(loss, LossModel) else LossModel(loss)
    n = program.num_qubits
    if state is None:
        state = simulate_prep(program.prep, n) if program.prep is not None else basis_state(n, 0)
    if state.num_qubits != n:
        raise ScheduleError(f"input has {state.num_qubits} qubits, program expects {n}")
    loop_ticks = (1 << n) * TICKS_PER_T
    t0 = 0
    packets = _shift(state_packets(state, t0), 0, loss.amp["switch"])  # injection
    report = LatencyReport(loop_transit_T=1 << n)
    for p, entries in enumerate(program.passes):
        packets, t0, lat = run_pass(packets, t0, entries, n, loss, p)
        packets = _shift(packets, loop_ticks, loss.amp["delay"])
        t0 += loop_ticks
        report.block_latency_T.append(lat)
    packets = _shift(packets, 0, loss.amp["switch"])  # readout
    out = packets_state(packets, t0, n, lossy=not loss.lossless or state.lossy)
    report.total_time_T = t0 // TICKS_PER_T
    report.total_storage_time_s = report.total_time_T * program.bin_period
    report.elements_traversed = program_path_length(program)
    report.survival_probability = out.norm() ** 2
    return out, report
