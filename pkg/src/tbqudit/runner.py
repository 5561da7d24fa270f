"""Qudit-level execution of whole circuits, including cavity statements."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from . import cavity
from .dsl import GATE_STATEMENTS, CircuitIR, CrossCz, Measure, Prepare, Qnd
from .errors import DimensionError, UnsupportedFeatureError
from .gates import apply_statement, measure_all, sample_outcomes
from .matrices import gate_matrix
from .oracle import MAX_DENSE_QUBITS, lift_controlled, statement_matrix
from .state import QuditState, basis_state, from_amplitudes

SHOT_BATCH = 10_000


@dataclass
class RunResult:
    """Final register state (qudits in declaration order, first one high-order)."""

    state: QuditState
    qudits: dict
    outcomes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"qudits": dict(self.qudits), "outcomes": self.outcomes, "state": self.state.to_dict()}


def initial_states(ir: CircuitIR, inputs: Optional[Mapping[str, QuditState]] = None) -> dict:
    inputs = dict(inputs or {})
    unknown = set(inputs) - set(ir.qudits)
    if unknown:
        raise ValueError(f"input given for undeclared qudit {sorted(unknown)[0]!r}")
    states = {}
    for name, width in ir.qudits.items():
        prep = ir.prepared(name)
        if prep is not None and name in inputs:
            raise ValueError(f"qudit {name!r} has both a prepare statement and an input state")
        if prep is not None:
            st = from_amplitudes(prep.amplitudes, normalize=True)
        else:
            st = inputs.get(name, basis_state(width, 0))
        if st.num_qubits != width:
            raise DimensionError(f"input for {name!r} has {st.num_qubits} qubits, declared {width}")
        states[name] = st
    return states


def _map_qudit(joint: cavity.JointState, qid: int, fn) -> cavity.JointState:
    """Apply a linear single-qudit map to one axis of the joint tensor."""
    moved = np.moveaxis(joint.amplitudes, qid, -1)
    width = joint.widths[qid]
    flat = moved.reshape(-1, 1 << width)
    out = np.zeros_like(flat)
    for r, row in enumerate(flat):
        nrm = np.linalg.norm(row)
        if nrm > 0:
            out[r] = fn(QuditState(width, row / nrm)).amplitudes * nrm
    return joint.with_amplitudes(np.moveaxis(out.reshape(moved.shape), -1, qid))


def _measure_qudit(joint: cavity.JointState, qid: int, rng) -> tuple[int, float, cavity.JointState]:
    moved = np.moveaxis(joint.amplitudes, qid, 0)
    probs = np.sum(np.abs(moved.reshape(moved.shape[0], -1)) ** 2, axis=1)
    marginal = QuditState(joint.widths[qid], np.sqrt(probs / probs.sum()))
    rec = measure_all(marginal, rng)
    keep = np.zeros_like(moved)
    keep[rec.outcome] = moved[rec.outcome] / np.sqrt(probs[rec.outcome])
    return rec.outcome, rec.probability, joint.with_amplitudes(np.moveaxis(keep, 0, qid))


def run_circuit(ir: CircuitIR, inputs: Optional[Mapping[str, QuditState]] = None,
                rng: Optional[np.random.Generator] = None) -> RunResult:
    """Execute every statement at the amplitude level.

    Measurements and spin readouts are sampled from ``rng`` and recorded in
    ``outcomes``; the returned state is the collapsed register.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    states = initial_states(ir, inputs)
    names = list(ir.qudits)
    outcomes = []

    if len(names) == 1 and not any(isinstance(s, (Qnd, CrossCz)) for s in ir.statements):
        state = states[names[0]]
        for stmt in ir.statements:
            if isinstance(stmt, Measure):
                rec = measure_all(state, rng)
                outcomes.append({"line": stmt.line, "kind": "measure", "qudit": stmt.qudit,
                                 "outcome": rec.outcome, "probability": rec.probability})
                state = rec.collapsed
            else:
                state = apply_statement(state, stmt)
        return RunResult(state, dict(ir.qudits), outcomes)

    index = {name: k for k, name in enumerate(names)}
    joint = cavity.init_joint([states[n] for n in names])
    for stmt in ir.statements:
        if isinstance(stmt, GATE_STATEMENTS):
            joint = _map_qudit(joint, index[stmt.qudit], lambda st, s=stmt: apply_statement(st, s))
        elif isinstance(stmt, Qnd):
            out = cavity.qnd_measure_qubit(joint, index[stmt.qudit], stmt.qubit, rng)
            joint = out.collapsed
            outcomes.append({"line": stmt.line, "kind": "qnd", "spin": stmt.spin, "qudit": stmt.qudit,
                             "qubit": stmt.qubit, "outcome": int(out.value == cavity.MINUS),
                             "probability": out.probability})
        elif isinstance(stmt, CrossCz):
            out, joint = cavity.cross_qudit_cz(joint, index[stmt.qudit1], stmt.m,
                                               index[stmt.qudit2], stmt.n, rng)
            outcomes.append({"line": stmt.line, "kind": "cz", "spin": stmt.spin,
                             "outcome": out.value, "probability": out.probability})
        elif isinstance(stmt, Measure):
            j, p, joint = _measure_qudit(joint, index[stmt.qudit], rng)
            outcomes.append({"line": stmt.line, "kind": "measure", "qudit": stmt.qudit,
                             "outcome": j, "probability": p})
        elif not isinstance(stmt, Prepare):
            raise UnsupportedFeatureError(f"cannot run {type(stmt).__name__} statements")
    return RunResult(joint.composite(), dict(ir.qudits), outcomes)


def composite_qubit(ir: CircuitIR, qudit: str, qubit: int) -> int:
    """Qubit index inside the composite register (later qudits are low-order)."""
    names = list(ir.qudits)
    return qubit + sum(ir.qudits[n] for n in names[names.index(qudit) + 1:])


def oracle_run(ir: CircuitIR, inputs: Optional[Mapping[str, QuditState]] = None) -> QuditState:
    """Dense-matrix reference for circuits made of gates and cross-qudit CZs."""
    states = initial_states(ir, inputs)
    total = sum(ir.qudits.values())
    if total > MAX_DENSE_QUBITS:
        raise DimensionError(f"dense oracle limited to {MAX_DENSE_QUBITS} qubits, circuit has {total}")
    vec = np.ones(1, dtype=np.complex128)
    for name in ir.qudits:
        vec = np.kron(vec, states[name].amplitudes)
    for stmt in ir.statements:
        if isinstance(stmt, GATE_STATEMENTS):
            local = statement_matrix(stmt, ir.qudits[stmt.qudit])
            off = composite_qubit(ir, stmt.qudit, 0)
            hi = total - off - ir.qudits[stmt.qudit]
            vec = np.kron(np.kron(np.eye(1 << hi), local), np.eye(1 << off)) @ vec
        elif isinstance(stmt, CrossCz):
            a = composite_qubit(ir, stmt.qudit1, stmt.m)
            b = composite_qubit(ir, stmt.qudit2, stmt.n)
            vec = lift_controlled(gate_matrix("Z"), [a], b, total) @ vec
        elif isinstance(stmt, Qnd):
            raise UnsupportedFeatureError("the dense oracle has no QND measurement")
    return QuditState(total, vec)


def final_state(ir: CircuitIR, inputs=None) -> Optional[QuditState]:
    """Pre-readout state when the circuit has no random intermediate step, else ``None``."""
    if any(isinstance(s, Qnd) for s in ir.statements):
        return None
    body = CircuitIR(dict(ir.qudits), list(ir.spins),
                     [s for s in ir.statements if not isinstance(s, Measure)])
    # Cross-qudit CZ is deterministic after feed-forward; any seed gives the same state.
    return run_circuit(body, inputs, np.random.default_rng(0)).state


def sample_circuit(ir: CircuitIR, shots: int, seed: int, inputs=None) -> dict:
    """Histogram of composite readout outcomes.

    Shots run in batches of ``SHOT_BATCH`` whose generators are spawned from
    ``seed``, so results do not depend on how batches are scheduled.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    children = np.random.SeedSequence(seed).spawn((shots + SHOT_BATCH - 1) // SHOT_BATCH)
    state = final_state(ir, inputs)
    counts = np.zeros(1 << sum(ir.qudits.values()), dtype=np.int64)
    for b, child in enumerate(children):
        n = min(SHOT_BATCH, shots - b * SHOT_BATCH)
        rng = np.random.default_rng(child)
        if state is not None:
            counts += np.bincount(sample_outcomes(state, n, rng), minlength=counts.size)
        else:
            for _ in range(n):
                res = run_circuit(ir, inputs, rng)
                counts[measure_all(res.state, rng).outcome] += 1
    return {
        "shots": shots,
        "seed": seed,
        "num_qubits": int(sum(ir.qudits.values())),
        "counts": {str(j): int(c) for j, c in enumerate(counts) if c},
    }
