"""Brute-force reference simulator built from explicit Kronecker products.

Nothing here touches the bin arithmetic in :mod:`tbqudit.bits`; the point is
to have a second, structurally different route to the same answers.
"""
from __future__ import annotations

from functools import reduce

import numpy as np

from .errors import BinRangeError, InvalidGateError, UnsupportedFeatureError
from .matrices import check_unitary, gate_matrix
from .state import QuditState

MAX_DENSE_QUBITS = 12

_I2 = np.eye(2, dtype=np.complex128)
_P1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)


def _check(num_qubits, qubits):
    if num_qubits > MAX_DENSE_QUBITS:
        raise BinRangeError(f"dense oracle limited to {MAX_DENSE_QUBITS} qubits, got {num_qubits}")
    for q in qubits:
        if not 0 <= q < num_qubits:
            raise BinRangeError(f"qubit {q} out of range for {num_qubits} qubits")


def _kron_chain(factors: dict[int, np.ndarray], num_qubits: int) -> np.ndarray:
    # Leftmost Kronecker factor is the most significant qubit.
    ops = [factors.get(q, _I2) for q in reversed(range(num_qubits))]
    return reduce(np.kron, ops)


def lift_single(u, i: int, num_qubits: int) -> np.ndarray:
    """``I (x) ... (x) U (x) ... (x) I`` with ``U`` in slot ``i``."""
    u = check_unitary(u, dim=2)
    _check(num_qubits, [i])
    return _kron_chain({i: u}, num_qubits)


def lift_controlled(u, controls, target: int, num_qubits: int) -> np.ndarray:
    """Dense matrix applying ``U`` to ``target`` when every control reads 1."""
    u = check_unitary(u, dim=2)
    controls = list(controls)
    _check(num_qubits, controls + [target])
    if target in controls or len(set(controls)) != len(controls):
        raise InvalidGateError(f"controls {controls} and target {target} must be distinct")
    if not controls:
        return lift_single(u, target, num_qubits)
    projector = {c: _P1 for c in controls}
    on = _kron_chain(projector, num_qubits)
    on_u = _kron_chain({**projector, target: u}, num_qubits)
    return np.eye(1 << num_qubits, dtype=np.complex128) - on + on_u


def statement_matrix(stmt, num_qubits: int) -> np.ndarray:
    from .dsl import Cnot, ControlledU, Gate, Toffoli

    if isinstance(stmt, Gate):
        return lift_single(stmt.matrix(), stmt.qubit, num_qubits)
    if isinstance(stmt, Cnot):
        return lift_controlled(gate_matrix("X"), [stmt.control], stmt.target, num_qubits)
    if isinstance(stmt, Toffoli):
        return lift_controlled(gate_matrix("X"), [stmt.control1, stmt.control2], stmt.target,
                               num_qubits)
    if isinstance(stmt, ControlledU):
        return lift_controlled(stmt.matrix(), stmt.controls, stmt.target, num_qubits)
    raise UnsupportedFeatureError(f"oracle cannot execute {type(stmt).__name__} statements")


def run_circuit_oracle(ir, state: QuditState) -> QuditState:
    """Apply the circuit's gates as dense matrices, in order."""
    from .dsl import Measure, Prepare

    if len(ir.qudits) != 1 or ir.spins:
        raise UnsupportedFeatureError("oracle runs single-qudit circuits without spins")
    n = state.num_qubits
    vec = state.amplitudes.copy()
    for stmt in ir.statements:
        if isinstance(stmt, (Measure, Prepare)):
            continue
        vec = statement_matrix(stmt, n) @ vec
    return state.with_amplitudes(vec)
