"""Simulation and compilation toolkit for time-bin encoded photonic qudits.

One photon spread over ``2^N`` time bins carries ``N`` logical qubits.  The
package provides the bit-level kernels, qudit-level gate semantics, a dense
matrix oracle, the MZI cell decomposition, a compiler to a loop-based optical
schedule with an event-level simulator, cavity-QED spin-photon protocols,
resource arithmetic and a small circuit language with a CLI.
"""
from .dsl import CircuitIR, parse, serialize
from .errors import (BinRangeError, DimensionError, InvalidConstraintError, InvalidGateError,
                     NonUnitaryError, NormError, ParseError, QuditError, ScheduleCollisionError,
                     ScheduleError, UnsupportedFeatureError)
from .gates import apply_gate_on_qubit, apply_permutation, cnot_permutation, measure_all, toffoli_permutation
from .mzi import GateParams, cell_matrix, decompose
from .state import QuditState, basis_state, equal_up_to_global_phase, from_amplitudes, random_state

__version__ = "0.1.0"

__all__ = [
    "BinRangeError", "CircuitIR", "DimensionError", "GateParams", "InvalidConstraintError",
    "InvalidGateError", "NonUnitaryError", "NormError", "ParseError", "QuditError", "QuditState",
    "ScheduleCollisionError", "ScheduleError", "UnsupportedFeatureError", "apply_gate_on_qubit",
    "apply_permutation", "basis_state", "cell_matrix", "cnot_permutation", "decompose",
    "equal_up_to_global_phase", "from_amplitudes", "measure_all", "parse", "random_state",
    "serialize", "toffoli_permutation",
]
