"""Gates acting directly on bin amplitudes.

A single-qubit gate on qubit ``i`` is the same 2x2 unitary applied to every
bin pair ``(j, j + 2**i)`` with ``j`` in the zero set of ``i``.  Controlled-X
gates never mix amplitudes: they relabel bins, so they are represented as
explicit permutations that the optical compiler reuses.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .bits import check_qubit, check_width, masked_indices, pair_indices
from .errors import DimensionError, InvalidGateError, NormError, UnsupportedFeatureError
from .matrices import check_unitary, gate_matrix
from .state import NORM_TOL, QuditState, basis_state


@dataclass(frozen=True, eq=False)
class BinPermutation:
    """``mapping[j]`` is the destination bin of the amplitude in bin ``j``."""

    num_bins: int
    mapping: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mapping, dtype=np.int64).reshape(-1)
        if m.shape[0] != self.num_bins:
            raise DimensionError(f"mapping length {m.shape[0]} != {self.num_bins} bins")
        if not np.array_equal(np.sort(m), np.arange(self.num_bins)):
            raise InvalidGateError("mapping is not a bijection")
        m.flags.writeable = False
        object.__setattr__(self, "mapping", m)

    @classmethod
    def identity(cls, num_bins: int) -> "BinPermutation":
        return cls(num_bins, np.arange(num_bins))

    def compose(self, other: "BinPermutation") -> "BinPermutation":
        """Permutation applying ``self`` first, then ``other``."""
        return BinPermutation(self.num_bins, other.mapping[self.mapping])

    def moved(self) -> np.ndarray:
        return np.flatnonzero(self.mapping != np.arange(self.num_bins))

    def __eq__(self, other):
        return isinstance(other, BinPermutation) and np.array_equal(self.mapping, other.mapping)

    def __hash__(self):
        return hash(self.mapping.tobytes())


class MeasurementRecord(NamedTuple):
    outcome: int
    probability: float
    collapsed: QuditState


def _check_distinct(qubits: Sequence[int], num_qubits: int):
    for q in qubits:
        check_qubit(q, num_qubits)
    if len(set(qubits)) != len(qubits):
        raise InvalidGateError(f"qubit indices {list(qubits)} must be distinct")


def _require_normalized(state: QuditState):
    if not state.lossy and abs(state.norm() - 1.0) > NORM_TOL:
        raise NormError(f"state norm {state.norm():.12g} deviates from 1")


def apply_gate_on_qubit(state: QuditState, u, i: int) -> QuditState:
    """Apply ``u`` to every pair ``(j, j + 2**i)``; ``j`` runs in ascending order."""
    u = check_unitary(u, dim=2)
    check_qubit(i, state.num_qubits)
    _require_normalized(state)
    lo, hi = pair_indices(state.num_qubits, i)
    return state.with_amplitudes(_mix_pairs(state.amplitudes, u, lo, hi))


def _mix_pairs(amps, u, lo, hi):
    a0 = amps[lo]
    a1 = amps[hi]
    out = amps.copy()
    out[lo] = u[0, 0] * a0 + u[0, 1] * a1
    out[hi] = u[1, 0] * a0 + u[1, 1] * a1
    return out


def controlled_permutation(num_qubits: int, controls: Sequence[int], target: int) -> BinPermutation:
    """Swap ``j <-> j + 2**target`` for every ``j`` whose control bits are all 1."""
    check_width(num_qubits)
    controls = list(controls)
    _check_distinct(controls + [target], num_qubits)
    lo = masked_indices(num_qubits, [(c, 1) for c in controls] + [(target, 0)])
    mapping = np.arange(1 << num_qubits, dtype=np.int64)
    mapping[lo] = lo + (1 << target)
    mapping[lo + (1 << target)] = lo
    return BinPermutation(1 << num_qubits, mapping)


def cnot_permutation(num_qubits: int, m: int, n: int) -> BinPermutation:
    if m == n:
        raise InvalidGateError(f"CNOT control equals target ({m})")
    return controlled_permutation(num_qubits, [m], n)


def toffoli_permutation(num_qubits: int, m: int, n: int, p: int) -> BinPermutation:
    if len({m, n, p}) != 3:
        raise InvalidGateError(f"Toffoli indices {m}, {n}, {p} must be distinct")
    return controlled_permutation(num_qubits, [m, n], p)


def apply_permutation(state: QuditState, perm: BinPermutation) -> QuditState:
    if perm.num_bins != state.dim:
        raise DimensionError(f"permutation over {perm.num_bins} bins, state has {state.dim}")
    out = np.empty_like(state.amplitudes)
    out[perm.mapping] = state.amplitudes
    return state.with_amplitudes(out)


def controlled_u(state: QuditState, controls: Sequence[int], target: int, u) -> QuditState:
    """Apply ``u`` to the pairs of ``target`` whose control bits are all 1."""
    u = check_unitary(u, dim=2)
    controls = list(controls)
    _check_distinct(controls + [target], state.num_qubits)
    _require_normalized(state)
    lo = masked_indices(state.num_qubits, [(c, 1) for c in controls] + [(target, 0)])
    return state.with_amplitudes(_mix_pairs(state.amplitudes, u, lo, lo + (1 << target)))


def apply_statement(state: QuditState, stmt) -> QuditState:
    """Run one single-qudit circuit statement at the amplitude level."""
    from .dsl import Cnot, ControlledU, Gate, Measure, Prepare, Toffoli

    if isinstance(stmt, Gate):
        return apply_gate_on_qubit(state, stmt.matrix(), stmt.qubit)
    if isinstance(stmt, Cnot):
        return apply_permutation(state, cnot_permutation(state.num_qubits, stmt.control, stmt.target))
    if isinstance(stmt, Toffoli):
        return apply_permutation(state, toffoli_permutation(
            state.num_qubits, stmt.control1, stmt.control2, stmt.target))
    if isinstance(stmt, ControlledU):
        if stmt.name == "X":
            return apply_permutation(state, controlled_permutation(
                state.num_qubits, stmt.controls, stmt.target))
        return controlled_u(state, stmt.controls, stmt.target, stmt.matrix())
    if isinstance(stmt, (Measure, Prepare)):
        return state
    raise UnsupportedFeatureError(f"{type(stmt).__name__} needs the cavity interface")


def measure_all(state: QuditState, rng: np.random.Generator) -> MeasurementRecord:
    """Projective readout of the arrival bin (inverse-CDF sampling)."""
    _require_normalized(state)
    probs = state.probabilities()
    cdf = np.cumsum(probs)
    u = rng.random() * cdf[-1]
    j = int(min(np.searchsorted(cdf, u, side="right"), state.dim - 1))
    return MeasurementRecord(j, float(probs[j]), basis_state(state.num_qubits, j))


def sample_outcomes(state: QuditState, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized equivalent of ``shots`` calls to :func:`measure_all`."""
    _require_normalized(state)
    cdf = np.cumsum(state.probabilities())
    u = rng.random(shots) * cdf[-1]
    return np.minimum(np.searchsorted(cdf, u, side="right"), state.dim - 1)


__all__ = [
    "BinPermutation", "MeasurementRecord", "apply_gate_on_qubit", "apply_permutation",
    "cnot_permutation", "controlled_permutation", "controlled_u", "measure_all",
    "sample_outcomes", "toffoli_permutation", "gate_matrix", "apply_statement",
]
