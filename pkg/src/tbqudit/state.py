"""Dense statevector of a time-bin qudit carrying N logical qubits."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bits import check_bin, check_width
from .errors import DimensionError, NormError

NORM_TOL = 1e-9
IMPORT_NORM_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class QuditState:
    """Amplitudes ``alpha_j`` over the ``2**num_qubits`` time bins.

    ``lossy`` marks a state that passed through a lossy channel; its squared
    norm is the survival probability and may be below one.
    """

    num_qubits: int
    amplitudes: np.ndarray
    lossy: bool = False

    def __post_init__(self):
        check_width(self.num_qubits)
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != 1 << self.num_qubits:
            raise DimensionError(
                f"expected {1 << self.num_qubits} amplitudes, got {amps.shape[0]}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        if not self.lossy and abs(self.norm() - 1.0) > NORM_TOL:
            raise NormError(f"state norm {self.norm():.12g} deviates from 1")

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def with_amplitudes(self, amps, lossy=None) -> "QuditState":
        return QuditState(self.num_qubits, amps, self.lossy if lossy is None else lossy)

    def to_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, doc: dict, normalize: bool = False) -> "QuditState":
        try:
            pairs = doc["amplitudes"]
            amps = np.array([complex(re, im) for re, im in pairs])
        except (KeyError, TypeError, ValueError) as exc:
            raise DimensionError(f"malformed state document: {exc}") from exc
        state = from_amplitudes(amps, normalize=normalize)
        if "num_qubits" in doc and doc["num_qubits"] != state.num_qubits:
            raise DimensionError(
                f"num_qubits={doc['num_qubits']} disagrees with {len(amps)} amplitudes")
        return state

    @classmethod
    def from_json(cls, text: str, normalize: bool = False) -> "QuditState":
        return cls.from_dict(json.loads(text), normalize=normalize)


class StateComparison(NamedTuple):
    max_abs_diff: float
    global_phase: complex


def basis_state(num_qubits: int, j: int) -> QuditState:
    check_width(num_qubits)
    check_bin(j, num_qubits)
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[j] = 1.0
    return QuditState(num_qubits, amps)


def from_amplitudes(vec, normalize: bool = False) -> QuditState:
    amps = np.asarray(vec, dtype=np.complex128).reshape(-1)
    d = amps.shape[0]
    if d < 2 or d & (d - 1):
        raise DimensionError(f"amplitude count {d} is not a power of two >= 2")
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise NormError("zero vector is not a state")
    if normalize:
        amps = amps / norm
    elif abs(norm - 1.0) > IMPORT_NORM_TOL:
        raise NormError(f"norm {norm:.12g} deviates from 1 (pass normalize=True to rescale)")
    elif abs(norm - 1.0) > NORM_TOL:
        # Imported text may carry rounding beyond the in-memory tolerance.
        amps = amps / norm
    return QuditState(d.bit_length() - 1, amps)


def equal_up_to_global_phase(a: QuditState, b: QuditState, tol: float = 1e-10) -> StateComparison:
    """Compare ``a`` with ``e^{i lam} b``; the reported phase multiplies ``b``.

    The phase is the least-squares optimum ``arg <b|a>``.  For states that
    agree up to a phase this is also the max-norm optimum; otherwise the
    reported deviation is an upper bound on the minimax one.  ``tol`` is
    accepted for call-site symmetry; callers compare ``max_abs_diff``.
    """
    if a.num_qubits != b.num_qubits:
        raise DimensionError(f"cannot compare {a.num_qubits}-qubit and {b.num_qubits}-qubit states")
    return compare_vectors(a.amplitudes, b.amplitudes)


def compare_vectors(a: np.ndarray, b: np.ndarray) -> StateComparison:
    a = np.asarray(a, dtype=np.complex128).reshape(-1)
    b = np.asarray(b, dtype=np.complex128).reshape(-1)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    overlap = np.vdot(b, a)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0 + 0j
    return StateComparison(float(np.max(np.abs(a - phase * b), initial=0.0)), complex(phase))


def tensor(a: QuditState, b: QuditState) -> QuditState:
    """Kronecker product; ``a`` occupies the high-order bits of the result."""
    return QuditState(a.num_qubits + b.num_qubits,
                      np.kron(a.amplitudes, b.amplitudes),
                      lossy=a.lossy or b.lossy)


def random_state(num_qubits: int, rng: np.random.Generator) -> QuditState:
    """Haar-random pure state."""
    d = 1 << num_qubits
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return QuditState(num_qubits, v / np.linalg.norm(v))
