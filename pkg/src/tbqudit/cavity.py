"""Spin-photon protocols through a cavity with spin-conditioned reflection.

A bin reflected off the cavity picks up +1 if the spin is up and -1 if it
is down.  The joint amplitude tensor has one axis per qudit (bin index) and
a final spin axis, index 0 = up, 1 = down.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .bits import check_qubit, masked_indices
from .errors import BinRangeError, DimensionError, InvalidGateError, NormError
from .gates import apply_gate_on_qubit
from .matrices import gate_matrix
from .state import NORM_TOL, QuditState

UP, DOWN = 0, 1
PLUS, MINUS = "plus", "minus"
_S2 = 1 / math.sqrt(2)
SPIN_KETS = {
    "up": np.array([1, 0], dtype=np.complex128),
    "down": np.array([0, 1], dtype=np.complex128),
    PLUS: np.array([_S2, _S2], dtype=np.complex128),
    MINUS: np.array([_S2, -_S2], dtype=np.complex128),
}


@dataclass(frozen=True, eq=False)
class JointState:
    widths: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        widths = tuple(int(w) for w in self.widths)
        amps = np.array(self.amplitudes, dtype=np.complex128)
        shape = tuple(1 << w for w in widths) + (2,)
        if amps.shape != shape:
            raise DimensionError(f"joint tensor has shape {amps.shape}, expected {shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise NormError(f"joint state norm {norm:.12g} deviates from 1")
        amps.flags.writeable = False
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qudits(self) -> int:
        return len(self.widths)

    def with_amplitudes(self, amps) -> "JointState":
        return JointState(self.widths, amps)

    def spin_factor(self, tol: float = 1e-10) -> Optional[np.ndarray]:
        """The spin ket if the spin is unentangled, else ``None``."""
        flat = self.amplitudes.reshape(-1, 2)
        _, s, vh = np.linalg.svd(flat, full_matrices=False)
        if s.shape[0] > 1 and s[1] > tol:
            return None
        spin = vh[0].conj()
        # Fix the free phase so the dominant spin component is real positive.
        k = int(np.argmax(np.abs(spin)))
        return spin * (abs(spin[k]) / spin[k])

    def photonic(self, tol: float = 1e-10) -> np.ndarray:
        """Qudit tensor with the spin factored out; the spin must be unentangled."""
        spin = self.spin_factor(tol)
        if spin is None:
            raise InvalidGateError("spin is entangled with the qudits")
        return self.amplitudes @ spin.conj()

    def composite(self, tol: float = 1e-10) -> QuditState:
        """Qudits as one register, first qudit in the high-order bits."""
        vec = self.photonic(tol).reshape(-1)
        return QuditState(sum(self.widths), vec / np.linalg.norm(vec))


class SpinOutcome(NamedTuple):
    basis: str          # "computational" | "rotated"
    value: str          # "up"/"down" or "plus"/"minus"
    probability: float
    collapsed: JointState


def init_joint(qudit_states: Sequence[QuditState], spin: str = PLUS) -> JointState:
    if not qudit_states:
        raise ValueError("need at least one qudit")
    if spin not in ("up", PLUS):
        raise ValueError(f"spin must start in 'up' or 'plus', got {spin!r}")
    amps = SPIN_KETS[spin]
    for q in reversed(qudit_states):
        amps = np.multiply.outer(q.amplitudes, amps)
    return JointState(tuple(q.num_qubits for q in qudit_states), amps)


def _check_qudit(joint: JointState, qudit_id: int):
    if not 0 <= qudit_id < joint.num_qudits:
        raise BinRangeError(f"qudit {qudit_id} does not exist ({joint.num_qudits} qudits)")


def reflect_bins(joint: JointState, qudit_id: int, bins) -> JointState:
    """Send ``bins`` of one qudit to the cavity: spin-down amplitudes flip sign."""
    _check_qudit(joint, qudit_id)
    bins = np.asarray(sorted(set(int(b) for b in bins)), dtype=np.int64)
    dim = 1 << joint.widths[qudit_id]
    if bins.size and (bins[0] < 0 or bins[-1] >= dim):
        raise BinRangeError(f"bins must lie in [0, {dim}) for qudit {qudit_id}")
    amps = joint.amplitudes.copy()
    index = [slice(None)] * joint.num_qudits + [DOWN]
    index[qudit_id] = bins
    amps[tuple(index)] *= -1
    return joint.with_amplitudes(amps)


def spin_rotation(angle: float) -> np.ndarray:
    """Real rotation taking |+> to |up> at ``angle = pi/2``."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, s], [-s, c]], dtype=np.complex128)


def rotate_spin(joint: JointState, angle: float) -> JointState:
    return joint.with_amplitudes(joint.amplitudes @ spin_rotation(angle).T)


def measure_spin(joint: JointState, basis: str, rng: np.random.Generator) -> SpinOutcome:
    """Born-rule spin readout; the spin is left in the observed state."""
    if basis == "computational":
        kets = ("up", "down")
    elif basis == "rotated":
        kets = (PLUS, MINUS)
    else:
        raise ValueError(f"unknown spin basis {basis!r}")
    proj = [joint.amplitudes @ SPIN_KETS[k].conj() for k in kets]
    p0 = float(np.sum(np.abs(proj[0]) ** 2))
    k = 0 if rng.random() < p0 else 1
    prob = p0 if k == 0 else 1.0 - p0
    part = proj[k] / math.sqrt(float(np.sum(np.abs(proj[k]) ** 2)))
    collapsed = joint.with_amplitudes(np.multiply.outer(part, SPIN_KETS[kets[k]]))
    return SpinOutcome(basis, kets[k], prob, collapsed)


def reprepare_spin(joint: JointState, spin: str = PLUS) -> JointState:
    """Reset an unentangled spin to ``spin``."""
    return joint.with_amplitudes(np.multiply.outer(joint.photonic(), SPIN_KETS[spin]))


def one_bins(width: int, qubit: int) -> np.ndarray:
    """Bins whose ``qubit`` digit is 1 (complement of the zero set)."""
    return masked_indices(width, [(qubit, 1)])


def qnd_measure_qubit(joint: JointState, qudit_id: int, i: int, rng: np.random.Generator) -> SpinOutcome:
    """Entangle qubit ``i`` with the spin and read the spin in the +/- basis.

    ``plus`` means logical 0 and ``minus`` logical 1.  The spin is
    re-prepared in |+> first, so it must not be entangled on entry.
    """
    _check_qudit(joint, qudit_id)
    check_qubit(i, joint.widths[qudit_id])
    joint = reprepare_spin(joint)
    joint = reflect_bins(joint, qudit_id, one_bins(joint.widths[qudit_id], i))
    return measure_spin(joint, "rotated", rng)


def apply_local(joint: JointState, qudit_id: int, qubit: int, u) -> JointState:
    """Single-qubit gate on one logical qubit of one qudit, spin untouched."""
    _check_qudit(joint, qudit_id)
    width = joint.widths[qudit_id]
    check_qubit(qubit, width)
    moved = np.moveaxis(joint.amplitudes, qudit_id, -1)
    flat = moved.reshape(-1, 1 << width)
    out = np.empty_like(flat)
    for r, row in enumerate(flat):
        nrm = np.linalg.norm(row)
        if nrm == 0:
            out[r] = row
            continue
        out[r] = apply_gate_on_qubit(QuditState(width, row / nrm), u, qubit).amplitudes * nrm
    return joint.with_amplitudes(np.moveaxis(out.reshape(moved.shape), -1, qudit_id))


def cross_qudit_cz(joint: JointState, q1: int, m: int, q2: int, n: int,
                   rng: np.random.Generator) -> tuple[SpinOutcome, JointState]:
    """CZ between qubit ``m`` of qudit ``q1`` and qubit ``n`` of qudit ``q2``.

    Reflect the 1-bins of ``m``, rotate the spin by pi/2, reflect the 1-bins
    of ``n``, rotate back, read the spin.  A down result leaves an extra Z on
    qubit ``m``, which is undone here.  ``outcome.collapsed`` keeps the raw
    pre-correction state.
    """
    _check_qudit(joint, q1)
    _check_qudit(joint, q2)
    if q1 == q2:
        raise InvalidGateError("cross-qudit CZ needs two distinct qudits")
    check_qubit(m, joint.widths[q1])
    check_qubit(n, joint.widths[q2])
    joint = reprepare_spin(joint)
    joint = reflect_bins(joint, q1, one_bins(joint.widths[q1], m))
    joint = rotate_spin(joint, math.pi / 2)
    joint = reflect_bins(joint, q2, one_bins(joint.widths[q2], n))
    joint = rotate_spin(joint, -math.pi / 2)
    outcome = measure_spin(joint, "computational", rng)
    corrected = outcome.collapsed
    if outcome.value == "down":
        corrected = apply_local(corrected, q1, m, gate_matrix("Z"))
    return outcome, corrected


# --- generic protocol sequencing ---------------------------------------------

@dataclass(frozen=True)
class Reflect:
    qudit: int
    bins: tuple


@dataclass(frozen=True)
class Rotate:
    angle: float


@dataclass(frozen=True)
class Measure:
    basis: str = "rotated"


@dataclass(frozen=True)
class PrepareSpin:
    spin: str = PLUS


@dataclass(frozen=True)
class Local:
    """Local gate, optionally fed forward from the most recent spin outcome."""

    qudit: int
    qubit: int
    matrix: np.ndarray = field(compare=False)
    if_outcome: Optional[str] = None


Step = Union[Reflect, Rotate, Measure, PrepareSpin, Local]


def run_protocol(joint: JointState, steps: Sequence[Step], rng: np.random.Generator):
    """Apply ``steps`` in order; returns ``(outcomes, final_state)``."""
    outcomes = []
    for step in steps:
        if isinstance(step, Reflect):
            joint = reflect_bins(joint, step.qudit, step.bins)
        elif isinstance(step, Rotate):
            joint = rotate_spin(joint, step.angle)
        elif isinstance(step, Measure):
            out = measure_spin(joint, step.basis, rng)
            outcomes.append(out)
            joint = out.collapsed
        elif isinstance(step, PrepareSpin):
            joint = reprepare_spin(joint, step.spin)
        elif isinstance(step, Local):
            _check_qudit(joint, step.qudit)
            if step.if_outcome is None or (outcomes and outcomes[-1].value == step.if_outcome):
                joint = apply_local(joint, step.qudit, step.qubit, step.matrix)
        else:
            raise TypeError(f"unknown protocol step {step!r}")
    return outcomes, joint


def qnd_steps(joint: JointState, qudit_id: int, i: int) -> list:
    return [PrepareSpin(), Reflect(qudit_id, tuple(one_bins(joint.widths[qudit_id], i).tolist())),
            Measure("rotated")]


def cz_steps(joint: JointState, q1: int, m: int, q2: int, n: int) -> list:
    return [
        PrepareSpin(),
        Reflect(q1, tuple(one_bins(joint.widths[q1], m).tolist())),
        Rotate(math.pi / 2),
        Reflect(q2, tuple(one_bins(joint.widths[q2], n).tolist())),
        Rotate(-math.pi / 2),
        Measure("computational"),
        Local(q1, m, gate_matrix("Z"), if_outcome="down"),
    ]


def ghz_steps(joint: JointState) -> list:
    """GHZ recipe for qudits each starting in |+> on qubit 0.

    One shared reflection of every qudit's 1-bins writes the total parity
    onto the spin; the +/- readout projects onto a parity sector, local
    Hadamards turn that into (|0...0> +- |1...1>)/sqrt(2), and a Z on the
    first qudit removes the sign in the odd sector.
    """
    steps = [PrepareSpin()]
    steps += [Reflect(q, tuple(one_bins(w, 0).tolist())) for q, w in enumerate(joint.widths)]
    steps.append(Measure("rotated"))
    steps += [Local(q, 0, gate_matrix("H")) for q in range(joint.num_qudits)]
    steps.append(Local(0, 0, gate_matrix("Z"), if_outcome=MINUS))
    return steps
