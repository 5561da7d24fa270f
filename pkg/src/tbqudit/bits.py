"""Index arithmetic on time-bin labels.

Bin ``j`` of a ``2**N`` bin qudit encodes the register basis state whose
qubit ``i`` equals the ``i``-th binary digit of ``j``.  Qubit 0 is the least
significant bit, so the bins with qubit 0 in ``|0>`` are the even bins.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, NamedTuple

import numpy as np

from .errors import BinRangeError, InvalidConstraintError

MAX_QUBITS = 24


class BitConstraint(NamedTuple):
    qubit: int
    value: int


def check_width(num_qubits: int) -> int:
    if not isinstance(num_qubits, (int, np.integer)) or num_qubits < 1:
        raise BinRangeError(f"register width must be a positive integer, got {num_qubits!r}")
    if num_qubits > MAX_QUBITS:
        raise BinRangeError(f"register width {num_qubits} exceeds cap of {MAX_QUBITS}")
    return int(num_qubits)


def check_qubit(i: int, num_qubits: int | None = None) -> int:
    if i < 0 or (num_qubits is not None and i >= num_qubits):
        raise BinRangeError(f"qubit index {i} out of range for {num_qubits} qubits")
    return int(i)


def check_bin(j: int, num_qubits: int | None = None) -> int:
    if j < 0 or (num_qubits is not None and j >= 1 << num_qubits):
        raise BinRangeError(f"bin index {j} out of range for {num_qubits} qubits")
    return int(j)


def bit_at(j: int, i: int, num_qubits: int | None = None) -> int:
    """Value of logical qubit ``i`` in basis state ``|psi_j>``."""
    check_qubit(i, num_qubits)
    check_bin(j, num_qubits)
    return (j >> i) & 1


def in_zero_set(j: int, i: int, num_qubits: int | None = None) -> bool:
    return bit_at(j, i, num_qubits) == 0


def pair_partner(j: int, i: int, num_qubits: int | None = None) -> int:
    check_qubit(i, num_qubits)
    check_bin(j, num_qubits)
    return j ^ (1 << i)


def enumerate_pairs(num_qubits: int, i: int) -> list[tuple[int, int]]:
    """Ascending pairs ``(j, j + 2**i)`` with ``j`` in the zero set of qubit ``i``."""
    lo, hi = pair_indices(num_qubits, i)
    return list(zip(lo.tolist(), hi.tolist()))


@lru_cache(maxsize=256)
def pair_indices(num_qubits: int, i: int) -> tuple[np.ndarray, np.ndarray]:
    """Array form of :func:`enumerate_pairs`; the arrays are read-only."""
    check_width(num_qubits)
    check_qubit(i, num_qubits)
    j = np.arange(1 << num_qubits, dtype=np.int64)
    lo = j[(j >> i) & 1 == 0]
    hi = lo + (1 << i)
    lo.flags.writeable = False
    hi.flags.writeable = False
    return lo, hi


def _normalize_constraints(num_qubits: int, constraints: Iterable) -> list[BitConstraint]:
    out = []
    seen = set()
    for c in constraints:
        qubit, value = (c.qubit, c.value) if isinstance(c, BitConstraint) else c
        check_qubit(qubit, num_qubits)
        if value not in (0, 1):
            raise InvalidConstraintError(f"constraint value must be 0 or 1, got {value!r}")
        if qubit in seen:
            raise InvalidConstraintError(f"qubit {qubit} constrained twice")
        seen.add(qubit)
        out.append(BitConstraint(int(qubit), int(value)))
    return out


def constraint_mask(num_qubits: int, constraints: Iterable) -> tuple[int, int]:
    """Return ``(mask, pattern)`` such that ``j & mask == pattern`` selects the bins."""
    mask = pattern = 0
    for qubit, value in _normalize_constraints(num_qubits, constraints):
        mask |= 1 << qubit
        pattern |= value << qubit
    return mask, pattern


def masked_indices(num_qubits: int, constraints: Iterable) -> np.ndarray:
    check_width(num_qubits)
    mask, pattern = constraint_mask(num_qubits, constraints)
    j = np.arange(1 << num_qubits, dtype=np.int64)
    return j[(j & mask) == pattern]


def enumerate_masked(num_qubits: int, constraints: Iterable) -> list[int]:
    """All bins satisfying every ``(qubit, value)`` constraint, ascending."""
    return masked_indices(num_qubits, constraints).tolist()
