"""Named 2x2 gate matrices and the unitarity check."""
from __future__ import annotations

import numpy as np

from .errors import NonUnitaryError

UNITARY_TOL = 1e-10

_S2 = 1 / np.sqrt(2)

NAMED_GATES: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=np.complex128),
    "S": np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=np.complex128),
    # "TG" is the pi/8 gate; the bare letter T is reserved for the bin period.
    "TG": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=np.complex128),
}

for _m in NAMED_GATES.values():
    _m.flags.writeable = False


def gate_matrix(name: str) -> np.ndarray:
    try:
        return NAMED_GATES[name.upper()]
    except KeyError:
        raise KeyError(f"unknown gate {name!r}; expected one of {sorted(NAMED_GATES)}") from None


def check_unitary(u, tol: float = UNITARY_TOL, dim: int | None = None) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or (dim is not None and u.shape[0] != dim):
        raise NonUnitaryError(f"expected a square {dim or 'n'}x{dim or 'n'} matrix, got shape {u.shape}")
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > tol:
        raise NonUnitaryError(f"matrix is not unitary (max |U^dag U - I| = {err:.3g})")
    return u


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
