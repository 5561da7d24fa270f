"""Mach-Zehnder cell parameters <-> 2x2 unitaries.

Cell layout, light travelling left to right::

    --[phi]--|BS|--[theta]--|BS|--[psi0]--
    ---------|  |-----------|  |--[psi1]--

so ``U = diag(e^{i psi0}, e^{i psi1}) BS diag(e^{i theta}, 1) BS diag(e^{i phi}, 1)``
with the symmetric splitter ``BS = [[1, i], [i, 1]] / sqrt(2)``.  Expanding,

    U = i e^{i theta/2} diag(e^{i psi0}, e^{i psi1})
        [[e^{i phi} sin(theta/2),  cos(theta/2)],
         [e^{i phi} cos(theta/2), -sin(theta/2)]]
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matrices import check_unitary

TWO_PI = 2 * math.pi
# Below this |U01| the cell is treated as exactly at theta = pi.
_DEGENERATE = 1e-13


@dataclass(frozen=True)
class GateParams:
    theta: float
    phi: float
    psi0: float = 0.0
    psi1: float = 0.0

    def to_dict(self) -> dict:
        return {"theta": self.theta, "phi": self.phi, "psi0": self.psi0, "psi1": self.psi1}

    @classmethod
    def from_dict(cls, doc: dict) -> "GateParams":
        return cls(float(doc["theta"]), float(doc["phi"]),
                   float(doc.get("psi0", 0.0)), float(doc.get("psi1", 0.0)))


# Cell setting that transmits both inputs unchanged.
IDENTITY_PARAMS = GateParams(math.pi, math.pi, 0.0, 0.0)


def bs_matrix() -> np.ndarray:
    return np.array([[1, 1j], [1j, 1]], dtype=np.complex128) / math.sqrt(2)


def _phase(x):
    return complex(math.cos(x), math.sin(x))


def cell_matrix(p: GateParams) -> np.ndarray:
    bs = bs_matrix()
    u = np.diag([_phase(p.phi), 1.0]).astype(np.complex128)
    u = bs @ u
    u = np.diag([_phase(p.theta), 1.0]) @ u
    u = bs @ u
    return np.diag([_phase(p.psi0), _phase(p.psi1)]) @ u


def _wrap(x: float) -> float:
    x = math.fmod(x, TWO_PI)
    if x < 0:
        x += TWO_PI
    # fmod can land exactly on 2*pi after the shift
    return 0.0 if x >= TWO_PI else x


def decompose(u) -> GateParams:
    """Cell parameters reproducing ``u`` exactly.

    theta is fixed by the split ratio, ``tan(theta/2) = |U00| / |U01|``.
    At theta = 0 the input phase is unobservable and set to 0; at theta = pi
    only ``psi0 + phi`` is observable and the whole phase goes to phi.
    """
    u = check_unitary(u, dim=2)
    a00, a01 = abs(u[0, 0]), abs(u[0, 1])
    theta = 2 * math.atan2(a00, a01)
    half = theta / 2
    if a01 < _DEGENERATE:
        theta, half = math.pi, math.pi / 2
        # U00 = -e^{i(psi0 + phi)}, U11 = e^{i psi1}
        psi0 = 0.0
        phi = np.angle(-u[0, 0])
        psi1 = np.angle(u[1, 1])
    elif a00 < _DEGENERATE:
        theta, half = 0.0, 0.0
        phi = 0.0
        psi0 = np.angle(u[0, 1]) - math.pi / 2
        psi1 = np.angle(u[1, 0]) - math.pi / 2
    else:
        # Both rows carry e^{i phi} s c; summing them averages the rounding.
        phi = np.angle(u[0, 0] * np.conj(u[0, 1]) - u[1, 0] * np.conj(u[1, 1]))
        # Output phases come from the larger entry of each row so that a
        # nearly-degenerate split does not amplify rounding in the tiny one.
        if a01 >= a00:
            psi0 = np.angle(u[0, 1]) - math.pi / 2 - half
            psi1 = np.angle(u[1, 0]) - math.pi / 2 - half - phi
        else:
            psi0 = np.angle(u[0, 0]) - math.pi / 2 - half - phi
            psi1 = np.angle(-u[1, 1]) - math.pi / 2 - half
    return GateParams(theta, _wrap(float(phi)), _wrap(float(psi0)), _wrap(float(psi1)))
