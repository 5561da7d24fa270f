"""Feasibility arithmetic for the loop architecture: bins, storage, fiber, loss."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

from .bits import check_width
from .optics.compiler import count_elements
from .optics.events import program_path_length
from .optics.program import ElementCount, OpticalProgram

ATTEMPTS = "attempts"
POISSON = "poisson"
HERALD_MODES = (ATTEMPTS, POISSON)

PHASE_STABILIZATION_NOTE = (
    "phase stabilization overhead (expected O(log N) by distributing the reference phase) "
    "is not modeled and not included in the element count"
)


@dataclass(frozen=True)
class ResourceConfig:
    num_qubits: int
    bin_period: float = 1e-9
    group_velocity: float = 2e8
    per_element_transmission: float = 1.0
    mean_photons: float = 1.0
    num_qudits: int = 1
    min_switch_window: float = 1e-10
    herald_mode: str = ATTEMPTS

    def __post_init__(self):
        check_width(self.num_qubits)
        for name in ("bin_period", "group_velocity", "min_switch_window"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        _check_transmission(self.per_element_transmission)
        if self.mean_photons < 0:
            raise ValueError("mean photon number must be nonnegative")
        if self.num_qudits < 1:
            raise ValueError("need at least one qudit")
        if self.herald_mode not in HERALD_MODES:
            raise ValueError(f"herald mode must be one of {HERALD_MODES}")


@dataclass(frozen=True)
class ResourceReport:
    num_bins: int
    loop_period_s: float
    fiber_length_m: float
    element_count: ElementCount
    elements_traversed: int
    single_circuit_transmission: float
    herald_probability: float
    herald_mode: str
    multi_qudit_success: float
    switch_window_ok: bool
    unmodeled: tuple = (PHASE_STABILIZATION_NOTE,)

    def to_dict(self) -> dict:
        return {
            "num_bins": self.num_bins,
            "loop_period_s": self.loop_period_s,
            "fiber_length_m": self.fiber_length_m,
            "element_count": self.element_count.to_dict(),
            "elements_traversed": self.elements_traversed,
            "single_circuit_transmission": self.single_circuit_transmission,
            "herald_probability": self.herald_probability,
            "herald_mode": self.herald_mode,
            "multi_qudit_success": self.multi_qudit_success,
            "switch_window_ok": self.switch_window_ok,
            "unmodeled": list(self.unmodeled),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def table(self) -> str:
        ec = self.element_count
        rows = [
            ("time bins", f"{self.num_bins:,}"),
            ("loop period", f"{self.loop_period_s:.6g} s"),
            ("fiber length", f"{self.fiber_length_m:.6g} m"),
            ("switches", str(ec.switches)),
            ("delay lines", str(ec.delay_lines)),
            ("phase shifters", str(ec.phase_shifters)),
            ("beamsplitters", str(ec.beamsplitters)),
            ("distinct CNOT delays", str(ec.distinct_delay_values)),
            ("elements traversed", str(self.elements_traversed)),
            ("circuit transmission", f"{self.single_circuit_transmission:.6g}"),
            (f"herald probability ({self.herald_mode})", f"{self.herald_probability:.6g}"),
            ("multi-qudit success", f"{self.multi_qudit_success:.6g}"),
            ("switch window ok", "yes" if self.switch_window_ok else "no"),
        ]
        width = max(len(k) for k, _ in rows)
        lines = [f"{k.ljust(width)}  {v}" for k, v in rows]
        lines += [f"note: {n}" for n in self.unmodeled]
        return "\n".join(lines)


def _check_transmission(eta: float):
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmission must lie in [0, 1], got {eta}")


def herald_probability(mu: float, eta: float, mode: str = ATTEMPTS) -> float:
    """Probability that at least one photon reaches the detector.

    ``attempts`` treats ``mu`` photons as independent tries,
    ``1 - (1 - eta)^mu``; ``poisson`` uses a coherent-like input with mean
    ``mu``, ``1 - exp(-mu eta)``.
    """
    _check_transmission(eta)
    if mu < 0:
        raise ValueError("mean photon number must be nonnegative")
    if mode == ATTEMPTS:
        return 1.0 - (1.0 - eta) ** mu
    if mode == POISSON:
        return -math.expm1(-mu * eta)
    raise ValueError(f"unknown herald mode {mode!r}")


def multi_qudit_success(eta: float, num_qudits: int) -> float:
    _check_transmission(eta)
    if num_qudits < 1:
        raise ValueError("need at least one qudit")
    return eta ** num_qudits


def estimate(cfg: ResourceConfig, program: Optional[OpticalProgram] = None) -> ResourceReport:
    if program is not None and program.num_qubits != cfg.num_qubits:
        raise ValueError(f"program has {program.num_qubits} qubits, config has {cfg.num_qubits}")
    num_bins = 1 << cfg.num_qubits
    period = num_bins * cfg.bin_period
    counts = count_elements(cfg.num_qubits)
    traversed = program_path_length(program) if program is not None else counts.path_elements
    eta = cfg.per_element_transmission ** traversed
    return ResourceReport(
        num_bins=num_bins,
        loop_period_s=period,
        fiber_length_m=period * cfg.group_velocity,
        element_count=counts,
        elements_traversed=traversed,
        single_circuit_transmission=eta,
        herald_probability=herald_probability(cfg.mean_photons, eta, cfg.herald_mode),
        herald_mode=cfg.herald_mode,
        multi_qudit_success=multi_qudit_success(eta, cfg.num_qudits),
        switch_window_ok=cfg.bin_period >= cfg.min_switch_window,
    )
