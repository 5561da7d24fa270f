"""Arbitrary-state preparation with a one-bin-period loop.

A single photon circulates in a loop of length T.  On pass ``j`` a variable
switch extracts amplitude fraction ``t_j`` towards the processing loop and a
phase shifter on the extraction port writes ``arg(alpha_j)``.  What stays in
the loop after pass ``j`` is ``prod_{k<=j} sqrt(1 - t_k^2)``.
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import NormError
from ..state import NORM_TOL, QuditState
from .program import TICKS_PER_T, PrepSchedule


def prep_schedule(target: QuditState) -> PrepSchedule:
    if target.lossy or abs(target.norm() - 1.0) > NORM_TOL:
        raise NormError("preparation target must be normalized")
    probs = target.probabilities()
    # Suffix sums keep the remaining weight exact at the tail.
    remaining = np.cumsum(probs[::-1])[::-1]
    ts, phases = [], []
    for j, (p, rest) in enumerate(zip(probs, remaining)):
        if rest <= 0.0:
            ts.append(0.0)
        else:
            ts.append(min(1.0, math.sqrt(p / rest)))
        phases.append(float(np.angle(target.amplitudes[j])) % (2 * math.pi))
    return PrepSchedule(tuple(ts), tuple(phases))


def simulate_prep(schedule: PrepSchedule, num_qubits: int, loop_transmission: float = 1.0):
    """Run the preparation loop pass by pass at the event level.

    Returns the emitted qudit, bin ``j`` leaving at ``j T``.  Amplitude still
    circulating after the last pass is discarded; the state is flagged lossy
    when that residue (or loop loss) is not negligible.
    """
    num_bins = 1 << num_qubits
    if len(schedule.transmittances) != num_bins:
        raise ValueError(f"schedule has {len(schedule.transmittances)} passes, need {num_bins}")
    emitted = {}
    t, circulating = 0, 1.0 + 0j
    for j in range(num_bins):
        tj = schedule.transmittances[j]
        emitted[t] = circulating * tj * complex(math.cos(schedule.phases[j]), math.sin(schedule.phases[j]))
        circulating *= math.sqrt(max(0.0, 1.0 - tj * tj)) * math.sqrt(loop_transmission)
        t += TICKS_PER_T
    amps = np.array([emitted[TICKS_PER_T * j] for j in range(num_bins)])
    lossy = abs(np.linalg.norm(amps) - 1.0) > NORM_TOL
    return QuditState(num_qubits, amps, lossy=lossy)
