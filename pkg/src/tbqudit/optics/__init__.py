"""Loop-architecture compiler and event-level simulator."""
from .compiler import (compile_circuit, count_elements, pack_passes, schedule_cnot_block,
                       schedule_single_qubit_block)
from .events import LatencyReport, LossModel, simulate_block, simulate_program
from .prep import prep_schedule, simulate_prep
from .program import (BlockEntry, BlockSchedule, ElementCount, OpticalProgram, PrepSchedule,
                      loop_layout)
from .verify import VerifyReport, verify

__all__ = [
    "BlockEntry", "BlockSchedule", "ElementCount", "LatencyReport", "LossModel",
    "OpticalProgram", "PrepSchedule", "VerifyReport", "compile_circuit", "count_elements",
    "loop_layout", "pack_passes", "prep_schedule", "schedule_cnot_block",
    "schedule_single_qubit_block", "simulate_block", "simulate_prep", "simulate_program", "verify",
]
