"""Command-line front end: ``tbqudit compile|run|simulate|sample|verify|estimate``.

Exit codes: 0 success, 1 semantic or verification failure, 2 usage error.
Errors print a single ``error: ...`` line on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .dsl import CircuitIR, parse
from .errors import QuditError
from .optics import LossModel, compile_circuit, simulate_program, verify
from .optics.program import OpticalProgram
from .resources import ATTEMPTS, HERALD_MODES, ResourceConfig, estimate
from .runner import oracle_run, run_circuit, sample_circuit
from .state import QuditState, compare_vectors, random_state


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")


def _dump(doc) -> str:
    return json.dumps(doc, indent=2)


def _load_circuit(path: str) -> CircuitIR:
    return parse(_read(path))


def _load_state(path: str) -> QuditState:
    return QuditState.from_json(_read(path))


def cmd_compile(args) -> int:
    program = compile_circuit(_load_circuit(args.circuit), bin_period=args.bin_period, pack=args.pack)
    _emit(program.to_json(), args.output)
    return 0


def cmd_run(args) -> int:
    ir = _load_circuit(args.circuit)
    inputs = None
    if args.input:
        if len(ir.qudits) != 1:
            raise UsageError("--input needs a circuit with exactly one qudit")
        inputs = {next(iter(ir.qudits)): _load_state(args.input)}
    result = run_circuit(ir, inputs, np.random.default_rng(args.seed))
    if args.out:
        _emit(result.state.to_json(), args.out)
        if result.outcomes:
            sys.stdout.write(_dump({"outcomes": result.outcomes}) + "\n")
    else:
        sys.stdout.write(_dump(result.to_dict()) + "\n")
    return 0


def cmd_simulate(args) -> int:
    program = OpticalProgram.from_json(_read(args.program))
    state = _load_state(args.input) if args.input else None
    out, report = simulate_program(program, state, LossModel(args.loss))
    _emit(_dump({"state": out.to_dict(), "report": report.to_dict()}), args.out)
    return 0


def cmd_sample(args) -> int:
    if args.shots < 1:
        raise UsageError("--shots must be positive")
    hist = sample_circuit(_load_circuit(args.circuit), args.shots, args.seed)
    _emit(_dump(hist), args.out)
    return 0


def _check_qudit_level(ir: CircuitIR, trials: int, seed: int) -> float:
    """Largest deviation between the runner and the dense oracle on random inputs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        inputs = {}
        for name, width in ir.qudits.items():
            if ir.prepared(name) is None:
                inputs[name] = random_state(width, rng)
        body = CircuitIR(dict(ir.qudits), list(ir.spins),
                         [s for s in ir.statements if type(s).__name__ != "Measure"])
        got = run_circuit(body, inputs, rng).state
        ref = oracle_run(body, inputs)
        worst = max(worst, compare_vectors(got.amplitudes, ref.amplitudes).max_abs_diff)
    return worst


def cmd_verify(args) -> int:
    ir = _load_circuit(args.circuit)
    doc = {"circuit": args.circuit, "tolerance": args.tol}
    oracle_dev = _check_qudit_level(ir, args.trials, args.seed)
    doc["oracle_max_deviation"] = oracle_dev
    passed = oracle_dev <= args.tol
    reason = None if passed else f"qudit-level output deviates from the oracle by {oracle_dev:.3g}"
    if ir.is_single_qudit:
        program = compile_circuit(ir)
        report = verify(program, ir, trials=args.trials, seed=args.seed, tol=args.tol)
        doc["event_level"] = report.to_dict()
        if not report.passed and passed:
            passed = False
            f = report.failures[0]
            reason = f"pass {f['pass']} block {f['block']}: {f['reason']}"
    else:
        doc["event_level"] = None
    doc["passed"] = passed
    sys.stdout.write(_dump(doc) + "\n")
    if not passed:
        sys.stderr.write(f"error: verification failed: {reason}\n")
        return 1
    return 0


def cmd_estimate(args) -> int:
    cfg = ResourceConfig(
        num_qubits=args.qubits,
        bin_period=args.bin_period,
        group_velocity=args.group_velocity,
        per_element_transmission=args.transmission,
        mean_photons=args.photons,
        num_qudits=args.qudits,
        herald_mode=args.herald_mode,
    )
    program = OpticalProgram.from_json(_read(args.program)) if args.program else None
    report = estimate(cfg, program)
    _emit(report.to_json() if args.json else report.table(), args.out)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(2)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tbqudit", description="Time-bin qudit circuits: compile, simulate, sample, estimate.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compile", help="compile a circuit to an optical program")
    c.add_argument("circuit")
    c.add_argument("-o", "--output")
    c.add_argument("--pack", action="store_true", help="pack commuting gates into shared passes")
    c.add_argument("--bin-period", type=float, default=1e-9)
    c.set_defaults(func=cmd_compile)

    r = sub.add_parser("run", help="run a circuit at the amplitude level")
    r.add_argument("circuit")
    r.add_argument("--input")
    r.add_argument("--out")
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("simulate", help="event-level simulation of a compiled program")
    s.add_argument("program")
    s.add_argument("--input")
    s.add_argument("--loss", type=float, default=None, help="per-element power transmission")
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    m = sub.add_parser("sample", help="histogram of readout outcomes")
    m.add_argument("circuit")
    m.add_argument("--shots", type=int, required=True)
    m.add_argument("--seed", type=int, required=True)
    m.add_argument("--out")
    m.set_defaults(func=cmd_sample)

    v = sub.add_parser("verify", help="check compiled and amplitude-level semantics against the oracle")
    v.add_argument("circuit")
    v.add_argument("--trials", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=1e-9)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("estimate", help="resource and loss arithmetic")
    e.add_argument("--qubits", type=int, required=True)
    e.add_argument("--bin-period", type=float, default=1e-9)
    e.add_argument("--transmission", type=float, default=1.0, help="per-element transmission")
    e.add_argument("--photons", type=float, default=1.0, help="mean input photon number")
    e.add_argument("--qudits", type=int, default=1)
    e.add_argument("--group-velocity", type=float, default=2e8)
    e.add_argument("--herald-mode", choices=HERALD_MODES, default=ATTEMPTS)
    e.add_argument("--program", help="count elements along this compiled program")
    e.add_argument("--json", action="store_true")
    e.add_argument("--out")
    e.set_defaults(func=cmd_estimate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (QuditError, ValueError, KeyError, json.JSONDecodeError) as exc:
        msg = str(exc).replace("\n", " ")
        sys.stderr.write(f"error: {type(exc).__name__}: {msg}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
