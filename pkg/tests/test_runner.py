import math

import numpy as np
import pytest

from tbqudit.dsl import parse
from tbqudit.errors import DimensionError, UnsupportedFeatureError
from tbqudit.oracle import run_circuit_oracle
from tbqudit.runner import oracle_run, run_circuit, sample_circuit
from tbqudit.state import basis_state, compare_vectors, random_state

from circuits import random_circuit


def test_single_qudit_matches_oracle(rng):
    for _ in range(10):
        ir = random_circuit(rng, 4, 15)
        st = random_state(4, rng)
        got = run_circuit(ir, {"q": st}).state
        ref = run_circuit_oracle(ir, st)
        assert compare_vectors(got.amplitudes, ref.amplitudes).max_abs_diff < 1e-10


def test_measure_collapses_and_records():
    ir = parse("qudit q 2\ngate X q[1]\nmeasure q\n")
    res = run_circuit(ir, rng=np.random.default_rng(0))
    assert res.outcomes == [{"line": 3, "kind": "measure", "qudit": "q", "outcome": 2, "probability": 1.0}]
    np.testing.assert_array_equal(res.state.amplitudes, basis_state(2, 2).amplitudes)


def test_prepare_sets_input():
    ir = parse("qudit q 1\nprepare q [0,0; 1,0]\n")
    np.testing.assert_array_equal(run_circuit(ir).state.amplitudes, [0, 1])
    with pytest.raises(ValueError):
        run_circuit(ir, {"q": basis_state(1, 0)})


def test_input_width_checked():
    with pytest.raises(DimensionError):
        run_circuit(parse("qudit q 2\n"), {"q": basis_state(1, 0)})


def test_multi_qudit_with_cz_matches_composite_oracle(rng):
    src = ("qudit a 2\nqudit b 2\nspin s\nu(1.1, 0.3, 2.0, 0.5) a[1]\ngate H b[0]\n"
           "cz s a[1] b[0]\ncnot b[0] b[1]\ncz s b[1] a[0]\n")
    ir = parse(src)
    for seed in range(6):
        inputs = {"a": random_state(2, rng), "b": random_state(2, rng)}
        got = run_circuit(ir, inputs, np.random.default_rng(seed)).state
        ref = oracle_run(ir, inputs)
        assert compare_vectors(got.amplitudes, ref.amplitudes).max_abs_diff < 1e-10


def test_qnd_in_circuit():
    ir = parse("qudit q 2\nspin s\ngate H q[0]\ncnot q[0] q[1]\nqnd s q[1]\n")
    res = run_circuit(ir, rng=np.random.default_rng(2))
    (rec,) = res.outcomes
    assert rec["kind"] == "qnd" and rec["probability"] == pytest.approx(0.5)
    want = 3 if rec["outcome"] else 0
    assert abs(res.state.amplitudes[want]) == pytest.approx(1)
    with pytest.raises(UnsupportedFeatureError):
        oracle_run(ir)


def test_sampling_bell_and_determinism():
    ir = parse("qudit q 2\ngate H q[0]\ncnot q[0] q[1]\nmeasure q\n")
    h = sample_circuit(ir, 100_000, 7)
    assert set(h["counts"]) == {"0", "3"}
    for k in ("0", "3"):
        assert abs(h["counts"][k] - 50_000) < 3 * math.sqrt(25_000)
    assert sample_circuit(ir, 100_000, 7) == h
    assert sample_circuit(ir, 100_000, 8) != h


def test_sampling_with_qnd_uses_reruns():
    ir = parse("qudit q 1\nspin s\ngate H q[0]\nqnd s q[0]\n")
    h = sample_circuit(ir, 400, 1)
    assert sum(h["counts"].values()) == 400 and set(h["counts"]) == {"0", "1"}
