import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tbqudit.dsl import (CircuitIR, Cnot, ControlledU, CrossCz, Gate, Measure, Prepare, Qnd, Toffoli,
                         ir_equal, parse, serialize)
from tbqudit.errors import ParseError

from circuits import random_circuit

BELL = "qudit q 2\ngate H q[0]\ncnot q[0] q[1]\nmeasure q\n"


def test_bell_parses():
    ir = parse(BELL)
    assert ir.qudits == {"q": 2}
    assert ir.statements == [Gate("H", "q", 0), Cnot("q", 0, 1), Measure("q")]
    assert [s.line for s in ir.statements] == [2, 3, 4]


def test_full_grammar():
    src = """
    # two qudits and a spin
    qudit a 2
    qudit b 3
    spin s
    prepare a [0.5,0; 0,0.5; 0.5,0; 0,-0.5]
    u(pi/2, 0.25, -pi, 2*pi/3) a[1]
    toffoli b[0] b[1] b[2]
    ctrl Z b[2] b[0]
    ctrl u(1, 2, 3, 4) a[0] a[1]
    qnd s a[0]
    cz s a[1] b[2]   # trailing comment
    measure a
    measure b
    """
    ir = parse(src)
    kinds = [type(s) for s in ir.statements]
    assert kinds == [Prepare, Gate, Toffoli, ControlledU, ControlledU, Qnd, CrossCz, Measure, Measure]
    u = ir.statements[1]
    assert u.name == "U" and u.params == pytest.approx((math.pi / 2, 0.25, -math.pi, 2 * math.pi / 3))
    assert ir.statements[0].amplitudes[3] == -0.5j


def test_crlf_accepted():
    assert ir_equal(parse(BELL.replace("\n", "\r\n")), parse(BELL))


@pytest.mark.parametrize("src, line, fragment", [
    ("qudit q 2\ncnot q[0] q[0]\n", 2, "control equals target"),
    ("qudit q 2\ngate H q[5]\n", 2, "out of range"),
    ("gate H q[0]\n", 1, "undeclared"),
    ("qudit q 2\ngate W q[0]\n", 2, ""),
    ("qudit q 2\nfrobnicate q\n", 2, ""),
    ("qudit q 2\ngate H q[0]\nprepare q [1,0; 0,0; 0,0; 0,0]\n", 3, "prepare"),
    ("qudit q 1\nprepare q [1,0; 1,0]\n", 2, "norm"),
    ("qudit q 1\nprepare q [1,0]\n", 2, ""),
    ("qudit q 1\nmeasure q\ngate X q[0]\n", 3, "measured"),
    ("qudit q 0\n", 1, ""),
    ("qudit q 1\nqudit q 1\n", 2, ""),
    ("qudit q 2\nspin s\ncz s q[0] q[1]\n", 3, ""),
    ("qudit q 2\nu(1, 2, 3) q[0]\n", 2, ""),
    ("qudit q 2\nu(1, 2, 3, __import__) q[0]\n", 2, ""),
    ("qudit q 2\ngate H q[0] $\n", 2, "unexpected"),
])
def test_errors_carry_location(src, line, fragment):
    with pytest.raises(ParseError) as err:
        parse(src)
    assert err.value.line == line
    assert err.value.column >= 1
    assert fragment in str(err.value)
    assert str(err.value).startswith(f"line {line}, column ")


def test_error_column_points_at_token():
    with pytest.raises(ParseError) as err:
        parse("qudit q 2\ncnot q[0] q[0]\n")
    assert err.value.column == 11 and err.value.token == "q[0]"


def test_round_trip_random(rng):
    for _ in range(30):
        ir = random_circuit(rng, int(rng.integers(1, 6)), int(rng.integers(0, 20)))
        assert ir_equal(parse(serialize(ir)), ir)


def test_round_trip_protocol_circuit():
    ir = parse("qudit a 1\nqudit b 2\nspin s\nprepare a [0.6,0; 0,0.8]\n"
               "qnd s b[1]\ncz s a[0] b[0]\nctrl SDG b[0] b[1]\nmeasure a\n")
    assert ir_equal(parse(serialize(ir)), ir)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["X", "H", "TG"]), st.integers(0, 3)), max_size=10),
       st.lists(st.floats(-10, 10, allow_nan=False), min_size=4, max_size=4))
def test_round_trip_property(named, params):
    stmts = [Gate(g, "r", q) for g, q in named] + [Gate("U", "r", 2, tuple(params))]
    ir = CircuitIR({"r": 4}, [], stmts)
    assert ir_equal(parse(serialize(ir)), ir)


def test_gate_matrices():
    ir = parse("qudit q 1\nu(pi, pi, 0, 0) q[0]\n")
    np.testing.assert_allclose(ir.statements[0].matrix(), np.eye(2), atol=1e-15)
