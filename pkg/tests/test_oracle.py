import numpy as np
import pytest

from tbqudit.dsl import parse
from tbqudit.errors import BinRangeError, InvalidGateError, UnsupportedFeatureError
from tbqudit.matrices import gate_matrix, random_unitary
from tbqudit.oracle import lift_controlled, lift_single, run_circuit_oracle
from tbqudit.state import basis_state, random_state

X = gate_matrix("X")


def test_lift_identity():
    for i in range(3):
        np.testing.assert_array_equal(lift_single(np.eye(2), i, 3), np.eye(8))


def test_lift_x_is_bit_flip():
    m = lift_single(X, 1, 2)
    for j in range(4):
        assert m[j ^ 2, j] == 1


def test_lift_preserves_norm(rng):
    u = random_unitary(rng)
    st = random_state(4, rng)
    out = lift_single(u, 2, 4) @ st.amplitudes
    assert abs(np.linalg.norm(out) - 1) < 1e-12


def test_cnot_and_toffoli_matrices():
    cnot = lift_controlled(X, [1], 0, 2)
    np.testing.assert_array_equal(cnot, np.eye(4)[:, [0, 1, 3, 2]])
    tof = lift_controlled(X, [2, 1], 0, 3)
    np.testing.assert_array_equal(tof, np.eye(8)[:, [0, 1, 2, 3, 4, 5, 7, 6]])


def test_empty_controls_equal_single(rng):
    u = random_unitary(rng)
    np.testing.assert_allclose(lift_controlled(u, [], 1, 3), lift_single(u, 1, 3))


@pytest.mark.parametrize("n, k", [(3, 1), (4, 2), (5, 3)])
def test_controlled_acts_trivially_outside_control_block(n, k, rng):
    controls = list(range(1, k + 1))
    m = lift_controlled(random_unitary(rng), controls, 0, n)
    fixed = sum(1 for j in range(2**n) if np.array_equal(m[:, j], np.eye(2**n)[:, j]))
    assert fixed >= 2**n - 2 ** (n - k)


def test_index_collision_and_cap():
    with pytest.raises(InvalidGateError):
        lift_controlled(X, [0], 0, 2)
    with pytest.raises(BinRangeError):
        lift_single(X, 0, 13)


def test_run_oracle_examples():
    st = basis_state(2, 0)
    assert np.array_equal(run_circuit_oracle(parse("qudit q 2\n"), st).amplitudes, st.amplitudes)
    bell = run_circuit_oracle(parse("qudit q 2\ngate H q[0]\ncnot q[0] q[1]\n"), st)
    np.testing.assert_allclose(bell.amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2), atol=1e-15)
    xx = run_circuit_oracle(parse("qudit q 2\ngate X q[1]\ngate X q[1]\n"), st)
    np.testing.assert_allclose(xx.amplitudes, st.amplitudes)


def test_oracle_rejects_protocols():
    ir = parse("qudit a 1\nqudit b 1\nspin s\ncz s a[0] b[0]\n")
    with pytest.raises(UnsupportedFeatureError):
        run_circuit_oracle(ir, basis_state(1, 0))
