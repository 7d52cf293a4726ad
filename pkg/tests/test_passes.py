import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import CX01, CX10
from qprecomp.ir import Circuit, CircuitError, GateKind, Symbolic, cx, h, rx, rz, sx, x
from qprecomp.passes import BindingError, bind_parameters, cancel_pass
from qprecomp.route import verify_mapped
from qprecomp.topology import quito
from qprecomp.verify import circuit_unitary, equal_up_to_phase


def native(width, *gates):
    return Circuit(width, tuple(gates), native=True)


def test_zeroed_triple_vanishes():
    assert cancel_pass(native(2, cx(0, 1), rz(0.0, 1), cx(0, 1))).gates == ()


def test_rz_merge():
    out = cancel_pass(native(1, rz(0.3, 0), rz(0.4, 0)))
    assert [(g.kind, g.angle) for g in out.gates] == [(GateKind.RZ, pytest.approx(0.7))]


def test_swap_then_cx_leaves_two_cx():
    c = native(2, cx(0, 1), cx(1, 0), cx(0, 1), cx(0, 1))
    out = cancel_pass(c)
    assert out.gates == (cx(0, 1), cx(1, 0))
    # Hand product: SWAP followed by CX(0,1) equals CX(0,1) then CX(1,0).
    np.testing.assert_allclose(CX01 @ CX01 @ CX10 @ CX01, CX10 @ CX01)


def test_sx_cycle_and_x_pairs():
    assert cancel_pass(native(1, sx(0), sx(0), sx(0), sx(0))).gates == ()
    assert cancel_pass(native(1, x(0), x(0))).gates == ()
    assert cancel_pass(native(1, sx(0), sx(0))).gates == (x(0),)


def test_full_turn_keeps_phase():
    out = cancel_pass(native(1, rz(math.pi, 0), rz(math.pi, 0)))
    assert out.gates == ()
    assert math.isclose(math.cos(out.global_phase), -1.0)


def test_cascade_through_cancelled_middle():
    c = native(2, cx(0, 1), rz(0.5, 1), rz(-0.5, 1), cx(0, 1), sx(0))
    assert cancel_pass(c).gates == (sx(0),)


def test_blocked_by_foreign_gate():
    c = native(2, cx(0, 1), sx(1), cx(0, 1))
    assert cancel_pass(c).gates == c.gates


def test_reversed_cx_does_not_cancel():
    c = native(2, cx(0, 1), cx(1, 0))
    assert cancel_pass(c).gates == c.gates


def test_tagged_gates_are_barriers_when_protected():
    c = native(2, cx(0, 1), cx(0, 1, tag=(0, 1)), rz(0.0, 1, tag=(0, 1)), cx(0, 1, tag=(0, 1)))
    assert len(cancel_pass(c, protect_tagged=True).gates) == 4
    assert [(g.kind, g.qubits) for g in cancel_pass(c).gates] == [(GateKind.CX, (0, 1))]


def test_non_native_input_is_rejected():
    with pytest.raises(CircuitError):
        cancel_pass(Circuit(1, (h(0),)))


@st.composite
def circuits(draw, width=3):
    rng = random.Random(draw(st.integers(0, 2 ** 32)))
    gates = []
    for _ in range(draw(st.integers(0, 40))):
        r = rng.random()
        q = rng.randrange(width)
        if r < 0.4:
            a, b = rng.sample(range(width), 2)
            gates.append(cx(a, b))
        elif r < 0.6:
            gates.append(rz(rng.choice([0.0, math.pi, -math.pi / 2, rng.uniform(-4, 4)]), q))
        elif r < 0.7:
            gates.append(rx(rng.choice([0.0, 2 * math.pi, rng.uniform(-4, 4)]), q))
        elif r < 0.85:
            gates.append(sx(q))
        else:
            gates.append(x(q))
    # RX is accepted by the pass but is not native, so these circuits are not flagged native.
    return Circuit(width, tuple(gates))


@given(circuits())
def test_cancel_pass_properties(c):
    out = cancel_pass(c)
    assert len(out.gates) <= len(c.gates)
    assert cancel_pass(out).gates == out.gates
    assert equal_up_to_phase(circuit_unitary(out), circuit_unitary(c), 1e-9)
    # Exact phase bookkeeping, not just up to phase.
    np.testing.assert_allclose(circuit_unitary(out), circuit_unitary(c), atol=1e-9)


@given(circuits(width=5))
def test_cancel_pass_keeps_circuits_mapped(c):
    mapped = Circuit(5, tuple(g for g in c.gates if g.kind is not GateKind.CX or quito().has_edge(*g.qubits)))
    assert verify_mapped(cancel_pass(mapped), quito())


def test_bind_parameters():
    c = Circuit(1, (rz(Symbolic.param("a", 2.0), 0), rx(0.5, 0)))
    out = bind_parameters(c, {"a": 0.3})
    assert out.gates[0].angle == pytest.approx(0.6)
    concrete = Circuit(1, (rz(0.1, 0),))
    assert bind_parameters(concrete, {}) == concrete


def test_missing_binding_is_named():
    c = Circuit(1, (rx(Symbolic.param("beta_1"), 0), rx(Symbolic.param("beta_0"), 0)))
    with pytest.raises(BindingError, match="beta_1"):
        bind_parameters(c, {"beta_0": 0.1})
