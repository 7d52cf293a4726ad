"""Rewrite circuits into the native set {RZ, SX, X, CX}.

Each rule returns the replacement gate list and the phase ``phi`` with
``source = exp(1j*phi) * product(replacement)``; the caller accumulates ``phi``
into the circuit's global phase.
"""
from __future__ import annotations

import math

from .ir import NATIVE_KINDS, Angle, Circuit, CircuitError, Gate, GateKind, cx, rz, sx

HALF_PI = math.pi / 2


def expand_h(q: int, tag=None) -> tuple[list[Gate], float]:
    # RZ(pi/2) . X . RZ(pi/2) is not a Hadamard; SX in the middle is.
    return [rz(HALF_PI, q, tag), sx(q, tag), rz(HALF_PI, q, tag)], math.pi / 4


def expand_rx(angle: Angle, q: int, tag=None) -> tuple[list[Gate], float]:
    # Without the trailing RZ(pi/2) the sequence is off by more than a phase.
    return [
        rz(HALF_PI, q, tag), sx(q, tag), rz(angle + math.pi, q, tag), sx(q, tag), rz(HALF_PI, q, tag),
    ], HALF_PI


def expand_rzz(angle: Angle, a: int, b: int, tag=None) -> tuple[list[Gate], float]:
    return [cx(a, b, tag), rz(angle, b, tag), cx(a, b, tag)], 0.0


def expand_swap(a: int, b: int, tag=None) -> tuple[list[Gate], float]:
    return [cx(a, b, tag), cx(b, a, tag), cx(a, b, tag)], 0.0


def expand(gate: Gate) -> tuple[list[Gate], float]:
    """Native replacement for a single gate."""
    k, q, t = gate.kind, gate.qubits, gate.tag
    if k in NATIVE_KINDS or k is GateKind.MEASURE:
        return [gate], 0.0
    if k is GateKind.H:
        return expand_h(q[0], t)
    if k is GateKind.RX:
        return expand_rx(gate.angle, q[0], t)
    if k is GateKind.RZZ:
        return expand_rzz(gate.angle, q[0], q[1], t)
    if k is GateKind.SWAP:
        return expand_swap(q[0], q[1], t)
    raise CircuitError(f"no native rewrite for {k}")


def synthesize(circuit: Circuit) -> Circuit:
    """Return a native circuit with the same unitary, tags carried onto every emitted gate."""
    if circuit.native:
        return circuit
    out: list[Gate] = []
    phase = circuit.global_phase
    for g in circuit.gates:
        gates, phi = expand(g)
        out.extend(gates)
        phase += phi
    return Circuit.unchecked(circuit.width, out, native=True, global_phase=phase)
