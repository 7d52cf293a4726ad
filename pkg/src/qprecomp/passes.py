"""Peephole cancellation and parameter binding on native circuits."""
from __future__ import annotations

import math
from typing import Mapping

from .ir import Circuit, CircuitError, Gate, GateKind, Symbolic

TWO_PI = 2 * math.pi
ZERO_TOL = 1e-12

_CX, _RZ, _RX, _X, _SX, _MEASURE = (
    GateKind.CX, GateKind.RZ, GateKind.RX, GateKind.X, GateKind.SX, GateKind.MEASURE)
_ALLOWED = (_CX, _RZ, _RX, _X, _SX, _MEASURE)


class BindingError(ValueError):
    pass


def _combine(prev: Gate, cur: Gate):
    """Result of ``prev`` followed directly by ``cur`` on the same qubits.

    Returns None when no rule applies, () when the pair is the identity, or the
    single replacement gate.
    """
    k = cur.kind
    if prev.kind is not k or prev.qubits != cur.qubits:
        return None
    if k is _CX or k is _X:
        return ()
    tag = prev.tag if prev.tag == cur.tag else None
    if k is _SX:
        return Gate(_X, cur.qubits, None, tag)
    if k is _RZ or k is _RX:
        return Gate(k, cur.qubits, prev.angle + cur.angle, tag)
    return None


def cancel_pass(circuit: Circuit, protect_tagged: bool = False) -> Circuit:
    """Local cancellation to a fixpoint, in one stack-based sweep.

    Rules, applied between gates adjacent on every qubit they touch: drop
    RZ/RX by a multiple of 2*pi (phase kept), merge RZ.RZ and RX.RX, cancel
    CX.CX on the same (control, target) and X.X, and fold SX.SX into X, which
    takes SX^4 to nothing.

    Each qubit keeps a stack of the surviving gates on it. An incoming gate is
    combined with the gate on top of all its stacks, and the result is tried
    again against the new tops, so cancellations cascade. Gates only ever leave
    from the top, so nothing below a kept gate can become adjacent to anything
    later: the output is already a fixpoint. With ``protect_tagged`` every
    tagged gate acts as a barrier.
    """
    out: list[Gate | None] = []
    tops: list[list[int]] = [[] for _ in range(circuit.width)]
    phase = circuit.global_phase
    for g in circuit.gates:
        kind = g.kind
        if kind not in _ALLOWED:
            raise CircuitError(f"cancel_pass needs native input, found {kind.value}")
        cur = g
        if not (kind is _MEASURE or (protect_tagged and g.tag is not None)):
            while True:
                ck = cur.kind
                if (ck is _RZ or ck is _RX) and not isinstance(cur.angle, Symbolic):
                    a = cur.angle
                    k = round(a / TWO_PI)
                    if abs(a - k * TWO_PI) < ZERO_TOL:
                        phase += math.pi * k
                        cur = None
                        break
                qs = cur.qubits
                stack = tops[qs[0]]
                if not stack:
                    break
                idx = stack[-1]
                if len(qs) == 2:
                    other = tops[qs[1]]
                    if not other or other[-1] != idx:
                        break
                prev = out[idx]
                if prev.kind is not ck or prev.qubits != qs or (protect_tagged and prev.tag is not None):
                    break
                merged = _combine(prev, cur)
                if merged is None:
                    break
                out[idx] = None
                for q in qs:
                    tops[q].pop()
                if merged == ():
                    cur = None
                    break
                cur = merged
        if cur is not None:
            pos = len(out)
            out.append(cur)
            for q in cur.qubits:
                tops[q].append(pos)
    return Circuit.unchecked(circuit.width, [g for g in out if g is not None], circuit.native, phase)


def bind_parameters(circuit: Circuit, values: Mapping[str, float]) -> Circuit:
    """Replace every symbolic angle with its value; ``value = offset + sum(coeff * bound)``."""
    missing = sorted(circuit.parameters - values.keys())
    if missing:
        raise BindingError(f"unbound parameter(s): {', '.join(missing)}")
    out = []
    for g in circuit.gates:
        if isinstance(g.angle, Symbolic):
            g = g.with_angle(g.angle.resolve(values))
        out.append(g)
    return Circuit.unchecked(circuit.width, out, circuit.native, circuit.global_phase)
