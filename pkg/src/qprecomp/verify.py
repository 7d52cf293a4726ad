"""Dense simulation, layout-aware equivalence checking, and classical brute-force solvers.

Basis states are labelled q0-first: ``"10"`` means qubit 0 is 1 and qubit 1 is 0.
Internally qubit 0 is the most significant bit of a basis index.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .encode import Problem, ProblemInstance
from .ir import Circuit, GateKind, Symbolic
from .route import Layout

MAX_SIM_WIDTH = 14
MAX_EQUIV_LOGICAL = 8
MAX_BRUTE_FORCE = 20

_SQ2 = 1 / math.sqrt(2)
_H = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
_SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)


class SimulationError(ValueError):
    pass


def gate_matrix(kind: GateKind, angle: float | None = None) -> np.ndarray:
    """Textbook matrix; two-qubit matrices use basis order |q_a q_b> with q_a first."""
    if kind is GateKind.H:
        return _H.copy()
    if kind is GateKind.X:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind is GateKind.SX:
        return _SX.copy()
    if kind is GateKind.RZ:
        return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])
    if kind is GateKind.RX:
        c, s = math.cos(angle / 2), math.sin(angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind is GateKind.CX:
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if kind is GateKind.SWAP:
        return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    if kind is GateKind.RZZ:
        a, b = np.exp(-0.5j * angle), np.exp(0.5j * angle)
        return np.diag([a, b, b, a])
    raise SimulationError(f"no matrix for {kind}")


def _slot(ndim: int, axis: int, value: int):
    idx = [slice(None)] * ndim
    idx[axis] = value
    return tuple(idx)


def _run(state: np.ndarray, circuit: Circuit, qmap: Sequence[int]) -> np.ndarray:
    """Apply ``circuit`` to ``state`` of shape (2,)*w + (batch,); ``qmap`` sends circuit qubits to axes."""
    nd = state.ndim
    for g in circuit.gates:
        k = g.kind
        if isinstance(g.angle, Symbolic):
            raise SimulationError(f"unbound parameter(s) {sorted(g.angle.names)}")
        if k is GateKind.MEASURE:
            raise SimulationError("simulation is measure-free")
        q = [qmap[i] for i in g.qubits]
        if k is GateKind.RZ:
            state[_slot(nd, q[0], 0)] *= np.exp(-0.5j * g.angle)
            state[_slot(nd, q[0], 1)] *= np.exp(0.5j * g.angle)
        elif k is GateKind.X:
            state = np.flip(state, axis=q[0]).copy()
        elif k is GateKind.CX:
            c, t = q
            sub = _slot(nd, c, 1)
            t_ax = t - 1 if t > c else t
            state[sub] = np.flip(state[sub], axis=t_ax)
        elif k is GateKind.RZZ:
            a, b = q
            same, diff = np.exp(-0.5j * g.angle), np.exp(0.5j * g.angle)
            for va in (0, 1):
                for vb in (0, 1):
                    idx = [slice(None)] * nd
                    idx[a], idx[b] = va, vb
                    state[tuple(idx)] *= same if va == vb else diff
        elif k is GateKind.SWAP:
            state = np.swapaxes(state, q[0], q[1]).copy()
        else:
            m = gate_matrix(k, g.angle)
            i0, i1 = _slot(nd, q[0], 0), _slot(nd, q[0], 1)
            a, b = state[i0].copy(), state[i1].copy()
            state[i0] = m[0, 0] * a + m[0, 1] * b
            state[i1] = m[1, 0] * a + m[1, 1] * b
    return state


def _basis_index(label, width: int) -> int:
    if isinstance(label, str):
        if len(label) != width or set(label) - {"0", "1"}:
            raise SimulationError(f"basis label {label!r} does not fit width {width}")
        return int(label, 2) if label else 0
    label = int(label)
    if not 0 <= label < 2 ** width:
        raise SimulationError(f"basis index {label} out of range")
    return label


def simulate(circuit: Circuit, basis=0) -> np.ndarray:
    """Statevector of ``circuit`` applied to a computational basis state (int index or q0-first label)."""
    w = circuit.width
    if w > MAX_SIM_WIDTH:
        raise SimulationError(f"width {w} exceeds simulator limit {MAX_SIM_WIDTH}")
    state = np.zeros(2 ** w, dtype=complex)
    state[_basis_index(basis, w)] = 1.0
    out = _run(state.reshape((2,) * w + (1,)), circuit, list(range(w)))
    return out.reshape(-1) * np.exp(1j * circuit.global_phase)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Full unitary; column j is the output for basis input j."""
    w = circuit.width
    if w > MAX_SIM_WIDTH // 2 + 1:
        raise SimulationError(f"width {w} too large for a full unitary")
    state = np.eye(2 ** w, dtype=complex).reshape((2,) * w + (2 ** w,))
    out = _run(state, circuit, list(range(w)))
    return out.reshape(2 ** w, 2 ** w) * np.exp(1j * circuit.global_phase)


def probabilities(state: np.ndarray) -> np.ndarray:
    return np.abs(state) ** 2


def most_frequent(state: np.ndarray) -> str:
    w = int(round(math.log2(state.size)))
    return format(int(np.argmax(probabilities(state))), f"0{w}b") if w else ""


def logical_unitary(circuit: Circuit, layout: Layout | None = None,
                    ancilla_tol: float = 1e-9) -> np.ndarray:
    """Action of a (possibly mapped) circuit on its logical qubits.

    Logical qubit ``l`` enters on ``layout.logical_to_physical[l]`` and is read
    back from ``layout.output_permutation[l]``. Physical qubits outside the
    layout start in |0> and must end there; only touched qubits are simulated.
    """
    if layout is None:
        layout = Layout.trivial(circuit.width)
    n = len(layout.logical_to_physical)
    if n > MAX_EQUIV_LOGICAL:
        raise SimulationError(f"{n} logical qubits exceeds equivalence limit {MAX_EQUIV_LOGICAL}")
    active = set(layout.logical_to_physical) | set(layout.output_permutation)
    for g in circuit.gates:
        active.update(g.qubits)
    active = sorted(active)
    w = len(active)
    if w > MAX_SIM_WIDTH:
        raise SimulationError(f"{w} active qubits exceeds simulator limit {MAX_SIM_WIDTH}")
    axis = {p: i for i, p in enumerate(active)}
    qmap = [axis.get(p, -1) for p in range(max(active) + 1)]

    def flat(positions):
        xs = np.arange(2 ** n)
        idx = np.zeros(2 ** n, dtype=np.int64)
        for l, p in enumerate(positions):
            bit = (xs >> (n - 1 - l)) & 1
            idx |= bit << (w - 1 - axis[p])
        return idx

    state = np.zeros((2 ** w, 2 ** n), dtype=complex)
    state[flat(layout.logical_to_physical), np.arange(2 ** n)] = 1.0
    out = _run(state.reshape((2,) * w + (2 ** n,)), circuit, qmap).reshape(2 ** w, 2 ** n)
    u = out[flat(layout.output_permutation), :] * np.exp(1j * circuit.global_phase)
    leak = np.max(np.abs(1.0 - np.sum(np.abs(u) ** 2, axis=0)))
    if leak > ancilla_tol:
        raise SimulationError(f"idle qubits did not return to |0> (leak {leak:.2e})")
    return u


def equal_up_to_phase(u1: np.ndarray, u2: np.ndarray, tol: float) -> bool:
    if u1.shape != u2.shape:
        return False
    k = np.unravel_index(np.argmax(np.abs(u2)), u2.shape)
    if abs(u2[k]) < tol:
        return bool(np.max(np.abs(u1)) < tol)
    phase = u1[k] / u2[k]
    if abs(abs(phase) - 1.0) > tol:
        return False
    return bool(np.max(np.abs(u1 - phase * u2)) <= tol)


def equivalent(c1: Circuit, c2: Circuit, layout1: Layout | None = None,
               layout2: Layout | None = None, tol: float = 1e-8) -> bool:
    """Whether two circuits act identically on their logical qubits, up to one global phase."""
    try:
        u1 = logical_unitary(c1, layout1)
        u2 = logical_unitary(c2, layout2)
    except SimulationError as exc:
        if "idle qubits" in str(exc):
            return False
        raise
    return equal_up_to_phase(u1, u2, tol)


# ---------------------------------------------------------------------------
# Classical oracles

def _bits(n: int, count: int) -> np.ndarray:
    xs = np.arange(count, dtype=np.int64)
    return ((xs[:, None] >> np.arange(n)[None, :]) & 1).astype(np.int8)


def brute_force_maxcut(instance: ProblemInstance) -> tuple[int, list[tuple[int, ...]]]:
    """Best cut value and every optimal partition with node 0 in group 0.

    A partition is a tuple of group bits, one per node.
    """
    n = instance.n
    if n > MAX_BRUTE_FORCE:
        raise ValueError(f"n={n} too large for enumeration")
    # Node 0 pinned to 0: bit v-1 of the counter is node v.
    rest = _bits(n - 1, 2 ** (n - 1))
    assign = np.concatenate([np.zeros((rest.shape[0], 1), dtype=np.int8), rest], axis=1)
    cut = np.zeros(assign.shape[0], dtype=np.int64)
    for a, b in instance.sorted_edges:
        cut += assign[:, a] ^ assign[:, b]
    best = int(cut.max())
    return best, [tuple(int(v) for v in row) for row in assign[cut == best]]


def groups(partition: Sequence[int]) -> tuple[frozenset[int], frozenset[int]]:
    zero = frozenset(i for i, b in enumerate(partition) if b == 0)
    one = frozenset(i for i, b in enumerate(partition) if b == 1)
    return zero, one


def cut_value(instance: ProblemInstance, partition: Sequence[int]) -> int:
    return sum(partition[a] != partition[b] for a, b in instance.sorted_edges)


def brute_force_satellite(instance: ProblemInstance, weighted: bool = True,
                          tol: float = 1e-12) -> tuple[float, list[frozenset[int]]]:
    """Largest (weighted) set of locations containing no infeasible pair, by enumeration."""
    n = instance.n
    if n > MAX_BRUTE_FORCE:
        raise ValueError(f"n={n} too large for enumeration")
    sel = _bits(n, 2 ** n)
    ok = np.ones(sel.shape[0], dtype=bool)
    for a, b in instance.sorted_edges:
        ok &= ~((sel[:, a] == 1) & (sel[:, b] == 1))
    if weighted and instance.weights is not None:
        score = sel @ np.asarray(instance.weights, dtype=float)
    else:
        score = sel.sum(axis=1).astype(float)
    score = np.where(ok, score, -np.inf)
    best = float(score.max())
    rows = sel[score >= best - tol]
    return best, [frozenset(int(i) for i in np.flatnonzero(r)) for r in rows]


def decode(bits, problem: Problem | str, layout: Layout | None = None):
    """Map a measured bitstring to a partition (MaxCut) or a selection (satellite).

    ``bits`` is q0-first. With a ``layout`` it is indexed by physical qubit and
    logical ``l`` is read from ``layout.output_permutation[l]``; without one it
    is already logical.
    """
    values = [int(c) for c in bits] if isinstance(bits, str) else [int(b) for b in bits]
    if layout is None:
        logical = values
    else:
        perm = layout.output_permutation
        if len(values) <= max(perm):
            raise ValueError(f"bitstring of length {len(values)} is shorter than the device")
        logical = [values[p] for p in perm]
    if Problem(problem) is Problem.MAXCUT:
        return tuple(logical)
    return frozenset(i for i, b in enumerate(logical) if b)


def decode_probabilities(state: np.ndarray, layout: Layout) -> np.ndarray:
    """Marginal distribution over logical outcomes (q0-first index) of a mapped statevector."""
    w = int(round(math.log2(state.size)))
    n = len(layout.output_permutation)
    probs = probabilities(state).reshape((2,) * w)
    others = tuple(i for i in range(w) if i not in layout.output_permutation)
    marg = probs.sum(axis=others) if others else probs
    # Remaining axes are in ascending physical order; reorder to logical order.
    kept = sorted(layout.output_permutation)
    order = [kept.index(p) for p in layout.output_permutation]
    return np.transpose(marg, order).reshape(2 ** n)
