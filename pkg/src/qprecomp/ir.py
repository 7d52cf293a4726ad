"""Gate-level circuit IR with edge tags, symbolic angles and a QASM-subset text format.

Qubit 0 is the leftmost character of every bitstring label used in this package.
Angles are either plain floats (radians) or :class:`Symbolic` linear expressions
that resolve once parameters are bound.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union


class CircuitError(ValueError):
    """Invalid circuit construction or malformed circuit text."""


class GateKind(enum.Enum):
    H = "h"
    X = "x"
    SX = "sx"
    RZ = "rz"
    RX = "rx"
    RZZ = "rzz"
    CX = "cx"
    SWAP = "swap"
    MEASURE = "measure"

    @property
    def arity(self) -> int:
        return 2 if self in _TWO_QUBIT else 1

    @property
    def has_angle(self) -> bool:
        return self in _ROTATIONS


_TWO_QUBIT = frozenset({GateKind.CX, GateKind.RZZ, GateKind.SWAP})
_ROTATIONS = frozenset({GateKind.RZ, GateKind.RX, GateKind.RZZ})
NATIVE_KINDS = frozenset({GateKind.RZ, GateKind.SX, GateKind.X, GateKind.CX})


@dataclass(frozen=True, slots=True)
class Symbolic:
    """Linear angle expression ``offset + sum(coeff * param)``.

    A single ``(name, coefficient)`` term covers every QAOA angle; the offset and
    extra terms appear once synthesis and RZ merging fold constants in.
    """

    terms: tuple[tuple[str, float], ...]
    offset: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(sorted((n, float(c)) for n, c in self.terms)))
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def param(cls, name: str, coefficient: float = 1.0) -> "Symbolic":
        return cls(((name, float(coefficient)),))

    @property
    def names(self) -> frozenset[str]:
        return frozenset(n for n, _ in self.terms)

    def resolve(self, values: Mapping[str, float]) -> float:
        total = self.offset
        for name, coeff in self.terms:
            try:
                total += coeff * values[name]
            except KeyError:
                raise KeyError(f"unbound parameter {name!r}") from None
        return total

    def __add__(self, other: "Angle") -> "Angle":
        if isinstance(other, Symbolic):
            acc = dict(self.terms)
            for name, coeff in other.terms:
                acc[name] = acc.get(name, 0.0) + coeff
            terms = tuple(sorted((n, c) for n, c in acc.items() if c != 0.0))
            if not terms:
                return self.offset + other.offset
            return Symbolic(terms, self.offset + other.offset)
        return Symbolic(self.terms, self.offset + float(other))

    __radd__ = __add__

    def __str__(self) -> str:
        parts = [f"{_fmt(c)}*{n}" for n, c in self.terms]
        if self.offset:
            parts.append(_fmt(self.offset))
        return "+".join(parts).replace("+-", "-")


Angle = Union[float, Symbolic]


def _fmt(x: float) -> str:
    return repr(float(x))


def canonical_edge(a: int, b: int) -> tuple[int, int]:
    if a == b:
        raise CircuitError(f"edge endpoints must differ, got ({a}, {b})")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True, slots=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    angle: Angle | None = None
    tag: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if len(self.qubits) != self.kind.arity:
            raise CircuitError(f"{self.kind.value} takes {self.kind.arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"repeated qubit in {self.kind.value}{self.qubits}")
        if self.kind.has_angle != (self.angle is not None):
            raise CircuitError(f"angle mismatch for {self.kind.value}")
        if self.tag is not None and self.tag != canonical_edge(*self.tag):
            raise CircuitError(f"tag {self.tag} is not canonical")

    @property
    def is_symbolic(self) -> bool:
        return isinstance(self.angle, Symbolic)

    def with_angle(self, angle: Angle) -> "Gate":
        """Copy with a new angle, skipping validation (shape is unchanged)."""
        g = object.__new__(Gate)
        _set(g, "kind", self.kind)
        _set(g, "qubits", self.qubits)
        _set(g, "angle", angle)
        _set(g, "tag", self.tag)
        return g


_set = object.__setattr__


# Small constructors; they read better than Gate(GateKind.X, (q,)) at call sites.
def h(q: int, tag=None) -> Gate: return Gate(GateKind.H, (q,), tag=tag)
def x(q: int, tag=None) -> Gate: return Gate(GateKind.X, (q,), tag=tag)
def sx(q: int, tag=None) -> Gate: return Gate(GateKind.SX, (q,), tag=tag)
def rz(angle: Angle, q: int, tag=None) -> Gate: return Gate(GateKind.RZ, (q,), angle, tag)
def rx(angle: Angle, q: int, tag=None) -> Gate: return Gate(GateKind.RX, (q,), angle, tag)
def rzz(angle: Angle, a: int, b: int, tag=None) -> Gate: return Gate(GateKind.RZZ, (a, b), angle, tag)
def cx(c: int, t: int, tag=None) -> Gate: return Gate(GateKind.CX, (c, t), tag=tag)
def swap(a: int, b: int, tag=None) -> Gate: return Gate(GateKind.SWAP, (a, b), tag=tag)
def measure(q: int) -> Gate: return Gate(GateKind.MEASURE, (q,))


@dataclass(frozen=True)
class Circuit:
    """Immutable gate list over ``width`` qubits.

    ``global_phase`` is the scalar phase such that the circuit unitary equals
    ``exp(1j * global_phase)`` times the ordered gate product.
    """

    width: int
    gates: tuple[Gate, ...] = ()
    native: bool = False
    global_phase: float = 0.0

    def __post_init__(self) -> None:
        if self.width < 0:
            raise CircuitError("width must be non-negative")
        for g in self.gates:
            _check_gate(g, self.width, self.native)

    @classmethod
    def unchecked(cls, width: int, gates: Iterable[Gate], native: bool = False,
                  global_phase: float = 0.0) -> "Circuit":
        """Build without re-validating gates; for passes whose output is valid by construction."""
        c = object.__new__(cls)
        object.__setattr__(c, "width", width)
        object.__setattr__(c, "gates", tuple(gates))
        object.__setattr__(c, "native", native)
        object.__setattr__(c, "global_phase", global_phase)
        return c

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def append(self, gate: Gate) -> "Circuit":
        _check_gate(gate, self.width, self.native)
        return Circuit.unchecked(self.width, self.gates + (gate,), self.native, self.global_phase)

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        gates = tuple(gates)
        for g in gates:
            _check_gate(g, self.width, self.native)
        return Circuit.unchecked(self.width, self.gates + gates, self.native, self.global_phase)

    def with_gates(self, gates: Iterable[Gate], global_phase: float | None = None) -> "Circuit":
        phase = self.global_phase if global_phase is None else global_phase
        return Circuit.unchecked(self.width, gates, self.native, phase)

    @property
    def parameters(self) -> frozenset[str]:
        names: set[str] = set()
        for g in self.gates:
            if isinstance(g.angle, Symbolic):
                names |= g.angle.names
        return frozenset(names)

    def count(self, kind: GateKind) -> int:
        return sum(1 for g in self.gates if g.kind is kind)

    @property
    def tags(self) -> list[tuple[int, int]]:
        return [g.tag for g in self.gates if g.tag is not None]


def _check_gate(g: Gate, width: int, native: bool) -> None:
    for q in g.qubits:
        if not 0 <= q < width:
            raise CircuitError(f"qubit {q} out of range for width {width}")
    if native and g.kind not in NATIVE_KINDS and g.kind is not GateKind.MEASURE:
        raise CircuitError(f"{g.kind.value} is not a native gate")


def two_qubit_count(circuit: Circuit) -> int:
    return sum(1 for g in circuit.gates if g.kind in _TWO_QUBIT)


# ---------------------------------------------------------------------------
# Text format: OpenQASM 2.0 subset plus structured ``// @`` comments.

_HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";'
_GATE_RE = re.compile(r"^(?P<name>[a-z_][a-z0-9_]*)\s*(?:\((?P<arg>[^)]*)\))?\s+(?P<ops>[^;]*);$")
_QREF_RE = re.compile(r"^q\[(\d+)\]$")
_EDGE_RE = re.compile(r"^@edge\((\d+),(\d+)\)$")


def serialize(circuit: Circuit, layout=None) -> str:
    """Render ``circuit`` as QASM text; ``layout`` (a route.Layout) goes in header comments."""
    lines = [_HEADER]
    if circuit.native:
        lines.append("// @native")
    if circuit.global_phase:
        lines.append(f"// @global_phase {_fmt(circuit.global_phase)}")
    if layout is not None:
        lines.append("// @layout " + " ".join(f"{l}->{p}" for l, p in enumerate(layout.initial)))
        lines.append("// @outperm " + " ".join(f"{l}->{p}" for l, p in enumerate(layout.final)))
    lines.append(f"qreg q[{circuit.width}];")
    if any(g.kind is GateKind.MEASURE for g in circuit.gates):
        lines.append(f"creg c[{circuit.width}];")
    for g in circuit.gates:
        if g.kind is GateKind.MEASURE:
            q = g.qubits[0]
            lines.append(f"measure q[{q}] -> c[{q}];")
            continue
        head = g.kind.value if g.angle is None else f"{g.kind.value}({_angle_text(g.angle)})"
        text = f"{head} " + ",".join(f"q[{q}]" for q in g.qubits) + ";"
        if g.tag is not None:
            text += f" // @edge({g.tag[0]},{g.tag[1]})"
        lines.append(text)
    return "\n".join(lines) + "\n"


def _angle_text(a: Angle) -> str:
    return str(a) if isinstance(a, Symbolic) else _fmt(a)


def parse(text: str) -> Circuit:
    width = None
    native = False
    phase = 0.0
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line, _, comment = raw.partition("//")
        line, comment = line.strip(), comment.strip()
        if not line:
            if comment == "@native":
                native = True
            elif comment.startswith("@global_phase"):
                phase = float(comment.split()[1])
            continue
        if line.startswith(("OPENQASM", "include", "creg")):
            continue
        if line.startswith("qreg"):
            m = re.match(r"^qreg\s+q\[(\d+)\];$", line)
            if not m or width is not None:
                raise CircuitError(f"line {lineno}: bad register declaration")
            width = int(m.group(1))
            continue
        if width is None:
            raise CircuitError(f"line {lineno}: gate before qreg")
        gates.append(_parse_gate(line, comment, lineno, width))
    if width is None:
        raise CircuitError("missing qreg declaration")
    try:
        return Circuit(width, tuple(gates), native, phase)
    except CircuitError as exc:
        raise CircuitError(f"width mismatch or invalid gate: {exc}") from None


def _parse_gate(line: str, comment: str, lineno: int, width: int) -> Gate:
    if line.startswith("measure"):
        m = re.match(r"^measure\s+q\[(\d+)\]\s*->\s*c\[\d+\];$", line)
        if not m:
            raise CircuitError(f"line {lineno}: malformed measure")
        return measure(int(m.group(1)))
    m = _GATE_RE.match(line)
    if not m:
        raise CircuitError(f"line {lineno}: malformed statement {line!r}")
    try:
        kind = GateKind(m.group("name"))
    except ValueError:
        raise CircuitError(f"line {lineno}: unknown gate {m.group('name')!r}") from None
    qubits = []
    for ref in m.group("ops").split(","):
        qm = _QREF_RE.match(ref.strip())
        if not qm:
            raise CircuitError(f"line {lineno}: bad operand {ref.strip()!r}")
        qubits.append(int(qm.group(1)))
    arg = m.group("arg")
    angle = parse_angle(arg) if arg is not None else None
    tag = None
    if comment:
        em = _EDGE_RE.match(comment.replace(" ", ""))
        if em:
            tag = (int(em.group(1)), int(em.group(2)))
    try:
        return Gate(kind, tuple(qubits), angle, tag)
    except CircuitError as exc:
        raise CircuitError(f"line {lineno}: {exc}") from None


_TOKEN_RE = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def parse_angle(text: str) -> Angle:
    """Parse a linear angle expression (numbers, ``pi``, parameter names, + - * / and parens)."""
    tokens = []
    for num, name, op in _TOKEN_RE.findall(text.strip()):
        if num:
            tokens.append(("num", float(num)))
        elif name:
            tokens.append(("num", math.pi) if name == "pi" else ("sym", name))
        elif op.strip():
            tokens.append(("op", op))
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take():
        nonlocal pos
        pos += 1
        return tokens[pos - 1]

    # Linear forms are (offset, {name: coeff}).
    def expr():
        acc = term()
        while peek() in (("op", "+"), ("op", "-")):
            sign = 1.0 if take()[1] == "+" else -1.0
            rhs = term()
            acc = (acc[0] + sign * rhs[0], _merge(acc[1], rhs[1], sign))
        return acc

    def term():
        acc = factor()
        while peek() in (("op", "*"), ("op", "/")):
            op = take()[1]
            rhs = factor()
            if op == "/":
                if rhs[1] or rhs[0] == 0:
                    raise CircuitError(f"bad division in angle {text!r}")
                acc = _scale(acc, 1.0 / rhs[0])
            elif not acc[1]:
                acc = _scale(rhs, acc[0])
            elif not rhs[1]:
                acc = _scale(acc, rhs[0])
            else:
                raise CircuitError(f"non-linear angle {text!r}")
        return acc

    def factor():
        kind, val = take() if pos < len(tokens) else (None, None)
        if kind == "num":
            return (val, {})
        if kind == "sym":
            return (0.0, {val: 1.0})
        if (kind, val) == ("op", "-"):
            return _scale(factor(), -1.0)
        if (kind, val) == ("op", "+"):
            return factor()
        if (kind, val) == ("op", "("):
            inner = expr()
            if take() != ("op", ")"):
                raise CircuitError(f"unbalanced parentheses in {text!r}")
            return inner
        raise CircuitError(f"malformed angle {text!r}")

    try:
        offset, terms = expr()
    except IndexError:
        raise CircuitError(f"malformed angle {text!r}") from None
    if pos != len(tokens):
        raise CircuitError(f"trailing tokens in angle {text!r}")
    terms = {n: c for n, c in terms.items() if c != 0.0}
    if not terms:
        return offset
    return Symbolic(tuple(sorted(terms.items())), offset)


def _merge(a: dict, b: dict, sign: float) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0.0) + sign * v
    return out


def _scale(form, k: float):
    return (form[0] * k, {n: c * k for n, c in form[1].items()})


def header_fields(text: str) -> dict[str, str]:
    """Collect ``// @key value`` header comments that precede the register line."""
    out = {}
    for raw in text.splitlines():
        s = raw.strip()
        if s.startswith("qreg"):
            break
        if s.startswith("// @"):
            key, _, value = s[4:].partition(" ")
            out[key] = value.strip()
    return out


__all__ = [
    "Angle", "Circuit", "CircuitError", "Gate", "GateKind", "NATIVE_KINDS", "Symbolic",
    "canonical_edge", "cx", "h", "header_fields", "measure", "parse", "parse_angle",
    "rx", "rz", "rzz", "serialize", "swap", "sx", "two_qubit_count", "x",
]
