"""Full compilation at runtime versus pre-compilation plus adjustment.

Optimization levels are this package's own:

* ``L0``: identity placement, one forward routing pass, no cleanup.
* ``L3``: a perfect placement when one exists, otherwise the best of several
  placements refined by forward/backward routing; then routing and
  :func:`cancel_pass` to a fixpoint.

Templates are compiled at ``L3`` with every tagged CX-RZ-CX triple held
intact, so adjusting one is a single pass over its gate list.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .encode import (AnticipationMode, ParameterSet, Problem, ProblemInstance, anticipate, encode,
                     encode_instance, parameter_values)
from .ir import Circuit, Gate, GateKind, Symbolic, parse, serialize
from .passes import BindingError, bind_parameters, cancel_pass
from .route import Layout, choose_layout, route, verify_mapped
from .synth import synthesize
from .topology import CouplingMap, TopologyError

Edge = tuple[int, int]


class OptLevel(str, enum.Enum):
    L0 = "L0"
    L3 = "L3"


class AdjustMode(str, enum.Enum):
    ZEROING = "zeroing"
    LIGHTWEIGHT = "lightweight"


class DeletionOnlyViolation(ValueError):
    """The instance needs an interaction the template never anticipated."""


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class PrecompiledTemplate:
    circuit: Circuit
    tag_index: dict[Edge, tuple[int, ...]]
    layout: Layout
    device: str
    mode: AnticipationMode
    problem: Problem
    n: int
    reps: int

    @property
    def anticipated(self) -> frozenset[Edge]:
        return frozenset(self.tag_index)

    @cached_property
    def binding_plan(self) -> tuple[tuple[Symbolic, ...], tuple[tuple[int, int], ...]]:
        """Distinct symbolic angles, and (position, expression index) for every symbolic gate.

        Built once per template so an adjustment resolves each expression only once.
        """
        exprs: dict[Symbolic, int] = {}
        slots = []
        for pos, g in enumerate(self.circuit.gates):
            if isinstance(g.angle, Symbolic):
                slots.append((pos, exprs.setdefault(g.angle, len(exprs))))
        return tuple(exprs), tuple(slots)


def _compile(circuit: Circuit, device: CouplingMap, level: OptLevel, protect_tagged: bool = False):
    if circuit.width > device.size:
        raise TopologyError(f"{device.name} has {device.size} qubits, circuit needs {circuit.width}")
    native = synthesize(circuit)
    if level is OptLevel.L0:
        layout = Layout.trivial(circuit.width)
    else:
        layout = choose_layout(native, device)
    mapped, layout = route(native, device, layout)
    if level is OptLevel.L3:
        mapped = cancel_pass(mapped, protect_tagged=protect_tagged)
    return mapped, layout


def full_compile(instance: ProblemInstance, params: ParameterSet, device: CouplingMap,
                 level: OptLevel | str = OptLevel.L3) -> tuple[Circuit, Layout]:
    """Encode exactly ``instance``, bind, synthesize, map, and optionally optimize."""
    circuit = encode_instance(instance, params.reps)
    circuit = bind_parameters(circuit, parameter_values(instance, params))
    return _compile(circuit, device, OptLevel(level))


def build_tag_index(circuit: Circuit) -> dict[Edge, tuple[int, ...]]:
    index: dict[Edge, list[int]] = {}
    for pos, g in enumerate(circuit.gates):
        if g.tag is not None:
            index.setdefault(g.tag, []).append(pos)
    return {e: tuple(ps) for e, ps in sorted(index.items())}


def check_template(t: PrecompiledTemplate) -> None:
    """Raise TemplateError unless every anticipated edge owns ``reps`` intact contiguous triples."""
    gates = t.circuit.gates
    expected = frozenset(anticipate(t.n, t.mode))
    if t.anticipated != expected:
        raise TemplateError("tag index does not cover the anticipated edges")
    for edge, positions in t.tag_index.items():
        if len(positions) != 3 * t.reps:
            raise TemplateError(f"edge {edge}: {len(positions)} tagged gates, expected {3 * t.reps}")
        for k in range(0, len(positions), 3):
            i, j, m = positions[k:k + 3]
            if not (j == i + 1 and m == i + 2):
                raise TemplateError(f"edge {edge}: triple at {i} is not contiguous")
            a, b, c = gates[i], gates[j], gates[m]
            if not (a.kind is GateKind.CX and b.kind is GateKind.RZ and c.kind is GateKind.CX
                    and a.qubits == c.qubits and b.qubits == (a.qubits[1],)
                    and a.tag == b.tag == c.tag == edge):
                raise TemplateError(f"edge {edge}: triple at {i} is not CX-RZ-CX")


def precompile(problem: Problem | str, n: int, mode: AnticipationMode | str, reps: int,
               device: CouplingMap) -> PrecompiledTemplate:
    """Compile the anticipated encoding once, before any instance is known."""
    problem, mode = Problem(problem), AnticipationMode.parse(mode)
    circuit = encode(problem, anticipate(n, mode), n, reps)
    mapped, layout = _compile(circuit, device, OptLevel.L3, protect_tagged=True)
    template = PrecompiledTemplate(mapped, build_tag_index(mapped), layout, device.name, mode,
                                   problem, n, reps)
    check_template(template)
    return template


def adjust(template: PrecompiledTemplate, instance: ProblemInstance, params: ParameterSet,
           mode: AdjustMode | str = AdjustMode.LIGHTWEIGHT) -> Circuit:
    """Specialise ``template`` to ``instance`` by neutralising or deleting absent edges.

    Zeroing sets the RZ of every absent edge's triples to 0 and keeps the gate
    count. Lightweight deletes those triples and runs one cancellation pass.
    Both bind all parameters, and neither inserts a gate.
    """
    mode = AdjustMode(mode)
    if instance.problem is not template.problem or instance.n != template.n:
        raise DeletionOnlyViolation(
            f"template is {template.problem.value}/n={template.n}, instance is "
            f"{instance.problem.value}/n={instance.n}")
    extra = instance.edges - template.tag_index.keys()
    if extra:
        raise DeletionOnlyViolation(f"edges {sorted(extra)} were not anticipated; only deletion is allowed")
    if params.reps != template.reps:
        raise BindingError(f"template has {template.reps} repetitions, parameters have {params.reps}")
    values = parameter_values(instance, params)
    exprs, slots = template.binding_plan
    try:
        resolved = [e.resolve(values) for e in exprs]
    except KeyError as exc:
        raise BindingError(str(exc.args[0])) from None

    src = template.circuit
    gates = list(src.gates)
    for pos, k in slots:
        gates[pos] = gates[pos].with_angle(resolved[k])
    absent = [ps for edge, ps in template.tag_index.items() if edge not in instance.edges]
    if mode is AdjustMode.ZEROING:
        for positions in absent:
            for pos in positions[1::3]:
                gates[pos] = gates[pos].with_angle(0.0)
        return Circuit.unchecked(src.width, gates, src.native, src.global_phase)
    # Each absent triple occupies three consecutive slots; blank them, then drop the blanks.
    for positions in absent:
        for pos in positions:
            gates[pos] = None
    kept = [g for g in gates if g is not None]
    return cancel_pass(Circuit.unchecked(src.width, kept, src.native, src.global_phase))


# ---------------------------------------------------------------------------
# Persistence: <stem>.qasm holds the circuit (layout in header comments),
# <stem>.json the remaining template metadata.

TEMPLATE_SCHEMA = 1


def save_template(template: PrecompiledTemplate, stem) -> tuple[Path, Path]:
    stem = Path(stem)
    qasm, meta = stem.with_suffix(".qasm"), stem.with_suffix(".json")
    qasm.write_text(serialize(template.circuit, template.layout), encoding="utf-8")
    meta.write_text(json.dumps({
        "schema": TEMPLATE_SCHEMA,
        "class": template.problem.value,
        "n": template.n,
        "mode": template.mode.value,
        "reps": template.reps,
        "device": template.device,
        "layout": {"logical_to_physical": list(template.layout.logical_to_physical),
                   "output_permutation": list(template.layout.output_permutation)},
        "tag_index": {f"{a},{b}": list(ps) for (a, b), ps in template.tag_index.items()},
    }, indent=1) + "\n", encoding="utf-8")
    return qasm, meta


def load_template(stem) -> PrecompiledTemplate:
    stem = Path(stem)
    circuit = parse(stem.with_suffix(".qasm").read_text(encoding="utf-8"))
    meta = json.loads(stem.with_suffix(".json").read_text(encoding="utf-8"))
    if meta.get("schema") != TEMPLATE_SCHEMA:
        raise TemplateError(f"unsupported template schema {meta.get('schema')!r}")
    lay = meta["layout"]
    tag_index = {}
    for key, ps in meta["tag_index"].items():
        a, b = (int(s) for s in key.split(","))
        tag_index[(a, b)] = tuple(ps)
    template = PrecompiledTemplate(
        circuit, tag_index,
        Layout(tuple(lay["logical_to_physical"]), tuple(lay["output_permutation"])),
        meta["device"], AnticipationMode.parse(meta["mode"]), Problem(meta["class"]),
        int(meta["n"]), int(meta["reps"]))
    if build_tag_index(circuit) != tag_index:
        raise TemplateError("tag index does not match the circuit's tags")
    check_template(template)
    return template


__all__ = [
    "AdjustMode", "DeletionOnlyViolation", "OptLevel", "PrecompiledTemplate", "TemplateError",
    "adjust", "build_tag_index", "check_template", "full_compile", "load_template", "precompile",
    "save_template", "verify_mapped",
]
