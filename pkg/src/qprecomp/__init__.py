"""Pre-compiled QAOA circuits adjusted per instance by gate deletion.

Typical use::

    from qprecomp import precompile, adjust, sample_instance, ParameterSet, washington

    template = precompile("maxcut", 100, "1", reps=3, device=washington())
    inst = sample_instance("maxcut", 100, "1", p=0.7, seed=1)
    circuit = adjust(template, inst, ParameterSet.random(3, seed=1))
"""
from .encode import (AnticipationMode, ParameterSet, Problem, ProblemInstance, anticipate, encode,
                     encode_instance, parameter_values, sample_instance)
from .ir import Circuit, CircuitError, Gate, GateKind, Symbolic, parse, serialize, two_qubit_count
from .passes import BindingError, bind_parameters, cancel_pass
from .pipeline import (AdjustMode, DeletionOnlyViolation, OptLevel, PrecompiledTemplate, TemplateError,
                       adjust, full_compile, load_template, precompile, save_template)
from .route import Layout, RoutingError, route, verify_mapped
from .synth import synthesize
from .topology import (CouplingMap, DeviceCatalog, TopologyError, complete, default_catalog, line,
                       load_catalog, load_coupling, montreal, quito, select_device, washington)
from .verify import brute_force_maxcut, brute_force_satellite, decode, equivalent, simulate

__version__ = "0.1.0"

__all__ = [
    "AdjustMode", "AnticipationMode", "BindingError", "Circuit", "CircuitError", "CouplingMap",
    "DeletionOnlyViolation", "DeviceCatalog", "Gate", "GateKind", "Layout", "OptLevel", "ParameterSet",
    "PrecompiledTemplate", "Problem", "ProblemInstance", "RoutingError", "Symbolic", "TemplateError",
    "TopologyError", "adjust", "anticipate", "bind_parameters", "brute_force_maxcut",
    "brute_force_satellite", "cancel_pass", "complete", "decode", "default_catalog", "encode",
    "encode_instance", "equivalent", "full_compile", "line", "load_catalog", "load_coupling",
    "load_template", "montreal", "parameter_values", "parse", "precompile", "quito", "route",
    "sample_instance", "save_template", "select_device", "serialize", "simulate", "synthesize",
    "two_qubit_count", "verify_mapped", "washington",
]
