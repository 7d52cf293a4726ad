"""Command line: ``qprecomp <subcommand>``; each pipeline stage runs on its own."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .bench import (BenchmarkConfig, format_summary, read_records, run_benchmark, summarize,
                    write_summary)
from .encode import ParameterSet, Problem, ProblemInstance, sample_instance
from .ir import parse, serialize, two_qubit_count
from .pipeline import AdjustMode, OptLevel, adjust, full_compile, load_template, precompile, save_template
from .route import Layout, verify_mapped
from .topology import default_catalog, load_catalog, select_device
from .verify import equivalent


def _catalog(args):
    return default_catalog() if args.devices is None else load_catalog(args.devices)


def _params(args, reps: int) -> ParameterSet:
    if getattr(args, "params", None):
        return ParameterSet.from_json(json.loads(Path(args.params).read_text(encoding="utf-8")))
    return ParameterSet.random(reps, args.seed)


def _write(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_sample(args) -> int:
    inst = sample_instance(args.problem, args.n, args.e, args.p, seed=args.seed)
    _write(json.dumps(inst.to_json(), indent=2) + "\n", args.out)
    return 0


def cmd_precompile(args) -> int:
    device = select_device(_catalog(args), args.n)
    template = precompile(args.problem, args.n, args.e, args.reps, device)
    qasm, meta = save_template(template, args.out)
    print(f"{template.problem.value} n={template.n} e={template.mode.value} reps={template.reps} "
          f"on {device.name}: {two_qubit_count(template.circuit)} CX -> {qasm}, {meta}")
    return 0


def cmd_adjust(args) -> int:
    template = load_template(args.template)
    inst = ProblemInstance.load(args.instance)
    circuit = adjust(template, inst, _params(args, template.reps), args.adjust)
    _write(serialize(circuit, template.layout), args.out)
    print(f"{args.adjust}: {two_qubit_count(circuit)} CX", file=sys.stderr)
    return 0


def cmd_compile(args) -> int:
    inst = ProblemInstance.load(args.instance)
    device = select_device(_catalog(args), inst.n)
    circuit, layout = full_compile(inst, _params(args, args.reps), device, args.level)
    _write(serialize(circuit, layout), args.out)
    print(f"{args.level} on {device.name}: {two_qubit_count(circuit)} CX", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    texts = [Path(p).read_text(encoding="utf-8") for p in (args.a, args.b)]
    circuits = [parse(t) for t in texts]
    layouts = [Layout.from_qasm(t) for t in texts]
    if args.device is not None:
        device = _catalog(args).by_name(args.device)
        for path, c in zip((args.a, args.b), circuits):
            if c.native and not verify_mapped(c, device):
                print(f"{path}: not executable on {device.name}")
                return 1
    ok = equivalent(circuits[0], circuits[1], layouts[0], layouts[1], tol=args.tol)
    print("equivalent" if ok else "NOT equivalent")
    return 0 if ok else 1


def _bench_config(args) -> BenchmarkConfig:
    config = BenchmarkConfig.load(args.config) if args.config else BenchmarkConfig()
    overrides = {}
    for key, attr in [("problem", "problem"), ("n_min", "n_min"), ("n_max", "n_max"),
                      ("n_step", "n_step"), ("e", "mode"), ("p", "p"), ("reps", "reps"),
                      ("devices", "devices"), ("out", "out"), ("repeats", "repeats")]:
        value = getattr(args, key)
        if value is not None:
            overrides[attr] = value
    if args.seed is not None:
        overrides["seeds"] = tuple(range(args.seed, args.seed + args.seeds))
    if args.adjust is not None:
        overrides["adjust_modes"] = (args.adjust,)
    return replace(config, **overrides)


def cmd_bench(args) -> int:
    config = _bench_config(args)
    records = run_benchmark(config, progress=None if args.quiet else print)
    print(format_summary(summarize(records)))
    if config.out:
        print(f"wrote {len(records)} records to {config.out}")
    return 0


def cmd_summarize(args) -> int:
    rows = summarize(read_records(args.input))
    print(format_summary(rows))
    if args.out:
        write_summary(rows, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qprecomp", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_reps=True):
        p.add_argument("--devices", help="device catalog: directory of *.txt maps or a list file")
        p.add_argument("--seed", type=int, default=0, help="seed for random QAOA angles")
        if with_reps:
            p.add_argument("--reps", type=int, default=3)

    p = sub.add_parser("sample", help="draw a random instance as JSON")
    p.add_argument("--class", dest="problem", choices=[c.value for c in Problem], default="maxcut")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--e", choices=["all", "1"], default="1")
    p.add_argument("--p", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("precompile", help="compile the anticipated encoding into a template")
    p.add_argument("--class", dest="problem", choices=[c.value for c in Problem], default="maxcut")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--e", choices=["all", "1"], default="1")
    p.add_argument("--out", required=True, help="template stem; writes <stem>.qasm and <stem>.json")
    common(p)
    p.set_defaults(func=cmd_precompile)

    p = sub.add_parser("adjust", help="specialise a template to an instance")
    p.add_argument("--template", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--params", help="JSON with 'cost' and 'mixer' lists; random if omitted")
    p.add_argument("--adjust", choices=[m.value for m in AdjustMode], default="lightweight")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_adjust)

    p = sub.add_parser("compile", help="full compilation of one instance (baseline)")
    p.add_argument("--instance", required=True)
    p.add_argument("--params")
    p.add_argument("--level", choices=[lv.value for lv in OptLevel], default="L3")
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("verify", help="check two QASM circuits for equivalence")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--device", help="also check native circuits are executable on this device")
    p.add_argument("--devices")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run the benchmark grid and write CSV")
    p.add_argument("--config", help="BenchmarkConfig as JSON; flags override it")
    p.add_argument("--class", dest="problem", choices=[c.value for c in Problem])
    p.add_argument("--n-min", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--n-step", type=int)
    p.add_argument("--e", choices=["all", "1"])
    p.add_argument("--p", type=float)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int, help="first seed")
    p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    p.add_argument("--adjust", choices=[m.value for m in AdjustMode], help="only this adjust mode")
    p.add_argument("--repeats", type=int, help="timing repetitions per measurement")
    p.add_argument("--devices")
    p.add_argument("--out")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("summarize", help="medians, speedups and gate ratios from a benchmark CSV")
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(func=cmd_summarize)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
