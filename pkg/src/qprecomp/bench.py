"""Benchmark harness: runtime and two-qubit-gate comparison of adjust versus full compilation.

One record per (n, seed, adjust mode). Full-compile timings and counts do not
depend on the adjust mode, so they are measured once per (n, seed) and shared
by that point's records.
"""
from __future__ import annotations

import csv
import json
import statistics
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .encode import AnticipationMode, ParameterSet, Problem, sample_instance
from .ir import two_qubit_count
from .pipeline import AdjustMode, OptLevel, adjust, full_compile, precompile
from .route import verify_mapped
from .topology import DeviceCatalog, default_catalog, load_catalog, select_device
from .verify import MAX_EQUIV_LOGICAL, equivalent

CSV_SCHEMA = 1


class BenchmarkError(RuntimeError):
    pass


@dataclass(frozen=True)
class BenchmarkConfig:
    problem: Problem = Problem.MAXCUT
    n_min: int = 5
    n_max: int = 100
    n_step: int = 5
    mode: AnticipationMode = AnticipationMode.SUCCESSOR
    p: float = 0.3
    reps: int = 3
    seeds: tuple[int, ...] = (0,)
    adjust_modes: tuple[AdjustMode, ...] = (AdjustMode.LIGHTWEIGHT, AdjustMode.ZEROING)
    devices: str | None = None
    out: str | None = None
    repeats: int = 5
    check_equivalence: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "problem", Problem(self.problem))
        object.__setattr__(self, "mode", AnticipationMode.parse(self.mode))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "adjust_modes", tuple(AdjustMode(m) for m in self.adjust_modes))
        if not 2 <= self.n_min <= self.n_max or self.n_step < 1:
            raise ValueError(f"bad n grid: {self.n_min}..{self.n_max} step {self.n_step}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.reps < 1 or self.repeats < 1:
            raise ValueError("reps and repeats must be positive")
        if not self.seeds or not self.adjust_modes:
            raise ValueError("need at least one seed and one adjust mode")

    @property
    def n_grid(self) -> list[int]:
        return list(range(self.n_min, self.n_max + 1, self.n_step))

    def catalog(self) -> DeviceCatalog:
        return default_catalog() if self.devices is None else load_catalog(self.devices)

    def to_json(self) -> dict:
        d = asdict(self)
        d["problem"] = self.problem.value
        d["mode"] = self.mode.value
        d["seeds"] = list(self.seeds)
        d["adjust_modes"] = [m.value for m in self.adjust_modes]
        return d

    @classmethod
    def from_json(cls, data: dict) -> "BenchmarkConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "BenchmarkConfig":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class BenchmarkRecord:
    problem: str
    n: int
    p: float
    e: str
    seed: int
    device: str
    reps: int
    adjust_mode: str
    t_precompile: float
    t_adjust: float
    t_full_L0: float
    t_full_L3: float
    cx_adjusted: int
    cx_full_L0: int
    cx_full_L3: int
    equivalence_checked: str
    schema: int = field(default=CSV_SCHEMA)


# CSV column order; ``class`` is the problem column's public name.
COLUMNS = ["schema", "class", "n", "p", "e", "seed", "device", "reps", "adjust_mode", "t_precompile",
           "t_adjust", "t_full_L0", "t_full_L3", "cx_adjusted", "cx_full_L0", "cx_full_L3",
           "equivalence_checked"]


def median_time(fn: Callable[[], object], repeats: int = 5) -> float:
    """Median wall time of ``fn`` over ``repeats`` runs after one discarded warm-up."""
    fn()
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def run_benchmark(config: BenchmarkConfig, progress: Callable[[str], None] | None = None
                  ) -> list[BenchmarkRecord]:
    catalog = config.catalog()
    if config.n_max > catalog.max_size:
        raise BenchmarkError(f"device catalog holds at most {catalog.max_size} qubits, "
                             f"grid needs {config.n_max}")
    records: list[BenchmarkRecord] = []
    for n in config.n_grid:
        device = select_device(catalog, n)
        t0 = time.perf_counter()
        template = precompile(config.problem, n, config.mode, config.reps, device)
        t_pre = time.perf_counter() - t0
        for seed in config.seeds:
            inst = sample_instance(config.problem, n, config.mode, config.p, seed=seed)
            params = ParameterSet.random(config.reps, seed)
            compiled = {}
            times = {}
            for level in (OptLevel.L0, OptLevel.L3):
                compiled[level] = full_compile(inst, params, device, level)
                times[level] = median_time(lambda: full_compile(inst, params, device, level),
                                           config.repeats)
            for mode in config.adjust_modes:
                adjusted = adjust(template, inst, params, mode)
                t_adj = median_time(lambda: adjust(template, inst, params, mode), config.repeats)
                if not verify_mapped(adjusted, device):
                    raise BenchmarkError(f"n={n} seed={seed} {mode.value}: adjusted circuit is not mapped")
                checked = "na"
                if config.check_equivalence and n <= MAX_EQUIV_LOGICAL:
                    ref, ref_layout = compiled[OptLevel.L0]
                    if not equivalent(adjusted, ref, template.layout, ref_layout):
                        raise BenchmarkError(
                            f"equivalence failed: {config.problem.value} n={n} seed={seed} "
                            f"mode={mode.value} edges={sorted(inst.edges)}")
                    checked = "true"
                records.append(BenchmarkRecord(
                    problem=config.problem.value, n=n, p=config.p, e=config.mode.value, seed=seed,
                    device=device.name, reps=config.reps, adjust_mode=mode.value,
                    t_precompile=t_pre, t_adjust=t_adj,
                    t_full_L0=times[OptLevel.L0], t_full_L3=times[OptLevel.L3],
                    cx_adjusted=two_qubit_count(adjusted),
                    cx_full_L0=two_qubit_count(compiled[OptLevel.L0][0]),
                    cx_full_L3=two_qubit_count(compiled[OptLevel.L3][0]),
                    equivalence_checked=checked))
                if progress is not None:
                    r = records[-1]
                    progress(f"n={n:3d} seed={seed} {mode.value:11s} adjust {r.t_adjust * 1e3:8.3f} ms  "
                             f"L0 x{r.t_full_L0 / r.t_adjust:7.1f}  L3 x{r.t_full_L3 / r.t_adjust:7.1f}  "
                             f"cx {r.cx_adjusted}/{r.cx_full_L0}/{r.cx_full_L3}")
    if config.out is not None:
        write_records(records, config.out)
    return records


def _row(r: BenchmarkRecord) -> dict:
    d = asdict(r)
    d["class"] = d.pop("problem")
    return d


def write_records(records: Iterable[BenchmarkRecord], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=COLUMNS)
        w.writeheader()
        for r in records:
            w.writerow(_row(r))
    return path


def read_records(path) -> list[BenchmarkRecord]:
    out = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if int(row["schema"]) != CSV_SCHEMA:
                raise BenchmarkError(f"unsupported CSV schema {row['schema']!r}")
            out.append(BenchmarkRecord(
                problem=row["class"], n=int(row["n"]), p=float(row["p"]), e=row["e"],
                seed=int(row["seed"]), device=row["device"], reps=int(row["reps"]),
                adjust_mode=row["adjust_mode"], t_precompile=float(row["t_precompile"]),
                t_adjust=float(row["t_adjust"]), t_full_L0=float(row["t_full_L0"]),
                t_full_L3=float(row["t_full_L3"]), cx_adjusted=int(row["cx_adjusted"]),
                cx_full_L0=int(row["cx_full_L0"]), cx_full_L3=int(row["cx_full_L3"]),
                equivalence_checked=row["equivalence_checked"]))
    return out


@dataclass(frozen=True)
class SummaryRow:
    problem: str
    n: int
    p: float
    e: str
    adjust_mode: str
    samples: int
    t_adjust: float
    t_full_L0: float
    t_full_L3: float
    speedup_L0: float
    speedup_L3: float
    cx_adjusted: float
    cx_full_L0: float
    cx_full_L3: float
    ratio_L0: float
    ratio_L3: float
    within_L0: bool


def summarize(records: Sequence[BenchmarkRecord]) -> list[SummaryRow]:
    """Per-(class, n, p, e, mode) medians; speedups are ratios of median times."""
    if not records:
        raise ValueError("nothing to summarize")
    groups: dict[tuple, list[BenchmarkRecord]] = {}
    for r in records:
        groups.setdefault((r.problem, r.n, r.p, r.e, r.adjust_mode), []).append(r)
    rows = []
    for key in sorted(groups):
        rs = groups[key]

        def med(attr):
            return statistics.median(getattr(r, attr) for r in rs)

        t_adj, t0, t3 = med("t_adjust"), med("t_full_L0"), med("t_full_L3")
        ca, c0, c3 = med("cx_adjusted"), med("cx_full_L0"), med("cx_full_L3")
        rows.append(SummaryRow(
            *key, samples=len(rs), t_adjust=t_adj, t_full_L0=t0, t_full_L3=t3,
            speedup_L0=t0 / t_adj if t_adj > 0 else float("inf"),
            speedup_L3=t3 / t_adj if t_adj > 0 else float("inf"),
            cx_adjusted=ca, cx_full_L0=c0, cx_full_L3=c3,
            ratio_L0=ca / c0 if c0 else (1.0 if ca == 0 else float("inf")),
            ratio_L3=ca / c3 if c3 else (1.0 if ca == 0 else float("inf")),
            within_L0=ca <= c0))
    return rows


def inversions(values: Sequence[float]) -> int:
    """Number of adjacent decreases in ``values``."""
    return sum(1 for a, b in zip(values, values[1:]) if b < a)


def monotonicity(rows: Sequence[SummaryRow], attr: str = "speedup_L3") -> dict[tuple, int]:
    """Inversions of ``attr`` along n for every (class, p, e, mode) series."""
    series: dict[tuple, list[SummaryRow]] = {}
    for r in rows:
        series.setdefault((r.problem, r.p, r.e, r.adjust_mode), []).append(r)
    return {k: inversions([getattr(r, attr) for r in sorted(v, key=lambda r: r.n)])
            for k, v in series.items()}


def write_summary(rows: Sequence[SummaryRow], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = ["class"] + [f.name for f in fields(SummaryRow)][1:]
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for r in rows:
            w.writerow(list(asdict(r).values()))
    return path


def format_summary(rows: Sequence[SummaryRow]) -> str:
    head = (f"{'class':9s} {'n':>4s} {'p':>4s} {'e':>3s} {'mode':11s} {'adjust ms':>10s} "
            f"{'xL0':>7s} {'xL3':>7s} {'cx adj':>7s} {'cx L0':>7s} {'cx L3':>7s} {'adj/L3':>7s}")
    lines = [head]
    for r in rows:
        lines.append(f"{r.problem:9s} {r.n:4d} {r.p:4.2f} {r.e:>3s} {r.adjust_mode:11s} "
                     f"{r.t_adjust * 1e3:10.3f} {r.speedup_L0:7.1f} {r.speedup_L3:7.1f} "
                     f"{r.cx_adjusted:7.0f} {r.cx_full_L0:7.0f} {r.cx_full_L3:7.0f} {r.ratio_L3:7.2f}")
    for key, inv in sorted(monotonicity(rows).items()):
        lines.append(f"speedup vs L3 over n, {'/'.join(map(str, key))}: {inv} inversion(s)")
    return "\n".join(lines)


__all__ = [
    "BenchmarkConfig", "BenchmarkError", "BenchmarkRecord", "COLUMNS", "CSV_SCHEMA", "SummaryRow",
    "format_summary", "inversions", "median_time", "monotonicity", "read_records", "run_benchmark",
    "summarize", "write_records", "write_summary",
]
