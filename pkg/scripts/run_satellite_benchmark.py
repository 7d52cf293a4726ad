"""Satellite mission-planning sweep (e=1, p=0.4): adjust versus full compilation."""
from __future__ import annotations

import argparse
from pathlib import Path

from qprecomp.bench import BenchmarkConfig, format_summary, run_benchmark, summarize, write_summary


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=0.4)
    ap.add_argument("--n-max", type=int, default=100)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--out", default="results/satellite.csv")
    args = ap.parse_args(argv)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    config = BenchmarkConfig(problem="satellite", mode="1", p=args.p, n_max=args.n_max,
                             seeds=tuple(range(args.seeds)), repeats=args.repeats, out=str(out))
    records = run_benchmark(config, progress=print)
    rows = summarize(records)
    write_summary(rows, out.with_name(out.stem + "_summary.csv"))
    print(format_summary(rows))


if __name__ == "__main__":
    main()
