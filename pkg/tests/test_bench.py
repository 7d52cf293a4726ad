import csv
import json

import pytest

from qprecomp.bench import (COLUMNS, BenchmarkConfig, BenchmarkError, BenchmarkRecord, inversions,
                            median_time, monotonicity, read_records, run_benchmark, summarize)
from qprecomp.pipeline import precompile
from qprecomp.ir import two_qubit_count
from qprecomp.topology import select_device, default_catalog


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("bench") / "r.csv"
    cfg = BenchmarkConfig(problem="satellite", n_min=4, n_max=9, n_step=5, mode="1", p=0.4, reps=2,
                          seeds=(0, 1), repeats=2, out=str(out))
    return cfg, run_benchmark(cfg), out


def test_records_and_csv(small_run):
    cfg, records, out = small_run
    assert len(records) == 2 * 2 * 2
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == COLUMNS
    assert {r["schema"] for r in rows} == {"1"}
    assert read_records(out) == records


def test_record_invariants(small_run):
    cfg, records, _ = small_run
    for r in records:
        assert min(r.t_adjust, r.t_full_L0, r.t_full_L3, r.t_precompile) >= 0
        assert min(r.cx_adjusted, r.cx_full_L0, r.cx_full_L3) >= 0
        assert r.equivalence_checked == ("true" if r.n <= 8 else "na")


def test_zeroing_count_equals_template(small_run):
    cfg, records, _ = small_run
    for n in cfg.n_grid:
        t = precompile(cfg.problem, n, cfg.mode, cfg.reps, select_device(default_catalog(), n))
        zero = [r for r in records if r.n == n and r.adjust_mode == "zeroing"]
        assert zero and all(r.cx_adjusted == two_qubit_count(t.circuit) for r in zero)


def test_full_probability_rows_agree():
    recs = run_benchmark(BenchmarkConfig(n_min=5, n_max=5, p=1.0, reps=1, repeats=1))
    light, zero = (next(r for r in recs if r.adjust_mode == m) for m in ("lightweight", "zeroing"))
    assert light.cx_adjusted == zero.cx_adjusted


def test_summary(small_run):
    _, records, _ = small_run
    rows = summarize(records)
    assert len(rows) == 4 and all(r.samples == 2 for r in rows)
    for r in rows:
        assert r.speedup_L3 == pytest.approx(r.t_full_L3 / r.t_adjust)
        assert r.within_L0 == (r.cx_adjusted <= r.cx_full_L0)
    assert set(monotonicity(rows)) == {("satellite", 0.4, "1", "lightweight"), ("satellite", 0.4, "1", "zeroing")}


def test_speedup_is_one_when_times_match():
    r = BenchmarkRecord("maxcut", 5, 0.5, "1", 0, "q", 1, "zeroing", 0.1, 0.2, 0.2, 0.2, 1, 1, 1, "true")
    assert summarize([r])[0].speedup_L0 == 1.0


def test_inversions():
    assert inversions([1, 2, 3]) == 0
    assert inversions([1, 3, 2, 4, 3]) == 2


def test_median_time_discards_warmup():
    calls = []
    assert median_time(lambda: calls.append(1), repeats=5) >= 0
    assert len(calls) == 6


@pytest.mark.parametrize("kwargs", [dict(n_min=10, n_max=5), dict(p=1.5), dict(reps=0), dict(seeds=())])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        BenchmarkConfig(**kwargs)


def test_config_json_round_trip(tmp_path):
    cfg = BenchmarkConfig(problem="satellite", mode="all", seeds=(3, 4), adjust_modes=("zeroing",))
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_json()))
    assert BenchmarkConfig.load(path) == cfg
    with pytest.raises(ValueError):
        BenchmarkConfig.from_json({"bogus": 1})


def test_catalog_too_small(tmp_path):
    (tmp_path / "q.txt").write_text(select_device(default_catalog(), 5).to_text())
    with pytest.raises(BenchmarkError):
        run_benchmark(BenchmarkConfig(n_min=5, n_max=10, devices=str(tmp_path)))
