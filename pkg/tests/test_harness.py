import math

import numpy as np
import pytest

from radloc.harness import (
    GUARANTEED,
    RECORD_FIELDS,
    UNGUARANTEED,
    Ellipse,
    SweepConfig,
    aggregate,
    emit_csv,
    emit_table_csv,
    read_records,
    read_table,
    run_example_spurious,
    run_sweep,
    sample_trial,
    trial_seed,
)


def test_example_spurious_records():
    base, conv = run_example_spurious()
    assert base.algorithm == "baseline" and conv.algorithm == "convex"
    assert math.hypot(base.est_x - 3, base.est_y - 3) <= 1e-3 and base.spurious
    assert math.hypot(conv.est_x, conv.est_y) <= 1e-3 and not conv.spurious
    assert base.sq_error == pytest.approx(18, abs=1e-6)
    assert run_example_spurious() == (base, conv)


def test_trial_seeds_and_sampling():
    cfg = SweepConfig(master_seed=12, trials=3)
    assert trial_seed(12, 5) == 12 ^ 5
    src, init = sample_trial(cfg, 2)
    src2, init2 = sample_trial(cfg, 2)
    assert np.array_equal(src, src2) and np.array_equal(init, init2)
    assert np.all(np.abs(src) <= 10) and np.all(np.abs(init) <= 10)
    assert not np.array_equal(src, sample_trial(cfg, 3)[0])


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(sigma_grid=())
    with pytest.raises(ValueError):
        SweepConfig(trials=0)
    with pytest.raises(ValueError):
        SweepConfig(algorithms=("newton",))
    with pytest.raises(ValueError):
        SweepConfig(box_lower=(1, 1), box_upper=(0, 2))


@pytest.fixture(scope="module")
def small_sweep():
    cfg = SweepConfig(trials=40, sigma_grid=(0.0, 2.0), master_seed=3)
    return cfg, *run_sweep(cfg)


def test_sweep_record_layout(small_sweep):
    cfg, records, table = small_sweep
    assert len(records) == 40 * 2 * 2
    assert [r.trial_id for r in records] == sorted(r.trial_id for r in records)
    for r in records:
        if not r.failure:
            assert r.sq_error == pytest.approx((r.est_x - r.true_x) ** 2 + (r.est_y - r.true_y) ** 2, rel=1e-12)
        assert r.target_class in (GUARANTEED, UNGUARANTEED)


def test_noise_free_convex_always_converges(small_sweep):
    _, records, table = small_sweep
    for r in records:
        if r.sigma_db == 0 and r.algorithm == "convex":
            assert r.converged and r.sq_error <= 1e-6
    row = next(t for t in table if t["sigma_db"] == 0 and t["algorithm"] == "convex" and t["class"] == "all")
    assert row["mean_sq_error"] <= 1e-8


def test_baseline_failures_only_in_unguaranteed_class(small_sweep):
    _, records, _ = small_sweep
    for r in records:
        if r.sigma_db == 0 and r.algorithm == "baseline" and r.target_class == GUARANTEED:
            assert r.converged and r.sq_error <= 1e-6


def test_aggregation_matches_rows(small_sweep):
    _, records, table = small_sweep
    for row in table:
        errs = [r.sq_error for r in records if r.sigma_db == row["sigma_db"] and r.algorithm == row["algorithm"]
                and (row["class"] == "all" or r.target_class == row["class"]) and not r.failure]
        assert row["trial_count"] == len(errs)
        assert row["mean_sq_error"] == pytest.approx(np.mean(errs), rel=1e-12, abs=1e-300)


def test_csv_round_trip(tmp_path, small_sweep):
    _, records, table = small_sweep
    path = emit_csv(records, tmp_path / "r.csv")
    assert read_records(path) == records
    tpath = emit_table_csv(table, tmp_path / "t.csv")
    assert read_table(tpath) == table
    assert path.read_bytes().count(b"\r") == 0


def test_csv_header_only_and_two_rows(tmp_path):
    path = emit_csv([], tmp_path / "empty.csv")
    assert path.read_text() == ",".join(RECORD_FIELDS) + "\n"
    path = emit_csv(list(run_example_spurious()), tmp_path / "two.csv")
    assert len(path.read_text().splitlines()) == 3


def test_emit_csv_reports_path_on_failure(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        emit_csv([], blocker / "sub" / "r.csv")


def test_sweep_deterministic_across_workers(tmp_path):
    cfg = SweepConfig(trials=12, sigma_grid=(0.0, 3.0), master_seed=5, max_iters=20000)
    a, ta = run_sweep(cfg)
    from dataclasses import replace

    b, tb = run_sweep(replace(cfg, workers=3))
    pa, pb = emit_csv(a, tmp_path / "a.csv"), emit_csv(b, tmp_path / "b.csv")
    assert pa.read_bytes() == pb.read_bytes()
    assert ta == tb


def test_ellipse_classes():
    e = Ellipse(center=(0, 0), semi_axes=(3, 1), rotation_deg=90)
    assert list(e.contains(np.array([[0, 2.5], [2.5, 0]]))) == [True, False]
    cfg = SweepConfig(trials=10, sigma_grid=(0.0,), ellipse=Ellipse((0, 0), (4, 4)), max_iters=20000)
    records, table = run_sweep(cfg)
    for r in records:
        inside = r.true_x**2 + r.true_y**2 <= 16
        assert r.target_class == ("inside" if inside else "outside")


def test_auto_step_recorded():
    records, _ = run_sweep(SweepConfig(trials=3, sigma_grid=(1.0,), algorithms=("convex",), auto_step=True))
    mus = {r.mu for r in records}
    assert len(mus) == 1 and mus.pop() > 0.01


def test_aggregate_skips_failed_rows():
    base, conv = run_example_spurious()
    from dataclasses import replace

    bad = replace(conv, failure="NonFinite", sq_error=math.nan)
    table = aggregate([conv, bad], [0.0], ("convex",))
    assert table[-1]["trial_count"] == 1
