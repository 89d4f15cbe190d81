import csv

import pytest

from quatinv.bench import CSV_COLUMNS, SUITES, emit_csv, run_bench


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.mark.parametrize("suite,n_ops", [
    ("outer_right", 1),
    ("outer_w_left", 1),
    ("pinv_all4", 2),
])
def test_smoke_run_emits_every_pair(suite, n_ops, tmp_path):
    records = run_bench(suite, k_list=[3], trials=2, seed=0)
    assert len(records) == n_ops * 2  # both routes
    for rec in records:
        assert rec.mean_seconds > 0.0
        assert rec.trials == 2
        for val in rec.residuals.values():
            assert val <= 1e-8
    path = tmp_path / "out.csv"
    emit_csv(records, path)
    rows = read_rows(path)
    assert rows[0] == CSV_COLUMNS
    assert len(rows) == len(records) + 1


def test_pinv_suite_fills_all_residual_columns(tmp_path):
    records = run_bench("pinv_all4", k_list=[2], trials=1, seed=1)
    path = tmp_path / "out.csv"
    emit_csv(records, path)
    for row in read_rows(path)[1:]:
        assert all(cell != "" for cell in row[5:])


def test_outer_suite_leaves_penrose_columns_empty(tmp_path):
    records = run_bench("outer_right", k_list=[2], trials=1, seed=1)
    path = tmp_path / "out.csv"
    emit_csv(records, path)
    for row in read_rows(path)[1:]:
        assert row[5] != ""                      # res_outer
        assert row[6] == row[7] == row[8] == ""  # res_one, res_p3, res_p4


def test_emit_csv_edge_sizes(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv([], path)
    assert read_rows(path) == [CSV_COLUMNS]
    records = run_bench("outer_right", k_list=[2], trials=1, seed=0)[:1]
    emit_csv(records, path)
    assert len(read_rows(path)) == 2


def test_full_sweep_row_count():
    records = run_bench("pinv_all4", k_list=[2, 3, 4], trials=1, seed=0)
    assert len(records) == 2 * 2 * 3  # ops x routes x k values


def test_same_seed_same_residuals_timing_exempt(tmp_path):
    a = run_bench("pinv_all4", k_list=[3], trials=2, seed=7)
    b = run_bench("pinv_all4", k_list=[3], trials=2, seed=7)
    pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(a, pa)
    emit_csv(b, pb)
    for ra, rb in zip(read_rows(pa), read_rows(pb)):
        assert ra[:4] == rb[:4]
        assert ra[5:] == rb[5:]  # residual columns identical; column 4 is time
    c = run_bench("pinv_all4", k_list=[3], trials=2, seed=8)
    assert any(ra.residuals != rc.residuals for ra, rc in zip(a, c))


def test_route_residual_parity():
    for suite in SUITES:
        records = run_bench(suite, k_list=[3, 5], trials=2, seed=2)
        by_key = {}
        for rec in records:
            by_key.setdefault((rec.op, rec.k), {})[rec.route] = rec.residuals
        for (op, k), routes in by_key.items():
            for key in routes["direct"]:
                assert abs(routes["direct"][key] - routes["crep"][key]) <= 1e-10


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        run_bench("nope", k_list=[2], trials=1)
    with pytest.raises(ValueError):
        run_bench("outer_right", k_list=[0], trials=1)
    with pytest.raises(ValueError):
        run_bench("outer_right", k_list=[2], trials=0)
