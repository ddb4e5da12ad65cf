import numpy as np
import pytest

from ivda import (
    MicroRecord,
    aggregate,
    load_interval_csv,
    read_microdata_csv,
    read_scaled_csv,
    write_interval_csv,
    write_scaled_csv,
)
from ivda.datasets import credit_card_intervals
from ivda.errors import DataValidationError, DomainError
from ivda.interval import IntervalFrame


def records_for_cell(values, key=("g1",), variable="x"):
    return [MicroRecord(key=key, variable=variable, value=v) for v in values]


def test_record_validation():
    with pytest.raises(DomainError):
        MicroRecord(key=(), variable="x", value=1.0)
    with pytest.raises(DomainError):
        MicroRecord(key=("g",), variable="x", value=float("nan"))


def test_aggregate_trim_zero_is_min_max():
    result = aggregate(records_for_cell([1.0, 2.0, 3.0]))
    frame = result.frame
    assert (frame.lower[0, 0], frame.upper[0, 0]) == (1.0, 3.0)


def test_aggregate_trim_five_percent_drops_five_each_side():
    values = [float(v) for v in range(1, 101)]
    result = aggregate(records_for_cell(values), trim=0.05)
    assert (result.frame.lower[0, 0], result.frame.upper[0, 0]) == (6.0, 95.0)


def test_aggregate_degenerate_cell_dropped_and_reported():
    records = records_for_cell([5.0, 5.0, 5.0]) + \
        records_for_cell([1.0, 2.0], key=("g2",))
    result = aggregate(records)
    assert result.frame.n == 1
    assert result.frame.labels == ("g2",)
    assert len(result.report.dropped_rows) == 1
    assert "degenerate" in result.report.dropped_rows[0][1][0]


def test_aggregate_keep_degenerate_flag():
    records = records_for_cell([5.0, 5.0]) + records_for_cell([7.0], key=("g2",))
    result = aggregate(records, keep_degenerate=True)
    assert result.frame.n == 2
    assert np.all(result.frame.ranges == 0.0)
    # degenerate cells produce no scaled microdata
    assert result.scaled == {}


def test_aggregate_inconsistent_variables_reported():
    records = records_for_cell([1.0, 2.0]) + \
        records_for_cell([1.0, 2.0], key=("g2",)) + \
        records_for_cell([4.0, 5.0], key=("g2",), variable="y")
    result = aggregate(records)
    assert result.frame.n == 1            # g1 lacks variable y and is dropped
    assert "empty cell" in result.report.dropped_rows[0][1][0]


def test_aggregate_intervals_contain_retained_values(rng):
    records = []
    for g in range(6):
        for var in ("a", "b"):
            for v in rng.normal(size=40):
                records.append(MicroRecord(key=(f"g{g}",), variable=var, value=float(v)))
    result = aggregate(records, trim=0.05)
    for name, sample in result.scaled.items():
        assert np.all(sample.values >= -1.0)
        assert np.all(sample.values <= 1.0)


def test_aggregate_trim_monotonicity(rng):
    records = records_for_cell([float(v) for v in rng.normal(size=200)])
    widths = []
    for trim in (0.0, 0.05, 0.1, 0.2, 0.4):
        frame = aggregate(records, trim=trim).frame
        widths.append(frame.upper[0, 0] - frame.lower[0, 0])
    assert all(w1 >= w2 for w1, w2 in zip(widths, widths[1:]))


def test_aggregate_trim_domain():
    with pytest.raises(DomainError):
        aggregate(records_for_cell([1.0]), trim=0.5)


def test_aggregate_scaled_values_round_trip():
    result = aggregate(records_for_cell([0.0, 1.0, 2.0]))
    assert np.allclose(sorted(result.scaled["x"].values), [-1.0, 0.0, 1.0])


# --- CSV round trips ---------------------------------------------------------

def test_interval_csv_roundtrip_is_lossless(tmp_path, rng):
    lower = rng.uniform(-1e6, 1e6, size=(7, 3))
    upper = lower + rng.uniform(0, 1e-3, size=(7, 3))
    frame = IntervalFrame(lower, upper, ("alpha", "beta", "gamma"),
                          labels=tuple(f"row{i}" for i in range(7)))
    path = tmp_path / "frame.csv"
    write_interval_csv(frame, path)
    back = load_interval_csv(path)
    assert np.array_equal(back.lower, frame.lower)
    assert np.array_equal(back.upper, frame.upper)
    assert back.labels == frame.labels
    assert back.names == frame.names


def test_interval_csv_centre_range_encoding_equivalent(tmp_path):
    frame = credit_card_intervals()
    p1 = tmp_path / "bounds.csv"
    p2 = tmp_path / "cr.csv"
    write_interval_csv(frame, p1, mode="bounds")
    write_interval_csv(frame, p2, mode="centre_range")
    f1 = load_interval_csv(p1)
    f2 = load_interval_csv(p2)
    assert np.allclose(f1.lower, f2.lower, atol=1e-10)
    assert np.allclose(f1.upper, f2.upper, atol=1e-10)


def test_interval_csv_missing_pair_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a.lo,a.hi,b.lo\n0,1,0\n", encoding="utf-8")
    with pytest.raises(DataValidationError, match="'b'"):
        load_interval_csv(path)


def test_interval_csv_unknown_column_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("label,a.lo,a.hi,oops\n r,0,1,2\n", encoding="utf-8")
    with pytest.raises(DataValidationError, match="oops"):
        load_interval_csv(path)


def test_interval_csv_disordered_bounds_survive_to_validate(tmp_path):
    path = tmp_path / "frame.csv"
    path.write_text("a.lo,a.hi\n2.0,1.0\n0.0,1.0\n", encoding="utf-8")
    frame = load_interval_csv(path)
    rules = [v.rule for v in frame.validate()]
    assert "order" in rules


def test_microdata_csv_roundtrip(tmp_path):
    path = tmp_path / "micro.csv"
    path.write_text(
        "month,carrier,variable,value\n"
        "1,AA,dep,3.5\n1,AA,dep,4.5\n2,BB,dep,1.0\n2,BB,dep,2.0\n",
        encoding="utf-8")
    records = read_microdata_csv(path)
    assert len(records) == 4
    assert records[0].key == ("1", "AA")
    result = aggregate(records)
    assert result.frame.n == 2


def test_microdata_csv_header_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(DataValidationError):
        read_microdata_csv(path)


def test_scaled_csv_roundtrip(tmp_path):
    records = records_for_cell([0.0, 0.5, 2.0]) + \
        records_for_cell([1.0, 4.0], key=("g2",))
    scaled = aggregate(records).scaled
    path = tmp_path / "scaled.csv"
    write_scaled_csv(scaled, path)
    back = read_scaled_csv(path)
    assert set(back) == set(scaled)
    assert np.allclose(back["x"].values, scaled["x"].values)
    assert back["x"].rows == scaled["x"].rows
