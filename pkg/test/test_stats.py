import io
import math

import numpy
import pytest

from setzer_sha.curves import CurveClass
from setzer_sha.error import EmptyInputError, MalformedRecordError
from setzer_sha.formats.record import HEADER, RECORD_FORMAT, Anomaly, ScanRecord
from setzer_sha.stats import (
    GridSeries,
    HistogramSpec,
    HistogramTarget,
    certification_series,
    cohen_lenstra_f0,
    divisibility_series,
    divisibility_table,
    growth_series,
    histogram,
    log_grid,
    normalize,
    order_frequencies,
    rank_one_series,
    read_records,
    write_histogram,
    write_series,
)


def _record(u, sha1, sha2=None, curve_class=CurveClass.STAR, certified=()):
    return ScanRecord(
        u=u,
        n=u * u + 64,
        k=1 if curve_class == CurveClass.STAR else 3,
        factors=[u * u + 64],
        curve_class=curve_class,
        epsilon=1,
        lvalue=1.0,
        sha1=sha1,
        sha2=sha1 if sha2 is None else sha2,
        is_zero=sha1 == 0,
        certified=list(certified) if sha1 else None,
    )


def _rank_one(u, sha_reg1):
    return ScanRecord(
        u=u,
        n=u * u + 64,
        k=2,
        factors=[],
        curve_class=CurveClass.EVEN_K,
        epsilon=-1,
        sha_reg1=sha_reg1,
    )


_RECORDS = [
    _record(-3, 0),
    _record(5, 1),
    _record(13, 1),
    _record(17, 9, certified=[3]),
    _record(-51, 4, 1, curve_class=CurveClass.DOUBLE_STAR),
    _rank_one(1, 0.5),
    _rank_one(9, 1.5),
]


def test_log_grid():
    grid = log_grid(_RECORDS, points=3, x_min=1)
    assert grid.tolist() == pytest.approx([1, math.sqrt(51), 51])


def test_log_grid_empty():
    with pytest.raises(EmptyInputError):
        log_grid([])


def test_order_frequencies():
    grid = log_grid(_RECORDS, points=2, x_min=10)
    series = {s.label: s.values for s in order_frequencies(_RECORDS, grid, k_max=3)}
    assert series["f_i1"] == [1, 2]
    assert series["f_i2"] == [1, 3]
    assert series["g"] == [1, 1]
    assert series["f_k3_i1"] == [0, 1]
    assert series["f_k2_i1"] == [0, 1]


def test_divisibility():
    grid = log_grid(_RECORDS, points=2, x_min=10)
    series = {s.label: s.values for s in divisibility_series(_RECORDS, grid, 3)}
    assert series["f_p3"] == [0, pytest.approx(1 / 3)]
    assert series["g_p3"] == [0, pytest.approx(1 / 4)]

    series = {s.label: s.values for s in divisibility_series(_RECORDS, grid, 2)}
    assert series["g2_i1"] == [0, pytest.approx(1 / 4)]
    assert series["g2_i2"] == [0, 0]


def test_divisibility_table():
    rows = divisibility_table(_RECORDS, [2, 3])
    assert [row.p for row in rows] == [2, 3]
    assert rows[0].freq1 == pytest.approx(1 / 4)
    assert rows[0].freq2 == 0
    assert rows[1].freq1 == pytest.approx(1 / 4)


def test_cohen_lenstra():
    assert cohen_lenstra_f0(2) == pytest.approx(0.580577, abs=1e-5)
    assert cohen_lenstra_f0(3) == pytest.approx(0.360995, abs=1e-5)
    assert cohen_lenstra_f0(5) == pytest.approx(0.2066645, abs=1e-6)
    assert cohen_lenstra_f0(7) == pytest.approx(0.145408, abs=1e-5)


def test_growth():
    grid = log_grid(_RECORDS, points=2, x_min=10)
    series = {s.label: s.values for s in growth_series(_RECORDS, grid)}
    assert series["M_star"] == [1, pytest.approx(11 / 3)]
    assert series["N_i1"] == [1, pytest.approx(15 / 4)]
    assert series["f_T"][1] == pytest.approx(11 / 3 / math.sqrt(51))


def test_rank_one():
    grid = log_grid(_RECORDS, points=2, x_min=1)
    series = {s.label: s.values for s in rank_one_series(_RECORDS, grid)}
    assert series["T"] == [0.5, pytest.approx(1.0)]
    assert math.isnan(series["u"][0])


def test_certification():
    grid = log_grid(_RECORDS, points=2, x_min=10)
    series = {s.label: s.values for s in certification_series(_RECORDS, grid)}
    assert series["cert_i1"] == [1, 3]
    assert series["cert_star"] == [1, 3]
    assert series["cert_i2"] == [1, 4]


def test_histogram():
    records = [_record(10001, 1), _record(5, 1)]
    spec = HistogramSpec.for_target(HistogramTarget.SHA1)
    result = histogram(records, spec)
    value = normalize(math.log(1 / math.sqrt(10001)), math.log(math.log(10001)), spec)
    assert len(result.counts) == 200
    assert result.total == 1
    assert result.counts[int((value - spec.bin_low) / spec.bin_width)] == 1
    assert result.mean == pytest.approx(value)


def test_histogram_overflow():
    records = [_record(10001, 10**12)]
    result = histogram(records, HistogramSpec.for_target(HistogramTarget.SHA2))
    assert result.overflow == 1
    assert sum(result.counts) == 0


def test_histogram_empty():
    with pytest.raises(EmptyInputError):
        histogram([_record(5, 1)], HistogramSpec.for_target(HistogramTarget.LVALUE))


def test_write_series():
    file = io.StringIO()
    series = GridSeries(label="g", grid_x=[1000.0, 2000.0], values=[0.5, math.nan])
    write_series(series, file)
    assert file.getvalue() == "1000\t0.5\n2000\tnan\n"


def test_write_histogram():
    result = histogram(
        [_record(10001, 1)], HistogramSpec.for_target(HistogramTarget.SHA1)
    )
    file = io.StringIO()
    write_histogram(result, file)
    lines = file.getvalue().splitlines()
    assert len(lines) == 202
    assert lines[0] == "-inf\t-10\t0\tnan"
    assert lines[1].startswith("-10\t-9.9\t0\t")
    assert lines[-1] == "10\tinf\t0\tnan"


def test_read_records():
    anomalous = ScanRecord(
        u=21,
        n=505,
        k=1,
        factors=[505],
        curve_class=CurveClass.STAR,
        epsilon=1,
        anomaly=Anomaly.PRECISION,
    )
    lines = [HEADER]
    lines += [RECORD_FORMAT.serialize_record(r) for r in (_RECORDS[1], anomalous)]
    lines.append(RECORD_FORMAT.serialize_checkpoint(21))
    text = "\n".join(lines) + "\n"
    assert [r.u for r in read_records(io.StringIO(text))] == [5]
    assert len(read_records(io.StringIO(text), include_anomalies=True)) == 2


def test_read_records_bad_header():
    with pytest.raises(EmptyInputError):
        read_records(io.StringIO("u,N\n"))



def _with_field(record: ScanRecord, column: int, value: str) -> str:
    fields = RECORD_FORMAT.serialize_record(record).split(",")
    fields[column] = value
    return ",".join(fields)


@pytest.mark.parametrize("column, value", [(7, "x"), (4, "bogus"), (14, "maybe")])
def test_read_records_malformed(column, value):
    lines = [HEADER, RECORD_FORMAT.serialize_record(_RECORDS[0])]
    lines.append(_with_field(_RECORDS[1], column, value))
    with pytest.raises(MalformedRecordError, match="Line 3") as info:
        read_records(io.StringIO("\n".join(lines) + "\n"))
    assert info.value.line_number == 3


def test_read_records_field_count():
    with pytest.raises(MalformedRecordError, match="Line 2"):
        read_records(io.StringIO(HEADER + "\n5,89\n"))


def test_read_records_invalid_utf8():
    data = (HEADER + "\n").encode() + b"\xff\xfe,89\n"
    with pytest.raises(MalformedRecordError, match="UTF-8"):
        read_records(io.TextIOWrapper(io.BytesIO(data), encoding="utf-8"))


def test_growth_single_record():
    grid = numpy.array([100.0])
    series = {s.label: s.values for s in growth_series([_record(-99, 4)], grid)}
    assert series["M_star"] == [4]
    assert series["f_T"] == [pytest.approx(0.4)]


def test_rank_one_single_record():
    grid = numpy.array([10.0])
    series = {s.label: s.values for s in rank_one_series([_rank_one(-7, 3.0)], grid)}
    assert series["T"] == [3]


def test_normalize_left_closed_bin():
    spec = HistogramSpec.for_target(HistogramTarget.LVALUE)
    value = normalize(math.log(1.0), 1.0, spec)
    assert value == 0.5
    edges = spec.edges()
    assert edges[105] == 0.5


def test_order_partition(desk_scan):
    grid = log_grid(desk_scan, points=5, x_min=10)
    k_max = 7
    series = {s.label: s.values for s in order_frequencies(desk_scan, grid, k_max)}
    rows = [r for r in desk_scan if r.anomaly is None]
    for j, x in enumerate(grid):
        total = sum(1 for r in rows if abs(r.u) <= x)
        large = sum(1 for r in rows if abs(r.u) <= x and r.sha1 > k_max**2)
        counted = sum(series[f"f_k{k}_i1"][j] for k in range(1, k_max + 1))
        assert series["g"][j] + counted + large == total


def test_cohen_lenstra_monotone():
    values = [cohen_lenstra_f0(p) for p in (2, 3, 5, 7, 11, 13)]
    assert all(0 < v < 1 for v in values)
    assert values == sorted(values, reverse=True)
    assert values[4] == pytest.approx(0.092, abs=5e-4)
