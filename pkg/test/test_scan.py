import asyncio
import dataclasses

import pytest

from file import temp_file
from setzer_sha.bsd import EvalParams
from setzer_sha.curves import CurveClass, classify
from setzer_sha.error import CorruptCheckpointError
from setzer_sha.formats.record import HEADER, Anomaly
from setzer_sha.scan import (
    ScanConfig,
    compare_records,
    evaluate,
    resume,
    scan,
    verify,
)
from setzer_sha.stats import read_records


def _read(path):
    with open(path) as f:
        return read_records(f, include_anomalies=True)


def test_scan():
    with temp_file("scan-") as out:
        summary = asyncio.run(scan(ScanConfig(u_min=1, u_max=40, out_path=out)))
        assert summary.processed == 5
        assert summary.rejected == 30
        assert summary.skipped == 5

        records = _read(out)
        assert [r.u for r in records] == [5, 13, 17, 33, 37]
        assert all(r.curve_class == CurveClass.STAR for r in records)
        assert records[0].sha1 == 1
        assert records[0].certified == []

        with open(out) as f:
            lines = f.read().splitlines()
        assert lines[0] == HEADER
        assert lines[-1] == "#checkpoint 40"


def test_scan_even_class():
    with temp_file("scan-") as out:
        config = ScanConfig(
            u_min=1, u_max=12, out_path=out, classes=[CurveClass.EVEN_K]
        )
        summary = asyncio.run(scan(config))
        assert summary.processed == 2
        records = _read(out)
        assert [r.u for r in records] == [1, 9]
        assert records[0].epsilon == -1
        assert records[0].sha1 is None
        assert records[0].sha_reg1 > 0


def test_scan_resume():
    with temp_file("scan-") as out:
        asyncio.run(scan(ScanConfig(u_min=1, u_max=20, out_path=out, chunk_size=8)))
        summary = asyncio.run(scan(ScanConfig(u_min=1, u_max=40, out_path=out)))
        assert summary.processed == 2
        assert [r.u for r in _read(out)] == [5, 13, 17, 33, 37]


def test_scan_resume_complete():
    with temp_file("scan-") as out:
        asyncio.run(scan(ScanConfig(u_min=1, u_max=20, out_path=out)))
        with open(out, "rb") as f:
            before = f.read()
        summary = asyncio.run(scan(ScanConfig(u_min=1, u_max=20, out_path=out)))
        assert summary.processed == 0
        with open(out, "rb") as f:
            assert f.read() == before


def test_scan_torn_line():
    with temp_file("scan-") as out:
        asyncio.run(scan(ScanConfig(u_min=1, u_max=20, out_path=out)))
        with open(out, "a") as f:
            f.write("21,505,2,5;1")
        checkpoint = resume(out)
        assert checkpoint.last_u == 20
        assert checkpoint.rows == 3

        asyncio.run(scan(ScanConfig(u_min=1, u_max=40, out_path=out)))
        assert [r.u for r in _read(out)] == [5, 13, 17, 33, 37]


def test_scan_workers():
    with temp_file("scan-") as serial, temp_file("scan-") as parallel:
        asyncio.run(scan(ScanConfig(u_min=-40, u_max=40, out_path=serial)))
        config = ScanConfig(
            u_min=-40, u_max=40, out_path=parallel, workers=2, chunk_size=4
        )
        asyncio.run(scan(config))
        with open(serial) as a, open(parallel) as b:
            assert a.read().splitlines()[:-1] == b.read().splitlines()[:-1]


def test_resume_out_of_order():
    with temp_file("scan-") as out:
        asyncio.run(scan(ScanConfig(u_min=1, u_max=20, out_path=out)))
        with open(out) as f:
            lines = f.read().splitlines()
        lines[1], lines[2] = lines[2], lines[1]
        with open(out, "w") as f:
            f.write("\n".join(lines) + "\n")
        with pytest.raises(CorruptCheckpointError):
            resume(out)


def test_resume_bad_header():
    with temp_file("scan-") as out:
        with open(out, "w") as f:
            f.write("u,N\n")
        with pytest.raises(CorruptCheckpointError):
            resume(out)


def test_scan_config_invalid():
    with pytest.raises(ValueError):
        ScanConfig(u_min=10, u_max=1, out_path="-")
    with pytest.raises(ValueError):
        ScanConfig(u_min=1, u_max=10, out_path="-", precision_bits=64)


def test_evaluate_verify_terms():
    record = evaluate(classify(13), verify_terms=True)
    assert record.anomaly is None
    assert record.sha1 == 1


def test_evaluate_precision_anomaly():
    params = EvalParams(tail_tolerance=1.0, retries=0)
    record = evaluate(classify(5), params)
    assert record.anomaly == Anomaly.PRECISION
    assert record.sha1 is None


def test_compare_records():
    record = evaluate(classify(5))
    assert compare_records(record, record) == []
    changed = dataclasses.replace(record, sha1=4, omega=3.0)
    assert compare_records(record, changed) == ["sha1", "omega"]


def test_verify():
    with temp_file("scan-") as out:
        asyncio.run(scan(ScanConfig(u_min=1, u_max=40, out_path=out)))
        report = verify(_read(out), sample=3, seed=1)
        assert report.rows == 5
        assert len(report.checked) == 3
        assert report.mismatches == []


def test_scan_cache_soundness():
    with temp_file("scan-") as cached, temp_file("scan-") as uncached:
        asyncio.run(scan(ScanConfig(u_min=-100, u_max=100, out_path=cached)))
        config = ScanConfig(u_min=-100, u_max=100, out_path=uncached, cache=False)
        asyncio.run(scan(config))
        with open(cached) as a, open(uncached) as b:
            assert a.read() == b.read()


def test_desk_scan_invariants(desk_scan):
    assert desk_scan
    for record in desk_scan:
        assert record.anomaly is None
        assert record.epsilon == (-1) ** (record.k + 1)
        scale = 2 ** (record.k - 1)
        assert record.raw1 == pytest.approx(scale * record.raw2, rel=1e-12)
        if not record.is_zero:
            assert record.square1 and record.square2
            assert record.sha1 == scale * record.sha2


def test_desk_scan_trivial_orders(desk_scan):
    orders = {r.u: r.sha1 for r in desk_scan}
    for u in (5, -3, -7, 13, 17):
        assert orders[u] == 1


def test_resume_invalid_utf8():
    with temp_file("scan-") as out:
        asyncio.run(scan(ScanConfig(u_min=1, u_max=20, out_path=out)))
        with open(out, "ab") as f:
            f.write(b"5,\xff\n")
        with pytest.raises(CorruptCheckpointError, match="UTF-8"):
            resume(out)
