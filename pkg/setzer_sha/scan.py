"""
Range scans: classify every u in [u_min, u_max], evaluate the accepted
curves on a worker pool, and append records to a checkpointed CSV file in
ascending u.
"""

import asyncio
import concurrent.futures
import dataclasses
import functools
import logging
import os
import time
import typing

import numpy

from .bsd import EvalParams, analytic_sha, rank_one_product
from .concurrent.queue import OrderedPipeline
from .curves import CurveClass, CurveParams, classify
from .error import CorruptCheckpointError, PrecisionError
from .formats.record import COLUMNS, HEADER, RECORD_FORMAT, Anomaly, ScanRecord
from .formats.report import VerifyMismatch, VerifyReport
from .log import TRACE
from .lseries import ApCache, default_cache

DEFAULT_CLASSES = [CurveClass.STAR, CurveClass.DOUBLE_STAR]

TERMS_RELATIVE_TOLERANCE = 1e-8


@dataclasses.dataclass
class ScanConfig:
    u_min: int
    u_max: int
    out_path: str
    classes: typing.List[CurveClass] = dataclasses.field(
        default_factory=lambda: list(DEFAULT_CLASSES)
    )
    precision_bits: int = 96
    workers: int = 1
    verify_terms: bool = False
    """Recompute with doubled terms, flagging rows that change"""
    checkpoint_every: int = 1
    """Chunks between trailer rewrites"""
    chunk_size: int = 64
    cache: bool = True
    certify_bound: int = 2

    def __post_init__(self):
        if self.u_max < self.u_min:
            raise ValueError(f"Empty range [{self.u_min}, {self.u_max}]")
        if self.workers < 1:
            raise ValueError(f"Invalid worker count {self.workers}")
        if self.precision_bits < 96:
            raise ValueError("Precision must be at least 96 bits")

    @property
    def params(self) -> EvalParams:
        return EvalParams(
            precision_bits=self.precision_bits, certify_bound=self.certify_bound
        )


@dataclasses.dataclass
class ScanSummary:
    processed: int = 0
    """Records written"""
    rejected: int = 0
    skipped: int = 0
    """Accepted u outside the scanned classes"""
    zeros: int = 0
    anomalies: int = 0


@dataclasses.dataclass
class Checkpoint:
    last_u: typing.Optional[int]
    """Last u known to be scanned, None for a fresh file"""
    data_end: int
    """Byte offset after the last intact record"""
    rows: int


@dataclasses.dataclass
class ChunkResult:
    last_u: int
    records: typing.List[ScanRecord]
    rejected: int = 0
    skipped: int = 0


def _base_record(curve: CurveParams) -> ScanRecord:
    return ScanRecord(
        u=curve.u,
        n=curve.n,
        k=curve.k,
        factors=curve.primes,
        curve_class=curve.curve_class,
        epsilon=curve.epsilon,
    )


def _terms_changed(a: ScanRecord, b: ScanRecord) -> bool:
    if a.epsilon == 1:
        return (a.is_zero, a.sha1, a.sha2) != (b.is_zero, b.sha1, b.sha2)
    return abs(a.sha_reg1 - b.sha_reg1) > TERMS_RELATIVE_TOLERANCE * abs(a.sha_reg1)


def _evaluate(
    curve: CurveParams, params: EvalParams, cache: typing.Optional[ApCache]
) -> ScanRecord:
    record = _base_record(curve)
    if curve.epsilon == -1:
        result = rank_one_product(curve.u, curve, params, cache)
        return dataclasses.replace(
            record,
            terms=result.lprime.terms_used,
            lvalue=float(result.lprime.value),
            tail_bound=result.lprime.tail_bound,
            omega=float(result.omega),
            sha_reg1=float(result.sha_times_reg1),
        )

    try:
        sha = analytic_sha(curve.u, curve, params, cache)
    except PrecisionError as e:
        logging.warning("%s, recording anomaly", e)
        return dataclasses.replace(record, anomaly=Anomaly.PRECISION)
    record = dataclasses.replace(
        record,
        terms=sha.lvalue.terms_used,
        lvalue=float(sha.lvalue.value),
        tail_bound=sha.lvalue.tail_bound,
        omega=float(sha.omega),
        raw1=float(sha.raw1),
        raw2=float(sha.raw2),
        sha1=sha.sha1,
        sha2=sha.sha2,
        is_zero=sha.is_zero,
    )
    if sha.is_zero:
        return record
    record = dataclasses.replace(
        record,
        square1=sha.square1,
        square2=sha.square2,
        certified=sha.certified_odd_primes,
    )
    if not (sha.square1 and sha.square2):
        logging.warning("u=%d: non-square order %d, %d", curve.u, sha.sha1, sha.sha2)
        record = dataclasses.replace(record, anomaly=Anomaly.NONSQUARE)
    return record


def evaluate(
    curve: CurveParams,
    params: EvalParams = EvalParams(),
    verify_terms: bool = False,
    cache: typing.Optional[ApCache] = None,
) -> ScanRecord:
    """
    Scan record of an accepted curve
    """
    start = time.perf_counter()
    record = _evaluate(curve, params, cache)
    if verify_terms and record.anomaly is None:
        doubled = dataclasses.replace(params, term_scale=params.term_scale * 2)
        check = _evaluate(curve, doubled, cache)
        if check.anomaly is not None or _terms_changed(record, check):
            logging.warning("u=%d: result changed with doubled terms", curve.u)
            record = dataclasses.replace(record, anomaly=Anomaly.TERMS)
    end = time.perf_counter()
    logging.log(TRACE, "Evaluated u=%d (%.3fs)", curve.u, end - start)
    return record


def evaluate_chunk(u_start: int, u_end: int, config: ScanConfig) -> ChunkResult:
    """
    Evaluate u_start <= u <= u_end. Runs in worker processes.
    """
    cache = default_cache() if config.cache else None
    result = ChunkResult(last_u=u_end, records=[])
    for u in range(u_start, u_end + 1):
        curve = classify(u)
        if not curve.accepted:
            result.rejected += 1
            continue
        if curve.curve_class not in config.classes:
            logging.log(TRACE, "Skipped u=%d (%s)", u, curve.curve_class.value)
            result.skipped += 1
            continue
        record = evaluate(curve, config.params, config.verify_terms, cache)
        result.records.append(record)
    return result


def _decode(line: bytes, out_path: str) -> str:
    try:
        return line.decode()
    except UnicodeDecodeError as e:
        raise CorruptCheckpointError(f"{out_path}: invalid UTF-8 ({e.reason})")


def resume(out_path: str) -> Checkpoint:
    """
    Read the checkpoint state of a scan file. A torn last line is ignored.
    """
    if not os.path.exists(out_path) or os.path.getsize(out_path) == 0:
        return Checkpoint(last_u=None, data_end=0, rows=0)

    with open(out_path, "rb") as f:
        data = f.read()
    lines = data.split(b"\n")
    # bytes after the last newline form a torn line (or nothing)
    complete = lines[:-1]
    if not complete:
        return Checkpoint(last_u=None, data_end=0, rows=0)
    if _decode(complete[0], out_path) != HEADER:
        raise CorruptCheckpointError(f"{out_path}: unexpected header")

    offset = len(complete[0]) + 1
    data_end = offset
    last_u = None
    previous_u = None
    rows = 0
    for line in complete[1:]:
        offset += len(line) + 1
        text = _decode(line, out_path)
        if not text:
            continue
        if text.startswith("#"):
            try:
                checkpoint_u = RECORD_FORMAT.parse_checkpoint(text)
            except ValueError as e:
                raise CorruptCheckpointError(f"{out_path}: {e}")
            last_u = checkpoint_u if last_u is None else max(last_u, checkpoint_u)
            continue
        try:
            record = RECORD_FORMAT.parse_record(text)
        except ValueError as e:
            raise CorruptCheckpointError(f"{out_path}: malformed record: {e}")
        if previous_u is not None and record.u <= previous_u:
            raise CorruptCheckpointError(f"{out_path}: u={record.u} out of order")
        previous_u = record.u
        last_u = record.u if last_u is None else max(last_u, record.u)
        rows += 1
        data_end = offset
    return Checkpoint(last_u=last_u, data_end=data_end, rows=rows)


class ScanWriter:
    """
    Appends chunks of records, keeping a checkpoint trailer after the data
    """

    def __init__(self, file: typing.BinaryIO, data_end: int, checkpoint_every: int):
        self._file = file
        self._data_end = data_end
        self._checkpoint_every = checkpoint_every
        self._chunks = 0
        self._last_u: typing.Optional[int] = None

    def write_header(self):
        self._file.seek(0)
        self._file.truncate()
        self._file.write(f"{HEADER}\n".encode())
        self._data_end = self._file.tell()

    def write_chunk(self, chunk: ChunkResult):
        start = time.perf_counter()
        self._file.seek(self._data_end)
        self._file.truncate()
        for record in chunk.records:
            self._file.write(f"{RECORD_FORMAT.serialize_record(record)}\n".encode())
        self._data_end = self._file.tell()
        self._last_u = chunk.last_u
        self._chunks += 1
        if self._chunks % self._checkpoint_every == 0:
            self._write_checkpoint()
        end = time.perf_counter()
        logging.debug(
            "Wrote %d records through u=%d (%.3fs)",
            len(chunk.records),
            chunk.last_u,
            end - start,
        )

    def _write_checkpoint(self):
        line = RECORD_FORMAT.serialize_checkpoint(self._last_u)
        self._file.write(f"{line}\n".encode())
        self._file.flush()

    def close(self):
        if self._last_u is not None and self._chunks % self._checkpoint_every:
            self._write_checkpoint()
        self._file.flush()


def _chunks(u_start: int, u_end: int, size: int):
    for low in range(u_start, u_end + 1, size):
        yield low, min(low + size - 1, u_end)


async def _run_chunks(
    config: ScanConfig,
    chunks: typing.List[typing.Tuple[int, int]],
    writer: ScanWriter,
    summary: ScanSummary,
):
    if config.workers == 1:
        executor = concurrent.futures.ThreadPoolExecutor(1)
    else:
        executor = concurrent.futures.ProcessPoolExecutor(config.workers)

    async def consume(chunk: ChunkResult):
        await asyncio.to_thread(writer.write_chunk, chunk)
        summary.processed += len(chunk.records)
        summary.rejected += chunk.rejected
        summary.skipped += chunk.skipped
        for record in chunk.records:
            if record.anomaly is not None:
                summary.anomalies += 1
            elif record.is_zero:
                summary.zeros += 1

    with executor:
        pipeline = OrderedPipeline(executor, 2 * config.workers)
        jobs = (
            functools.partial(evaluate_chunk, u_start, u_end, config)
            for u_start, u_end in chunks
        )
        await pipeline.run(jobs, consume)


async def scan(config: ScanConfig) -> ScanSummary:
    """
    Scan, continuing from the checkpoint of an existing output file
    """
    checkpoint = resume(config.out_path)
    u_start = config.u_min
    if checkpoint.last_u is not None:
        u_start = max(u_start, checkpoint.last_u + 1)
        logging.info(
            "Resuming after u=%d with %d records", checkpoint.last_u, checkpoint.rows
        )
    summary = ScanSummary()
    if config.u_max < u_start:
        logging.info("Nothing to scan")
        return summary

    logging.info(
        "Scanning u in [%d, %d] with %d workers", u_start, config.u_max, config.workers
    )
    start = time.perf_counter()
    mode = "r+b" if checkpoint.data_end else "w+b"
    with open(config.out_path, mode) as f:
        writer = ScanWriter(f, checkpoint.data_end, config.checkpoint_every)
        if not checkpoint.data_end:
            writer.write_header()
        try:
            await _run_chunks(
                config,
                list(_chunks(u_start, config.u_max, config.chunk_size)),
                writer,
                summary,
            )
        finally:
            writer.close()
    end = time.perf_counter()
    logging.info(
        "Scanned %d curves: %d rejected, %d skipped, %d zeros, %d anomalies (%.3fs)",
        summary.processed,
        summary.rejected,
        summary.skipped,
        summary.zeros,
        summary.anomalies,
        end - start,
    )
    return summary


def _close(a: typing.Optional[float], b: typing.Optional[float]) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return abs(a - b) <= TERMS_RELATIVE_TOLERANCE * max(abs(a), abs(b), 1e-300)


def compare_records(stored: ScanRecord, recomputed: ScanRecord) -> typing.List[str]:
    """
    Columns whose values disagree. Reals agree to a relative 1e-8.
    """
    mismatched = []
    for column, name in (
        ("N", "n"),
        ("k", "k"),
        ("class", "curve_class"),
        ("epsilon", "epsilon"),
        ("sha1", "sha1"),
        ("sha2", "sha2"),
        ("is_zero", "is_zero"),
    ):
        if getattr(stored, name) != getattr(recomputed, name):
            mismatched.append(column)
    for column in ("omega", "sha_reg1"):
        if not _close(getattr(stored, column), getattr(recomputed, column)):
            mismatched.append(column)
    if not stored.is_zero and not _close(stored.lvalue, recomputed.lvalue):
        mismatched.append("lvalue")
    return mismatched


def verify(
    records: typing.List[ScanRecord],
    sample: int,
    seed: int,
    params: EvalParams = EvalParams(),
) -> VerifyReport:
    """
    Recompute a random sample of records with doubled terms and 32 more bits
    """
    rng = numpy.random.default_rng(seed)
    size = min(sample, len(records))
    chosen = sorted(rng.choice(len(records), size=size, replace=False).tolist())
    params = params.escalated()
    cache = default_cache()
    report = VerifyReport(rows=len(records), checked=[], mismatches=[], seed=seed)
    start = time.perf_counter()
    for i in chosen:
        stored = records[i]
        curve = classify(stored.u)
        report.checked.append(stored.u)
        if not curve.accepted:
            report.mismatches.append(
                VerifyMismatch(
                    u=stored.u,
                    column="class",
                    stored=stored.curve_class.value,
                    recomputed=curve.curve_class.value,
                )
            )
            continue
        recomputed = evaluate(curve, params, cache=cache)
        stored_fields = _fields(stored)
        recomputed_fields = _fields(recomputed)
        for column in compare_records(stored, recomputed):
            logging.warning("u=%d: %s differs", stored.u, column)
            report.mismatches.append(
                VerifyMismatch(
                    u=stored.u,
                    column=column,
                    stored=stored_fields[column],
                    recomputed=recomputed_fields[column],
                )
            )
    end = time.perf_counter()
    logging.info(
        "Verified %d of %d rows, %d mismatches (%.3fs)",
        len(chosen),
        len(records),
        len(report.mismatches),
        end - start,
    )
    return report


def _fields(record: ScanRecord) -> typing.Dict[str, str]:
    return dict(zip(COLUMNS, RECORD_FORMAT.serialize_record(record).split(",")))
