"""
Reduce scan records to cumulative statistics over |u| <= X and to
normalized histograms
"""

import dataclasses
import enum
import logging
import math
import typing

import numpy

from .bsd import order_certified
from .curves import CurveClass
from .error import EmptyInputError, MalformedRecordError
from .formats.record import HEADER, RECORD_FORMAT, ScanRecord

ODD_CLASSES = (CurveClass.STAR, CurveClass.DOUBLE_STAR)
"""u^2 + 64 squarefree with an odd number of prime factors"""

CONVERGENCE_TOLERANCE = 1e-12


@dataclasses.dataclass
class GridSeries:
    label: str
    grid_x: typing.List[float]
    values: typing.List[float]
    """nan where undefined"""


class HistogramTarget(enum.Enum):
    LVALUE = "lvalue"
    SHA1 = "sha1"
    SHA2 = "sha2"


@dataclasses.dataclass(frozen=True)
class HistogramSpec:
    target: HistogramTarget
    mu: float
    sigma_sq: float
    bin_low: float = -10
    bin_high: float = 10
    bin_width: float = 0.1

    @staticmethod
    def for_target(target: HistogramTarget) -> "HistogramSpec":
        if target == HistogramTarget.SHA2:
            log2 = math.log(2)
            return HistogramSpec(target=target, mu=-0.5 - log2, sigma_sq=1 + log2**2)
        return HistogramSpec(target=target, mu=-0.5, sigma_sq=1)

    def edges(self) -> numpy.ndarray:
        count = round((self.bin_high - self.bin_low) / self.bin_width)
        return numpy.round(self.bin_low + self.bin_width * numpy.arange(count + 1), 12)


@dataclasses.dataclass
class Histogram:
    spec: HistogramSpec
    edges: typing.List[float]
    counts: typing.List[int]
    underflow: int
    """Values below bin_low"""
    overflow: int
    """Values at or above bin_high"""
    mean: float
    variance: float

    @property
    def total(self) -> int:
        return sum(self.counts) + self.underflow + self.overflow

    def densities(self) -> typing.List[float]:
        return [c / (self.total * self.spec.bin_width) for c in self.counts]


def read_records(
    file: typing.TextIO, include_anomalies: bool = False
) -> typing.List[ScanRecord]:
    """
    Records of a scan file. Anomalous rows are dropped unless requested.
    """
    records = []
    anomalies = 0
    number = 0
    lines = iter(file)
    while True:
        try:
            line = next(lines)
        except StopIteration:
            break
        except UnicodeDecodeError as e:
            raise MalformedRecordError(f"invalid UTF-8 ({e.reason})", number + 1)
        number += 1
        line = line.rstrip("\n")
        if number == 1:
            if line != HEADER:
                raise EmptyInputError("Not a scan file: unexpected header")
            continue
        if not line or line.startswith("#"):
            continue
        try:
            record = RECORD_FORMAT.parse_record(line)
        except ValueError as e:
            raise MalformedRecordError(str(e), number)
        if record.anomaly is not None and not include_anomalies:
            anomalies += 1
            continue
        records.append(record)
    if anomalies:
        logging.warning("Excluded %d anomalous rows", anomalies)
    return records


def log_grid(
    records: typing.List[ScanRecord], points: int = 50, x_min: float = 1000
) -> numpy.ndarray:
    """
    Logarithmically spaced points from x_min to the largest |u|
    """
    if not records:
        raise EmptyInputError("No records")
    x_max = max(abs(r.u) for r in records)
    return numpy.unique(numpy.geomspace(min(x_min, x_max), x_max, points))


def _population(
    records: typing.List[ScanRecord],
    classes: typing.Collection[CurveClass],
    description: str,
) -> typing.List[ScanRecord]:
    population = [r for r in records if r.curve_class in classes]
    if not population:
        raise EmptyInputError(f"No {description} records")
    return population


def _cumulative(
    records: typing.List[ScanRecord],
    grid: numpy.ndarray,
    predicate: typing.Callable[[ScanRecord], bool] = lambda r: True,
) -> numpy.ndarray:
    """
    Number of records satisfying predicate with |u| <= X, at each X of grid
    """
    abs_u = numpy.sort([abs(r.u) for r in records if predicate(r)])
    return numpy.searchsorted(abs_u, grid, side="right").astype(float)


def _cumulative_sum(
    records: typing.List[ScanRecord],
    grid: numpy.ndarray,
    value: typing.Callable[[ScanRecord], float],
) -> numpy.ndarray:
    if not records:
        return numpy.zeros(len(grid))
    abs_u = numpy.array([abs(r.u) for r in records])
    order = numpy.argsort(abs_u, kind="stable")
    sums = numpy.concatenate([[0.0], numpy.cumsum([value(records[i]) for i in order])])
    return sums[numpy.searchsorted(abs_u[order], grid, side="right")]


def _quotient(numerator: numpy.ndarray, denominator: numpy.ndarray) -> numpy.ndarray:
    result = numpy.full(len(numerator), numpy.nan)
    defined = denominator != 0
    result[defined] = numerator[defined] / denominator[defined]
    return result


def _series(label: str, grid: numpy.ndarray, values: numpy.ndarray) -> GridSeries:
    return GridSeries(label=label, grid_x=grid.tolist(), values=values.tolist())


def _sha(record: ScanRecord, curve_index: int) -> int:
    return record.sha1 if curve_index == 1 else record.sha2


def _order_counts(records, grid, k_max):
    population = _population(records, ODD_CLASSES, "odd class")
    nonzero = [r for r in population if r.nonzero]
    f = {i: _cumulative(nonzero, grid, lambda r, i=i: _sha(r, i) == 1) for i in (1, 2)}
    g = _cumulative(population, grid, lambda r: bool(r.is_zero))
    f_k = {
        (k, i): _cumulative(nonzero, grid, lambda r, k=k, i=i: _sha(r, i) == k * k)
        for k in range(1, k_max + 1)
        for i in (1, 2)
    }
    return f, g, f_k


def order_frequencies(
    records: typing.List[ScanRecord], grid: numpy.ndarray, k_max: int = 7
) -> typing.List[GridSeries]:
    """
    f(i, X): |Sha(E_i)| = 1, g(X): L(1) = 0, f_k(i, X): |Sha(E_i)| = k^2,
    counted over u with |u| <= X and u^2 + 64 of odd class
    """
    f, g, f_k = _order_counts(records, grid, k_max)
    series = [_series(f"f_i{i}", grid, f[i]) for i in (1, 2)]
    series.append(_series("g", grid, g))
    for (k, i), counts in f_k.items():
        series.append(_series(f"f_k{k}_i{i}", grid, counts))
    return series


def ratio_series(
    records: typing.List[ScanRecord], grid: numpy.ndarray, k_max: int = 7
) -> typing.List[GridSeries]:
    f, g, f_k = _order_counts(records, grid, k_max)
    series = [_series(f"f_over_g_i{i}", grid, _quotient(f[i], g)) for i in (1, 2)]
    for (k, i), counts in f_k.items():
        series.append(_series(f"f_ratio_k{k}_i{i}", grid, _quotient(f[i], counts)))

    log_x = numpy.log(grid)
    series.append(_series("H", grid, _quotient(grid ** (19 / 24) * log_x**0.375, g)))
    for j, label in ((0, "G_j0"), (0.5, "G_j1_2"), (1, "G_j1")):
        series.append(_series(label, grid, _quotient(grid**0.75 * log_x**j, g)))
    return series


def divisibility_series(
    records: typing.List[ScanRecord], grid: numpy.ndarray, p: int
) -> typing.List[GridSeries]:
    """
    Fractions of non-zero rows with |u| <= X whose order is divisible by p:
    f_p over u^2 + 64 prime, g_p (p odd) and g_2(i) over the odd classes
    """
    rows = [r for r in _population(records, ODD_CLASSES, "odd class") if r.nonzero]
    if not rows:
        raise EmptyInputError("No records with L(1) != 0")
    prime = [r for r in rows if r.curve_class == CurveClass.STAR]

    series = [
        _series(
            f"f_p{p}",
            grid,
            _quotient(
                _cumulative(prime, grid, lambda r: r.sha1 % p == 0),
                _cumulative(prime, grid),
            ),
        )
    ]
    total = _cumulative(rows, grid)
    if p == 2:
        for i in (1, 2):
            divisible = _cumulative(rows, grid, lambda r, i=i: _sha(r, i) % 2 == 0)
            series.append(_series(f"g2_i{i}", grid, _quotient(divisible, total)))
    else:
        divisible = _cumulative(rows, grid, lambda r: r.sha1 % p == 0)
        series.append(_series(f"g_p{p}", grid, _quotient(divisible, total)))
    return series


@dataclasses.dataclass
class DivisibilityRow:
    p: int
    freq1: float
    freq2: float


def divisibility_table(
    records: typing.List[ScanRecord], primes: typing.List[int]
) -> typing.List[DivisibilityRow]:
    """
    Frequency of p dividing |Sha(E1)| and |Sha(E2)| over all non-zero rows of
    odd class
    """
    rows = [r for r in _population(records, ODD_CLASSES, "odd class") if r.nonzero]
    if not rows:
        raise EmptyInputError("No records with L(1) != 0")
    return [
        DivisibilityRow(
            p=p,
            freq1=sum(r.sha1 % p == 0 for r in rows) / len(rows),
            freq2=sum(r.sha2 % p == 0 for r in rows) / len(rows),
        )
        for p in primes
    ]


def cohen_lenstra_f0(p: int, j_max: int = 1000) -> float:
    """
    1 - prod over j >= 1 of (1 - p^(1 - 2j))
    """
    if j_max < 1:
        raise ValueError(f"Invalid j_max {j_max}")
    product = 1.0
    for j in range(1, j_max + 1):
        term = float(p) ** (1 - 2 * j)
        product *= 1 - term
        if term < CONVERGENCE_TOLERANCE:
            break
    return 1 - product


def growth_series(
    records: typing.List[ScanRecord], grid: numpy.ndarray
) -> typing.List[GridSeries]:
    """
    M*(T): mean order over u^2 + 64 prime, N_i(T): mean |Sha(E_i)| over odd
    classes, both over non-zero rows with |u| <= T, and their quotients by
    sqrt(T)
    """
    rows = [r for r in _population(records, ODD_CLASSES, "odd class") if r.nonzero]
    if not rows:
        raise EmptyInputError("No records with L(1) != 0")
    prime = [r for r in rows if r.curve_class == CurveClass.STAR]
    root = numpy.sqrt(grid)

    mean = _quotient(
        _cumulative_sum(prime, grid, lambda r: r.sha1), _cumulative(prime, grid)
    )
    series = [_series("M_star", grid, mean), _series("f_T", grid, mean / root)]
    total = _cumulative(rows, grid)
    for i in (1, 2):
        mean = _quotient(_cumulative_sum(rows, grid, lambda r, i=i: _sha(r, i)), total)
        series.append(_series(f"N_i{i}", grid, mean))
        series.append(_series(f"g_T_i{i}", grid, mean / root))
    return series


def rank_one_series(
    records: typing.List[ScanRecord], grid: numpy.ndarray
) -> typing.List[GridSeries]:
    """
    T(X): mean of 2 L'(1) / Omega over even class rows with |u| <= X, and
    u(X) = T(X) / (sqrt(X) log X)
    """
    rows = [
        r
        for r in _population(records, (CurveClass.EVEN_K,), "even class")
        if r.sha_reg1 is not None
    ]
    if not rows:
        raise EmptyInputError("No records with L'(1)")
    mean = _quotient(
        _cumulative_sum(rows, grid, lambda r: r.sha_reg1), _cumulative(rows, grid)
    )
    scale = numpy.sqrt(grid) * numpy.log(grid)
    return [_series("T", grid, mean), _series("u", grid, _quotient(mean, scale))]


def record_certified(record: ScanRecord, curve_index: int) -> bool:
    if not record.nonzero:
        return False
    return order_certified(_sha(record, curve_index), record.certified or [])


def certification_series(
    records: typing.List[ScanRecord], grid: numpy.ndarray
) -> typing.List[GridSeries]:
    """
    Counts of u with |u| <= X whose analytic orders are proven: E1 and E2
    over the odd classes, and both curves over u^2 + 64 prime
    """
    rows = _population(records, ODD_CLASSES, "odd class")
    series = [
        _series(
            f"cert_i{i}",
            grid,
            _cumulative(rows, grid, lambda r, i=i: record_certified(r, i)),
        )
        for i in (1, 2)
    ]
    series.append(
        _series(
            "cert_star",
            grid,
            _cumulative(
                rows,
                grid,
                lambda r: r.curve_class == CurveClass.STAR
                and record_certified(r, 1)
                and record_certified(r, 2),
            ),
        )
    )
    return series


def normalize(value: float, loglog: float, spec: HistogramSpec) -> float:
    """
    (value - mu log log |u|) / sqrt(sigma^2 log log |u|)
    """
    return (value - spec.mu * loglog) / math.sqrt(spec.sigma_sq * loglog)


def _histogram_value(record: ScanRecord, target: HistogramTarget) -> float:
    if target == HistogramTarget.LVALUE:
        return math.log(record.lvalue)
    sha = record.sha1 if target == HistogramTarget.SHA1 else record.sha2
    return math.log(sha / math.sqrt(abs(record.u)))


def histogram(records: typing.List[ScanRecord], spec: HistogramSpec) -> Histogram:
    """
    Histogram of normalized values over bins [x, x + width). Rows with
    |u| < 16 are excluded, values outside the bins are counted as overflow.
    """
    rows = [
        r
        for r in _population(records, ODD_CLASSES, "odd class")
        if r.nonzero and 16 <= abs(r.u)
    ]
    if not rows:
        raise EmptyInputError("No records with L(1) != 0 and |u| >= 16")
    values = numpy.array(
        [
            normalize(
                _histogram_value(r, spec.target), math.log(math.log(abs(r.u))), spec
            )
            for r in rows
        ]
    )
    edges = spec.edges()
    index = numpy.searchsorted(edges, values, side="right") - 1
    bins = len(edges) - 1
    inside = (0 <= index) & (index < bins)
    counts = numpy.bincount(index[inside], minlength=bins)
    return Histogram(
        spec=spec,
        edges=edges.tolist(),
        counts=counts.tolist(),
        underflow=int(numpy.sum(index < 0)),
        overflow=int(numpy.sum(bins <= index)),
        mean=float(numpy.mean(values)),
        variance=float(numpy.var(values)),
    )


def format_number(value: float) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if 0 < value else "-inf"
    return "%.15g" % value


def write_series(series: GridSeries, file: typing.TextIO):
    for x, value in zip(series.grid_x, series.values):
        file.write(f"{format_number(x)}\t{format_number(value)}\n")


def write_histogram(result: Histogram, file: typing.TextIO):
    spec = result.spec
    file.write(f"-inf\t{format_number(spec.bin_low)}\t{result.underflow}\tnan\n")
    for lo, hi, count, density in zip(
        result.edges, result.edges[1:], result.counts, result.densities()
    ):
        file.write(f"{format_number(lo)}\t{format_number(hi)}\t{count}\t")
        file.write(f"{format_number(density)}\n")
    file.write(f"{format_number(spec.bin_high)}\tinf\t{result.overflow}\tnan\n")
