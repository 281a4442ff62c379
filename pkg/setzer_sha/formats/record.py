"""
Scan records: CSV rows, one per accepted u, followed by a checkpoint trailer
"""

import dataclasses
import enum
import math
import typing

from ..curves import CurveClass

COLUMNS = [
    "u",
    "N",
    "k",
    "factors",
    "class",
    "epsilon",
    "terms",
    "lvalue",
    "tail_bound",
    "omega",
    "raw1",
    "raw2",
    "sha1",
    "sha2",
    "is_zero",
    "square1",
    "square2",
    "certified",
    "sha_reg1",
    "anomaly",
]

HEADER = ",".join(COLUMNS)

CHECKPOINT_PREFIX = "#checkpoint "


class Anomaly(enum.Enum):
    PRECISION = "precision"
    """Rounding failed after every escalation"""
    NONSQUARE = "nonsquare"
    TERMS = "terms"
    """Doubling the term count changed the result"""


@dataclasses.dataclass(frozen=True)
class ScanRecord:
    u: int
    n: int
    k: int
    factors: typing.List[int]
    curve_class: CurveClass
    epsilon: int
    terms: typing.Optional[int] = None
    lvalue: typing.Optional[float] = None
    """L(1) for root number +1, L'(1) for -1"""
    tail_bound: typing.Optional[float] = None
    omega: typing.Optional[float] = None
    raw1: typing.Optional[float] = None
    raw2: typing.Optional[float] = None
    sha1: typing.Optional[int] = None
    sha2: typing.Optional[int] = None
    is_zero: typing.Optional[bool] = None
    square1: typing.Optional[bool] = None
    square2: typing.Optional[bool] = None
    certified: typing.Optional[typing.List[int]] = None
    sha_reg1: typing.Optional[float] = None
    anomaly: typing.Optional[Anomaly] = None

    @property
    def nonzero(self) -> bool:
        return self.sha1 is not None and not self.is_zero


def _int(text: str) -> typing.Optional[int]:
    return int(text) if text else None


def _float(text: str) -> typing.Optional[float]:
    return float(text) if text else None


def _bool(text: str) -> typing.Optional[bool]:
    if not text:
        return None
    if text not in ("0", "1"):
        raise ValueError(f"Invalid boolean {text!r}")
    return text == "1"


def _primes(text: str) -> typing.List[int]:
    return [int(p) for p in text.split(";")] if text else []


class RecordFormat:
    """
    Comma-separated fields. Reals carry 15 significant digits, booleans are
    1/0, non-applicable fields are empty and prime lists are ;-joined.
    """

    def serialize_float(self, value: typing.Optional[float]) -> str:
        if value is None:
            return ""
        if math.isnan(value):
            return "nan"
        return "%.15g" % value

    def serialize_record(self, record: ScanRecord) -> str:
        def text(value):
            if value is None:
                return ""
            if isinstance(value, bool):
                return "1" if value else "0"
            return str(value)

        fields = [
            str(record.u),
            str(record.n),
            str(record.k),
            ";".join(str(p) for p in record.factors),
            record.curve_class.value,
            str(record.epsilon),
            text(record.terms),
            self.serialize_float(record.lvalue),
            self.serialize_float(record.tail_bound),
            self.serialize_float(record.omega),
            self.serialize_float(record.raw1),
            self.serialize_float(record.raw2),
            text(record.sha1),
            text(record.sha2),
            text(record.is_zero),
            text(record.square1),
            text(record.square2),
            ";".join(str(p) for p in record.certified)
            if record.certified is not None
            else "",
            self.serialize_float(record.sha_reg1),
            record.anomaly.value if record.anomaly is not None else "",
        ]
        return ",".join(fields)

    def parse_record(self, line: str) -> ScanRecord:
        fields = line.split(",")
        if len(fields) != len(COLUMNS):
            raise ValueError(f"Expected {len(COLUMNS)} fields, got {len(fields)}")
        values = dict(zip(COLUMNS, fields))
        sha1 = _int(values["sha1"])
        is_zero = _bool(values["is_zero"])
        certified = _primes(values["certified"])
        return ScanRecord(
            u=int(values["u"]),
            n=int(values["N"]),
            k=int(values["k"]),
            factors=_primes(values["factors"]),
            curve_class=CurveClass(values["class"]),
            epsilon=int(values["epsilon"]),
            terms=_int(values["terms"]),
            lvalue=_float(values["lvalue"]),
            tail_bound=_float(values["tail_bound"]),
            omega=_float(values["omega"]),
            raw1=_float(values["raw1"]),
            raw2=_float(values["raw2"]),
            sha1=sha1,
            sha2=_int(values["sha2"]),
            is_zero=is_zero,
            square1=_bool(values["square1"]),
            square2=_bool(values["square2"]),
            certified=certified if sha1 is not None and not is_zero else None,
            sha_reg1=_float(values["sha_reg1"]),
            anomaly=Anomaly(values["anomaly"]) if values["anomaly"] else None,
        )

    def serialize_checkpoint(self, last_u: int) -> str:
        return f"{CHECKPOINT_PREFIX}{last_u}"

    def parse_checkpoint(self, line: str) -> int:
        if not line.startswith(CHECKPOINT_PREFIX):
            raise ValueError(f"Invalid trailer {line!r}")
        return int(line[len(CHECKPOINT_PREFIX) :])


RECORD_FORMAT = RecordFormat()
