import dataclasses
import typing

import dataclasses_json

from ..json import DataJsonFormat, package_json_format


@dataclasses_json.dataclass_json(letter_case=dataclasses_json.LetterCase.CAMEL)
@dataclasses.dataclass
class ReportInvariants:
    torsion_order: int
    cfin1: int
    cfin2: int
    c_infty1: float
    c_infty2: float
    rank_bound: int
    torsion_verified1: bool
    torsion_verified2: bool


@dataclasses_json.dataclass_json(letter_case=dataclasses_json.LetterCase.CAMEL)
@dataclasses.dataclass
class ReportLValue:
    kind: str
    """l or lprime"""
    value: float
    terms: int
    tail_bound: float
    precision_bits: int


@dataclasses_json.dataclass_json(letter_case=dataclasses_json.LetterCase.CAMEL)
@dataclasses.dataclass
class ReportSha:
    raw1: float
    raw2: float
    sha1: int
    sha2: int
    is_zero: bool
    square1: typing.Optional[bool]
    square2: typing.Optional[bool]
    certified: typing.List[int]
    two_part1: typing.Optional[str]
    two_part2: typing.Optional[str]
    fully_certified1: bool
    fully_certified2: bool
    rounding_error: float


@dataclasses_json.dataclass_json(letter_case=dataclasses_json.LetterCase.CAMEL)
@dataclasses.dataclass
class CurveReport:
    u: int
    n: int
    curve_class: str
    factors: typing.List[int]
    exponents: typing.List[int]
    k: typing.Optional[int] = None
    epsilon: typing.Optional[int] = None
    reason: typing.Optional[str] = None
    """Rejection reason"""
    omega: typing.Optional[float] = None
    invariants: typing.Optional[ReportInvariants] = None
    lvalue: typing.Optional[ReportLValue] = None
    sha: typing.Optional[ReportSha] = None
    sha_reg1: typing.Optional[float] = None


@dataclasses_json.dataclass_json(letter_case=dataclasses_json.LetterCase.CAMEL)
@dataclasses.dataclass
class VerifyMismatch:
    u: int
    column: str
    stored: str
    recomputed: str


@dataclasses_json.dataclass_json(letter_case=dataclasses_json.LetterCase.CAMEL)
@dataclasses.dataclass
class VerifyReport:
    rows: int
    """Rows in the scan file"""
    checked: typing.List[int]
    """Values of u recomputed"""
    mismatches: typing.List[VerifyMismatch]
    seed: int


REPORT_JSON_FORMAT = package_json_format("setzer_sha.formats", "report.json")


REPORT_DATA_JSON_FORMAT = DataJsonFormat(REPORT_JSON_FORMAT, CurveReport.schema())


VERIFY_JSON_FORMAT = package_json_format("setzer_sha.formats", "verify.json")


VERIFY_DATA_JSON_FORMAT = DataJsonFormat(VERIFY_JSON_FORMAT, VerifyReport.schema())
