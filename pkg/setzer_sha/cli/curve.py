import logging

from ..bsd import EvalParams, analytic_sha, fully_certified, rank_one_product
from ..curves import CurveParams, classify, invariants, verify_two_torsion
from ..formats.report import (
    REPORT_DATA_JSON_FORMAT,
    CurveReport,
    ReportInvariants,
    ReportLValue,
    ReportSha,
)
from ..lseries import LValueResult, default_cache
from ..periods import c_infty
from .common import open_str_write


def curve_main(args):
    params = EvalParams(
        precision_bits=args.precision_bits, certify_bound=args.certify_bound
    )
    curve = classify(args.u)
    report = curve_report(curve, params)
    REPORT_DATA_JSON_FORMAT.dump(
        lambda: open_str_write("-"), report, pretty=args.pretty
    )
    if not curve.accepted:
        logging.error("u=%d: curve rejected (%s)", curve.u, curve.reason.value)
        return 1
    return 0


def _lvalue(result: LValueResult) -> ReportLValue:
    return ReportLValue(
        kind=result.kind.value,
        value=float(result.value),
        terms=result.terms_used,
        tail_bound=result.tail_bound,
        precision_bits=result.precision_bits,
    )


def curve_report(curve: CurveParams, params: EvalParams) -> CurveReport:
    factorization = curve.factorization
    report = CurveReport(
        u=curve.u,
        n=curve.n,
        curve_class=curve.curve_class.value,
        factors=factorization.primes if factorization is not None else [],
        exponents=factorization.exponents if factorization is not None else [],
        k=curve.k,
        epsilon=curve.epsilon,
        reason=curve.reason.value if curve.reason is not None else None,
    )
    if not curve.accepted:
        return report

    cache = default_cache()
    curve_invariants = invariants(curve)
    report.invariants = ReportInvariants(
        torsion_order=curve_invariants.torsion_order,
        cfin1=curve_invariants.cfin1,
        cfin2=curve_invariants.cfin2,
        c_infty1=float(c_infty(curve.u, 1, params.precision_bits)),
        c_infty2=float(c_infty(curve.u, 2, params.precision_bits)),
        rank_bound=curve_invariants.rank_bound,
        torsion_verified1=verify_two_torsion(curve.u, 1),
        torsion_verified2=verify_two_torsion(curve.u, 2),
    )

    if curve.epsilon == -1:
        result = rank_one_product(curve.u, curve, params, cache)
        report.omega = float(result.omega)
        report.lvalue = _lvalue(result.lprime)
        report.sha_reg1 = float(result.sha_times_reg1)
        return report

    sha = analytic_sha(curve.u, curve, params, cache)
    report.omega = float(sha.omega)
    report.lvalue = _lvalue(sha.lvalue)
    report.sha = ReportSha(
        raw1=float(sha.raw1),
        raw2=float(sha.raw2),
        sha1=sha.sha1,
        sha2=sha.sha2,
        is_zero=sha.is_zero,
        square1=sha.square1,
        square2=sha.square2,
        certified=sha.certified_odd_primes,
        two_part1=sha.two_part1.value if sha.two_part1 is not None else None,
        two_part2=sha.two_part2.value if sha.two_part2 is not None else None,
        fully_certified1=fully_certified(sha, 1),
        fully_certified2=fully_certified(sha, 2),
        rounding_error=sha.rounding_error,
    )
    return report
