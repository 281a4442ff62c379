from ..bsd import EvalParams
from ..formats.report import VERIFY_DATA_JSON_FORMAT
from ..scan import verify
from ..stats import read_records
from .common import open_str_read, open_str_write


def verify_main(args):
    with open_str_read(args.input) as f:
        records = read_records(f)
    report = verify(
        records,
        sample=args.sample,
        seed=args.seed,
        params=EvalParams(precision_bits=args.precision_bits),
    )
    VERIFY_DATA_JSON_FORMAT.dump(lambda: open_str_write("-"), report, pretty=True)
    return 3 if report.mismatches else 0
