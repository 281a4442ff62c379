import logging

from ..stats import (
    HistogramSpec,
    HistogramTarget,
    histogram,
    read_records,
    write_histogram,
)
from .common import open_str_read, open_str_write


def hist_main(args):
    with open_str_read(args.input) as f:
        records = read_records(f)
    result = histogram(records, HistogramSpec.for_target(HistogramTarget(args.target)))
    with open_str_write(args.out) as f:
        write_histogram(result, f)
    logging.info(
        "%d values, mean %.6f, variance %.6f",
        result.total,
        result.mean,
        result.variance,
    )
    return 0
