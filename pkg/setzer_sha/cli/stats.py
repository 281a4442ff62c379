import logging
import os

from ..stats import (
    certification_series,
    cohen_lenstra_f0,
    divisibility_series,
    divisibility_table,
    format_number,
    growth_series,
    log_grid,
    order_frequencies,
    rank_one_series,
    ratio_series,
    read_records,
    write_series,
)
from .common import open_str_read


def stats_main(args):
    with open_str_read(args.input) as f:
        records = read_records(f)
    grid = log_grid(records, points=args.grid_points, x_min=args.grid_min)

    if args.kind == "orders":
        series = order_frequencies(records, grid, args.k_max)
    elif args.kind == "ratios":
        series = ratio_series(records, grid, args.k_max)
    elif args.kind == "divisibility":
        series = []
        for p in args.primes:
            series.extend(divisibility_series(records, grid, p))
    elif args.kind == "growth":
        series = growth_series(records, grid)
    elif args.kind == "rankone":
        series = rank_one_series(records, grid)
    elif args.kind == "certified":
        series = certification_series(records, grid)

    os.makedirs(args.out, exist_ok=True)
    for s in series:
        with open(os.path.join(args.out, f"{s.label}.tsv"), "w") as f:
            write_series(s, f)
    if args.kind == "divisibility":
        _write_divisibility_table(records, args.primes, args.out)
    logging.info("Wrote %d series to %s", len(series), args.out)
    return 0


def _write_divisibility_table(records, primes, out):
    with open(os.path.join(out, "divisibility_table.tsv"), "w") as f:
        f.write("p\tfreq1\tfreq2\tcohen_lenstra\n")
        for row in divisibility_table(records, primes):
            f.write(
                f"{row.p}\t{format_number(row.freq1)}\t{format_number(row.freq2)}\t"
                f"{format_number(cohen_lenstra_f0(row.p))}\n"
            )
