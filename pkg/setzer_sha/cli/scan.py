from ..scan import ScanConfig, scan


async def scan_main(args):
    config = ScanConfig(
        u_min=args.u_min,
        u_max=args.u_max,
        out_path=args.out,
        classes=args.classes,
        precision_bits=args.precision_bits,
        workers=args.jobs,
        verify_terms=args.verify_terms,
        checkpoint_every=args.checkpoint_every,
        chunk_size=args.chunk_size,
        cache=args.cache,
        certify_bound=args.certify_bound,
    )
    await scan(config)
    return 0
