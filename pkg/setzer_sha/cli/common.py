import argparse
import contextlib
import sys
import typing

from ..arith import is_prime
from ..curves import CurveClass


def classes_type(string: str) -> typing.List[CurveClass]:
    classes = []
    for name in string.split(","):
        try:
            curve_class = CurveClass(name.strip())
        except ValueError:
            raise argparse.ArgumentTypeError(f"Invalid class {name!r}")
        if curve_class == CurveClass.REJECTED:
            raise argparse.ArgumentTypeError("Rejected curves are never scanned")
        if curve_class not in classes:
            classes.append(curve_class)
    return classes


def primes_type(string: str) -> typing.List[int]:
    try:
        primes = [int(p) for p in string.split(",")]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))
    for p in primes:
        if not is_prime(p):
            raise argparse.ArgumentTypeError(f"{p} is not prime")
    return primes


def open_str_read(path):
    # "-" is left open on exit
    return open(path, "r") if path != "-" else contextlib.nullcontext(sys.stdin)


def open_str_write(path):
    return open(path, "w") if path != "-" else contextlib.nullcontext(sys.stdout)


def precision_type(string: str) -> int:
    try:
        bits = int(string)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))
    if bits < 96:
        raise argparse.ArgumentTypeError("Precision must be at least 96 bits")
    return bits
