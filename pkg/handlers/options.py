# handlers/options.py
"""Flags shared by the sub-commands that run checks."""

import argparse

from config import DEFAULT_SAMPLES, DEFAULT_SEED, JET_TOLERANCE, MAX_WORKERS, CheckConfig


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def add_check_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--samples", type=positive_int, default=DEFAULT_SAMPLES, help="sample points per check")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed of the quasi-random sampler")
    parser.add_argument("--tol", type=positive_float, default=JET_TOLERANCE, help="residual tolerance")
    parser.add_argument("--workers", type=positive_int, default=MAX_WORKERS, help="worker threads per check")


def config_from_args(args: argparse.Namespace) -> CheckConfig:
    return CheckConfig(samples=args.samples, seed=args.seed, tol=args.tol, workers=args.workers)
