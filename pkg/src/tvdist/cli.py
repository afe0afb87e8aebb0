"""Command-line front end.

Instances are JSON documents with two arrays-of-arrays under keys "p" and
"q" (decimal or scientific-notation probabilities). Machine-readable run
reports go to stdout as a single JSON object; human-readable summaries go
to stderr. Reports follow ``schemas/run-report.schema.json`` shipped with
the package.

Exit codes: 0 success, 2 validation failure, 3 I/O failure, 4 enumeration
budget exceeded, 5 internal invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import secrets
import sys
import time
from typing import Any

from .coupling import build_stats
from .distributions import ProductDistribution, require_same_shape, validate
from .errors import (
    BudgetExceeded,
    IdenticalDistributions,
    InstanceFormatError,
    InternalInvariantError,
    InvalidParameter,
    ValidationError,
)
from .estimator import (
    EstimatorConfig,
    estimate_tv,
    naive_estimate_tv,
    sample_count,
)
from .oracle import EnumerationBudget, exact_tv

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_BUDGET = 4
EXIT_INTERNAL = 5


def load_instance(path: str) -> tuple[ProductDistribution, ProductDistribution, str]:
    """Read and validate an instance file; returns (P, Q, sha256 of the bytes)."""
    with open(path, "rb") as handle:
        raw = handle.read()
    digest = hashlib.sha256(raw).hexdigest()
    try:
        document = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InstanceFormatError(f"not a JSON document: {exc}") from exc
    if not isinstance(document, dict):
        raise InstanceFormatError("top level must be an object with keys 'p' and 'q'")
    for key in ("p", "q"):
        if key not in document:
            raise InstanceFormatError(f"missing key {key!r}")
        if not isinstance(document[key], list):
            raise InstanceFormatError(f"key {key!r} must be a list of lists")
    try:
        p = validate(document["p"])
        q = validate(document["q"])
    except ValidationError:
        raise
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"probabilities must be numbers: {exc}") from exc
    require_same_shape(p, q)
    return p, q, digest


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _unit_open_float(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must be in (0, 1), got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _seed_int(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"must be a u64, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tvdist",
        description=(
            "Total variation distance between discrete product distributions: "
            "relative-error Monte Carlo estimation plus exact and baseline modes."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    estimate = sub.add_parser(
        "estimate", help="importance-sampling estimate with accuracy guarantees"
    )
    estimate.add_argument("instance", help="JSON instance file with keys 'p' and 'q'")
    estimate.add_argument("--epsilon", type=_positive_float, default=0.1)
    estimate.add_argument("--delta", type=_unit_open_float, default=0.05)
    estimate.add_argument("--seed", type=_seed_int, default=None)
    estimate.add_argument(
        "--samples", type=_positive_int, default=None, help="override the sample count"
    )
    estimate.add_argument("--workers", type=_positive_int, default=1)

    exact = sub.add_parser("exact", help="exact distance by full enumeration")
    exact.add_argument("instance")
    exact.add_argument("--max-states", type=_positive_int, default=None)

    naive = sub.add_parser("naive", help="plain Monte Carlo baseline (no guarantee)")
    naive.add_argument("instance")
    naive.add_argument("--samples", type=_positive_int, required=True)
    naive.add_argument("--seed", type=_seed_int, default=None)

    info = sub.add_parser("info", help="coupling diagnostics, no sampling")
    info.add_argument("instance")
    info.add_argument("--epsilon", type=_positive_float, default=0.1)
    info.add_argument("--delta", type=_unit_open_float, default=0.05)

    return parser


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    generated = secrets.randbits(64)
    print(f"generated seed: {generated}", file=sys.stderr)
    return generated


def _report(
    command: str, path: str, digest: str, config: dict[str, Any], result: dict[str, Any]
) -> dict[str, Any]:
    return {
        "command": command,
        "instance": {"path": path, "sha256": digest},
        "config": config,
        "result": result,
        "timing": {"seconds": 0.0},  # filled in by _emit
    }


def _estimate_result_dict(result: Any) -> dict[str, Any]:
    return {
        "estimate": result.estimate,
        "mean_f": result.mean_f,
        "samples_used": result.samples_used,
        "pr_diff": result.pr_diff,
        "per_coordinate_tv": list(result.per_coordinate_tv),
        "elapsed_seconds": result.elapsed_seconds,
    }


def _cmd_estimate(args: argparse.Namespace) -> tuple[dict[str, Any], str]:
    p, q, digest = load_instance(args.instance)
    seed = _resolve_seed(args.seed)
    config = EstimatorConfig(
        epsilon=args.epsilon,
        delta=args.delta,
        seed=seed,
        samples_override=args.samples,
        workers=args.workers,
    )
    result = estimate_tv(p, q, config)
    report = _report(
        "estimate",
        args.instance,
        digest,
        {
            "epsilon": args.epsilon,
            "delta": args.delta,
            "samples": result.samples_used,
            "seed": seed,
            "workers": args.workers,
        },
        _estimate_result_dict(result),
    )
    summary = (
        f"estimate: d_hat={result.estimate:.6g} "
        f"(m={result.samples_used}, pr_diff={result.pr_diff:.6g}, seed={seed})"
    )
    return report, summary


def _cmd_exact(args: argparse.Namespace) -> tuple[dict[str, Any], str]:
    p, q, digest = load_instance(args.instance)
    budget = (
        EnumerationBudget(max_states=args.max_states)
        if args.max_states is not None
        else EnumerationBudget()
    )
    value = exact_tv(p, q, budget)
    report = _report(
        "exact",
        args.instance,
        digest,
        {"max_states": budget.max_states},
        {"tv": value, "states": p.state_count()},
    )
    return report, f"exact: tv={value:.12g} over {p.state_count()} states"


def _cmd_naive(args: argparse.Namespace) -> tuple[dict[str, Any], str]:
    p, q, digest = load_instance(args.instance)
    seed = _resolve_seed(args.seed)
    result = naive_estimate_tv(p, q, args.samples, seed)
    report = _report(
        "naive",
        args.instance,
        digest,
        {"samples": args.samples, "seed": seed},
        _estimate_result_dict(result),
    )
    summary = f"naive: estimate={result.estimate:.6g} (m={args.samples}, seed={seed})"
    return report, summary


def _cmd_info(args: argparse.Namespace) -> tuple[dict[str, Any], str]:
    p, q, digest = load_instance(args.instance)
    stats = build_stats(p, q)
    identical = stats.pr_diff == 0.0
    result = {
        "n": p.n,
        "domain_sizes": list(p.domain_sizes),
        "per_coordinate_tv": list(stats.d),
        "pr_diff": stats.pr_diff,
        "identical": identical,
        "sample_count": sample_count(p.n, args.epsilon, args.delta),
    }
    report = _report(
        "info",
        args.instance,
        digest,
        {"epsilon": args.epsilon, "delta": args.delta},
        result,
    )
    if identical:
        summary = "info: distributions are identical; an estimate would output 0"
    else:
        summary = (
            f"info: pr_diff={stats.pr_diff:.6g}, "
            f"m={result['sample_count']} at epsilon={args.epsilon}, delta={args.delta}"
        )
    return report, summary


_COMMANDS = {
    "estimate": _cmd_estimate,
    "exact": _cmd_exact,
    "naive": _cmd_naive,
    "info": _cmd_info,
}


def _emit_error(code: int, exc: Exception) -> None:
    payload: dict[str, Any] = {
        "error": {"type": type(exc).__name__, "message": str(exc)}
    }
    coordinate = getattr(exc, "coordinate", None)
    if coordinate is not None:
        payload["error"]["coordinate"] = coordinate
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    print(f"error: {exc}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        report, summary = _COMMANDS[args.command](args)
    except (ValidationError, InvalidParameter, InstanceFormatError) as exc:
        _emit_error(EXIT_VALIDATION, exc)
        return EXIT_VALIDATION
    except IdenticalDistributions as exc:
        _emit_error(EXIT_VALIDATION, exc)
        return EXIT_VALIDATION
    except BudgetExceeded as exc:
        _emit_error(EXIT_BUDGET, exc)
        return EXIT_BUDGET
    except InternalInvariantError as exc:
        _emit_error(EXIT_INTERNAL, exc)
        return EXIT_INTERNAL
    except OSError as exc:
        _emit_error(EXIT_IO, exc)
        return EXIT_IO
    report["timing"]["seconds"] = time.perf_counter() - started
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    print(summary, file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
