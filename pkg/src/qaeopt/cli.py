"""Command-line surface: count, optimize, verify, experiment.

Every command prints line-delimited JSON on stdout (one object per line) and
diagnostics on stderr. Exit codes: 0 success, 1 numerical or verification
failure, 2 usage or file-format error. All randomness is seeded, so reruns
with the same flags are byte-identical apart from the "timings" field.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat

import numpy as np

from . import __version__
from .exceptions import (
    CanonicalizationError,
    SearchSpaceTooLargeError,
    StateFileError,
    ValidationError,
)
from .pipeline import generate_instance, build_encoder, theorem1_report, verify_theorem1
from .qstate import BipartiteDims, eigendecompose, nats_to_bits
from .search import DEFAULT_EXHAUSTIVE_THRESHOLD, SearchConfig, optimize
from .statefile import file_digest, load_statefile
from .tableau import count_regular, random_regular

VERIFY_RESIDUAL_LIMIT = 1e-6  # nats
EXPERIMENT_FLOOR = 1e-15  # nats, applied to reported per-instance values only


def _emit(obj: dict) -> None:
    print(json.dumps(obj, sort_keys=True))


def _report_value(x: float, bits: bool) -> float:
    """Clamp round-off negatives to zero and convert the unit for display."""
    if -1e-9 < x < 0.0:
        x = 0.0
    return nats_to_bits(x) if bits else x


def _result_dict(result, bits: bool) -> dict:
    d = result.to_dict()
    d["best_mi"] = _report_value(d["best_mi"], bits)
    d["trajectory"] = [_report_value(x, bits) for x in d["trajectory"]]
    return d


def _compression_dict(report, bits: bool) -> dict:
    d = report.to_dict()
    for key in ("mi_middle", "rel_entropy_out", "residual"):
        d[key] = _report_value(d[key], bits)
    return d


def cmd_count(args) -> int:
    count = count_regular(BipartiteDims(args.d_a, args.d_b))
    _emit(
        {
            "command": "count",
            "d_a": args.d_a,
            "d_b": args.d_b,
            "count": count,
            "exhaustive_threshold": args.threshold,
            "within_threshold": count <= args.threshold,
        }
    )
    return 0


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        n1=args.n1,
        n2=args.n2,
        n_d=args.nd,
        seed=args.seed,
        exhaustive_threshold=args.threshold,
        parallelism=args.jobs,
    )


def cmd_optimize(args) -> int:
    started = time.perf_counter()
    sf = load_statefile(args.statefile)
    config = _search_config(args)
    compression = None
    if sf.is_dense:
        rho = sf.density_matrix()
        spectrum = eigendecompose(rho)
        probs = spectrum.probs
    else:
        probs = sf.probabilities()
    result = optimize(probs, sf.dims, config)
    if sf.is_dense:
        plan = build_encoder(spectrum, result.best_tableau, sf.dims)
        compression = _compression_dict(verify_theorem1(rho, plan), args.bits)
    _emit(
        {
            "command": "optimize",
            "version": __version__,
            "input_digest": file_digest(args.statefile),
            "label": sf.label,
            "dims": {"d_a": sf.dims.d_a, "d_b": sf.dims.d_b},
            "config": {
                "n1": config.n1,
                "n2": config.n2,
                "n_d": config.n_d,
                "seed": config.seed,
                "exhaustive_threshold": config.exhaustive_threshold,
                "parallelism": config.parallelism,
            },
            "unit": "bits" if args.bits else "nats",
            "result": _result_dict(result, args.bits),
            "compression": compression,
            "timings": {"total_s": time.perf_counter() - started},
        }
    )
    return 0


def cmd_verify(args) -> int:
    started = time.perf_counter()
    sf = load_statefile(args.statefile)
    if not sf.is_dense:
        print("verify requires a dense-matrix state file (eigenvectors needed)", file=sys.stderr)
        return 2
    rho = sf.density_matrix()
    if args.plan == "identity":
        report = theorem1_report(rho, np.eye(sf.dims.total), sf.dims)
        tableau_cells = None
    else:
        tableau = random_regular(sf.dims, args.seed)
        plan = build_encoder(eigendecompose(rho), tableau, sf.dims)
        report = verify_theorem1(rho, plan)
        tableau_cells = [list(row) for row in tableau.cells]
    _emit(
        {
            "command": "verify",
            "version": __version__,
            "input_digest": file_digest(args.statefile),
            "dims": {"d_a": sf.dims.d_a, "d_b": sf.dims.d_b},
            "plan": args.plan,
            "seed": args.seed,
            "tableau": tableau_cells,
            "unit": "bits" if args.bits else "nats",
            **_compression_dict(report, args.bits),
            "reconstruction_frobenius": report.reconstruction_frobenius,
            "timings": {"total_s": time.perf_counter() - started},
        }
    )
    return 0 if report.residual < VERIFY_RESIDUAL_LIMIT else 1


def _experiment_state(
    kind: str,
    d_a: int,
    d_b: int,
    master_seed: int,
    index: int,
    n1: int,
    n2: int,
    n_d: int,
    threshold: int,
) -> dict:
    dims = BipartiteDims(d_a, d_b)
    rho = generate_instance(kind, dims, np.random.SeedSequence((master_seed, index, 0)))
    probs = eigendecompose(rho).probs
    search_seed = int(np.random.SeedSequence((master_seed, index, 1)).generate_state(1)[0])
    config = SearchConfig(
        n1=n1, n2=n2, n_d=n_d, seed=search_seed,
        exhaustive_threshold=threshold, parallelism=1,
    )
    result = optimize(probs, dims, config)
    return {
        "state": index,
        "mi_initial": result.initial_mi,
        "mi_final_raw": result.best_mi,
        "method": result.method,
        "evaluations": result.evaluations,
    }


_EXPERIMENT_KINDS = {"fig2a": "diagonal-mixed", "fig2b": "product-spectrum"}


def cmd_experiment(args) -> int:
    started = time.perf_counter()
    if args.states < 1:
        print("error: --states must be at least 1", file=sys.stderr)
        return 2
    kind = _EXPERIMENT_KINDS[args.kind]
    indices = range(args.states)
    star_args = (
        repeat(kind), repeat(args.da), repeat(args.db), repeat(args.seed), indices,
        repeat(args.n1), repeat(args.n2), repeat(args.nd), repeat(args.threshold),
    )
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_experiment_state, *star_args))
    else:
        rows = list(map(_experiment_state, *star_args))

    bits = args.bits
    finals = []
    initials = []
    for row in rows:
        floored = max(row["mi_final_raw"], EXPERIMENT_FLOOR)
        finals.append(floored)
        initials.append(row["mi_initial"])
        _emit(
            {
                "command": "experiment",
                "kind": args.kind,
                "state": row["state"],
                "mi_initial": _report_value(row["mi_initial"], bits),
                "mi_final": nats_to_bits(floored) if bits else floored,
                "method": row["method"],
                "evaluations": row["evaluations"],
            }
        )
    conv = (lambda x: nats_to_bits(x)) if bits else (lambda x: x)
    _emit(
        {
            "command": "experiment",
            "aggregate": True,
            "kind": args.kind,
            "version": __version__,
            "states": args.states,
            "dims": {"d_a": args.da, "d_b": args.db},
            "config": {"n1": args.n1, "n2": args.n2, "n_d": args.nd, "seed": args.seed},
            "unit": "bits" if bits else "nats",
            "floor": EXPERIMENT_FLOOR,
            "mean_final_mi": conv(sum(finals) / len(finals)),
            "mean_initial_mi": conv(sum(initials) / len(initials)),
            "max_final_mi": conv(max(finals)),
            "final_mi_values": [conv(x) for x in sorted(finals)],
            "timings": {"total_s": time.perf_counter() - started},
        }
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bits", action="store_true", help="report entropies in bits instead of nats")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (results do not depend on this)")
    common.add_argument(
        "--threshold",
        type=int,
        default=DEFAULT_EXHAUSTIVE_THRESHOLD,
        help="largest tableau count for which exhaustive traversal is used",
    )

    search_flags = argparse.ArgumentParser(add_help=False)
    search_flags.add_argument("--n1", type=int, default=20000, help="breadth-phase samples")
    search_flags.add_argument("--n2", type=int, default=12, help="seeds kept for the depth phase")
    search_flags.add_argument("--nd", type=int, default=200, help="descent iterations per seed")
    search_flags.add_argument("--seed", type=int, default=0, help="master RNG seed")

    parser = argparse.ArgumentParser(
        prog="qaeopt",
        description="Compress bipartite quantum states by minimizing retained/discarded mutual information",
    )
    parser.add_argument("--version", action="version", version=f"qaeopt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_count = sub.add_parser("count", parents=[common], help="count regular Young tableaux of a grid")
    p_count.add_argument("d_a", type=int)
    p_count.add_argument("d_b", type=int)
    p_count.set_defaults(func=cmd_count)

    p_opt = sub.add_parser(
        "optimize", parents=[common, search_flags], help="minimize mutual information for a state file"
    )
    p_opt.add_argument("statefile")
    p_opt.set_defaults(func=cmd_optimize)

    p_ver = sub.add_parser(
        "verify", parents=[common], help="check the compression identity on a dense state"
    )
    p_ver.add_argument("statefile")
    p_ver.add_argument("--seed", type=int, default=0, help="seed for the random tableau plan")
    p_ver.add_argument(
        "--plan", choices=("random", "identity"), default="random",
        help="encode with a random regular tableau or skip encoding (U = identity)",
    )
    p_ver.set_defaults(func=cmd_verify)

    p_exp = sub.add_parser(
        "experiment", parents=[common, search_flags], help="batch optimization over random states"
    )
    p_exp.add_argument("kind", choices=sorted(_EXPERIMENT_KINDS))
    p_exp.add_argument("--states", type=int, default=100)
    p_exp.add_argument("--da", type=int, default=8, help="dimension of the discarded subsystem")
    p_exp.add_argument("--db", type=int, default=8, help="dimension of the retained subsystem")
    p_exp.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StateFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, SearchSpaceTooLargeError, CanonicalizationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
