"""Command-line surface: network generation, enumeration, plots, experiments.

Exit codes: 0 success, 2 validation/usage error, 3 guard refusal or an
inconclusive feasibility LP.  Every subcommand echoes its resolved
configuration before doing work.  RELU_REGIONS_THREADS overrides the
parallelism degree when --threads is not given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import cache as cache_mod
from . import experiments
from .geometry import LpInconclusiveError, lp_backend_name
from .network import (NetworkValidationError, init_kaiming, load_network,
                      save_network)
from .regions import (EnumerationGuardError, enumerate_regions,
                      region_set_to_csv, region_set_to_dict)
from .svgplot import render_region_svg

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_GUARD = 3

PHI_CHOICES = {"phi1": 1, "phi2": 2, "phi3": 3, "phi4": 4}


@dataclass(frozen=True)
class RunConfig:
    """Resolved options of one CLI invocation, echoed for reproducibility."""

    subcommand: str
    options: dict

    def echo(self):
        print("config: " + json.dumps({"subcommand": self.subcommand,
                                       **self.options}, sort_keys=True))


def parse_skip_spec(spec: str) -> tuple[tuple[int, int], ...]:
    """Skip grammar 'a-b[,c-d...]', e.g. '1-3,2-4'; empty means no skips."""
    spec = spec.strip()
    if not spec:
        return ()
    pairs = []
    for chunk in spec.split(","):
        parts = chunk.strip().split("-")
        if len(parts) != 2:
            raise NetworkValidationError("skips", f"bad skip entry {chunk!r}; "
                                         "expected 'src-dst'")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise NetworkValidationError("skips", f"bad skip entry {chunk!r}") from exc
    return tuple(pairs)


def _parse_box(values, input_dim: int):
    if values is None:
        return None
    if len(values) != 2 * input_dim:
        raise NetworkValidationError(
            "box", f"expected {2 * input_dim} numbers (lo hi per dimension), "
            f"got {len(values)}")
    return tuple((values[2 * i], values[2 * i + 1]) for i in range(input_dim))


def cmd_init_random(args) -> int:
    skips = parse_skip_spec(args.skips)
    widths = [args.width] * args.layers
    RunConfig("init-random", {
        "layers": args.layers, "width": args.width, "input_dim": args.input_dim,
        "output_dim": args.output_dim, "skips": args.skips, "seed": args.seed,
        "out": args.out,
    }).echo()
    net = init_kaiming(widths, args.input_dim, args.output_dim, skips, args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(save_network(net))
    print(f"wrote {args.out}: {args.layers} hidden layers of width {args.width}, "
          f"{len(skips)} skip connection(s)")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    net = load_network(args.network)
    box = _parse_box(args.box, net.input_dim)
    RunConfig("enumerate", {
        "network": args.network, "box": args.box, "out": args.out,
        "csv": args.csv, "guard": args.guard, "parallel": args.parallel,
        "threads": args.threads, "lp_backend": lp_backend_name(),
    }).echo()
    region_set = enumerate_regions(net, bounding_box=box,
                                   max_neurons_guard=args.guard,
                                   parallel=args.parallel, threads=args.threads)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(region_set_to_dict(region_set), fh, indent=2)
            fh.write("\n")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(region_set_to_csv(region_set))
    stats = region_set.stats
    print(f"{len(region_set)} regions, {stats.patterns_pruned_subtrees} pruned, "
          f"{stats.wall_time:.3f} seconds")
    return EXIT_OK


def cmd_plot(args) -> int:
    net = load_network(args.network)
    if net.input_dim != 2:
        raise NetworkValidationError("input_dim",
                                     "plotting requires a 2-D input network")
    box = _parse_box(args.box, 2)
    RunConfig("plot", {
        "network": args.network, "box": args.box, "out": args.out,
    }).echo()
    region_set = enumerate_regions(net, bounding_box=box)
    svg = render_region_svg(region_set, box)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"wrote {args.out}: {len(region_set)} regions")
    return EXIT_OK


def cmd_compare_skips(args) -> int:
    skips = parse_skip_spec(args.skips)
    if not skips:
        raise NetworkValidationError("skips", "comparison needs a skip spec")
    box = _parse_box(args.box, args.input_dim) if args.box else "default"
    resolved_box = (box if box != "default" else
                    ((-experiments.COMPARISON_BOX_HALF_WIDTH,
                      experiments.COMPARISON_BOX_HALF_WIDTH),) * args.input_dim)
    RunConfig("compare-skips", {
        "layers": args.layers, "width": args.width, "skips": args.skips,
        "trials": args.trials, "seed": args.seed, "input_dim": args.input_dim,
        "output_dim": args.output_dim, "box": list(map(list, resolved_box)),
        "csv": args.csv, "parallel": args.parallel, "threads": args.threads,
        "lp_backend": lp_backend_name(),
    }).echo()
    start = time.perf_counter()
    result = experiments.compare_skips(
        args.layers, args.width, skips, args.trials, args.seed,
        input_dim=args.input_dim, output_dim=args.output_dim,
        bounding_box=box, parallel=args.parallel, threads=args.threads)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(experiments.comparison_csv(result))
    print(f"with skips:    mean {result.with_skips['mean']:.2f} regions "
          f"(stddev {result.with_skips['stddev']:.2f}, n={result.with_skips['count']})")
    print(f"without skips: mean {result.without_skips['mean']:.2f} regions "
          f"(stddev {result.without_skips['stddev']:.2f}, n={result.without_skips['count']})")
    if result.warning:
        print(f"warning: {result.warning}")
    if result.u_test is not None:
        u = result.u_test
        print(f"one-tailed U test (no-skip mean < skip mean): "
              f"U = {u.u_statistic:.1f}, p = {u.p_value:.3e}")
    if result.reject_null is not None:
        verdict = "rejected" if result.reject_null else "not rejected"
        print(f"null hypothesis (equal means) {verdict} at level "
              f"{experiments.SIGNIFICANCE_LEVEL}")
    print(f"total time {time.perf_counter() - start:.1f} s")
    return EXIT_OK


def cmd_cache_stats(args) -> int:
    net = load_network(args.network)
    if net.input_dim != 2:
        raise NetworkValidationError("input_dim",
                                     "grid harness requires a 2-D input network")
    RunConfig("cache-stats", {
        "network": args.network, "train_fn": args.train_fn,
        "grid_start": args.grid_start, "grid_step": args.grid_step,
        "grid_len": args.grid_len, "offset": args.offset,
    }).echo()
    report = experiments.cache_grid_stats(
        net, PHI_CHOICES[args.train_fn], args.grid_start, args.grid_step,
        args.grid_len, args.offset)
    print(f"train points:   {report['train_points']}")
    print(f"test points:    {report['test_points']}")
    print(f"cached regions: {report['cached_regions']}")
    print(f"hit rate:       {report['hit_rate']:.6f}")
    return EXIT_OK


def cmd_predict(args) -> int:
    net = load_network(args.network)
    try:
        x = np.array([float(v) for v in args.x.split(",")])
    except ValueError as exc:
        raise NetworkValidationError("x", f"malformed input vector {args.x!r}") from exc
    if x.shape != (net.input_dim,):
        raise NetworkValidationError(
            "x", f"expected {net.input_dim} comma-separated values")
    RunConfig("predict", {
        "network": args.network, "x": args.x, "cache": args.cache,
    }).echo()
    if args.cache and os.path.exists(args.cache):
        with open(args.cache, "r", encoding="utf-8") as fh:
            cache = cache_mod.load_cache(fh.read())
    else:
        cache = cache_mod.RegionCache()
    before = cache.hits
    output = cache_mod.predict(net, cache, x)
    flag = "hit" if cache.hits > before else "miss"
    print("output: " + " ".join(repr(float(v)) for v in output))
    print(f"cache: {flag} ({len(cache)} regions cached)")
    if args.cache:
        with open(args.cache, "w", encoding="utf-8") as fh:
            fh.write(cache_mod.save_cache(cache))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relu-regions",
        description="Exact linear-region analysis of ReLU networks "
                    "with skip connections")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("init-random", help="write a randomly initialized network")
    p.add_argument("--layers", type=int, required=True, help="number of hidden layers")
    p.add_argument("--width", type=int, required=True, help="neurons per hidden layer")
    p.add_argument("--input-dim", type=int, default=2)
    p.add_argument("--output-dim", type=int, default=1)
    p.add_argument("--skips", default="", help="skip spec 'a-b[,c-d...]', e.g. '1-3'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output network JSON path")
    p.set_defaults(handler=cmd_init_random)

    p = sub.add_parser("enumerate", help="enumerate all linear regions")
    p.add_argument("network", help="network JSON path")
    p.add_argument("--box", type=float, nargs="+", default=None,
                   help="bounding box: lo hi per input dimension")
    p.add_argument("--out", default=None, help="regions JSON output path")
    p.add_argument("--csv", default=None, help="regions CSV output path")
    p.add_argument("--guard", type=int, default=40,
                   help="refuse networks with more hidden neurons than this")
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser("plot", help="render the region partition as SVG")
    p.add_argument("network")
    p.add_argument("--box", type=float, nargs=4, default=[-10.0, 10.0, -10.0, 10.0],
                   metavar=("XLO", "XHI", "YLO", "YHI"))
    p.add_argument("--out", required=True, help="SVG output path")
    p.set_defaults(handler=cmd_plot)

    p = sub.add_parser("compare-skips",
                       help="region-count experiment with and without skips")
    p.add_argument("--layers", type=int, required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--skips", required=True, help="skip spec, e.g. '1-3'")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input-dim", type=int, default=2)
    p.add_argument("--output-dim", type=int, default=1)
    p.add_argument("--box", type=float, nargs="+", default=None,
                   help="counting box, lo hi per dimension (default +-8)")
    p.add_argument("--csv", default=None, help="per-trial CSV output path")
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(handler=cmd_compare_skips)

    p = sub.add_parser("cache-stats", help="grid hit-rate harness")
    p.add_argument("network")
    p.add_argument("--train-fn", choices=sorted(PHI_CHOICES), default="phi2")
    p.add_argument("--grid-start", type=float, default=-10.0)
    p.add_argument("--grid-step", type=float, default=0.1)
    p.add_argument("--grid-len", type=int, default=201)
    p.add_argument("--offset", type=float, default=0.1)
    p.set_defaults(handler=cmd_cache_stats)

    p = sub.add_parser("predict", help="predict through the region cache")
    p.add_argument("network")
    p.add_argument("--x", required=True, help="comma-separated input vector")
    p.add_argument("--cache", default=None, help="cache JSON path (read and updated)")
    p.set_defaults(handler=cmd_predict)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except NetworkValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (EnumerationGuardError, LpInconclusiveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
