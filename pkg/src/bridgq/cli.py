"""Command-line entry point: parse | init | run | bench | gen | report.

Every command is deterministic given its flags and seed (wall-clock
fields excepted).  The default seed comes from BRIDGQ_SEED when set.
Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections import Counter

import numpy as np

from .circuits import GateRole, MissingLiteralError, QasmError, parse_qasm
from .harness import (
    BASELINE_METHOD,
    BETA_METHODS,
    METHOD_ORDER,
    BenchConfig,
    EmptyPairingError,
    export_results,
    generate_synthetic,
    load_instances,
    run_benchmark,
    write_instances,
    _instance_from_dict,
    _json_text,
)
from .initializers import InitMethod, InitVariant, initialize_detailed
from .optimizer import OptimConfig, run_vqe
from .problems import EmptyFeaturesError, TooLargeError

RUNNABLE_METHODS = METHOD_ORDER[:-1]  # beta-best is computed, never requested


def _default_seed() -> int:
    try:
        return int(os.environ.get("BRIDGQ_SEED", "42"))
    except ValueError:
        return 42


def _add_optim_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--max-iterations", type=int, default=400,
                        help="iteration budget T_max (default 400)")
    parser.add_argument("--tolerance", type=float, default=0.05,
                        help="convergence threshold on the energy gap (default 0.05)")
    parser.add_argument("--learning-rate", type=float, default=0.05,
                        help="Adam learning rate (default 0.05)")


def _add_variant_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mixture-lambda", type=float, default=0.2,
                        help="uniform replacement fraction for beta-mixture (default 0.2)")
    parser.add_argument("--entangler-epsilon", type=float, default=0.4,
                        help="entangler angle scale for beta-stratified (default 0.4)")


def _optim_from_args(args) -> OptimConfig:
    return OptimConfig(max_iterations=args.max_iterations, tolerance=args.tolerance,
                       learning_rate=args.learning_rate)


def _load_single_instance(path: str):
    with open(path) as fh:
        return _instance_from_dict(json.load(fh), os.path.basename(path))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bridgq",
        description="Parse generated quantum circuits, fit data-driven priors, "
                    "initialise and optimise them, and benchmark the schemes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_parse = sub.add_parser("parse", help="parse a QASM file and report its structure")
    p_parse.add_argument("file", help="OpenQASM source file")

    p_init = sub.add_parser("init", help="emit an initial parameter vector as JSON")
    p_init.add_argument("instance", help="instance JSON file")
    p_init.add_argument("--variant", required=True, choices=RUNNABLE_METHODS)
    p_init.add_argument("--seed", type=int, default=_default_seed())
    _add_variant_flags(p_init)

    p_run = sub.add_parser("run", help="run one VQE optimisation and print the record")
    p_run.add_argument("instance", help="instance JSON file")
    p_run.add_argument("--variant", required=True, choices=RUNNABLE_METHODS)
    p_run.add_argument("--seed", type=int, default=_default_seed())
    _add_variant_flags(p_run)
    _add_optim_flags(p_run)

    p_bench = sub.add_parser("bench", help="run the paired benchmark protocol")
    p_bench.add_argument("instances_dir", nargs="?", default=None,
                         help="directory of instance JSON files")
    p_bench.add_argument("--synthetic", type=int, default=None, metavar="N",
                         help="generate N synthetic instances instead of loading")
    p_bench.add_argument("--nodes", type=int, nargs=2, default=(3, 8),
                         metavar=("LO", "HI"), help="synthetic node range (default 3 8)")
    p_bench.add_argument("--methods", default="all",
                         help="comma list of methods or 'all' (default all)")
    p_bench.add_argument("--seeds", default=None,
                         help="comma list of per-run seeds (default: the global seed)")
    p_bench.add_argument("--seed", type=int, default=_default_seed(),
                         help="generation seed for --synthetic")
    p_bench.add_argument("--out", default="results", help="output directory")
    p_bench.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                         help="parallel workers (default: available parallelism)")
    p_bench.add_argument("--exclusion-threshold", type=float, default=5.0,
                         help="drop instances whose baseline gap exceeds this (default 5.0)")
    p_bench.add_argument("--success-threshold", type=float, default=0.05,
                         help="success when the final gap is at most this (default 0.05)")
    _add_variant_flags(p_bench)
    _add_optim_flags(p_bench)

    p_gen = sub.add_parser("gen", help="generate synthetic instance files")
    p_gen.add_argument("--count", type=int, required=True)
    p_gen.add_argument("--nodes", type=int, nargs=2, default=(3, 8), metavar=("LO", "HI"))
    p_gen.add_argument("--seed", type=int, default=_default_seed())
    p_gen.add_argument("--out", required=True, help="output directory")

    p_report = sub.add_parser("report", help="render figures from a results directory")
    p_report.add_argument("results_dir", help="directory written by 'bench'")
    p_report.add_argument("--out", default=None,
                          help="figure directory (default <results_dir>/figures)")
    p_report.add_argument("--max-trajectories", type=int, default=None,
                          help="cap the number of trajectory figures")

    return parser


def cmd_parse(args) -> int:
    with open(args.file) as fh:
        source = fh.read()
    if source.lstrip().startswith("{"):  # instance JSON: parse its circuit
        source = str(json.loads(source)["qasm"])
    template = parse_qasm(source)
    roles = Counter(template.slot_roles)
    print(f"qubits={template.num_qubits} gates={len(template.gates)} "
          f"slots={template.slot_count} "
          f"drivers={roles.get(GateRole.DRIVER, 0)} "
          f"conservative={roles.get(GateRole.CONSERVATIVE_SINGLE, 0)} "
          f"entanglers={roles.get(GateRole.ENTANGLER, 0)}")
    histogram = Counter(g.kind.value for g in template.gates)
    if histogram:
        print("histogram: " + " ".join(f"{name}={count}"
                                       for name, count in sorted(histogram.items())))
    return 0


def _variant_from_args(args) -> InitVariant:
    return InitVariant(InitMethod(args.variant), lam=args.mixture_lambda,
                       epsilon=args.entangler_epsilon)


def cmd_init(args) -> int:
    inst = _load_single_instance(args.instance)
    template = inst.template()
    variant = _variant_from_args(args)
    features = inst.features() if args.variant in BETA_METHODS else None
    rng = np.random.default_rng(args.seed)
    result = initialize_detailed(template, features, variant, rng)
    prior = None
    if result.prior is not None:
        prior = {"alpha": result.prior.alpha, "beta": result.prior.beta,
                 "fallback_used": result.prior.fallback_used}
    payload = {"instance_id": inst.id, "variant": args.variant, "seed": args.seed,
               "params": [float(v) for v in result.params], "prior": prior}
    print(_json_text(payload))
    return 0


def cmd_run(args) -> int:
    inst = _load_single_instance(args.instance)
    template = inst.template()
    hamiltonian = inst.hamiltonian()
    exact = inst.reference_energy()
    variant = _variant_from_args(args)
    features = inst.features() if args.variant in BETA_METHODS else None
    rng = np.random.default_rng(args.seed)
    result = initialize_detailed(template, features, variant, rng)
    prior = None
    if result.prior is not None:
        prior = (result.prior.alpha, result.prior.beta, result.prior.fallback_used)
    record = run_vqe(template, hamiltonian, exact, result.params,
                     _optim_from_args(args), instance_id=inst.id,
                     method=args.variant, seed=args.seed, fitted_prior=prior)
    print(_json_text(record.as_dict()))
    return 0


def cmd_bench(args, parser: argparse.ArgumentParser) -> int:
    if (args.instances_dir is None) == (args.synthetic is None):
        parser.error("provide either an instances directory or --synthetic N")
    if args.methods == "all":
        methods = RUNNABLE_METHODS
    else:
        methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
        unknown = [m for m in methods if m not in RUNNABLE_METHODS]
        if unknown:
            parser.error(f"unknown methods: {', '.join(unknown)}")
    if BASELINE_METHOD not in methods:
        parser.error("baseline 'agentq' required for pairing")
    seeds = (args.seed,) if args.seeds is None else tuple(
        int(s) for s in args.seeds.split(",") if s.strip())

    if args.synthetic is not None:
        instances = generate_synthetic(args.synthetic, tuple(args.nodes), args.seed)
    else:
        instances = load_instances(args.instances_dir)
    if not instances:
        print("no instances to run", file=sys.stderr)
        return 1

    cfg = BenchConfig(methods=methods, seeds=seeds, optim=_optim_from_args(args),
                      lam=args.mixture_lambda, epsilon=args.entangler_epsilon,
                      exclusion_threshold=args.exclusion_threshold,
                      success_threshold=args.success_threshold,
                      workers=max(1, args.workers))
    records, summary = run_benchmark(instances, cfg)
    metadata = {
        "methods": list(methods), "seeds": list(seeds),
        "generation_seed": args.seed, "exclusion_threshold": args.exclusion_threshold,
        "max_iterations": args.max_iterations, "tolerance": args.tolerance,
        "learning_rate": args.learning_rate, "mixture_lambda": args.mixture_lambda,
        "entangler_epsilon": args.entangler_epsilon,
    }
    paths = export_results(records, summary, args.out, metadata)

    from .report import format_summary_table, load_summary
    print(format_summary_table(load_summary(args.out)))
    print(f"\nwrote {paths['runs']}, {paths['summary']}, {paths['trajectories']}/")
    return 0


def cmd_gen(args) -> int:
    instances = generate_synthetic(args.count, tuple(args.nodes), args.seed)
    written = write_instances(instances, args.out)
    print(f"wrote {len(written)} instance file(s) to {args.out}")
    return 0


def cmd_report(args) -> int:
    from .report import format_summary_table, load_summary, render_report
    written = render_report(args.results_dir, args.out, args.max_trajectories)
    print(format_summary_table(load_summary(args.results_dir)))
    print(f"\nwrote {len(written)} figure(s)")
    return 0


_DOMAIN_ERRORS = (QasmError, MissingLiteralError, EmptyFeaturesError, TooLargeError,
                  EmptyPairingError, ValueError, OSError, json.JSONDecodeError, KeyError)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "parse":
            return cmd_parse(args)
        if args.command == "init":
            return cmd_init(args)
        if args.command == "run":
            return cmd_run(args)
        if args.command == "bench":
            return cmd_bench(args, parser)
        if args.command == "gen":
            return cmd_gen(args)
        if args.command == "report":
            return cmd_report(args)
    except _DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    parser.error(f"unknown command {args.command}")
    return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
