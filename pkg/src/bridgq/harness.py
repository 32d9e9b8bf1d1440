"""Instance sets, the paired benchmark protocol, and delimited exports.

Instance files are one JSON document each:

    {"id": str, "num_qubits": int,
     "graph": {"nodes": int, "edges": [[u, v, w], ...]},
     "cost_hamiltonian": str, "qasm": str,
     "exact_energy": number | null}

An optional ``"hamiltonian_terms"`` block may carry a pre-parsed term
list instead of relying on the cost text:

    {"terms": [[coeff, [["Z", 0], ["Z", 1]]], ...], "identity_offset": c}

Runs are keyed (instance, method, seed).  A method's statistics count an
(instance, seed) pair only when both it and the baseline produced valid
results on it, and only for instances the baseline filter kept.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from statistics import median

import numpy as np

from .circuits import CircuitTemplate, parse_qasm
from .initializers import InitMethod, InitVariant, initialize_detailed
from .optimizer import OptimConfig, RunRecord, run_vqe
from .problems import (
    Hamiltonian,
    PauliTerm,
    ProblemGraph,
    TooLargeError,
    exact_energy,
    extract_features,
    normalize_features,
    parse_hamiltonian,
    serialize_hamiltonian,
)

logger = logging.getLogger("bridgq.harness")

METHOD_ORDER = ("agentq", "random", "uniform",
                "beta-pure", "beta-mixture", "beta-stratified", "beta-best")
BETA_METHODS = ("beta-pure", "beta-mixture", "beta-stratified")
BASELINE_METHOD = "agentq"

RUNS_HEADER = ("instance_id", "method", "seed", "final_gap", "t_conv", "converged",
               "iterations_executed", "wall_ms", "prior_alpha", "prior_beta",
               "prior_fallback", "aborted")
SUMMARY_HEADER = ("method", "mean_residual", "std_residual", "median_improvement_pct",
                  "success_prob", "mean_conv_latency", "mean_time_s", "n_paired")


class EmptyPairingError(ValueError):
    pass


@dataclass(frozen=True)
class Instance:
    id: str
    num_qubits: int
    graph: ProblemGraph
    cost_hamiltonian: str
    qasm: str
    exact_energy: float | None = None
    hamiltonian_terms: Hamiltonian | None = None  # pre-parsed escape hatch

    def hamiltonian(self) -> Hamiltonian:
        if self.hamiltonian_terms is not None:
            return self.hamiltonian_terms
        return parse_hamiltonian(self.cost_hamiltonian, self.num_qubits)

    def template(self) -> CircuitTemplate:
        return parse_qasm(self.qasm)

    def features(self) -> np.ndarray:
        return normalize_features(extract_features(self.graph, self.hamiltonian()))

    def reference_energy(self) -> float:
        """Stored exact energy, or computed when feasible (TooLargeError else)."""
        if self.exact_energy is not None:
            return float(self.exact_energy)
        return exact_energy(self.hamiltonian(), self.num_qubits)


def _instance_from_dict(payload: dict, origin: str) -> Instance:
    graph_raw = payload["graph"]
    graph = ProblemGraph(
        int(graph_raw["nodes"]),
        tuple((int(u), int(v), float(w)) for u, v, w in graph_raw["edges"]),
    )
    terms = None
    if payload.get("hamiltonian_terms") is not None:
        block = payload["hamiltonian_terms"]
        terms = Hamiltonian(
            tuple(PauliTerm(float(c), tuple((str(a), int(q)) for a, q in ps))
                  for c, ps in block["terms"]),
            float(block.get("identity_offset", 0.0)),
        )
    inst = Instance(
        id=str(payload["id"]),
        num_qubits=int(payload["num_qubits"]),
        graph=graph,
        cost_hamiltonian=str(payload["cost_hamiltonian"]),
        qasm=str(payload["qasm"]),
        exact_energy=None if payload.get("exact_energy") is None
        else float(payload["exact_energy"]),
        hamiltonian_terms=terms,
    )
    template = inst.template()
    template.validate()
    if template.num_qubits != inst.num_qubits:
        raise ValueError(
            f"{origin}: qasm declares {template.num_qubits} qubits "
            f"but the instance says {inst.num_qubits}")
    hamiltonian = inst.hamiltonian()
    if hamiltonian.max_qubit() >= inst.num_qubits:
        raise ValueError(f"{origin}: Hamiltonian exceeds {inst.num_qubits} qubits")
    return inst


def load_instances(path) -> list[Instance]:
    """Load every ``*.json`` under a directory (or one file), sorted by id.

    Bad files are skipped with a logged warning naming the failure; they
    never abort the whole load.
    """
    root = Path(path)
    files = [root] if root.is_file() else sorted(root.glob("*.json"))
    out: list[Instance] = []
    seen: set[str] = set()
    for file in files:
        try:
            payload = json.loads(file.read_text())
            inst = _instance_from_dict(payload, file.name)
        except Exception as exc:  # collect, warn, continue
            logger.warning("skipping %s: %s", file.name, exc)
            continue
        if inst.id in seen:
            logger.warning("skipping %s: duplicate instance id '%s'", file.name, inst.id)
            continue
        seen.add(inst.id)
        out.append(inst)
    out.sort(key=lambda i: i.id)
    return out


def generate_synthetic(count: int, node_range: tuple[int, int] = (3, 8),
                       seed: int = 42) -> list[Instance]:
    """Deterministic random Max-Cut instances with layered ansatz circuits.

    Graphs are connected (random spanning tree plus extra edges), weights
    uniform in [0.1, 1.0].  The cost text encodes the negated Max-Cut
    objective so that lower expectation means a better cut, and the exact
    energy comes from full basis enumeration.  Circuits carry two layers
    of per-qubit ry rotations followed by a crz ring, with pseudo-random
    literals standing in for generated parameters.
    """
    lo, hi = node_range
    if not (3 <= lo <= hi <= 12):
        raise ValueError("node_range must lie within [3, 12]")
    instances = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        n = int(rng.integers(lo, hi + 1))

        edges: set[tuple[int, int]] = set()
        for v in range(1, n):
            u = int(rng.integers(0, v))
            edges.add((min(u, v), max(u, v)))
        for u in range(n):
            for v in range(u + 1, n):
                if (u, v) not in edges and rng.random() < 0.3:
                    edges.add((u, v))
        weighted = tuple((u, v, float(rng.uniform(0.1, 1.0)))
                         for u, v in sorted(edges))
        graph = ProblemGraph(n, weighted)

        # Negated Max-Cut: -sum w/2 (1 - Z_u Z_v)
        terms = tuple(PauliTerm(0.5 * w, (("Z", u), ("Z", v))) for u, v, w in weighted)
        offset = -0.5 * sum(w for _, _, w in weighted)
        hamiltonian = Hamiltonian(terms, offset)

        qasm_lines = ["OPENQASM 3.0;", f"qubit[{n}] q;"]
        for _layer in range(2):
            for q in range(n):
                angle = format(rng.uniform(-math.pi, math.pi), ".17g")
                qasm_lines.append(f"ry({angle}) q[{q}];")
            for q in range(n):
                angle = format(rng.uniform(-math.pi, math.pi), ".17g")
                qasm_lines.append(f"crz({angle}) q[{q}], q[{(q + 1) % n}];")
        qasm = "\n".join(qasm_lines) + "\n"

        instances.append(Instance(
            id=f"synthetic-{seed}-{i:04d}",
            num_qubits=n,
            graph=graph,
            cost_hamiltonian=serialize_hamiltonian(hamiltonian),
            qasm=qasm,
            exact_energy=exact_energy(hamiltonian, n),
        ))
    return instances


def _format_float(value: float) -> str:
    return format(value, ".17g")


def _json_text(obj, indent: int = 0) -> str:
    """JSON with floats printed at 17 significant digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f"{inner}{json.dumps(k)}: {_json_text(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [f"{inner}{_json_text(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    return json.dumps(obj)


def instance_to_dict(inst: Instance) -> dict:
    payload = {
        "id": inst.id,
        "num_qubits": inst.num_qubits,
        "graph": {"nodes": inst.graph.node_count,
                  "edges": [[u, v, w] for u, v, w in inst.graph.edges]},
        "cost_hamiltonian": inst.cost_hamiltonian,
        "qasm": inst.qasm,
        "exact_energy": inst.exact_energy,
    }
    if inst.hamiltonian_terms is not None:
        payload["hamiltonian_terms"] = {
            "terms": [[t.coefficient, [[a, q] for a, q in t.paulis]]
                      for t in inst.hamiltonian_terms.terms],
            "identity_offset": inst.hamiltonian_terms.identity_offset,
        }
    return payload


def write_instances(instances, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for inst in instances:
        path = out / f"{inst.id}.json"
        path.write_text(_json_text(instance_to_dict(inst)) + "\n")
        written.append(path)
    return written


def filter_by_baseline(baseline_records, threshold: float = 5.0) -> set[str]:
    """Instance ids whose baseline runs are all valid with gap <= threshold."""
    by_instance: dict[str, list[RunRecord]] = {}
    for rec in baseline_records:
        by_instance.setdefault(rec.instance_id, []).append(rec)
    kept = set()
    for instance_id, recs in by_instance.items():
        if all(r.valid for r in recs) and max(r.final_gap for r in recs) <= threshold:
            kept.add(instance_id)
    return kept


@dataclass(frozen=True)
class MethodSummary:
    method: str
    mean_residual: float
    std_residual: float
    median_improvement_pct: float | None  # None for the baseline itself
    success_prob: float
    mean_conv_latency: float
    mean_time_s: float
    n_paired: int


@dataclass(frozen=True)
class PairedSummary:
    rows: tuple[MethodSummary, ...]
    success_threshold: float = 0.05
    improvement_denom_floor: float = 1e-6


def _method_sort_key(method: str):
    try:
        return (METHOD_ORDER.index(method), method)
    except ValueError:
        return (len(METHOD_ORDER), method)


def paired_summary(records, kept_ids, eps_success: float = 0.05,
                   denom_floor: float = 1e-6) -> PairedSummary:
    """Per-method statistics over strictly paired (instance, seed) runs."""
    baseline = {(r.instance_id, r.seed): r for r in records
                if r.method == BASELINE_METHOD and r.valid}
    methods = sorted({r.method for r in records}, key=_method_sort_key)
    rows = []
    for method in methods:
        pairs = [(r, baseline[(r.instance_id, r.seed)]) for r in records
                 if r.method == method and r.valid
                 and r.instance_id in kept_ids
                 and (r.instance_id, r.seed) in baseline]
        if not pairs:
            raise EmptyPairingError(f"method '{method}' has no valid paired runs")
        gaps = np.array([r.final_gap for r, _ in pairs])
        improvement = None
        if method != BASELINE_METHOD:
            improvement = float(median(
                100.0 * (b.final_gap - r.final_gap) / max(b.final_gap, denom_floor)
                for r, b in pairs))
        rows.append(MethodSummary(
            method=method,
            mean_residual=float(gaps.mean()),
            std_residual=float(gaps.std()),
            median_improvement_pct=improvement,
            success_prob=float(np.mean(gaps <= eps_success)),
            mean_conv_latency=float(np.mean([r.t_conv for r, _ in pairs])),
            mean_time_s=float(np.mean([r.t_conv_ms for r, _ in pairs])) / 1e3,
            n_paired=len(pairs),
        ))
    return PairedSummary(tuple(rows), eps_success, denom_floor)


def oracle_best(records, variants: tuple[str, ...] = BETA_METHODS) -> list[RunRecord]:
    """Retrospective per-(instance, seed) pick of the best Beta variant.

    Selection is by smallest final gap, exact ties by smaller wall-clock,
    remaining ties by the fixed variant order.
    """
    groups: dict[tuple[str, int], list[RunRecord]] = {}
    for rec in records:
        if rec.method in variants and rec.valid:
            groups.setdefault((rec.instance_id, rec.seed), []).append(rec)
    chosen = []
    for key in sorted(groups):
        best = min(groups[key],
                   key=lambda r: (r.final_gap, r.t_conv_ms, variants.index(r.method)))
        chosen.append(replace(best, method="beta-best"))
    return chosen


def _record_row(rec: RunRecord) -> list[str]:
    prior = ("", "", "")
    if rec.fitted_prior is not None:
        alpha, beta, fallback = rec.fitted_prior
        prior = (_format_float(alpha), _format_float(beta), str(bool(fallback)).lower())
    return [rec.instance_id, rec.method, str(rec.seed), _format_float(rec.final_gap),
            str(rec.t_conv), str(rec.converged).lower(), str(rec.iterations_executed),
            _format_float(rec.t_conv_ms), *prior, str(rec.aborted).lower()]


def _summary_row(row: MethodSummary) -> list[str]:
    improvement = "" if row.median_improvement_pct is None \
        else _format_float(row.median_improvement_pct)
    return [row.method, _format_float(row.mean_residual), _format_float(row.std_residual),
            improvement, _format_float(row.success_prob),
            _format_float(row.mean_conv_latency), _format_float(row.mean_time_s),
            str(row.n_paired)]


def export_results(records, summary: PairedSummary, out_dir,
                   metadata: dict | None = None) -> dict[str, Path]:
    """Write runs.csv, summary.csv, per-instance trajectory CSVs and meta.json.

    Wall-clock values live only in the clearly named ``wall_ms`` and
    ``mean_time_s`` columns so deterministic comparisons can mask them.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ordered = sorted(records, key=lambda r: (r.instance_id, _method_sort_key(r.method), r.seed))

    runs_path = out / "runs.csv"
    with runs_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RUNS_HEADER)
        for rec in ordered:
            writer.writerow(_record_row(rec))

    summary_path = out / "summary.csv"
    with summary_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for row in summary.rows:
            writer.writerow(_summary_row(row))

    traj_dir = out / "trajectories"
    traj_dir.mkdir(exist_ok=True)
    by_instance: dict[str, list[RunRecord]] = {}
    for rec in ordered:
        by_instance.setdefault(rec.instance_id, []).append(rec)
    multi_seed = len({r.seed for r in ordered}) > 1
    for instance_id, recs in by_instance.items():
        columns = [(f"{r.method}_seed{r.seed}" if multi_seed else r.method, r)
                   for r in recs]
        depth = 1 + max(r.iterations_executed for _, r in columns)
        path = traj_dir / f"{instance_id}.csv"
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["iteration", *(name for name, _ in columns)])
            for t in range(depth):
                row = [str(t)]
                for _, rec in columns:
                    # short trajectories repeat their final value
                    gap = rec.gap_trajectory[min(t, len(rec.gap_trajectory) - 1)]
                    row.append(_format_float(gap))
                writer.writerow(row)
            footer = " ".join(f"{name}={rec.t_conv}" for name, rec in columns)
            fh.write(f"# converged_at: {footer}\n")

    meta_path = out / "meta.json"
    meta = {"success_threshold": summary.success_threshold,
            "improvement_denom_floor": summary.improvement_denom_floor}
    if metadata:
        meta.update(metadata)
    meta_path.write_text(_json_text(meta) + "\n")
    return {"runs": runs_path, "summary": summary_path,
            "trajectories": traj_dir, "meta": meta_path}


@dataclass(frozen=True)
class BenchConfig:
    methods: tuple[str, ...] = METHOD_ORDER[:-1]  # beta-best is computed, not run
    seeds: tuple[int, ...] = (42,)
    optim: OptimConfig = field(default_factory=OptimConfig)
    lam: float = 0.2
    epsilon: float = 0.4
    exclusion_threshold: float = 5.0
    success_threshold: float = 0.05
    denom_floor: float = 1e-6
    workers: int = 1


def _instance_key(instance_id: str) -> int:
    return zlib.crc32(instance_id.encode())


def _run_task(task) -> RunRecord:
    inst, exact, method, seed, optim, lam, epsilon = task
    template = inst.template()
    hamiltonian = inst.hamiltonian()
    variant = InitVariant(InitMethod(method), lam=lam, epsilon=epsilon)
    rng = np.random.default_rng([seed, _instance_key(inst.id), METHOD_ORDER.index(method)])
    features = inst.features() if method in BETA_METHODS else None
    init = initialize_detailed(template, features, variant, rng)
    prior = None
    if init.prior is not None:
        prior = (init.prior.alpha, init.prior.beta, init.prior.fallback_used)
    return run_vqe(template, hamiltonian, exact, init.params, optim,
                   instance_id=inst.id, method=method, seed=seed, fitted_prior=prior)


def run_benchmark(instances, cfg: BenchConfig) -> tuple[list[RunRecord], PairedSummary]:
    """Execute the paired protocol over instances x methods x seeds.

    Runs are embarrassingly parallel; records are sorted afterwards so
    worker scheduling never influences the outputs.
    """
    if BASELINE_METHOD not in cfg.methods:
        raise ValueError("baseline 'agentq' is required for pairing")

    resolved = []
    for inst in sorted(instances, key=lambda i: i.id):
        try:
            resolved.append((inst, inst.reference_energy()))
        except (TooLargeError, ValueError) as exc:
            logger.warning("rejecting instance '%s': %s", inst.id, exc)
    tasks = [(inst, exact, method, seed, cfg.optim, cfg.lam, cfg.epsilon)
             for inst, exact in resolved
             for method in cfg.methods
             for seed in cfg.seeds]

    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_run_task, tasks, chunksize=1))
    else:
        records = [_run_task(t) for t in tasks]

    if all(m in cfg.methods for m in BETA_METHODS):
        records.extend(oracle_best(records))
    records.sort(key=lambda r: (r.instance_id, _method_sort_key(r.method), r.seed))

    kept = filter_by_baseline([r for r in records if r.method == BASELINE_METHOD],
                              threshold=cfg.exclusion_threshold)
    summary = paired_summary(records, kept, cfg.success_threshold, cfg.denom_floor)
    return records, summary
