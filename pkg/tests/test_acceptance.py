"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test prints one `[criterion N] ... PASS/FAIL` line.  Criterion 1 is
expected to fail on its alpha band: the true fixed-support MLE of the
worked example is alpha = 2.503 (cross-checked against scipy's
constrained fit), outside the stated 1.8 +/- 0.5 window, and no correct
maximum-likelihood fit can land inside it.  See the README's Tests
section.
"""

import math
import os
import time

import numpy as np
import pytest

import bridgq
from bridgq import (
    GateRole,
    InitMethod,
    InitVariant,
    OptimConfig,
    RunRecord,
    StateVector,
    baseline_parameters,
    convergence_step,
    expectation,
    filter_by_baseline,
    fit_beta_mle,
    initialize,
    log_likelihood,
    paired_summary,
    parse_hamiltonian,
    run_vqe,
    simulate,
)
from bridgq.cli import main

from conftest import random_template
from oracles import (
    oracle_beta_grid_best,
    oracle_circuit_unitary,
    oracle_finite_difference_gradient,
)

WORKED_EXAMPLE = [0.7, 0.3, 0.9, 0.5]


def _verdict(number: int, name: str, ok: bool) -> None:
    print(f"[criterion {number}] {name}: {'PASS' if ok else 'FAIL'}")


def test_criterion_1_worked_example_prior_fit():
    start = time.perf_counter()
    params = fit_beta_mle(WORKED_EXAMPLE)
    fitted_ll = log_likelihood(WORKED_EXAMPLE, params)
    grid_best = oracle_beta_grid_best(WORKED_EXAMPLE, grid_size=50)
    elapsed = time.perf_counter() - start

    alpha_in_band = abs(params.alpha - 1.8) <= 0.5
    beta_in_band = abs(params.beta - 1.4) <= 0.5
    dominates = fitted_ll >= grid_best - 1e-6
    ok = alpha_in_band and beta_in_band and dominates and elapsed < 1.0
    print(f"fitted (alpha, beta) = ({params.alpha:.6f}, {params.beta:.6f}); "
          f"alpha band [1.3, 2.3] {'holds' if alpha_in_band else 'VIOLATED'}, "
          f"beta band [0.9, 1.9] {'holds' if beta_in_band else 'VIOLATED'}; "
          f"log-likelihood {fitted_ll:.6f} vs grid best {grid_best:.6f}")
    _verdict(1, "worked-example prior fit", ok)

    assert dominates, "fit must dominate the 50x50 grid-search oracle"
    assert elapsed < 1.0
    assert beta_in_band, f"beta {params.beta} outside 1.4 +/- 0.5"
    # The exact MLE of this data has alpha = 2.503; no correct fit can bring it
    # inside the externally fixed 1.8 +/- 0.5 band (see README, Tests section).
    # Asserted as stated, expected red.
    assert alpha_in_band, f"alpha {params.alpha} outside 1.8 +/- 0.5"


def test_criterion_2_mle_consistency():
    start = time.perf_counter()
    samples = np.random.default_rng(0).beta(2.0, 5.0, size=10_000)
    params = fit_beta_mle(samples)
    elapsed = time.perf_counter() - start
    ok = 1.8 <= params.alpha <= 2.2 and 4.5 <= params.beta <= 5.5 and elapsed < 2.0
    _verdict(2, "MLE consistency on 10k Beta(2,5) samples", ok)
    assert 1.8 <= params.alpha <= 2.2
    assert 4.5 <= params.beta <= 5.5
    assert elapsed < 2.0


def test_criterion_3_stratified_range_invariant(fixture_template, fixture_features):
    start = time.perf_counter()
    variant = InitVariant(InitMethod.BETA_STRATIFIED, epsilon=0.4)
    roles = fixture_template.slot_roles
    driver_angles, entangler_angles = [], []
    for seed in range(1000):
        values = initialize(fixture_template, fixture_features, variant,
                            np.random.default_rng(seed))
        for value, role in zip(values, roles):
            (driver_angles if role is GateRole.DRIVER else entangler_angles).append(value)
    elapsed = time.perf_counter() - start
    driver_ok = len(driver_angles) == 4000 and all(
        -math.pi <= v <= math.pi for v in driver_angles)
    entangler_ok = len(entangler_angles) == 3000 and all(
        -0.2 <= v <= 0.2 for v in entangler_angles)
    ok = driver_ok and entangler_ok and elapsed < 1.0
    _verdict(3, "stratified range invariant over 1000 seeds", ok)
    assert driver_ok
    assert entangler_ok
    assert elapsed < 1.0


def test_criterion_4_simulator_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(404)
    worst = 0.0
    for _ in range(50):
        template = random_template(rng, max_qubits=5, max_gates=30)
        values = baseline_parameters(template)
        got = simulate(template, values).amplitudes
        want = oracle_circuit_unitary(template, values)[:, 0]
        worst = max(worst, float(np.max(np.abs(got - want))))

    bell = simulate(bridgq.parse_qasm("qubit[2] q; h q[0]; cx q[0], q[1];"), [])
    bell_want = np.array([1 / math.sqrt(2), 0, 0, 1 / math.sqrt(2)], dtype=complex)
    bell_err = float(np.max(np.abs(bell.amplitudes - bell_want)))

    h = parse_hamiltonian("1.2 - 0.35*Z0*Z1 - 0.15*Z1*Z2 - 0.45*Z2*Z3 - 0.25*Z0*Z3", 4)
    uncut = np.zeros(16, dtype=complex)
    uncut[0b0000] = 1.0
    allcut = np.zeros(16, dtype=complex)
    allcut[0b0101] = 1.0
    e_uncut = expectation(StateVector(4, uncut), h)
    e_allcut = expectation(StateVector(4, allcut), h)
    elapsed = time.perf_counter() - start

    ok = (worst < 1e-10 and bell_err < 1e-10
          and abs(e_uncut) < 1e-12 and abs(e_allcut - 2.4) < 1e-12
          and elapsed < 5.0)
    _verdict(4, f"simulator dense-matrix oracle (max err {worst:.2e})", ok)
    assert worst < 1e-10
    assert bell_err < 1e-10
    assert abs(e_uncut) < 1e-12
    assert abs(e_allcut - 2.4) < 1e-12
    assert elapsed < 5.0


def test_criterion_5_gradient_check():
    from bridgq import Hamiltonian, PauliTerm, gradient

    start = time.perf_counter()
    rng = np.random.default_rng(505)
    worst = 0.0
    checked = 0
    while checked < 50:
        template = random_template(rng, max_qubits=4, max_gates=16)
        if template.slot_count == 0:
            continue
        values = rng.uniform(-math.pi, math.pi, template.slot_count)
        terms = []
        for _ in range(int(rng.integers(1, 4))):
            size = int(rng.integers(1, min(template.num_qubits, 2) + 1))
            qubits = rng.choice(template.num_qubits, size=size, replace=False)
            terms.append(PauliTerm(float(rng.normal()),
                                   tuple(("XYZ"[rng.integers(3)], int(q)) for q in qubits)))
        hamiltonian = Hamiltonian(tuple(terms), float(rng.normal()))
        got = gradient(template, values, hamiltonian)
        want = oracle_finite_difference_gradient(template, values, hamiltonian, step=1e-5)
        worst = max(worst, float(np.max(np.abs(got - want))))
        checked += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-5 and elapsed < 10.0
    _verdict(5, f"gradient vs central finite differences (max err {worst:.2e})", ok)
    assert worst <= 1e-5
    assert elapsed < 10.0


def test_criterion_6_metric_arithmetic_fixture():
    def record(instance_id, method, gap, seed=1):
        return RunRecord(instance_id=instance_id, method=method, seed=seed,
                         gap_trajectory=[gap], final_gap=gap, t_conv=0,
                         t_conv_ms=1.0, converged=True, iterations_executed=0)

    # success probability 2/3 at the inclusive threshold
    records = []
    for i, gap in enumerate([0.01, 0.1, 0.05]):
        records.append(record(f"i{i}", "agentq", 0.5))
        records.append(record(f"i{i}", "random", gap))
    summary = paired_summary(records, {"i0", "i1", "i2"}, eps_success=0.05)
    success = {r.method: r for r in summary.rows}["random"].success_prob

    # two-point median improvement of 0%
    records = [record("a", "agentq", 1.0), record("b", "agentq", 2.0),
               record("a", "beta-pure", 0.5), record("b", "beta-pure", 3.0)]
    two_point = paired_summary(records, {"a", "b"})
    median_improvement = {r.method: r for r in two_point.rows}[
        "beta-pure"].median_improvement_pct

    # first trajectory index meeting the tolerance
    t_conv, converged = convergence_step([1.0, 0.2, 0.04], 0.05, 400)

    # baseline-gap exclusion at the strict boundary
    kept = filter_by_baseline([record("x", "agentq", 6.0), record("y", "agentq", 5.0)])

    ok = (success == pytest.approx(2 / 3) and median_improvement == 0.0
          and (t_conv, converged) == (2, True) and kept == {"y"})
    _verdict(6, "metric arithmetic fixture", ok)
    assert success == pytest.approx(2 / 3)
    assert median_improvement == 0.0
    assert (t_conv, converged) == (2, True)
    assert kept == {"y"}


def test_criterion_7_oracle_dominance_end_to_end(tmp_path):
    start = time.perf_counter()
    out = tmp_path / "bench20"
    workers = str(min(8, os.cpu_count() or 1))
    assert main(["bench", "--synthetic", "20", "--out", str(out),
                 "--workers", workers]) == 0
    elapsed = time.perf_counter() - start

    rows = [line.split(",") for line in (out / "runs.csv").read_text().splitlines()]
    header, data = rows[0], rows[1:]
    idx = {name: header.index(name) for name in header}
    gaps: dict[tuple[str, str], dict[str, float]] = {}
    for row in data:
        key = (row[idx["instance_id"]], row[idx["seed"]])
        gaps.setdefault(key, {})[row[idx["method"]]] = float(row[idx["final_gap"]])

    dominance = all(
        methods["beta-best"] == min(methods["beta-pure"], methods["beta-mixture"],
                                    methods["beta-stratified"])
        for methods in gaps.values())

    summary = {line.split(",")[0]: line.split(",")
               for line in (out / "summary.csv").read_text().splitlines()[1:]}
    best_mean = float(summary["beta-best"][1])
    variant_means = [float(summary[m][1])
                     for m in ("beta-pure", "beta-mixture", "beta-stratified")]
    mean_ok = all(best_mean <= m for m in variant_means)

    ok = dominance and mean_ok and elapsed < 120.0
    _verdict(7, "oracle dominance through cmd_bench on 20 instances", ok)
    assert dominance, "beta-best must equal the per-run minimum of the variants"
    assert mean_ok, "beta-best mean residual must not exceed any variant's"
    assert elapsed < 120.0


def test_criterion_8_convergence_smoke(fixture_instance, fixture_template,
                                       fixture_hamiltonian, fixture_features):
    start = time.perf_counter()
    assert fixture_instance.exact_energy == -2.4
    # reference recomputed by enumeration, independent of the stored value
    assert bridgq.exact_energy(fixture_hamiltonian, 4) == pytest.approx(-2.4, abs=1e-12)
    variant = InitVariant(InitMethod.BETA_STRATIFIED)
    converged = 0
    for seed in range(10):
        theta = initialize(fixture_template, fixture_features, variant,
                           np.random.default_rng(seed))
        record = run_vqe(fixture_template, fixture_hamiltonian, -2.4, theta,
                         OptimConfig())
        converged += int(record.converged and record.final_gap <= 0.05)
    elapsed = time.perf_counter() - start
    ok = converged >= 1 and elapsed < 30.0
    _verdict(8, f"end-to-end convergence smoke ({converged}/10 seeds converged)", ok)
    assert converged >= 1
    assert elapsed < 30.0


def test_criterion_9_bench_determinism(tmp_path):
    args = ["bench", "--synthetic", "10", "--seeds", "1,2"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0

    def masked_runs(path):
        lines = path.read_text().splitlines()
        wall = lines[0].split(",").index("wall_ms")
        return "\n".join(
            ",".join(cell for i, cell in enumerate(line.split(",")) if i != wall)
            for line in lines)

    identical = masked_runs(tmp_path / "a" / "runs.csv") == \
        masked_runs(tmp_path / "b" / "runs.csv")
    _verdict(9, "byte-identical runs.csv modulo wall-clock columns", identical)
    assert identical
