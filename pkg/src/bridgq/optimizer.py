"""Adam-driven VQE loop with energy-gap tracking.

The gap |E - E_exact| is evaluated once before any update (step 0) and
after every Adam step; the loop stops at the first step whose gap meets
the tolerance, else at the iteration budget.  Wall-clock time covers the
whole loop including every expectation and gradient evaluation.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .circuits import CircuitTemplate
from .problems import Hamiltonian
from .simulator import expectation, gradient, simulate


class LengthMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class OptimConfig:
    max_iterations: int = 400
    tolerance: float = 0.05
    learning_rate: float = 0.05
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")


@dataclass
class AdamState:
    first_moment: np.ndarray
    second_moment: np.ndarray
    step_count: int = 0

    @classmethod
    def zeros(cls, size: int) -> "AdamState":
        return cls(np.zeros(size), np.zeros(size))


def energy_gap(energy: float, exact: float) -> float:
    return abs(energy - exact)


def adam_step(state: AdamState, params: np.ndarray, grad: np.ndarray,
              cfg: OptimConfig) -> tuple[AdamState, np.ndarray]:
    """One bias-corrected Adam update; returns the new state and params."""
    if not (len(state.first_moment) == len(params) == len(grad)):
        raise LengthMismatchError("params, gradient and moments must share a length")
    t = state.step_count + 1
    m = cfg.adam_beta1 * state.first_moment + (1.0 - cfg.adam_beta1) * grad
    v = cfg.adam_beta2 * state.second_moment + (1.0 - cfg.adam_beta2) * grad ** 2
    m_hat = m / (1.0 - cfg.adam_beta1 ** t)
    v_hat = v / (1.0 - cfg.adam_beta2 ** t)
    new_params = params - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)
    return AdamState(m, v, t), new_params


def convergence_step(gaps, tolerance: float, max_iterations: int) -> tuple[int, bool]:
    """First index whose gap meets the tolerance, else (max_iterations, False)."""
    for t, gap in enumerate(gaps):
        if gap <= tolerance:
            return t, True
    return max_iterations, False


@dataclass
class RunRecord:
    """One VQE run: trajectory of gaps plus convergence accounting."""

    instance_id: str
    method: str
    seed: int
    gap_trajectory: list[float]
    final_gap: float
    t_conv: int
    t_conv_ms: float
    converged: bool
    iterations_executed: int
    fitted_prior: tuple[float, float, bool] | None = None
    aborted: bool = field(default=False)  # non-finite energy encountered

    @property
    def valid(self) -> bool:
        return not self.aborted and math.isfinite(self.final_gap)

    def as_dict(self) -> dict:
        prior = None
        if self.fitted_prior is not None:
            alpha, beta, fallback = self.fitted_prior
            prior = {"alpha": alpha, "beta": beta, "fallback_used": fallback}
        return {
            "instance_id": self.instance_id,
            "method": self.method,
            "seed": self.seed,
            "gap_trajectory": list(self.gap_trajectory),
            "final_gap": self.final_gap,
            "t_conv": self.t_conv,
            "t_conv_ms": self.t_conv_ms,
            "converged": self.converged,
            "iterations_executed": self.iterations_executed,
            "fitted_prior": prior,
            "aborted": self.aborted,
        }


def run_vqe(template: CircuitTemplate, hamiltonian: Hamiltonian, exact: float,
            theta_init, cfg: OptimConfig | None = None, *,
            instance_id: str = "", method: str = "", seed: int = 0,
            fitted_prior: tuple[float, float, bool] | None = None) -> RunRecord:
    """Minimise <H> from theta_init with Adam, tracking the gap trajectory."""
    cfg = cfg or OptimConfig()
    params = np.array(theta_init, dtype=float)

    def record(traj: list[float], t_conv: int, converged: bool,
               elapsed_ms: float, aborted: bool = False) -> RunRecord:
        return RunRecord(
            instance_id=instance_id, method=method, seed=seed,
            gap_trajectory=traj, final_gap=traj[-1], t_conv=t_conv,
            t_conv_ms=elapsed_ms, converged=converged,
            iterations_executed=len(traj) - 1, fitted_prior=fitted_prior,
            aborted=aborted)

    start = time.perf_counter()
    energy = expectation(simulate(template, params), hamiltonian)
    if not math.isfinite(energy):
        elapsed = (time.perf_counter() - start) * 1e3
        return record([math.nan], cfg.max_iterations, False, elapsed, aborted=True)
    gap = energy_gap(energy, exact)
    trajectory = [gap]
    if gap <= cfg.tolerance:
        elapsed = (time.perf_counter() - start) * 1e3
        return record(trajectory, 0, True, elapsed)

    state = AdamState.zeros(params.size)
    for t in range(1, cfg.max_iterations + 1):
        grad = gradient(template, params, hamiltonian)
        state, params = adam_step(state, params, grad, cfg)
        energy = expectation(simulate(template, params), hamiltonian)
        if not math.isfinite(energy):
            trajectory.append(math.nan)
            elapsed = (time.perf_counter() - start) * 1e3
            return record(trajectory, cfg.max_iterations, False, elapsed, aborted=True)
        gap = energy_gap(energy, exact)
        trajectory.append(gap)
        if gap <= cfg.tolerance:
            elapsed = (time.perf_counter() - start) * 1e3
            return record(trajectory, t, True, elapsed)
    elapsed = (time.perf_counter() - start) * 1e3
    return record(trajectory, cfg.max_iterations, False, elapsed)
