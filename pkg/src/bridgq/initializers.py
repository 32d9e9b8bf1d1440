"""Initial parameter vectors for circuit templates.

Six schemes share one entry point:

* ``agentq``       - the literals already embedded in the circuit source
* ``random``       - independent uniform draws over [-pi, pi]
* ``uniform``      - deterministic centred grid over [-pi, pi]
* ``beta-pure``    - latents from a Beta prior fitted to instance
                     features, every slot mapped to the full range
* ``beta-mixture`` - as pure, but each latent is independently replaced
                     by a uniform draw with probability lambda
* ``beta-stratified`` - role-aware mapping: driver slots get the full
                     range, entangling and conservative single-qubit
                     slots are squeezed near the identity

Pure and mixture map all slots through the full-range driver rule; only
the stratified scheme looks at gate roles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, unique

import numpy as np

from .beta_prior import BetaParams, fit_beta_mle, sample_beta
from .circuits import CircuitTemplate, GateRole, baseline_parameters
from .problems import EmptyFeaturesError

TWO_PI = 2.0 * math.pi


@unique
class InitMethod(str, Enum):
    AGENTQ = "agentq"
    RANDOM = "random"
    UNIFORM = "uniform"
    BETA_PURE = "beta-pure"
    BETA_MIXTURE = "beta-mixture"
    BETA_STRATIFIED = "beta-stratified"


@dataclass(frozen=True)
class InitVariant:
    """Initialisation scheme choice plus its scheme-specific knobs.

    ``lam`` is the uniform replacement fraction (mixture only) and
    ``epsilon`` the entangler angle scale (stratified only); both default
    to the shared experimental configuration.
    """

    method: InitMethod
    lam: float = 0.2
    epsilon: float = 0.4

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")

    @classmethod
    def from_name(cls, name: str, lam: float = 0.2, epsilon: float = 0.4) -> "InitVariant":
        return cls(InitMethod(name), lam=lam, epsilon=epsilon)


@dataclass(frozen=True)
class InitResult:
    """Parameter vector plus the provenance needed for run records."""

    params: np.ndarray
    prior: BetaParams | None = None
    replaced: np.ndarray | None = None  # per-slot mixture replacement flags


def map_driver(latent):
    """Full-range mapping [0, 1] -> [-pi, pi]."""
    return TWO_PI * np.asarray(latent, dtype=float) - math.pi


def map_entangler(latent, epsilon: float):
    """Near-identity mapping [0, 1] -> [-epsilon/2, epsilon/2]."""
    return (np.asarray(latent, dtype=float) - 0.5) * epsilon


def sample_latents(prior: BetaParams, count: int, lam: float,
                   rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Beta latents with optional per-slot uniform replacement.

    Returns (latents, replaced) where replaced flags the slots whose Beta
    draw was swapped for a uniform one.  With lam == 0 the generator
    stream is consumed exactly as by a pure draw.
    """
    latents = sample_beta(prior, count, rng)
    replaced = np.zeros(count, dtype=bool)
    if lam > 0.0:
        replaced = rng.random(count) < lam
        fresh = rng.random(count)
        latents = np.where(replaced, fresh, latents)
    return latents, replaced


def initialize_detailed(template: CircuitTemplate, features,
                        variant: InitVariant, rng: np.random.Generator) -> InitResult:
    """Initial parameters for every slot of the template under a variant.

    ``features`` is the normalised feature vector; it is only consulted
    by the Beta variants and may be None otherwise.
    """
    count = template.slot_count
    method = variant.method

    if method is InitMethod.AGENTQ:
        return InitResult(baseline_parameters(template))
    if method is InitMethod.RANDOM:
        return InitResult(rng.uniform(-math.pi, math.pi, size=count))
    if method is InitMethod.UNIFORM:
        grid = np.arange(count, dtype=float)
        return InitResult(-math.pi + TWO_PI * (grid + 0.5) / max(count, 1))

    feats = np.asarray(features, dtype=float) if features is not None else np.empty(0)
    if feats.size == 0:
        raise EmptyFeaturesError("Beta variants need a non-empty feature vector")
    prior = fit_beta_mle(feats)

    if method is InitMethod.BETA_PURE:
        latents, replaced = sample_latents(prior, count, 0.0, rng)
        return InitResult(map_driver(latents), prior, replaced)
    if method is InitMethod.BETA_MIXTURE:
        latents, replaced = sample_latents(prior, count, variant.lam, rng)
        return InitResult(map_driver(latents), prior, replaced)

    # stratified: same latent stream as pure, role-aware mapping
    latents, replaced = sample_latents(prior, count, 0.0, rng)
    angles = np.empty(count)
    for k, role in enumerate(template.slot_roles):
        if role is GateRole.DRIVER:
            angles[k] = map_driver(latents[k])
        else:
            angles[k] = map_entangler(latents[k], variant.epsilon)
    return InitResult(angles, prior, replaced)


def initialize(template: CircuitTemplate, features, variant: InitVariant,
               rng: np.random.Generator) -> np.ndarray:
    """Parameter vector of length slot_count; see initialize_detailed."""
    return initialize_detailed(template, features, variant, rng).params
