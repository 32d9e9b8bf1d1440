"""Initialisation schemes: mappings, ranges, mixture semantics, determinism."""

import math

import numpy as np
import pytest

from bridgq import (
    BetaParams,
    EmptyFeaturesError,
    GateRole,
    InitMethod,
    InitVariant,
    MissingLiteralError,
    baseline_parameters,
    initialize,
    initialize_detailed,
    map_driver,
    map_entangler,
    parse_qasm,
    sample_latents,
    simulate,
    strip_parameters,
)


def test_map_driver_endpoints():
    assert map_driver(0.5) == pytest.approx(0.0)
    assert map_driver(1.0) == pytest.approx(math.pi)
    assert map_driver(0.0) == pytest.approx(-math.pi)


def test_map_entangler_endpoints():
    assert map_entangler(0.5, 0.4) == pytest.approx(0.0)
    assert map_entangler(1.0, 0.4) == pytest.approx(0.2)
    assert map_entangler(0.0, 0.4) == pytest.approx(-0.2)


def test_uniform_grid_two_slots(fixture_features):
    template = parse_qasm("qubit[1] q; ry(0.1) q[0]; rz(0.2) q[0];")
    params = initialize(template, None, InitVariant(InitMethod.UNIFORM),
                        np.random.default_rng(0))
    assert params.tolist() == pytest.approx([-math.pi / 2, math.pi / 2])


def test_uniform_grid_ignores_rng(fixture_template):
    a = initialize(fixture_template, None, InitVariant(InitMethod.UNIFORM),
                   np.random.default_rng(1))
    b = initialize(fixture_template, None, InitVariant(InitMethod.UNIFORM),
                   np.random.default_rng(99))
    assert a.tolist() == b.tolist()


def test_random_range_and_determinism(fixture_template):
    variant = InitVariant(InitMethod.RANDOM)
    a = initialize(fixture_template, None, variant, np.random.default_rng(7))
    b = initialize(fixture_template, None, variant, np.random.default_rng(7))
    assert a.tolist() == b.tolist()
    assert np.all(np.abs(a) <= math.pi)


def test_agentq_returns_source_literals(fixture_template):
    params = initialize(fixture_template, None, InitVariant(InitMethod.AGENTQ),
                        np.random.default_rng(0))
    assert params.tolist() == baseline_parameters(fixture_template).tolist()


def test_agentq_propagates_missing_literals(fixture_template):
    stripped = strip_parameters(fixture_template)
    with pytest.raises(MissingLiteralError):
        initialize(stripped, None, InitVariant(InitMethod.AGENTQ),
                   np.random.default_rng(0))


def test_beta_variants_require_features(fixture_template):
    for method in (InitMethod.BETA_PURE, InitMethod.BETA_MIXTURE,
                   InitMethod.BETA_STRATIFIED):
        with pytest.raises(EmptyFeaturesError):
            initialize(fixture_template, None, InitVariant(method),
                       np.random.default_rng(0))


def test_mixture_with_zero_lambda_equals_pure(fixture_template, fixture_features):
    pure = initialize(fixture_template, fixture_features,
                      InitVariant(InitMethod.BETA_PURE), np.random.default_rng(5))
    mixture = initialize(fixture_template, fixture_features,
                         InitVariant(InitMethod.BETA_MIXTURE, lam=0.0),
                         np.random.default_rng(5))
    assert pure.tolist() == mixture.tolist()


def test_mixture_replacement_fraction():
    # sharply peaked prior so replacements are the only source of spread
    latents, replaced = sample_latents(BetaParams(50.0, 50.0), 100_000, 0.2,
                                       np.random.default_rng(12))
    fraction = float(replaced.mean())
    assert abs(fraction - 0.2) < 0.01
    assert np.all(latents[replaced] >= 0.0) and np.all(latents[replaced] < 1.0)


def test_stratified_ranges(fixture_template, fixture_features):
    variant = InitVariant(InitMethod.BETA_STRATIFIED)
    roles = fixture_template.slot_roles
    for seed in range(100):
        params = initialize(fixture_template, fixture_features, variant,
                            np.random.default_rng(seed))
        for value, role in zip(params, roles):
            if role is GateRole.DRIVER:
                assert -math.pi <= value <= math.pi
            else:
                assert -0.2 <= value <= 0.2


def test_stratified_treats_rz_conservatively(fixture_features):
    template = parse_qasm("qubit[2] q; ry(0.1) q[0]; rz(0.2) q[1]; crz(0.3) q[0], q[1];")
    variant = InitVariant(InitMethod.BETA_STRATIFIED)
    for seed in range(50):
        params = initialize(template, fixture_features, variant,
                            np.random.default_rng(seed))
        assert -0.2 <= params[1] <= 0.2  # rz slot
        assert -0.2 <= params[2] <= 0.2  # crz slot


def test_pure_and_mixture_use_full_range(fixture_template, fixture_features):
    hits_outside_entangler_band = 0
    for seed in range(20):
        params = initialize(fixture_template, fixture_features,
                            InitVariant(InitMethod.BETA_PURE),
                            np.random.default_rng(seed))
        assert np.all(np.abs(params) <= math.pi)
        hits_outside_entangler_band += int(np.any(np.abs(params[4:]) > 0.2))
    assert hits_outside_entangler_band > 0  # entangler slots are not squeezed


def test_near_identity_start(fixture_template):
    # drivers forced to the midpoint latent, entanglers random: the state
    # stays essentially |0...0>
    rng = np.random.default_rng(3)
    roles = fixture_template.slot_roles
    params = np.array([
        map_driver(0.5) if role is GateRole.DRIVER
        else map_entangler(float(rng.random()), 0.4)
        for role in roles])
    state = simulate(fixture_template, params)
    fidelity = float(np.abs(state.amplitudes[0]) ** 2)
    assert fidelity >= 0.99


def test_initialize_detailed_reports_prior(fixture_template, fixture_features):
    result = initialize_detailed(fixture_template, fixture_features,
                                 InitVariant(InitMethod.BETA_STRATIFIED),
                                 np.random.default_rng(0))
    assert result.prior is not None and not result.prior.fallback_used
    assert result.replaced is not None and not result.replaced.any()


def test_initialize_deterministic_bit_identical(fixture_template, fixture_features):
    for method in InitMethod:
        variant = InitVariant(method)
        a = initialize(fixture_template, fixture_features, variant,
                       np.random.default_rng(21))
        b = initialize(fixture_template, fixture_features, variant,
                       np.random.default_rng(21))
        assert a.tobytes() == b.tobytes()


def test_variant_validation():
    with pytest.raises(ValueError):
        InitVariant(InitMethod.BETA_MIXTURE, lam=1.5)
    with pytest.raises(ValueError):
        InitVariant(InitMethod.BETA_STRATIFIED, epsilon=0.0)
    assert InitVariant.from_name("beta-pure").method is InitMethod.BETA_PURE
