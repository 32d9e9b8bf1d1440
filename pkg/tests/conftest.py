import numpy as np
import pytest

import bridgq


@pytest.fixture(scope="session")
def fixture_instance():
    instances = bridgq.load_instances(bridgq.fixture_dir())
    assert [i.id for i in instances] == ["maxcut4"]
    return instances[0]


@pytest.fixture(scope="session")
def fixture_template(fixture_instance):
    return fixture_instance.template()


@pytest.fixture(scope="session")
def fixture_hamiltonian(fixture_instance):
    return fixture_instance.hamiltonian()


@pytest.fixture(scope="session")
def fixture_features(fixture_instance):
    return fixture_instance.features()


def random_template(rng: np.random.Generator, max_qubits: int = 5,
                    max_gates: int = 30) -> bridgq.CircuitTemplate:
    """Random circuit over the full gate vocabulary, literals attached."""
    kinds = list(bridgq.GateKind)
    n = int(rng.integers(1, max_qubits + 1))
    gates, slot = [], 0
    for _ in range(int(rng.integers(1, max_gates + 1))):
        kind = kinds[rng.integers(len(kinds))]
        if kind.wire_arity == 2 and n < 2:
            kind = bridgq.GateKind.RY
        wires = tuple(int(w) for w in rng.choice(n, size=kind.wire_arity, replace=False))
        slots = tuple(range(slot, slot + kind.param_arity))
        slot += kind.param_arity
        literals = tuple(float(rng.uniform(-np.pi, np.pi)) for _ in slots) or None
        gates.append(bridgq.GateInstance(kind, wires, slots, literals))
    return bridgq.CircuitTemplate(n, tuple(gates))
