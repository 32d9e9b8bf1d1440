"""bridgq: data-driven initialisation and benchmarking for variational circuits.

Pipeline: parse a generated OpenQASM circuit into a parameter-slotted
template, strip its embedded numeric angles, fit a Beta prior to the
problem instance's normalised features, inject initial parameters under
one of six schemes, optimise the expectation value with Adam on an exact
statevector simulator, and compare the schemes under a strictly paired
benchmark protocol.
"""

from importlib import resources

from .beta_prior import (
    BetaParams,
    DomainError,
    digamma,
    fit_beta_mle,
    log_beta,
    log_likelihood,
    sample_beta,
    trigamma,
)
from .circuits import (
    CircuitTemplate,
    GateInstance,
    GateKind,
    GateRole,
    MalformedStatementError,
    MissingLiteralError,
    MissingQubitDeclarationError,
    QasmError,
    UnsupportedGateError,
    WireOutOfRangeError,
    baseline_parameters,
    classify_role,
    parse_qasm,
    strip_parameters,
    to_qasm,
)
from .harness import (
    BenchConfig,
    EmptyPairingError,
    Instance,
    MethodSummary,
    PairedSummary,
    export_results,
    filter_by_baseline,
    generate_synthetic,
    load_instances,
    oracle_best,
    paired_summary,
    run_benchmark,
    write_instances,
)
from .initializers import (
    InitMethod,
    InitResult,
    InitVariant,
    initialize,
    initialize_detailed,
    map_driver,
    map_entangler,
    sample_latents,
)
from .optimizer import (
    AdamState,
    LengthMismatchError,
    OptimConfig,
    RunRecord,
    adam_step,
    convergence_step,
    energy_gap,
    run_vqe,
)
from .problems import (
    EmptyFeaturesError,
    Hamiltonian,
    MalformedTermError,
    NonFiniteInputError,
    PauliTerm,
    ProblemGraph,
    QubitIndexOutOfRangeError,
    TooLargeError,
    exact_energy,
    extract_features,
    normalize_features,
    parse_hamiltonian,
    serialize_hamiltonian,
)
from .simulator import (
    DimensionMismatchError,
    ParamLengthMismatchError,
    StateVector,
    expectation,
    gradient,
    simulate,
)

__version__ = "0.1.0"


def fixture_dir():
    """Directory holding the bundled example instance(s)."""
    return resources.files("bridgq") / "data"


def fixture_path():
    """Path of the bundled 4-node weighted Max-Cut instance."""
    return fixture_dir() / "maxcut4.json"


def fixture_qasm_path():
    """Path of the bundled fixture circuit as plain OpenQASM text."""
    return fixture_dir() / "maxcut4.qasm"
