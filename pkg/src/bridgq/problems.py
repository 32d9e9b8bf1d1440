"""Problem instances: weighted graphs, Pauli-sum cost text, feature vectors.

The cost function arrives as a string over Pauli factors, e.g.
``0.5*Z0*Z1 - 0.3*Z2 + 1.2``.  Terms are separated by top-level ``+``/``-``,
factors inside a term by ``*``; a factor is either a real number or a
Pauli letter followed by a qubit index.  Whitespace is ignored and bare
constants fold into the identity offset.  The convention throughout is
minimisation of the expectation value, so maximisation problems must be
encoded with negated cost text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

# Numerical floor shared with the Beta prior support: normalised features
# are clamped into [FEATURE_FLOOR, 1 - FEATURE_FLOOR].
FEATURE_FLOOR = 1e-6


class MalformedTermError(ValueError):
    pass


class QubitIndexOutOfRangeError(ValueError):
    pass


class EmptyFeaturesError(ValueError):
    pass


class NonFiniteInputError(ValueError):
    pass


class TooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemGraph:
    """Undirected weighted graph; edges are (u, v, weight) triples."""

    node_count: int
    edges: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError("graph needs at least one node")
        seen: set[tuple[int, int]] = set()
        for u, v, _ in self.edges:
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError(f"edge ({u}, {v}) outside {self.node_count} nodes")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add(key)

    @property
    def weights(self) -> list[float]:
        return [float(w) for _, _, w in self.edges]


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    paulis: tuple[tuple[str, int], ...]  # (axis, qubit), axis in {X, Y, Z}


@dataclass(frozen=True)
class Hamiltonian:
    """Real-weighted Pauli sum plus an identity offset."""

    terms: tuple[PauliTerm, ...]
    identity_offset: float = 0.0

    def max_qubit(self) -> int:
        return max((q for t in self.terms for _, q in t.paulis), default=-1)

    def is_diagonal(self) -> bool:
        return all(axis == "Z" for t in self.terms for axis, _ in t.paulis)


_PAULI_FACTOR = re.compile(r"^([XYZ])(\d+)$")


def parse_hamiltonian(text: str, num_qubits: int) -> Hamiltonian:
    """Parse cost text into a Hamiltonian, validated against num_qubits."""
    compact = "".join(text.split())
    if not compact:
        raise MalformedTermError("empty Hamiltonian text")

    terms: list[PauliTerm] = []
    offset = 0.0

    def handle(body: str, sign: float) -> None:
        nonlocal offset
        if not body:
            raise MalformedTermError("dangling sign in Hamiltonian text")
        coeff = sign
        paulis: list[tuple[str, int]] = []
        for factor in body.split("*"):
            if not factor:
                raise MalformedTermError(f"malformed term '{body}'")
            pm = _PAULI_FACTOR.match(factor)
            if pm:
                qubit = int(pm.group(2))
                if qubit >= num_qubits:
                    raise QubitIndexOutOfRangeError(
                        f"qubit {qubit} outside register of {num_qubits} in term '{body}'")
                paulis.append((pm.group(1), qubit))
                continue
            try:
                coeff *= float(factor)
            except ValueError:
                raise MalformedTermError(
                    f"unrecognised factor '{factor}' in term '{body}'") from None
        if paulis:
            if len({q for _, q in paulis}) != len(paulis):
                raise MalformedTermError(f"repeated qubit in term '{body}'")
            terms.append(PauliTerm(coeff, tuple(paulis)))
        else:
            offset += coeff

    # Split on +/- that are not exponent signs.
    pieces = re.split(r"(?<![eE])([+-])", compact)
    if pieces[0]:
        handle(pieces[0], 1.0)
    for sign_sym, body in zip(pieces[1::2], pieces[2::2]):
        handle(body, -1.0 if sign_sym == "-" else 1.0)
    return Hamiltonian(tuple(terms), offset)


def serialize_hamiltonian(hamiltonian: Hamiltonian) -> str:
    """Canonical text form; parse_hamiltonian inverts it exactly."""
    parts: list[str] = []

    def push(value: float, body: str | None) -> None:
        magnitude = format(abs(value), ".17g")
        text = magnitude if body is None else f"{magnitude}*{body}"
        if not parts:
            parts.append(text if value >= 0 else f"-{text}")
        else:
            parts.append(("- " if value < 0 else "+ ") + text)

    for term in hamiltonian.terms:
        push(term.coefficient, "*".join(f"{axis}{q}" for axis, q in term.paulis))
    if hamiltonian.identity_offset != 0.0 or not parts:
        push(hamiltonian.identity_offset, None)
    return " ".join(parts)


def extract_features(graph: ProblemGraph | None,
                     hamiltonian: Hamiltonian | None) -> list[float]:
    """Raw features: edge weights in edge order, then |coefficients| in term order.

    The identity offset carries no instance structure and is excluded.
    """
    feats: list[float] = []
    if graph is not None:
        feats.extend(graph.weights)
    if hamiltonian is not None:
        feats.extend(abs(t.coefficient) for t in hamiltonian.terms)
    if not feats:
        raise EmptyFeaturesError("no edge weights and no Hamiltonian coefficients")
    return feats


def normalize_features(raw) -> np.ndarray:
    """Map raw features into [FEATURE_FLOOR, 1 - FEATURE_FLOOR].

    Values already inside [0, 1] pass through unchanged; otherwise min-max
    scaling is applied first.  A constant out-of-range vector collapses to
    its clamped value.
    """
    x = np.asarray(raw, dtype=float)
    if x.size == 0:
        raise EmptyFeaturesError("cannot normalise an empty feature vector")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInputError("features must be finite")
    lo, hi = float(x.min()), float(x.max())
    if (lo < 0.0 or hi > 1.0) and hi > lo:
        x = (x - lo) / (hi - lo)
    return np.clip(x, FEATURE_FLOOR, 1.0 - FEATURE_FLOOR)


_PAULI_MATS = {
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}
_EYE2 = np.eye(2, dtype=complex)


def diagonal_energies(hamiltonian: Hamiltonian, num_qubits: int) -> np.ndarray:
    """Energies of all computational basis states of a Z-only Hamiltonian.

    Qubit q maps to bit q of the basis index (little-endian).
    """
    if not hamiltonian.is_diagonal():
        raise ValueError("diagonal energies require a Z-only Hamiltonian")
    indices = np.arange(1 << num_qubits)
    energies = np.full(indices.size, hamiltonian.identity_offset)
    for term in hamiltonian.terms:
        signs = np.ones(indices.size)
        for _, qubit in term.paulis:
            signs *= 1.0 - 2.0 * ((indices >> qubit) & 1)
        energies += term.coefficient * signs
    return energies


def dense_matrix(hamiltonian: Hamiltonian, num_qubits: int) -> np.ndarray:
    """Full 2^n x 2^n matrix; qubit n-1 is the leading Kronecker factor."""
    dim = 1 << num_qubits
    out = hamiltonian.identity_offset * np.eye(dim, dtype=complex)
    for term in hamiltonian.terms:
        ops = {q: _PAULI_MATS[axis] for axis, q in term.paulis}
        m = np.eye(1, dtype=complex)
        for q in range(num_qubits - 1, -1, -1):
            m = np.kron(m, ops.get(q, _EYE2))
        out += term.coefficient * m
    return out


def exact_energy(hamiltonian: Hamiltonian, num_qubits: int) -> float:
    """Minimum of the spectrum, by basis enumeration (Z-only) or dense
    diagonalisation (general Pauli sums).

    Raises TooLargeError beyond 20 qubits (Z-only) or 12 qubits (general);
    larger instances should supply exact_energy in the instance file.
    """
    if num_qubits < 1:
        raise ValueError("num_qubits must be positive")
    if hamiltonian.max_qubit() >= num_qubits:
        raise QubitIndexOutOfRangeError(
            f"Hamiltonian acts on qubit {hamiltonian.max_qubit()} "
            f"but only {num_qubits} qubits were declared")
    if hamiltonian.is_diagonal():
        if num_qubits > 20:
            raise TooLargeError(
                "Z-only enumeration is capped at 20 qubits; "
                "supply exact_energy in the instance file instead")
        return float(diagonal_energies(hamiltonian, num_qubits).min())
    if num_qubits > 12:
        raise TooLargeError(
            "dense diagonalisation is capped at 12 qubits; "
            "supply exact_energy in the instance file instead")
    return float(np.linalg.eigvalsh(dense_matrix(hamiltonian, num_qubits)).min())
