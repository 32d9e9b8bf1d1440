"""Dense statevector simulation, expectation values, analytic gradients.

Little-endian convention throughout: qubit 0 is the least significant
bit of the basis-state index.  Rotations follow exp(-i*theta*sigma/2);
controlled gates apply their payload when the control bit is 1.

Gradients are computed by a reverse (adjoint) sweep: one forward
simulation, then each gate is undone once while the derivative of its
unitary is applied to an intermediate state, giving O(gates) state-sized
operations for the whole parameter vector.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .circuits import CircuitTemplate, GateInstance, GateKind
from .problems import Hamiltonian, _PAULI_MATS


class ParamLengthMismatchError(ValueError):
    pass


class DimensionMismatchError(ValueError):
    pass


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray  # complex128, length 2**num_qubits


_SQRT1_2 = 1.0 / math.sqrt(2.0)

_FIXED_1Q = {
    GateKind.H: np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=complex),
    GateKind.X: _PAULI_MATS["X"],
    GateKind.Y: _PAULI_MATS["Y"],
    GateKind.Z: _PAULI_MATS["Z"],
    GateKind.S: np.array([[1.0, 0.0], [0.0, 1.0j]], dtype=complex),
    GateKind.T: np.array([[1.0, 0.0], [0.0, cmath.exp(0.25j * math.pi)]], dtype=complex),
}


def _rx(theta: float) -> np.ndarray:
    c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
    return np.array([[c, -1.0j * s], [-1.0j * s, c]], dtype=complex)


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta: float) -> np.ndarray:
    phase = cmath.exp(0.5j * theta)
    return np.array([[1.0 / phase, 0.0], [0.0, phase]], dtype=complex)


def _u3(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
    return np.array(
        [[c, -cmath.exp(1.0j * lam) * s],
         [cmath.exp(1.0j * phi) * s, cmath.exp(1.0j * (phi + lam)) * c]],
        dtype=complex)


def _drx(theta: float) -> np.ndarray:
    c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
    return 0.5 * np.array([[-s, -1.0j * c], [-1.0j * c, -s]], dtype=complex)


def _dry(theta: float) -> np.ndarray:
    c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
    return 0.5 * np.array([[-s, -c], [c, -s]], dtype=complex)


def _drz(theta: float) -> np.ndarray:
    phase = cmath.exp(0.5j * theta)
    return np.array([[-0.5j / phase, 0.0], [0.0, 0.5j * phase]], dtype=complex)


def _du3(theta: float, phi: float, lam: float, which: int) -> np.ndarray:
    c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
    el, ep, epl = cmath.exp(1.0j * lam), cmath.exp(1.0j * phi), cmath.exp(1.0j * (phi + lam))
    if which == 0:
        return 0.5 * np.array([[-s, -el * c], [ep * c, -epl * s]], dtype=complex)
    if which == 1:
        return np.array([[0.0, 0.0], [1.0j * ep * s, 1.0j * epl * c]], dtype=complex)
    return np.array([[0.0, -1.0j * el * s], [0.0, 1.0j * epl * c]], dtype=complex)


_ROTATIONS = {
    GateKind.RX: _rx, GateKind.RY: _ry, GateKind.RZ: _rz,
    GateKind.CRX: _rx, GateKind.CRY: _ry, GateKind.CRZ: _rz,
}
_DROTATIONS = {
    GateKind.RX: _drx, GateKind.RY: _dry, GateKind.RZ: _drz,
    GateKind.CRX: _drx, GateKind.CRY: _dry, GateKind.CRZ: _drz,
}


def _payload(kind: GateKind, theta: tuple[float, ...]) -> np.ndarray:
    """2x2 matrix applied to the target wire (controlled or not)."""
    if kind in _ROTATIONS:
        return _ROTATIONS[kind](theta[0])
    if kind is GateKind.U3:
        return _u3(*theta)
    if kind is GateKind.CX:
        return _PAULI_MATS["X"]
    if kind is GateKind.CZ:
        return _PAULI_MATS["Z"]
    return _FIXED_1Q[kind]


def _dpayload(kind: GateKind, theta: tuple[float, ...], which: int) -> np.ndarray:
    if kind is GateKind.U3:
        return _du3(*theta, which)
    return _DROTATIONS[kind](theta[0])


def _apply_single(amp: np.ndarray, mat: np.ndarray, qubit: int) -> None:
    view = amp.reshape(-1, 2, 1 << qubit)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :].copy()
    view[:, 0, :] = mat[0, 0] * a0 + mat[0, 1] * a1
    view[:, 1, :] = mat[1, 0] * a0 + mat[1, 1] * a1


def _apply_controlled(amp: np.ndarray, mat: np.ndarray, control: int,
                      target: int, num_qubits: int) -> None:
    # Tensor view: axis k addresses qubit num_qubits-1-k.
    psi = amp.reshape((2,) * num_qubits)
    index: list = [slice(None)] * num_qubits
    index[num_qubits - 1 - control] = 1
    sub = psi[tuple(index)]  # view of the control=1 subspace
    axis = num_qubits - 1 - target - (1 if control > target else 0)
    a0 = sub.take(0, axis=axis)
    a1 = sub.take(1, axis=axis)
    lo: list = [slice(None)] * (num_qubits - 1)
    hi: list = [slice(None)] * (num_qubits - 1)
    lo[axis], hi[axis] = 0, 1
    sub[tuple(lo)] = mat[0, 0] * a0 + mat[0, 1] * a1
    sub[tuple(hi)] = mat[1, 0] * a0 + mat[1, 1] * a1


def _zero_control_off(amp: np.ndarray, control: int, num_qubits: int) -> None:
    # Derivative of a controlled gate lives only in the control=1 block.
    psi = amp.reshape((2,) * num_qubits)
    index: list = [slice(None)] * num_qubits
    index[num_qubits - 1 - control] = 0
    psi[tuple(index)] = 0.0


def _apply_swap(amp: np.ndarray, q0: int, q1: int, num_qubits: int) -> None:
    psi = amp.reshape((2,) * num_qubits)
    i0, i1 = num_qubits - 1 - q0, num_qubits - 1 - q1
    sl01: list = [slice(None)] * num_qubits
    sl10: list = [slice(None)] * num_qubits
    sl01[i0], sl01[i1] = 0, 1
    sl10[i0], sl10[i1] = 1, 0
    tmp = psi[tuple(sl01)].copy()
    psi[tuple(sl01)] = psi[tuple(sl10)]
    psi[tuple(sl10)] = tmp


def _apply_gate(amp: np.ndarray, gate: GateInstance, theta: tuple[float, ...],
                num_qubits: int, *, dagger: bool = False,
                deriv: int | None = None) -> None:
    kind = gate.kind
    if kind is GateKind.SWAP:  # self-adjoint, parameter-free
        _apply_swap(amp, gate.wires[0], gate.wires[1], num_qubits)
        return
    mat = _dpayload(kind, theta, deriv) if deriv is not None else _payload(kind, theta)
    if dagger:
        mat = mat.conj().T
    if kind.wire_arity == 2:
        _apply_controlled(amp, mat, gate.wires[0], gate.wires[1], num_qubits)
        if deriv is not None:
            _zero_control_off(amp, gate.wires[0], num_qubits)
    else:
        _apply_single(amp, mat, gate.wires[0])


def simulate(template: CircuitTemplate, params) -> StateVector:
    """Apply the template's gates in program order to |0...0>."""
    values = np.asarray(params, dtype=float)
    if values.size != template.slot_count:
        raise ParamLengthMismatchError(
            f"expected {template.slot_count} parameters, got {values.size}")
    amp = np.zeros(1 << template.num_qubits, dtype=complex)
    amp[0] = 1.0
    for gate in template.gates:
        theta = tuple(values[s] for s in gate.slots)
        _apply_gate(amp, gate, theta, template.num_qubits)
    return StateVector(template.num_qubits, amp)


def _check_dimensions(state: StateVector, hamiltonian: Hamiltonian) -> None:
    if state.amplitudes.size != 1 << state.num_qubits:
        raise DimensionMismatchError("amplitude vector does not match qubit count")
    if hamiltonian.max_qubit() >= state.num_qubits:
        raise DimensionMismatchError(
            f"Hamiltonian acts on qubit {hamiltonian.max_qubit()} "
            f"but the state has {state.num_qubits} qubits")


def _term_signs(paulis, size: int) -> np.ndarray:
    indices = np.arange(size)
    signs = np.ones(size)
    for _, qubit in paulis:
        signs *= 1.0 - 2.0 * ((indices >> qubit) & 1)
    return signs


def expectation(state: StateVector, hamiltonian: Hamiltonian) -> float:
    """<psi|H|psi>; Z-only terms evaluated diagonally, X/Y via application."""
    _check_dimensions(state, hamiltonian)
    amp = state.amplitudes
    total = hamiltonian.identity_offset
    probs: np.ndarray | None = None
    for term in hamiltonian.terms:
        if all(axis == "Z" for axis, _ in term.paulis):
            if probs is None:
                probs = np.abs(amp) ** 2
            total += term.coefficient * float(_term_signs(term.paulis, amp.size) @ probs)
        else:
            phi = amp.copy()
            for axis, qubit in term.paulis:
                _apply_single(phi, _PAULI_MATS[axis], qubit)
            total += term.coefficient * float(np.vdot(amp, phi).real)
    return float(total)


def _hamiltonian_apply(amp: np.ndarray, hamiltonian: Hamiltonian) -> np.ndarray:
    out = hamiltonian.identity_offset * amp
    for term in hamiltonian.terms:
        if all(axis == "Z" for axis, _ in term.paulis):
            out = out + term.coefficient * (_term_signs(term.paulis, amp.size) * amp)
        else:
            phi = amp.copy()
            for axis, qubit in term.paulis:
                _apply_single(phi, _PAULI_MATS[axis], qubit)
            out = out + term.coefficient * phi
    return out


def gradient(template: CircuitTemplate, params, hamiltonian: Hamiltonian) -> np.ndarray:
    """d<H>/d(theta_k) for every slot, by the adjoint reverse sweep.

    Matches central finite differences (step 1e-5) to 1e-5 max-abs on
    small circuits; that agreement is the normative contract.
    """
    values = np.asarray(params, dtype=float)
    state = simulate(template, values)
    _check_dimensions(state, hamiltonian)

    bra = _hamiltonian_apply(state.amplitudes, hamiltonian)
    ket = state.amplitudes.copy()
    grad = np.zeros(template.slot_count)
    for gate in reversed(template.gates):
        theta = tuple(values[s] for s in gate.slots)
        _apply_gate(ket, gate, theta, template.num_qubits, dagger=True)
        for j, slot in enumerate(gate.slots):
            shifted = ket.copy()
            _apply_gate(shifted, gate, theta, template.num_qubits, deriv=j)
            grad[slot] = 2.0 * float(np.vdot(bra, shifted).real)
        _apply_gate(bra, gate, theta, template.num_qubits, dagger=True)
    return grad
