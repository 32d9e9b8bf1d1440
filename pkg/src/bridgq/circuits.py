"""OpenQASM circuit templates with explicit parameter slots.

The parser accepts a deliberately small OpenQASM subset: one quantum
register (``qubit[n] q;`` or the older ``qreg q[n];``), lowercase gate
calls with literal angle arguments (decimals or ``pi`` fractions such as
``pi/2`` and ``3*pi/4``), ``//`` comments, and nothing else.  Unknown
gates abort the parse instead of being skipped: dropping a gate silently
would shift every later parameter slot.

Angles found in the source are folded to radians and kept per gate as
``literals`` so that they stay available as a baseline initialisation.
``strip_parameters`` clears them without touching structure.  Canonical
serialisation (``to_qasm``) emits one statement per line with angles
printed at 17 significant digits, which round-trips doubles exactly.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from enum import Enum, unique

import numpy as np


class QasmError(ValueError):
    """Parse failure carrying the 1-based source line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class UnsupportedGateError(QasmError):
    pass


class MalformedStatementError(QasmError):
    pass


class WireOutOfRangeError(QasmError):
    pass


class MissingQubitDeclarationError(QasmError):
    pass


class MissingLiteralError(ValueError):
    """Source literals were required (baseline read-off) but absent."""


@unique
class GateRole(Enum):
    """How a parameter slot is treated by role-aware initialisation."""

    DRIVER = "driver"
    CONSERVATIVE_SINGLE = "conservative-single"
    ENTANGLER = "entangler"
    FIXED = "fixed"


@unique
class GateKind(Enum):
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    U3 = "u3"
    CRX = "crx"
    CRY = "cry"
    CRZ = "crz"
    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    S = "s"
    T = "t"
    CX = "cx"
    CZ = "cz"
    SWAP = "swap"

    @property
    def param_arity(self) -> int:
        return _PARAM_ARITY.get(self, 0)

    @property
    def wire_arity(self) -> int:
        return 2 if self in _TWO_WIRE else 1


_PARAM_ARITY = {
    GateKind.RX: 1,
    GateKind.RY: 1,
    GateKind.RZ: 1,
    GateKind.U3: 3,
    GateKind.CRX: 1,
    GateKind.CRY: 1,
    GateKind.CRZ: 1,
}

_TWO_WIRE = frozenset(
    {GateKind.CRX, GateKind.CRY, GateKind.CRZ, GateKind.CX, GateKind.CZ, GateKind.SWAP}
)

_ROLE = {
    GateKind.RX: GateRole.DRIVER,
    GateKind.RY: GateRole.DRIVER,
    GateKind.U3: GateRole.DRIVER,
    GateKind.RZ: GateRole.CONSERVATIVE_SINGLE,
    GateKind.CRX: GateRole.ENTANGLER,
    GateKind.CRY: GateRole.ENTANGLER,
    GateKind.CRZ: GateRole.ENTANGLER,
}


def classify_role(kind: GateKind) -> GateRole:
    """Role of a gate's parameter slots; non-parameterised kinds are FIXED."""
    return _ROLE.get(kind, GateRole.FIXED)


@dataclass(frozen=True)
class GateInstance:
    """One gate call: kind, wires, global slot indices, optional source angles."""

    kind: GateKind
    wires: tuple[int, ...]
    slots: tuple[int, ...]
    literals: tuple[float, ...] | None = None


@dataclass(frozen=True)
class CircuitTemplate:
    """Parameter-slotted gate program over a single quantum register."""

    num_qubits: int
    gates: tuple[GateInstance, ...]

    @property
    def slot_count(self) -> int:
        return sum(len(g.slots) for g in self.gates)

    @property
    def slot_roles(self) -> tuple[GateRole, ...]:
        return tuple(classify_role(g.kind) for g in self.gates for _ in g.slots)

    def validate(self) -> None:
        """Raise ValueError on any structural invariant violation."""
        if self.num_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        next_slot = 0
        for g in self.gates:
            if len(g.wires) != g.kind.wire_arity:
                raise ValueError(f"{g.kind.value} expects {g.kind.wire_arity} wires, got {len(g.wires)}")
            if len(set(g.wires)) != len(g.wires):
                raise ValueError(f"{g.kind.value} wires {g.wires} are not distinct")
            if any(w < 0 or w >= self.num_qubits for w in g.wires):
                raise ValueError(f"{g.kind.value} wires {g.wires} exceed {self.num_qubits} qubits")
            if g.slots != tuple(range(next_slot, next_slot + g.kind.param_arity)):
                raise ValueError(f"{g.kind.value} slots {g.slots} break program-order numbering")
            if g.literals is not None and len(g.literals) != len(g.slots):
                raise ValueError(f"{g.kind.value} literals do not match its slot arity")
            next_slot += g.kind.param_arity


_DECL_QASM3 = re.compile(r"^qubit\s*\[\s*(\d+)\s*\]\s+([A-Za-z_]\w*)$")
_DECL_QASM2 = re.compile(r"^qreg\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")
_GATE_CALL = re.compile(r"^([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*(.*)$", re.S)
_WIRE_REF = re.compile(r"^([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")
_PI_EXPR = re.compile(r"^([+-]?)(?:(\d+(?:\.\d*)?|\.\d+)\*)?pi(?:/(\d+(?:\.\d*)?|\.\d+))?$")

# Statements outside the supported subset are rejected loudly rather than
# skipped, except the structure-free stdgates include.
_REJECTED_KEYWORDS = frozenset(
    {"creg", "bit", "measure", "barrier", "reset", "gate", "if", "for", "while",
     "def", "defcal", "cal", "input", "output", "let", "const"}
)


def _fold_angle(text: str, line: int) -> float:
    token = text.strip().replace(" ", "")
    if not token:
        raise MalformedStatementError("empty angle argument", line)
    m = _PI_EXPR.match(token)
    if m:
        sign = -1.0 if m.group(1) == "-" else 1.0
        coef = float(m.group(2)) if m.group(2) else 1.0
        div = float(m.group(3)) if m.group(3) else 1.0
        return sign * coef * math.pi / div
    try:
        return float(token)
    except ValueError:
        raise MalformedStatementError(f"cannot parse angle '{text.strip()}'", line) from None


def parse_qasm(source: str) -> CircuitTemplate:
    """Parse OpenQASM text into a circuit template with numbered slots.

    Raises UnsupportedGateError, MalformedStatementError,
    WireOutOfRangeError or MissingQubitDeclarationError, each pointing at
    the offending source line.
    """
    register: tuple[str, int] | None = None
    gates: list[GateInstance] = []
    next_slot = 0

    for lineno, raw in enumerate(source.splitlines(), start=1):
        code = raw.split("//", 1)[0]
        for stmt in code.split(";"):
            stmt = stmt.strip()
            if not stmt or stmt.startswith("OPENQASM") or stmt.startswith("include"):
                continue

            decl3 = _DECL_QASM3.match(stmt)
            decl2 = _DECL_QASM2.match(stmt)
            if decl3 or decl2:
                name, size = (decl3.group(2), int(decl3.group(1))) if decl3 else (
                    decl2.group(1), int(decl2.group(2)))
                if register is not None:
                    raise MalformedStatementError("multiple quantum registers are not supported", lineno)
                if size < 1:
                    raise MalformedStatementError("register must hold at least one qubit", lineno)
                register = (name, size)
                continue

            call = _GATE_CALL.match(stmt)
            if not call:
                raise MalformedStatementError(f"cannot parse statement '{stmt}'", lineno)
            name, arg_text, wire_text = call.group(1), call.group(2), call.group(3)
            if name in _REJECTED_KEYWORDS:
                raise MalformedStatementError(f"unsupported statement '{name} ...'", lineno)
            try:
                kind = GateKind(name)
            except ValueError:
                raise UnsupportedGateError(f"unsupported gate '{name}'", lineno) from None
            if register is None:
                raise MissingQubitDeclarationError("gate call before any qubit declaration", lineno)

            args = [a for a in arg_text.split(",")] if arg_text and arg_text.strip() else []
            if len(args) != kind.param_arity:
                raise MalformedStatementError(
                    f"gate '{name}' takes {kind.param_arity} angle(s), got {len(args)}", lineno)
            angles = tuple(_fold_angle(a, lineno) for a in args)

            wire_items = [w.strip() for w in wire_text.split(",") if w.strip()]
            if len(wire_items) != kind.wire_arity:
                raise MalformedStatementError(
                    f"gate '{name}' acts on {kind.wire_arity} wire(s), got {len(wire_items)}", lineno)
            wires = []
            for item in wire_items:
                ref = _WIRE_REF.match(item)
                if not ref:
                    raise MalformedStatementError(f"cannot parse wire reference '{item}'", lineno)
                if ref.group(1) != register[0]:
                    raise MalformedStatementError(f"unknown register '{ref.group(1)}'", lineno)
                idx = int(ref.group(2))
                if idx >= register[1]:
                    raise WireOutOfRangeError(
                        f"wire {register[0]}[{idx}] out of range for {register[1]} qubits", lineno)
                wires.append(idx)
            if len(set(wires)) != len(wires):
                raise MalformedStatementError(f"gate '{name}' repeats a wire", lineno)

            slots = tuple(range(next_slot, next_slot + kind.param_arity))
            next_slot += kind.param_arity
            gates.append(GateInstance(kind, tuple(wires), slots, angles if angles else None))

    if register is None:
        raise MissingQubitDeclarationError("no qubit declaration found")
    return CircuitTemplate(register[1], tuple(gates))


def strip_parameters(template: CircuitTemplate) -> CircuitTemplate:
    """Copy of the template with every source literal cleared."""
    gates = tuple(
        replace(g, literals=None) if g.literals is not None else g for g in template.gates
    )
    return replace(template, gates=gates)


def baseline_parameters(template: CircuitTemplate) -> np.ndarray:
    """Parameter vector read off the source literals, ordered by slot index."""
    values = np.empty(template.slot_count)
    for g in template.gates:
        if not g.slots:
            continue
        if g.literals is None:
            raise MissingLiteralError(
                f"gate '{g.kind.value}' on wires {g.wires} carries no source literals")
        for slot, value in zip(g.slots, g.literals):
            values[slot] = value
    return values


def to_qasm(template: CircuitTemplate) -> str:
    """Canonical serialisation: one statement per line, angles at 17 digits.

    Parameterised gates must carry literals; serialising a stripped
    template raises MissingLiteralError.
    """
    lines = ["OPENQASM 3.0;", f"qubit[{template.num_qubits}] q;"]
    for g in template.gates:
        head = g.kind.value
        if g.slots:
            if g.literals is None:
                raise MissingLiteralError(f"gate '{g.kind.value}' has no literals to serialise")
            head += "(" + ",".join(format(v, ".17g") for v in g.literals) + ")"
        wires = ", ".join(f"q[{w}]" for w in g.wires)
        lines.append(f"{head} {wires};")
    return "\n".join(lines) + "\n"
