"""Gate vocabulary and random Givens-rotation ladder circuits.

A Givens rotation is compiled to native gates as

    CNOT(a->b) . CRy(2 theta)(b->a) . CNOT(a->b)

with ``CNOT(a->b) = H_b CZ H_b`` and ``CRy(2 theta)(b->a) = Ry(theta)_a CZ
Ry(-theta)_a CZ``, giving 4 CZ, 4 H and exactly two theta-dependent Ry gates.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import linalg
from .rng import stream


class GateKind(str, enum.Enum):
    RY = "ry"
    H = "h"
    CZ = "cz"
    X = "x"
    Y = "y"
    Z = "z"
    ID = "id"


class GateClass(str, enum.Enum):
    SINGLE = "single"
    TWO = "two"
    IDENTITY = "identity"


_CLASS_OF = {GateKind.CZ: GateClass.TWO, GateKind.ID: GateClass.IDENTITY}


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


_FIXED = {
    GateKind.H: linalg.H,
    GateKind.CZ: linalg.CZ,
    GateKind.X: linalg.X,
    GateKind.Y: linalg.Y,
    GateKind.Z: linalg.Z,
    GateKind.ID: linalg.I2,
}


@dataclass(frozen=True)
class GateInstance:
    kind: GateKind
    targets: tuple[int, ...]
    angle: Optional[float] = None
    # index into Circuit.thetas of the Givens rotation this gate was compiled from
    givens: Optional[int] = None

    def __post_init__(self):
        arity = 2 if self.kind is GateKind.CZ else 1
        if len(self.targets) != arity:
            raise ValueError(f"{self.kind.value} acts on {arity} qubit(s), got targets {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"repeated target in {self.targets}")
        if self.kind is GateKind.RY:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError("RY requires a finite angle")

    @property
    def gate_class(self) -> GateClass:
        return _CLASS_OF.get(self.kind, GateClass.SINGLE)

    def matrix(self) -> np.ndarray:
        if self.kind is GateKind.RY:
            return ry(self.angle)
        return _FIXED[self.kind]


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    layers: tuple[tuple[GateInstance, ...], ...]
    seed: Optional[int] = None
    thetas: tuple[float, ...] = field(default=())

    def __post_init__(self):
        for layer in self.layers:
            for g in layer:
                if any(t >= self.n_qubits for t in g.targets):
                    raise ValueError(f"gate {g} targets a qubit outside 0..{self.n_qubits - 1}")

    @property
    def depth(self) -> int:
        return len(self.layers)

    def gates(self):
        for layer in self.layers:
            yield from layer

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "seed": self.seed,
            "thetas": list(self.thetas),
            "layers": [
                [
                    {"kind": g.kind.value, "targets": list(g.targets), "angle": g.angle, "givens": g.givens}
                    for g in layer
                ]
                for layer in self.layers
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, doc: dict) -> "Circuit":
        layers = tuple(
            tuple(
                GateInstance(GateKind(g["kind"]), tuple(g["targets"]), g.get("angle"), g.get("givens"))
                for g in layer
            )
            for layer in doc["layers"]
        )
        return cls(doc["n_qubits"], layers, doc.get("seed"), tuple(doc.get("thetas", ())))

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


def givens_unitary(theta: float) -> np.ndarray:
    """Rotation by ``theta`` in the ordered ``{|01>, |10>}`` block, identity on ``|00>``, ``|11>``."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    c, s = math.cos(theta), math.sin(theta)
    g = np.eye(4, dtype=complex)
    g[1, 1], g[1, 2] = c, -s
    g[2, 1], g[2, 2] = s, c
    return g


def decompose_givens(theta: float, qubit_a: int, qubit_b: int, givens: Optional[int] = None) -> list[GateInstance]:
    """Native-gate sequence (application order) realising ``givens_unitary(theta)`` on ``(a, b)``."""
    if qubit_a == qubit_b:
        raise ValueError("Givens rotation needs two distinct qubits")
    a, b = qubit_a, qubit_b

    def g(kind, *targets, angle=None):
        return GateInstance(kind, targets, angle, givens)

    return [
        g(GateKind.H, b),
        g(GateKind.CZ, a, b),
        g(GateKind.H, b),
        g(GateKind.CZ, a, b),
        g(GateKind.RY, a, angle=-theta),
        g(GateKind.CZ, a, b),
        g(GateKind.RY, a, angle=theta),
        g(GateKind.H, b),
        g(GateKind.CZ, a, b),
        g(GateKind.H, b),
    ]


def compose(gates, n_qubits: int) -> np.ndarray:
    """Full unitary of a gate sequence, first gate applied first."""
    u = np.eye(1 << n_qubits, dtype=complex)
    for gate in gates:
        u = linalg.embed_operator(gate.matrix(), gate.targets, n_qubits) @ u
    return u


IDENTITY_SLOT_POLICIES = ("layer", "step")


def build_ladder_circuit(n_qubits: int, n_layers: int, seed: int, identity_slots: str = "layer") -> Circuit:
    """Random ladder of Givens rotations on adjacent pairs ``(0,1), (1,2), ...``.

    Angles are drawn sequentially from one stream, so a shallower circuit
    with the same seed is always a prefix of a deeper one.

    ``identity_slots`` places the noisy identity gates: ``"layer"`` puts one
    on every qubit at the start of each layer; ``"step"`` puts one on every
    qubit before each Givens rotation, i.e. once per time step of the
    sequential ladder.
    """
    if n_qubits < 2:
        raise ValueError("a ladder circuit needs at least 2 qubits")
    if n_layers < 0:
        raise ValueError("n_layers must be non-negative")
    if identity_slots not in IDENTITY_SLOT_POLICIES:
        raise ValueError(f"identity_slots must be one of {IDENTITY_SLOT_POLICIES}, got {identity_slots!r}")
    rng = stream(seed)
    thetas = rng.uniform(0.0, 2 * math.pi, size=n_layers * (n_qubits - 1))
    slots = tuple(GateInstance(GateKind.ID, (q,)) for q in range(n_qubits))
    layers = []
    k = 0
    for _ in range(n_layers):
        layer = list(slots)
        for q in range(n_qubits - 1):
            if identity_slots == "step" and q > 0:
                layer.extend(slots)
            layer.extend(decompose_givens(float(thetas[k]), q, q + 1, givens=k))
            k += 1
        layers.append(tuple(layer))
    return Circuit(n_qubits, tuple(layers), seed, tuple(float(t) for t in thetas))


def circuit_prefix(circuit: Circuit, n_layers: int) -> Circuit:
    if not 0 <= n_layers <= circuit.depth:
        raise ValueError(f"prefix of {n_layers} layers requested from a depth-{circuit.depth} circuit")
    layers = circuit.layers[:n_layers]
    used = [g.givens for layer in layers for g in layer if g.givens is not None]
    n_givens = max(used) + 1 if used else 0
    return replace(circuit, layers=layers, thetas=circuit.thetas[:n_givens])


def givens_blocks(layer):
    """Split a layer into standalone gates and lists of gates compiled from one Givens rotation."""
    out = []
    for g in layer:
        if g.givens is None:
            out.append(g)
        elif out and isinstance(out[-1], list) and out[-1][0].givens == g.givens:
            out[-1].append(g)
        else:
            out.append([g])
    return out


def givens_pair(gates) -> tuple[int, int]:
    return next(g.targets for g in gates if g.kind is GateKind.CZ)


def ideal_unitary(circuit: Circuit) -> np.ndarray:
    """Noiseless circuit unitary built from exact Givens matrices."""
    n = circuit.n_qubits
    u = np.eye(1 << n, dtype=complex)
    for layer in circuit.layers:
        for item in givens_blocks(layer):
            if isinstance(item, list):
                a, b = givens_pair(item)
                g = givens_unitary(circuit.thetas[item[0].givens])
                u = linalg.embed_operator(g, (a, b), n) @ u
    return u
