"""Kraus channels, gate-noise attachment and Pauli twirling of CZ gates."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from . import linalg
from .circuit import Circuit, GateClass, GateKind, givens_blocks, givens_pair, givens_unitary


@dataclass(frozen=True, eq=False)
class NoiseChannel:
    kraus: tuple[np.ndarray, ...]
    label: str

    def __post_init__(self):
        linalg.check_kraus(self.kraus, atol=1e-12)

    @cached_property
    def superoperator(self) -> np.ndarray:
        return linalg.superoperator(self.kraus)


def _check_rate(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


def depolarizing_channel(gamma: float) -> NoiseChannel:
    """``rho -> (1 - gamma) rho + gamma I/2``: gamma is the replacement probability."""
    _check_rate("gamma", gamma)
    a = np.sqrt(1 - 3 * gamma / 4)
    b = np.sqrt(gamma / 4)
    kraus = (a * linalg.I2, b * linalg.X, b * linalg.Y, b * linalg.Z)
    return NoiseChannel(kraus, f"depolarizing({gamma:g})")


def amplitude_damping_channel(gamma_a: float) -> NoiseChannel:
    _check_rate("gamma_a", gamma_a)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma_a)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma_a)], [0, 0]], dtype=complex)
    return NoiseChannel((k0, k1), f"amplitude_damping({gamma_a:g})")


def phase_damping_channel(gamma_p: float) -> NoiseChannel:
    _check_rate("gamma_p", gamma_p)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma_p)]], dtype=complex)
    k1 = np.array([[0, 0], [0, np.sqrt(gamma_p)]], dtype=complex)
    return NoiseChannel((k0, k1), f"phase_damping({gamma_p:g})")


_rate = Field(default=0.0, ge=0.0, le=1.0)


class DampingRates(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    amp: float = _rate
    phase: float = _rate


class TwirlConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    enabled: bool = False
    n_instances: int = Field(default=20, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)


class NoiseSpec(BaseModel):
    """Per-gate-class noise rates.

    Identity slots get local depolarizing noise; single- and two-qubit gates
    get amplitude then phase damping on every qubit they touch.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    identity_depolarizing: float = _rate
    single_qubit: DampingRates = DampingRates()
    two_qubit: DampingRates = DampingRates()
    twirl: TwirlConfig = TwirlConfig()

    @property
    def gate_noise_free(self) -> bool:
        return not (self.single_qubit.amp or self.single_qubit.phase or self.two_qubit.amp or self.two_qubit.phase)


@dataclass(frozen=True, eq=False)
class Unitary:
    matrix: np.ndarray
    targets: tuple[int, ...]
    label: str
    site: int


@dataclass(frozen=True, eq=False)
class Channel:
    channel: NoiseChannel
    targets: tuple[int, ...]
    site: int

    @property
    def label(self) -> str:
        return self.channel.label


Instruction = Union[Unitary, Channel]


@dataclass(frozen=True)
class NoisyProgram:
    n_qubits: int
    instructions: tuple[Instruction, ...]
    # instruction count at the end of each circuit layer
    layer_ends: tuple[int, ...] = field(default=())

    def count(self, kind: type, label_prefix: str = "") -> int:
        return sum(1 for ins in self.instructions if isinstance(ins, kind) and ins.label.startswith(label_prefix))


class _Channels:
    """Channel objects built once per program so their superoperators are shared."""

    def __init__(self, spec: NoiseSpec):
        self.depol = depolarizing_channel(spec.identity_depolarizing) if spec.identity_depolarizing else None
        self.by_class = {}
        for cls, rates in ((GateClass.SINGLE, spec.single_qubit), (GateClass.TWO, spec.two_qubit)):
            chans = []
            if rates.amp:
                chans.append(amplitude_damping_channel(rates.amp))
            if rates.phase:
                chans.append(phase_damping_channel(rates.phase))
            self.by_class[cls] = chans

    def after(self, gate_class: GateClass, targets, site: int) -> list[Channel]:
        if gate_class is GateClass.IDENTITY:
            return [Channel(self.depol, targets, site)] if self.depol else []
        out = []
        for q in targets:
            out.extend(Channel(ch, (q,), site) for ch in self.by_class[gate_class])
        return out


def attach_noise(circuit: Circuit, spec: NoiseSpec, compose_givens: Optional[bool] = None) -> NoisyProgram:
    """Lower ``circuit`` to an executable instruction list with noise channels attached.

    With ``compose_givens`` each Givens rotation runs as one exact 4x4 unitary,
    which is only possible when none of its native gates carry noise; by
    default this is chosen whenever gate noise and twirling are both off.
    """
    if compose_givens is None:
        compose_givens = spec.gate_noise_free and not spec.twirl.enabled
    elif compose_givens and not spec.gate_noise_free:
        raise ValueError("cannot compose Givens rotations when their native gates carry noise")
    chans = _Channels(spec)
    out: list[Instruction] = []
    ends = []
    site = 0
    for layer in circuit.layers:
        for item in givens_blocks(layer):
            if isinstance(item, list) and compose_givens:
                pair = givens_pair(item)
                out.append(Unitary(givens_unitary(circuit.thetas[item[0].givens]), pair, "givens", site))
                site += 1
                continue
            for g in item if isinstance(item, list) else [item]:
                if g.kind is not GateKind.ID:
                    out.append(Unitary(g.matrix(), g.targets, g.kind.value, site))
                out.extend(chans.after(g.gate_class, g.targets, site))
                site += 1
        ends.append(len(out))
    return NoisyProgram(circuit.n_qubits, tuple(out), tuple(ends))


# Paulis as (x, z) bits: I=(0,0), X=(1,0), Z=(0,1), Y=(1,1)
PAULI_LABELS = "IXYZ"
_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_FROM_BITS = {v: k for k, v in _BITS.items()}
PAULIS = {"I": linalg.I2, "X": linalg.X, "Y": linalg.Y, "Z": linalg.Z}


def cz_conjugate(pa: str, pb: str) -> tuple[str, str]:
    """Labels of ``CZ (pa (x) pb) CZ^dagger`` with the overall sign dropped.

    CZ keeps x bits and flips each qubit's z bit by the partner's x bit.
    """
    (xa, za), (xb, zb) = _BITS[pa], _BITS[pb]
    return _FROM_BITS[(xa, za ^ xb)], _FROM_BITS[(xb, zb ^ xa)]


_PAIR_MATRICES = {(a, b): linalg.kron(PAULIS[a], PAULIS[b]) for a in PAULI_LABELS for b in PAULI_LABELS}


def pauli_pair(index: int) -> tuple[str, str]:
    return PAULI_LABELS[index // 4], PAULI_LABELS[index % 4]


def pauli_twirl_cz(program: NoisyProgram, rng: np.random.Generator, draws: Optional[list[int]] = None) -> NoisyProgram:
    """Sandwich every noisy CZ between a random Pauli pair and its CZ-conjugate.

    The inserted Paulis are noise-free.  ``draws`` optionally fixes the pair
    index (0..15) per CZ, in program order, instead of sampling from ``rng``.
    """
    ins = program.instructions
    out: list[Instruction] = []
    # new_pos[p] = output length once the first p input instructions are consumed
    new_pos = [0] * (len(ins) + 1)
    n_cz = 0
    i = 0
    while i < len(ins):
        cur = ins[i]
        if isinstance(cur, Unitary) and cur.label == "cz":
            k = draws[n_cz] if draws is not None else int(rng.integers(16))
            n_cz += 1
            pa, pb = pauli_pair(k)
            j = i + 1
            while j < len(ins) and isinstance(ins[j], Channel) and ins[j].site == cur.site:
                j += 1
            if (pa, pb) != ("I", "I"):
                out.append(Unitary(_PAIR_MATRICES[pa, pb], cur.targets, "twirl", cur.site))
            out.extend(ins[i:j])
            ca, cb = cz_conjugate(pa, pb)
            if (ca, cb) != ("I", "I"):
                out.append(Unitary(_PAIR_MATRICES[ca, cb], cur.targets, "twirl", cur.site))
        else:
            out.append(cur)
            j = i + 1
        for p in range(i + 1, j + 1):
            new_pos[p] = len(out)
        i = j
    ends = tuple(new_pos[e] for e in program.layer_ends)
    return NoisyProgram(program.n_qubits, tuple(out), ends)
