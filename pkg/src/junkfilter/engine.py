"""Density-matrix execution of noisy programs.

Consecutive instructions whose combined support is at most two qubits are
fused into one superoperator before touching the full density matrix; a
Givens rotation together with all of its gate noise becomes a single
16x16 map.  Fusion never crosses a layer boundary, so populations can be
read out after any layer of a single deep run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .circuit import Circuit
from .noise import Channel, NoiseSpec, NoisyProgram, Unitary, attach_noise, pauli_twirl_cz
from .rng import stream


@dataclass
class SimResult:
    exact_pops: np.ndarray
    final_rho: Optional[np.ndarray] = None
    sampled_pops: Optional[np.ndarray] = None
    shots: Optional[int] = None
    twirl_instances_used: int = 0
    # populations after the given number of layers
    checkpoints: dict[int, np.ndarray] = field(default_factory=dict)


def _unitary_sop(u: np.ndarray) -> np.ndarray:
    # kron(u, conj(u)) without numpy.kron's overhead
    d = u.shape[0]
    return (u[:, None, :, None] * u.conj()[None, :, None, :]).reshape(d * d, d * d)


def _local(op: np.ndarray, targets: tuple[int, ...], support: tuple[int, ...]) -> np.ndarray:
    if targets == support:
        return op
    return linalg.embed_operator(op, [support.index(t) for t in targets], len(support))


class _Fuser:
    def __init__(self):
        self._sop_cache = {}
        self._op_cache = {}

    def unitary(self, ins: Unitary, support: tuple[int, ...]) -> np.ndarray:
        if ins.targets == support:
            return ins.matrix
        key = (id(ins.matrix), ins.targets, support)
        hit = self._op_cache.get(key)
        if hit is None:
            hit = self._op_cache[key] = (_local(ins.matrix, ins.targets, support), ins.matrix)
        return hit[0]

    def channel_sop(self, ch: Channel, support: tuple[int, ...]) -> np.ndarray:
        # the channel object is kept in the value so its id() cannot be reused
        key = (id(ch.channel), ch.targets, support)
        hit = self._sop_cache.get(key)
        if hit is None:
            if ch.targets == support:
                sop = ch.channel.superoperator
            else:
                sop = linalg.superoperator([_local(k, ch.targets, support) for k in ch.channel.kraus])
            hit = self._sop_cache[key] = (sop, ch.channel)
        return hit[0]

    def block(self, instructions: Sequence, support: tuple[int, ...]) -> np.ndarray:
        dk = 1 << len(support)
        sop = None
        u_acc = None
        for ins in instructions:
            if isinstance(ins, Unitary):
                u = self.unitary(ins, support)
                u_acc = u if u_acc is None else u @ u_acc
                continue
            if u_acc is not None:
                s = _unitary_sop(u_acc)
                sop = s if sop is None else s @ sop
                u_acc = None
            s = self.channel_sop(ins, support)
            sop = s if sop is None else s @ sop
        if u_acc is not None:
            s = _unitary_sop(u_acc)
            sop = s if sop is None else s @ sop
        return sop if sop is not None else np.eye(dk * dk, dtype=complex)


def fuse(program: NoisyProgram, fuser: Optional[_Fuser] = None) -> tuple[list[tuple[tuple[int, ...], np.ndarray]], list[int]]:
    """Group a program into ``(support, superoperator)`` blocks.

    Returns the blocks and, per layer, the number of blocks completed at its end.
    """
    fuser = fuser or _Fuser()
    blocks = []
    block_ends = []
    ends = list(program.layer_ends)
    if not ends or ends[-1] != len(program.instructions):
        ends.append(len(program.instructions))
    start = 0
    for e in ends:
        pending: list = []
        support: set[int] = set()
        for ins in program.instructions[start:e]:
            merged = support | set(ins.targets)
            if len(merged) > 2 and pending:
                sup = tuple(sorted(support))
                blocks.append((sup, fuser.block(pending, sup)))
                pending, merged = [], set(ins.targets)
            pending.append(ins)
            support = merged
        if pending:
            sup = tuple(sorted(support))
            blocks.append((sup, fuser.block(pending, sup)))
        block_ends.append(len(blocks))
        start = e
    return blocks, block_ends[: len(program.layer_ends)]


def run(
    program: NoisyProgram,
    initial_basis_state: int,
    checkpoints: Sequence[int] = (),
    keep_rho: bool = False,
    _fuser: Optional[_Fuser] = None,
) -> SimResult:
    """Evolve ``|initial><initial|`` through ``program``.

    ``checkpoints`` lists layer counts after which populations are recorded.
    """
    for ins in program.instructions:
        if not isinstance(ins, (Unitary, Channel)):
            raise TypeError(f"malformed program instruction {ins!r}")
        if any(not 0 <= t < program.n_qubits for t in ins.targets):
            raise ValueError(f"instruction targets {ins.targets} outside a {program.n_qubits}-qubit register")
    rho = linalg.basis_density_matrix(initial_basis_state, program.n_qubits)
    blocks, block_ends = fuse(program, _fuser)
    want = {}
    for n in checkpoints:
        if not 0 <= n <= len(block_ends):
            raise ValueError(f"checkpoint {n} beyond program depth {len(block_ends)}")
        want.setdefault(0 if n == 0 else block_ends[n - 1], []).append(n)
    recorded = {}
    for n in want.get(0, []):
        recorded[n] = linalg.diagonal(rho)
    for i, (support, sop) in enumerate(blocks, start=1):
        rho = linalg.apply_superoperator(rho, sop, support)
        for n in want.get(i, []):
            recorded[n] = linalg.diagonal(rho)
    return SimResult(
        exact_pops=linalg.diagonal(rho),
        final_rho=rho if keep_rho else None,
        checkpoints=recorded,
    )


def run_twirled(
    circuit: Circuit,
    spec: NoiseSpec,
    initial: int,
    checkpoints: Sequence[int] = (),
) -> SimResult:
    """Average populations over ``spec.twirl.n_instances`` independently twirled programs."""
    if not spec.twirl.enabled:
        raise ValueError("run_twirled needs a noise spec with twirling enabled")
    base = attach_noise(circuit, spec, compose_givens=False)
    n = spec.twirl.n_instances
    total = None
    cps = {k: 0.0 for k in checkpoints}
    fuser = _Fuser()
    for inst in range(n):
        prog = pauli_twirl_cz(base, stream(spec.twirl.seed, inst))
        res = run(prog, initial, checkpoints, _fuser=fuser)
        total = res.exact_pops if total is None else total + res.exact_pops
        for k in checkpoints:
            cps[k] = cps[k] + res.checkpoints[k]
    return SimResult(
        exact_pops=total / n,
        twirl_instances_used=n,
        checkpoints={k: v / n for k, v in cps.items()},
    )


def simulate(circuit: Circuit, spec: NoiseSpec, initial: int, checkpoints: Sequence[int] = ()) -> SimResult:
    """Run ``circuit`` under ``spec``, twirled or not."""
    if spec.twirl.enabled:
        return run_twirled(circuit, spec, initial, checkpoints)
    return run(attach_noise(circuit, spec), initial, checkpoints)


def sample_shots(exact_pops, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Multinomial resampling of ``exact_pops`` by inverse CDF; returns counts / shots."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = np.clip(np.asarray(exact_pops, dtype=float), 0.0, None)
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    u = rng.random(shots)
    idx = np.searchsorted(cdf, u, side="right")
    counts = np.bincount(np.minimum(idx, len(p) - 1), minlength=len(p))
    return counts / shots
