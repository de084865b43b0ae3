"""Seeded sweeps over circuit depth and noise rate, aggregated over random circuits.

Every random quantity is derived from ``(master_seed, circuit_index, purpose)``,
and work items are folded back in a fixed order, so a sweep is bit-identical
whatever the number of worker processes.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import rng
from .circuit import build_ladder_circuit
from .config import SweepConfig
from .engine import run, sample_shots, simulate
from .metrics import infidelity, kl_junk, kl_useful
from .mitigation import Method, mitigate
from .noise import NoiseSpec, attach_noise
from .subspace import SubspaceIndex, build_subspace

METHODS = (Method.M0, Method.MP, Method.MS)


@dataclass(frozen=True)
class MethodStats:
    mean_infidelity: float
    std_infidelity: float
    n_failed: int


@dataclass(frozen=True)
class ExperimentRecord:
    N: int
    noise: NoiseSpec
    methods: dict
    mean_dkl_junk: float
    std_dkl_junk: float
    dkl_useful: tuple[float, ...]
    n_circuits: int
    n_qubits: int
    n_excitations: int
    shots: Optional[int]
    master_seed: int
    preset: str = ""
    created_at: float = field(default_factory=time.time, compare=False)

    @property
    def population_mode(self) -> str:
        return "exact" if self.shots is None else f"shots({self.shots})"

    def fidelity_gain(self) -> float:
        """Mean ``F_MS - F_MP``; NaN when MS failed on every circuit."""
        ms, mp = self.methods[Method.MS], self.methods[Method.MP]
        return mp.mean_infidelity - ms.mean_infidelity


@dataclass(frozen=True)
class CircuitPoint:
    """Per-circuit outcome at one depth: infidelity per method (None = failed)."""

    infidelity: dict
    dkl_junk: float
    dkl_useful: float


def circuit_seed(master_seed: int, circuit_index: int) -> int:
    return rng.derive_seed(master_seed, circuit_index, rng.CIRCUIT)


def _with_twirl_seed(spec: NoiseSpec, master_seed: int, circuit_index: int) -> NoiseSpec:
    if not spec.twirl.enabled:
        return spec
    seed = rng.derive_seed(master_seed, circuit_index, rng.TWIRL, spec.twirl.seed)
    return spec.model_copy(update={"twirl": spec.twirl.model_copy(update={"seed": seed})})


def evaluate_pipeline(noisy_pops, ideal_pops, idx: SubspaceIndex) -> CircuitPoint:
    """Mitigate one population vector with every method and score it against the ideal."""
    inf = {}
    for m in METHODS:
        out = mitigate(noisy_pops, idx, m)
        inf[m] = infidelity(out.distribution, ideal_pops).value if out.ok else None
    dkl = kl_junk(noisy_pops, idx)
    dklu = kl_useful(ideal_pops, idx)
    return CircuitPoint(inf, dkl.value if dkl.ok else float("nan"), dklu.value if dklu.ok else float("nan"))


def evaluate_circuit(cfg: SweepConfig, noise_index: int, circuit_index: int, seed: Optional[int] = None) -> list[CircuitPoint]:
    """Run one circuit (deepest grid depth) and evaluate every depth in the grid as a prefix."""
    if seed is None:
        seed = circuit_seed(cfg.master_seed, circuit_index)
    spec = _with_twirl_seed(cfg.noise_grid[noise_index], cfg.master_seed, circuit_index)
    idx = build_subspace(cfg.n_qubits, cfg.n_excitations, cfg.grouping)
    grid = cfg.depth_grid
    circ = build_ladder_circuit(cfg.n_qubits, grid[-1], seed, cfg.identity_slots)
    ideal = run(attach_noise(circ, NoiseSpec()), cfg.initial_index, grid).checkpoints
    noisy = simulate(circ, spec, cfg.initial_index, grid).checkpoints
    points = []
    for n in grid:
        pops = noisy[n]
        if cfg.shots is not None:
            pops = sample_shots(pops, cfg.shots, rng.stream(cfg.master_seed, circuit_index, rng.SHOTS, noise_index, n))
        points.append(evaluate_pipeline(pops, ideal[n], idx))
    return points


def _task(args):
    cfg, noise_index, circuit_index, seed = args
    return evaluate_circuit(cfg, noise_index, circuit_index, seed)


def _run_tasks(tasks: list, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_task, tasks))


def _nan_stats(values: Sequence[float]) -> tuple[float, float]:
    vals = [v for v in values if v == v]
    if not vals:
        return float("nan"), float("nan")
    return float(np.mean(vals)), float(np.std(vals))


def aggregate(cfg: SweepConfig, N: int, spec: NoiseSpec, points: Sequence[CircuitPoint]) -> ExperimentRecord:
    methods = {}
    for m in METHODS:
        vals = [p.infidelity[m] for p in points if p.infidelity[m] is not None]
        n_failed = len(points) - len(vals)
        if vals:
            methods[m] = MethodStats(float(np.mean(vals)), float(np.std(vals)), n_failed)
        else:
            methods[m] = MethodStats(float("nan"), float("nan"), n_failed)
    dkl_mean, dkl_std = _nan_stats([p.dkl_junk for p in points])
    return ExperimentRecord(
        N=N,
        noise=spec,
        methods=methods,
        mean_dkl_junk=dkl_mean,
        std_dkl_junk=dkl_std,
        dkl_useful=tuple(p.dkl_useful for p in points),
        n_circuits=len(points),
        n_qubits=cfg.n_qubits,
        n_excitations=cfg.n_excitations,
        shots=cfg.shots,
        master_seed=cfg.master_seed,
        preset=cfg.preset_name or "",
    )


def _grid_sweep(cfg: SweepConfig, workers: int, seeds: Optional[Sequence[int]] = None) -> list[list[ExperimentRecord]]:
    """``result[i][j]`` aggregates noise point ``i`` at depth index ``j``."""
    n_circ = cfg.n_circuits if seeds is None else len(seeds)
    tasks = [
        (cfg, i, c, None if seeds is None else seeds[c])
        for i in range(len(cfg.noise_grid))
        for c in range(n_circ)
    ]
    results = _run_tasks(tasks, workers)
    grid = []
    for i, spec in enumerate(cfg.noise_grid):
        per_circuit = results[i * n_circ : (i + 1) * n_circ]
        grid.append([aggregate(cfg, n, spec, [pc[j] for pc in per_circuit]) for j, n in enumerate(cfg.depth_grid)])
    return grid


def run_depth_sweep(cfg: SweepConfig, workers: int = 1) -> list[ExperimentRecord]:
    if len(cfg.noise_grid) != 1:
        raise ValueError("a depth sweep takes exactly one noise spec")
    return _grid_sweep(cfg, workers)[0]


def run_heatmap(cfg: SweepConfig, workers: int = 1) -> list[list[ExperimentRecord]]:
    return _grid_sweep(cfg, workers)


def run_rate_sweep(cfg: SweepConfig, fixed_circuit_seed: int, workers: int = 1) -> list[ExperimentRecord]:
    """Sweep the noise grid on one fixed circuit built from ``fixed_circuit_seed``."""
    if len(cfg.depth_grid) != 1:
        raise ValueError("a rate sweep takes exactly one depth")
    grid = _grid_sweep(cfg, workers, seeds=[fixed_circuit_seed])
    return [row[0] for row in grid]


def ideal_useful_kl(cfg: SweepConfig, seed: int, depth: Optional[int] = None) -> float:
    depth = cfg.depth_grid[0] if depth is None else depth
    circ = build_ladder_circuit(cfg.n_qubits, depth, seed, cfg.identity_slots)
    pops = run(attach_noise(circ, NoiseSpec()), cfg.initial_index).exact_pops
    v = kl_useful(pops, build_subspace(cfg.n_qubits, cfg.n_excitations, cfg.grouping))
    return v.value if v.ok else float("inf")


@dataclass(frozen=True)
class CircuitChoice:
    target: float
    circuit_index: int
    seed: int
    dkl_useful: float

    @property
    def within_tolerance(self) -> bool:
        return abs(self.dkl_useful - self.target) <= 0.1


def select_circuits(cfg: SweepConfig, targets: Sequence[float]) -> list[CircuitChoice]:
    """Scan derived circuit seeds; keep, per target, the one whose ideal D_KL^u is nearest."""
    scores = []
    for c in range(cfg.seed_candidates):
        seed = circuit_seed(cfg.master_seed, c)
        scores.append((c, seed, ideal_useful_kl(cfg, seed)))
    out = []
    for t in targets:
        c, seed, v = min(scores, key=lambda s: (abs(s[2] - t), s[0]))
        out.append(CircuitChoice(t, c, seed, v))
    return out


def crossing_depth(records: Sequence[ExperimentRecord]) -> Optional[int]:
    """First grid depth where mean MS infidelity rises above MP after having been below it."""
    below = False
    for r in records:
        ms, mp = r.methods[Method.MS].mean_infidelity, r.methods[Method.MP].mean_infidelity
        if ms != ms:
            # every MS run failed: treat as worse than post-selection
            if below:
                return r.N
            continue
        if ms < mp:
            below = True
        elif below and ms > mp:
            return r.N
    return None
