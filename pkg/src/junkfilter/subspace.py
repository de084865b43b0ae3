"""Excitation-number partition of the computational basis."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

GROUPINGS = ("default", "paper-4q")


def hamming_weight(basis_index: int, n_qubits: int) -> int:
    if not 0 <= basis_index < 1 << n_qubits:
        raise ValueError(f"basis index {basis_index} out of range for {n_qubits} qubits")
    return bin(basis_index).count("1")


@dataclass(frozen=True)
class SubspaceIndex:
    """Useful (fixed-weight) indices, junk complement and the junk grouping.

    Group labels are the Hamming weights they collect, e.g. ``"0+4"``.
    """

    n_qubits: int
    n_excitations: int
    useful: tuple[int, ...]
    junk: tuple[int, ...]
    groups: tuple[tuple[str, tuple[int, ...]], ...]

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def useful_mask(self) -> np.ndarray:
        m = np.zeros(self.dim, dtype=bool)
        m[list(self.useful)] = True
        return m


def _weight_groups(n_qubits: int, n_excitations: int, grouping: str) -> list[tuple[int, ...]]:
    others = [w for w in range(n_qubits + 1) if w != n_excitations]
    if grouping == "default":
        return [(w,) for w in others]
    if grouping == "paper-4q":
        if (n_qubits, n_excitations) != (4, 2):
            raise ValueError("grouping 'paper-4q' is defined only for n_qubits=4, n_excitations=2")
        return [(0, 4), (1,), (3,)]
    raise ValueError(f"unknown grouping {grouping!r}; expected one of {GROUPINGS}")


def build_subspace(n_qubits: int, n_excitations: int, grouping: str = "default") -> SubspaceIndex:
    if not 0 <= n_excitations <= n_qubits:
        raise ValueError(f"n_excitations={n_excitations} out of range for {n_qubits} qubits")
    d = 1 << n_qubits
    weights = [bin(i).count("1") for i in range(d)]
    useful = tuple(i for i in range(d) if weights[i] == n_excitations)
    junk = tuple(i for i in range(d) if weights[i] != n_excitations)
    groups = []
    for ws in _weight_groups(n_qubits, n_excitations, grouping):
        members = tuple(i for i in junk if weights[i] in ws)
        groups.append(("+".join(str(w) for w in ws), members))
    assert len(useful) == comb(n_qubits, n_excitations)
    return SubspaceIndex(n_qubits, n_excitations, useful, junk, tuple(groups))


def split_populations(pops, idx: SubspaceIndex) -> tuple[dict[int, float], dict[int, float]]:
    """Useful and junk populations keyed by basis index."""
    pops = np.asarray(pops, dtype=float)
    if pops.shape != (idx.dim,):
        raise ValueError(f"expected {idx.dim} populations, got {pops.shape}")
    return ({i: float(pops[i]) for i in idx.useful}, {i: float(pops[i]) for i in idx.junk})
