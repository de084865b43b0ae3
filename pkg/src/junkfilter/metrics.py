"""Fidelity and KL-divergence diagnostics on population distributions."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .subspace import SubspaceIndex

ZERO_MASS = 1e-15


class MetricStatus(str, enum.Enum):
    OK = "ok"
    UNDEFINED_ZERO_MASS = "undefined_zero_mass"


@dataclass(frozen=True)
class MetricValue:
    value: float
    status: MetricStatus = MetricStatus.OK

    @property
    def ok(self) -> bool:
        return self.status is MetricStatus.OK


UNDEFINED = MetricValue(float("nan"), MetricStatus.UNDEFINED_ZERO_MASS)


def _pair(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    return p, q


def bhattacharyya_fidelity(p, q) -> MetricValue:
    p, q = _pair(p, q)
    return MetricValue(float(np.sum(np.sqrt(np.clip(p, 0, None) * np.clip(q, 0, None)))))


def infidelity(p, q) -> MetricValue:
    f = bhattacharyya_fidelity(p, q).value
    return MetricValue(min(1.0, max(0.0, 1.0 - f)))


def kl_from_uniform(q) -> MetricValue:
    """``sum_i u_i log(u_i / q_i)`` for uniform ``u``; ``q`` must be normalised."""
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0):
        return UNDEFINED
    u = 1.0 / len(q)
    return MetricValue(max(0.0, float(np.sum(u * np.log(u / q)))))


def kl_junk(pops, idx: SubspaceIndex) -> MetricValue:
    """KL divergence of the group-averaged, normalised junk populations from flat.

    Zero means the junk populations look exactly globally depolarized.
    """
    pops = np.asarray(pops, dtype=float)
    if pops.shape != (idx.dim,):
        raise ValueError(f"expected {idx.dim} populations, got {pops.shape}")
    if pops[list(idx.junk)].sum() < ZERO_MASS:
        return UNDEFINED
    means = np.array([pops[list(members)].mean() for _, members in idx.groups])
    return kl_from_uniform(means / means.sum())


def kl_useful(ideal_pops, idx: SubspaceIndex) -> MetricValue:
    """KL divergence of the ideal useful-subspace distribution from flat."""
    ideal_pops = np.asarray(ideal_pops, dtype=float)
    restricted = ideal_pops[list(idx.useful)]
    total = restricted.sum()
    if total < ZERO_MASS:
        return UNDEFINED
    return kl_from_uniform(restricted / total)
