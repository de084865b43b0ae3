"""Population-level mitigation: raw (M0), post-selection (MP) and the junk filter (MS).

The junk filter assumes the error floor inside the useful subspace equals
the average junk population, which is exact under global depolarizing noise
``rho -> P I/d + (1 - P) rho``.  The analytic model and its block inverse
live here too, as oracles for that claim.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .subspace import SubspaceIndex

ZERO_MASS = 1e-15


class Method(str, enum.Enum):
    M0 = "M0"
    MP = "MP"
    MS = "MS"


class Status(str, enum.Enum):
    OK = "ok"
    FAILED_ALL_CLIPPED = "failed_all_clipped"
    FAILED_ZERO_USEFUL_MASS = "failed_zero_useful_mass"


@dataclass(frozen=True, eq=False)
class MitigationOutcome:
    method: Method
    distribution: np.ndarray
    status: Status = Status.OK
    estimated_c: Optional[float] = None

    @property
    def ok(self) -> bool:
        return self.status is Status.OK


def method_m0(pops) -> MitigationOutcome:
    return MitigationOutcome(Method.M0, np.array(pops, dtype=float))


def method_mp(pops, idx: SubspaceIndex) -> MitigationOutcome:
    """Discard junk populations and renormalise the useful ones."""
    pops = np.asarray(pops, dtype=float)
    mask = idx.useful_mask()
    out = np.where(mask, pops, 0.0)
    total = out.sum()
    if total < ZERO_MASS:
        return MitigationOutcome(Method.MP, np.zeros_like(pops), Status.FAILED_ZERO_USEFUL_MASS)
    return MitigationOutcome(Method.MP, out / total)


def method_ms(pops, idx: SubspaceIndex) -> MitigationOutcome:
    """Subtract the mean junk population from every useful one, clip at 0, renormalise."""
    pops = np.asarray(pops, dtype=float)
    mask = idx.useful_mask()
    junk = pops[~mask]
    # exactly rounded sum, so c does not depend on the order of the junk entries
    c = math.fsum(junk) / len(junk)
    out = np.where(mask, np.maximum(0.0, pops - c), 0.0)
    total = out.sum()
    if total <= 0.0:
        return MitigationOutcome(Method.MS, np.zeros_like(pops), Status.FAILED_ALL_CLIPPED, c)
    return MitigationOutcome(Method.MS, out / total, Status.OK, c)


def mitigate(pops, idx: SubspaceIndex, method: Method | str) -> MitigationOutcome:
    method = Method(method)
    if method is Method.M0:
        return method_m0(pops)
    if method is Method.MP:
        return method_mp(pops, idx)
    return method_ms(pops, idx)


def pn_from_rate(p: float, n: int) -> float:
    """Equivalent global depolarizing probability after ``n`` layers of rate ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"rate must lie in [0, 1], got {p}")
    if n < 0:
        raise ValueError("layer count must be non-negative")
    return 1.0 - (1.0 - p) ** n


def apply_global_depolarizing(rho_ideal: np.ndarray, P: float) -> np.ndarray:
    if not 0.0 <= P <= 1.0:
        raise ValueError(f"depolarizing probability must lie in [0, 1], got {P}")
    d = rho_ideal.shape[0]
    return P * np.eye(d) / d + (1 - P) * rho_ideal


def recover_ideal_block(rho_f: np.ndarray, P: float, idx: SubspaceIndex) -> np.ndarray:
    """Invert global depolarizing on the useful block: ``(block - P/d I) / (1 - P)``."""
    if not 0.0 <= P < 1.0:
        raise ValueError("nothing is recoverable at P = 1 (or P outside [0, 1))")
    u = list(idx.useful)
    block = rho_f[np.ix_(u, u)]
    c = P / rho_f.shape[0]
    return (block - c * np.eye(len(u))) / (1 - P)
