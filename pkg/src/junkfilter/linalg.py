"""Dense operator algebra on multi-qubit density matrices.

Bit-order convention used throughout the package: qubit 0 is the most
significant bit of a computational-basis index, so ``|q0 q1 ... q_{n-1}>``
has index ``sum(q_k << (n - 1 - k))``.

Local operators are never expanded to the full ``2**n`` dimension on the hot
path.  Instead the density matrix is viewed as a rank-``2n`` tensor and the
target legs are contracted directly; :func:`embed_operator` is kept as the
explicit (and slower) reference form.
"""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CZ = np.diag([1, 1, 1, -1]).astype(complex)


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices, left factor most significant."""
    return reduce(np.kron, ops)


def n_qubits_of(rho: np.ndarray) -> int:
    d = rho.shape[0]
    n = d.bit_length() - 1
    if rho.shape != (d, d) or 1 << n != d:
        raise ValueError(f"expected a square matrix of dimension 2**n, got shape {rho.shape}")
    return n


def _check_targets(targets: Sequence[int], n_qubits: int) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"target qubits must be distinct, got {targets}")
    for t in targets:
        if not 0 <= t < n_qubits:
            raise ValueError(f"qubit index {t} out of range for {n_qubits} qubits")
    return targets


def embed_operator(op: np.ndarray, target_qubits: Sequence[int], n_qubits: int) -> np.ndarray:
    """Return the ``2**n_qubits`` operator acting as ``op`` on ``target_qubits``.

    ``target_qubits[0]`` corresponds to the most significant bit of ``op``'s
    own index, so ``embed_operator(CNOT, [1, 0], 2)`` is a CNOT controlled on
    qubit 1.
    """
    targets = _check_targets(target_qubits, n_qubits)
    k = len(targets)
    op = np.asarray(op, dtype=complex)
    if op.shape != (1 << k, 1 << k):
        raise ValueError(f"operator of shape {op.shape} does not act on {k} qubit(s)")
    rest = [q for q in range(n_qubits) if q not in targets]
    # full = op (x) I on the permuted ordering (targets..., rest...), then undo the permutation
    full = np.kron(op, np.eye(1 << len(rest), dtype=complex))
    order = list(targets) + rest
    tensor = full.reshape((2,) * (2 * n_qubits))
    inv = np.argsort(order)
    perm = list(inv) + [n_qubits + i for i in inv]
    d = 1 << n_qubits
    return tensor.transpose(perm).reshape(d, d)


def superoperator(kraus: Sequence[np.ndarray]) -> np.ndarray:
    """Row-major superoperator ``sum_k K (x) conj(K)`` of a Kraus map."""
    d = kraus[0].shape[0]
    return sum((k[:, None, :, None] * k.conj()[None, :, None, :]).reshape(d * d, d * d) for k in kraus)


def apply_superoperator(rho: np.ndarray, sop: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Apply a local superoperator (row-major vectorisation) to ``targets`` of ``rho``."""
    n = n_qubits_of(rho)
    targets = _check_targets(targets, n)
    k = len(targets)
    dk = 1 << k
    if sop.shape != (dk * dk, dk * dk):
        raise ValueError(f"superoperator of shape {sop.shape} does not act on {k} qubit(s)")
    rest = [q for q in range(n) if q not in targets]
    row_axes = list(targets)
    col_axes = [n + t for t in targets]
    other = rest + [n + q for q in rest]
    perm = row_axes + col_axes + other
    t = rho.reshape((2,) * (2 * n)).transpose(perm).reshape(dk * dk, -1)
    t = (sop @ t).reshape((2,) * (2 * n))
    return t.transpose(np.argsort(perm)).reshape(rho.shape)


def apply_unitary(rho: np.ndarray, u: np.ndarray, targets: Sequence[int], check: bool = False) -> np.ndarray:
    """Return ``U rho U^dagger`` with ``u`` acting on ``targets``."""
    u = np.asarray(u, dtype=complex)
    if check and not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=TOL, rtol=0):
        raise ValueError("operator is not unitary")
    n = n_qubits_of(rho)
    targets = _check_targets(targets, n)
    k = len(targets)
    dk = 1 << k
    if u.shape != (dk, dk):
        raise ValueError(f"unitary of shape {u.shape} does not act on {k} qubit(s)")
    rest = [q for q in range(n) if q not in targets]
    d = rho.shape[0]
    # left multiplication on the row legs, then right multiplication by U^dagger on the column legs
    perm = list(targets) + rest + [n + q for q in range(n)]
    t = rho.reshape((2,) * (2 * n)).transpose(perm).reshape(dk, -1)
    t = (u @ t).reshape((2,) * (2 * n)).transpose(np.argsort(perm)).reshape(d, d)
    perm = [n + q for q in targets] + [n + q for q in rest] + list(range(n))
    t = t.reshape((2,) * (2 * n)).transpose(perm).reshape(dk, -1)
    t = (u.conj() @ t).reshape((2,) * (2 * n)).transpose(np.argsort(perm)).reshape(d, d)
    return t


def check_kraus(kraus: Sequence[np.ndarray], atol: float = TOL) -> None:
    dk = kraus[0].shape[0]
    total = sum(k.conj().T @ k for k in kraus)
    if not np.allclose(total, np.eye(dk), atol=atol, rtol=0):
        raise ValueError("Kraus operators do not satisfy sum K^dagger K = I")


def apply_kraus(rho: np.ndarray, kraus: Sequence[np.ndarray], targets: Sequence[int]) -> np.ndarray:
    """Return ``sum_k K rho K^dagger`` with every ``K`` acting on ``targets``."""
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    check_kraus(kraus)
    return apply_superoperator(rho, superoperator(kraus), targets)


def basis_density_matrix(index: int, n_qubits: int) -> np.ndarray:
    d = 1 << n_qubits
    if not 0 <= index < d:
        raise ValueError(f"basis index {index} out of range for {n_qubits} qubits")
    rho = np.zeros((d, d), dtype=complex)
    rho[index, index] = 1.0
    return rho


def diagonal(rho: np.ndarray) -> np.ndarray:
    """Computational-basis populations of ``rho``; magnitudes below 1e-14 clamp to 0."""
    p = np.real(np.diagonal(rho)).copy()
    p[np.abs(p) < 1e-14] = 0.0
    return p


def is_density_matrix(rho: np.ndarray, atol: float = TOL, psd_tol: float = 1e-8) -> bool:
    if not np.allclose(rho, rho.conj().T, atol=atol, rtol=0):
        return False
    if abs(np.trace(rho) - 1) > atol:
        return False
    return bool(np.linalg.eigvalsh(rho).min() >= -psd_tol)
