"""Counts-file ingestion and the sweep CSV format."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .experiments import METHODS, ExperimentRecord
from .subspace import SubspaceIndex, build_subspace

CSV_COLUMNS = (
    "preset", "n_qubits", "n_excitations", "N",
    "gamma_identity", "gamma_a1", "gamma_p1", "gamma_a2", "gamma_p2", "twirl", "shots",
    "method", "mean_infidelity", "std_infidelity", "mean_dkl_junk", "std_dkl_junk",
    "n_failed", "n_circuits", "master_seed",
)
NOISE_COLUMNS = ("gamma_identity", "gamma_a1", "gamma_p1", "gamma_a2", "gamma_p2")
NA = "NA"


class CountsError(ValueError):
    """A counts file that cannot be ingested; the message names the line."""


def _header_value(line: str, key: str, lineno: int) -> int:
    name, sep, value = line.partition("=")
    if not sep or name.strip() != key:
        raise CountsError(f"line {lineno}: expected '{key}=<integer>', got {line!r}")
    try:
        return int(value.strip())
    except ValueError:
        raise CountsError(f"line {lineno}: {key} must be an integer, got {value.strip()!r}") from None


def parse_counts(text: str) -> tuple[int, int, dict[str, int]]:
    """Parse counts text into ``(n_qubits, n_excitations, {bitstring: count})``.

    Blank lines and lines starting with ``#`` are ignored.
    """
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), start=1)]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if len(lines) < 2:
        raise CountsError("missing header: need 'n_qubits=' and 'n_excitations=' lines")
    n_qubits = _header_value(lines[0][1], "n_qubits", lines[0][0])
    n_exc = _header_value(lines[1][1], "n_excitations", lines[1][0])
    if not 1 <= n_qubits <= 16:
        raise CountsError(f"line {lines[0][0]}: n_qubits must be between 1 and 16")
    if not 0 <= n_exc <= n_qubits:
        raise CountsError(f"line {lines[1][0]}: n_excitations must be between 0 and n_qubits")
    counts: dict[str, int] = {}
    for lineno, line in lines[2:]:
        bits, sep, count = line.partition(",")
        bits, count = bits.strip(), count.strip()
        if not sep or not bits or any(ch not in "01" for ch in bits) or not count.isdigit():
            raise CountsError(f"line {lineno}: malformed record {line!r}; expected 'bitstring,count'")
        if len(bits) != n_qubits:
            raise CountsError(f"line {lineno}: bitstring {bits!r} has length {len(bits)}, expected {n_qubits}")
        if bits in counts:
            raise CountsError(f"line {lineno}: duplicate bitstring {bits!r}")
        counts[bits] = int(count)
    if sum(counts.values()) < 1:
        raise CountsError("total count must be at least 1")
    return n_qubits, n_exc, counts


def ingest_counts(source: Union[str, Path], grouping: str = "default") -> tuple[np.ndarray, SubspaceIndex]:
    """Read a counts file into normalised populations over all ``2**n`` basis states."""
    n_qubits, n_exc, counts = parse_counts(Path(source).read_text())
    pops = np.zeros(1 << n_qubits)
    for bits, c in counts.items():
        pops[int(bits, 2)] = c
    return pops / pops.sum(), build_subspace(n_qubits, n_exc, grouping)


def _num(x) -> str:
    if x is None:
        return NA
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return NA
    return format(x, ".17g")


def _noise_values(rec: ExperimentRecord) -> tuple[float, ...]:
    s = rec.noise
    return (s.identity_depolarizing, s.single_qubit.amp, s.single_qubit.phase, s.two_qubit.amp, s.two_qubit.phase)


def _rows(records: Iterable[ExperimentRecord]) -> list[tuple]:
    out = []
    for rec in records:
        twirl = rec.noise.twirl.n_instances if rec.noise.twirl.enabled else 0
        for mi, m in enumerate(METHODS):
            st = rec.methods[m]
            key = (rec.N, _noise_values(rec), twirl, mi)
            out.append((key, [
                rec.preset, rec.n_qubits, rec.n_excitations, rec.N,
                *_noise_values(rec), twirl, rec.shots or 0,
                m.value, st.mean_infidelity, st.std_infidelity, rec.mean_dkl_junk, rec.std_dkl_junk,
                st.n_failed, rec.n_circuits, rec.master_seed,
            ]))
    out.sort(key=lambda r: r[0])
    return [r[1] for r in out]


def emit_csv(records: Iterable[ExperimentRecord]) -> bytes:
    """Deterministic CSV bytes: sorted rows, 17 significant digits, ``NA`` for missing values."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in _rows(records):
        w.writerow([v if isinstance(v, str) else _num(v) for v in row])
    return buf.getvalue().encode("utf-8")


def read_csv(source: Union[str, Path]) -> list[dict[str, str]]:
    with open(source, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        header = reader.fieldnames or []
    missing = [c for c in CSV_COLUMNS if c not in header]
    if missing and header:
        raise ValueError(f"CSV is missing required columns: {', '.join(missing)}")
    if not header:
        raise ValueError("CSV has no header")
    return rows


def parse_float(text: str) -> float:
    return float("nan") if text == NA else float(text)
