"""Command-line entry point: ``junkfilter {sweep,preset,mitigate,plot,presets}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import presets as preset_table
from .config import ConfigError, SweepConfig, parse_config, serialize_config
from .experiments import circuit_seed, run_depth_sweep, run_heatmap, run_rate_sweep, select_circuits
from .fileio import CountsError, emit_csv, ingest_counts
from .metrics import kl_junk
from .mitigation import Method, mitigate
from .plotting import KINDS, render


def _write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def run_config(cfg: SweepConfig, out: Path, workers: int = 1) -> list[Path]:
    """Execute one sweep configuration and write its CSV file(s) below ``out``."""
    name = cfg.preset_name or "sweep"
    written = []
    _write(out / f"{name}.config.yaml", serialize_config(cfg).encode())
    if cfg.kind == "depth":
        files = {name: run_depth_sweep(cfg, workers)}
    elif cfg.kind == "heatmap":
        files = {name: [r for row in run_heatmap(cfg, workers) for r in row]}
    else:
        if cfg.dklu_targets:
            choices = select_circuits(cfg, cfg.dklu_targets)
        else:
            choices = []
        selection = []
        files = {}
        if choices:
            for k, ch in enumerate(choices):
                files[f"{name}{chr(ord('a') + k)}"] = run_rate_sweep(cfg, ch.seed, workers)
                selection.append({
                    "file": f"{name}{chr(ord('a') + k)}.csv", "target_dkl_useful": ch.target,
                    "circuit_index": ch.circuit_index, "seed": ch.seed, "dkl_useful": ch.dkl_useful,
                    "within_tolerance": ch.within_tolerance,
                })
        else:
            seed = circuit_seed(cfg.master_seed, 0)
            files[name] = run_rate_sweep(cfg, seed, workers)
            selection.append({"file": f"{name}.csv", "circuit_index": 0, "seed": seed})
        path = out / f"{name}.selection.json"
        _write(path, (json.dumps(selection, indent=2) + "\n").encode())
        written.append(path)
        for entry in selection:
            if entry.get("within_tolerance") is False:
                print(f"warning: no circuit within 0.1 of D_KL^u target {entry['target_dkl_useful']}; "
                      f"using nearest ({entry['dkl_useful']:.4f})", file=sys.stderr)
    for stem, records in files.items():
        path = out / f"{stem}.csv"
        _write(path, emit_csv(records))
        written.append(path)
    return written


def _cmd_sweep(args) -> int:
    cfg = parse_config(Path(args.config).read_text())
    for p in run_config(cfg, Path(args.out), args.workers):
        print(p)
    return 0


def _cmd_preset(args) -> int:
    try:
        names = preset_table.resolve(args.name)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    for n in names:
        for p in run_config(preset_table.PRESETS[n].config, Path(args.out), args.workers):
            print(p)
    return 0


def _cmd_mitigate(args) -> int:
    pops, idx = ingest_counts(args.counts)
    method = Method(args.method.upper())
    out = mitigate(pops, idx, method)
    dkl = kl_junk(pops, idx)
    width = idx.n_qubits
    doc = {
        "method": method.value,
        "status": out.status.value,
        "estimated_c": out.estimated_c,
        "distribution": {format(i, f"0{width}b"): float(p) for i, p in enumerate(out.distribution) if p > 0}
        if out.ok else None,
        "dkl_junk": dkl.value if dkl.ok else None,
        "dkl_junk_status": dkl.status.value,
    }
    _write(Path(args.out), (json.dumps(doc, indent=2) + "\n").encode())
    if not out.ok:
        print(f"mitigation failed: {out.status.value}", file=sys.stderr)
        return 1
    return 0


def _cmd_plot(args) -> int:
    render(args.csv, args.kind, args.out)
    return 0


def _cmd_presets(args) -> int:
    for p in preset_table.list_presets():
        print(f"{p.name:8s} {p.config.kind:8s} {p.description}")
    for group, members in preset_table.GROUPS.items():
        print(f"{group:8s} {'group':8s} runs {', '.join(members)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="junkfilter", description="Noisy Givens-circuit simulator and junk-subspace filter")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a sweep from a YAML/JSON configuration")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("preset", help="run a named preset")
    p.add_argument("--name", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_preset)

    p = sub.add_parser("mitigate", help="apply MP or MS to a counts file")
    p.add_argument("--counts", required=True)
    p.add_argument("--method", required=True, choices=["mp", "ms"])
    p.add_argument("--out", required=True, help="output JSON path")
    p.set_defaults(func=_cmd_mitigate)

    p = sub.add_parser("plot", help="render a sweep CSV as SVG")
    p.add_argument("--csv", required=True)
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("presets", help="list the named presets")
    p.set_defaults(func=_cmd_presets)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ConfigError, CountsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
