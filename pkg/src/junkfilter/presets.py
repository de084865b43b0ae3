"""Named sweep configurations for the published figures, at desk scale.

Every preset uses per-step identity slots and 2000-shot sampled populations;
each ``Preset.description`` lists the caption parameters it transcribes.  Grids that
the figures do not list are fixed here once and recorded in every output row.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from .config import SweepConfig
from .noise import DampingRates, NoiseSpec, TwirlConfig

SHOTS = 2000
SLOTS = "step"


def _grid(lo: int, hi: int, points: int) -> tuple[int, ...]:
    return tuple(int(x) for x in np.unique(np.round(np.linspace(lo, hi, points))))


DEPTHS_200 = _grid(1, 200, 15)
HEATMAP_DEPTHS = (1, 8, 17, 34, 51, 68, 94, 120)
HEATMAP_RATES = tuple(float(g) for g in np.geomspace(1e-3, 1e-2, 8))
FIG3_RATES = tuple(float(g) for g in np.geomspace(1e-3, 3e-2, 6))


def _identity(gamma: float) -> NoiseSpec:
    return NoiseSpec(identity_depolarizing=gamma)


def _damping(p2: float, a2: float, p1: float = 0.0, a1: float = 0.0, twirl: bool = False) -> NoiseSpec:
    return NoiseSpec(
        single_qubit=DampingRates(amp=a1, phase=p1),
        two_qubit=DampingRates(amp=a2, phase=p2),
        twirl=TwirlConfig(enabled=twirl, n_instances=20),
    )


def _cfg(name: str, **kw) -> SweepConfig:
    kw.setdefault("shots", SHOTS)
    kw.setdefault("identity_slots", SLOTS)
    return SweepConfig(preset_name=name, **kw)


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    config: SweepConfig


def _build() -> dict[str, Preset]:
    p = {}

    def add(name, description, **kw):
        p[name] = Preset(name, description, _cfg(name, **kw))

    add("fig2a", "depth sweep, n_q=4 n_e=2, identity depolarizing 0.005, merged {0,4} junk group",
        n_qubits=4, n_excitations=2, depth_grid=DEPTHS_200, noise_grid=(_identity(0.005),), grouping="paper-4q")
    add("fig2c", "depth sweep, n_q=6 n_e=3, identity depolarizing 0.005",
        n_qubits=6, n_excitations=3, depth_grid=DEPTHS_200, noise_grid=(_identity(0.005),))
    add("fig2e", "depth sweep, n_q=8 n_e=4, identity depolarizing 0.001",
        n_qubits=8, n_excitations=4, depth_grid=DEPTHS_200, noise_grid=(_identity(0.001),))
    add("fig3", "rate sweep at N=20, n_q=4 n_e=2, two circuits chosen for useful-subspace KL 1.85 and 0.88",
        kind="rate", n_qubits=4, n_excitations=2, depth_grid=(20,),
        noise_grid=tuple(_identity(g) for g in FIG3_RATES), n_circuits=1, grouping="paper-4q",
        dklu_targets=(1.85, 0.88))
    add("fig4ab", "heat map over N and identity depolarizing rate, n_q=4 n_e=2",
        kind="heatmap", n_qubits=4, n_excitations=2, depth_grid=HEATMAP_DEPTHS,
        noise_grid=tuple(_identity(g) for g in HEATMAP_RATES), grouping="paper-4q")
    add("fig4cd", "heat map over N and two-qubit phase damping g; two-qubit amp g/10, single-qubit rates g/5 and g/50",
        kind="heatmap", n_qubits=4, n_excitations=2, depth_grid=HEATMAP_DEPTHS,
        noise_grid=tuple(_damping(g, g / 10, g / 5, g / 50) for g in HEATMAP_RATES), grouping="paper-4q")
    for suffix, n, ne in (("a", 4, 2), ("c", 8, 4)):
        add(f"supp1{suffix}", f"depth sweep, n_q={n}, gate damping: two-qubit phase 0.01 amp 1e-3, single-qubit 1/5 of those",
            n_qubits=n, n_excitations=ne, depth_grid=DEPTHS_200, noise_grid=(_damping(0.01, 1e-3, 0.002, 2e-4),),
            grouping="paper-4q" if n == 4 else "default")
    for group, a2 in (("supp2", 3e-3), ("supp3", 5e-3)):
        for suffix, twirl in (("a", False), ("c", True)):
            state = "20 twirled instances" if twirl else "no twirling"
            add(f"{group}{suffix}", f"depth sweep, n_q=4, two-qubit phase 0.01 amp {a2:g}, ideal single-qubit gates, {state}",
                n_qubits=4, n_excitations=2, depth_grid=DEPTHS_200, noise_grid=(_damping(0.01, a2, twirl=twirl),),
                n_circuits=11, grouping="paper-4q")
    return p


PRESETS = MappingProxyType(_build())
ALIASES = MappingProxyType({
    "fig2b": "fig2a", "fig2d": "fig2c", "fig2f": "fig2e",
    "fig4a": "fig4ab", "fig4b": "fig4ab", "fig4c": "fig4cd", "fig4d": "fig4cd",
})
GROUPS = MappingProxyType({
    "supp1": ("supp1a", "supp1c"),
    "supp2": ("supp2a", "supp2c"),
    "supp3": ("supp3a", "supp3c"),
})


def resolve(name: str) -> tuple[str, ...]:
    """Preset names a user-facing name expands to (group names give several)."""
    if name in GROUPS:
        return GROUPS[name]
    name = ALIASES.get(name, name)
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(list_presets(names_only=True))}")
    return (name,)


def get_preset(name: str) -> SweepConfig:
    names = resolve(name)
    if len(names) != 1:
        raise KeyError(f"{name!r} names a group of presets ({', '.join(names)}); pick one")
    return PRESETS[names[0]].config


def list_presets(names_only: bool = False):
    if names_only:
        return list(PRESETS)
    return [PRESETS[k] for k in PRESETS]
