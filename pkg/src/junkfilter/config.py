"""Sweep configuration schema and the YAML/JSON configuration document."""

from __future__ import annotations

from typing import Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .circuit import IDENTITY_SLOT_POLICIES
from .noise import NoiseSpec
from .subspace import GROUPINGS


class ConfigError(ValueError):
    """Raised for unparseable or invalid configuration documents."""


class SweepConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["depth", "rate", "heatmap"] = "depth"
    n_qubits: int = Field(ge=2, le=10)
    n_excitations: int = Field(ge=0)
    initial_state: Union[int, Literal["default"]] = "default"
    depth_grid: tuple[int, ...]
    noise_grid: tuple[NoiseSpec, ...]
    n_circuits: int = Field(default=21, ge=1)
    master_seed: int = Field(default=0, ge=0, lt=2**64)
    # None means exact populations; otherwise multinomial resampling with this many shots
    shots: Optional[int] = Field(default=None, ge=1)
    grouping: str = "default"
    identity_slots: str = "layer"
    preset_name: Optional[str] = None
    # rate sweeps: pick circuits whose ideal useful-subspace KL divergence is nearest these values
    dklu_targets: Optional[tuple[float, ...]] = None
    seed_candidates: int = Field(default=200, ge=1)

    @field_validator("depth_grid")
    @classmethod
    def _ascending(cls, v):
        if not v:
            raise ValueError("depth_grid must be nonempty")
        if any(n < 0 for n in v):
            raise ValueError("depths must be non-negative")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("depth_grid must be strictly ascending")
        return v

    @field_validator("noise_grid")
    @classmethod
    def _nonempty(cls, v):
        if not v:
            raise ValueError("noise_grid must be nonempty")
        return v

    @field_validator("grouping")
    @classmethod
    def _grouping(cls, v):
        if v not in GROUPINGS:
            raise ValueError(f"grouping must be one of {GROUPINGS}")
        return v

    @field_validator("identity_slots")
    @classmethod
    def _slots(cls, v):
        if v not in IDENTITY_SLOT_POLICIES:
            raise ValueError(f"identity_slots must be one of {IDENTITY_SLOT_POLICIES}")
        return v

    @model_validator(mode="after")
    def _consistent(self):
        if self.n_excitations > self.n_qubits:
            raise ValueError("n_excitations must not exceed n_qubits")
        if self.grouping == "paper-4q" and (self.n_qubits, self.n_excitations) != (4, 2):
            raise ValueError("grouping 'paper-4q' requires n_qubits=4, n_excitations=2")
        if self.initial_state != "default":
            if not 0 <= self.initial_state < 1 << self.n_qubits:
                raise ValueError("initial_state is not a basis index of the register")
            if bin(self.initial_state).count("1") != self.n_excitations:
                raise ValueError("initial_state must have exactly n_excitations ones")
        if self.kind == "depth" and len(self.noise_grid) != 1:
            raise ValueError("a depth sweep takes exactly one noise spec")
        if self.kind == "rate" and len(self.depth_grid) != 1:
            raise ValueError("a rate sweep takes exactly one depth")
        return self

    @property
    def initial_index(self) -> int:
        if self.initial_state == "default":
            return (1 << self.n_excitations) - 1
        return self.initial_state

    @property
    def population_mode(self) -> str:
        return "exact" if self.shots is None else f"shots({self.shots})"


def _format_errors(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<document>"
        lines.append(f"{loc}: {e['msg']}")
    return "; ".join(lines)


def load_config(doc: dict) -> SweepConfig:
    """Validate a mapping, expanding an optional ``preset`` key into its defaults."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration document must be a mapping")
    doc = dict(doc)
    name = doc.pop("preset", None)
    if name is not None:
        from .presets import get_preset

        try:
            base = get_preset(name).model_dump(mode="json")
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
        base.update(doc)
        doc = base
    try:
        return SweepConfig.model_validate(doc)
    except ValidationError as err:
        raise ConfigError(_format_errors(err)) from None


def parse_config(text: str) -> SweepConfig:
    try:
        doc = yaml.safe_load(text)
    except yaml.MarkedYAMLError as err:
        mark = err.problem_mark
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        raise ConfigError(f"parse error at {where}: {err.problem}") from None
    except yaml.YAMLError as err:
        raise ConfigError(f"parse error: {err}") from None
    return load_config(doc)


def serialize_config(cfg: SweepConfig) -> str:
    return yaml.safe_dump(cfg.model_dump(mode="json"), sort_keys=False)
