"""Run configuration schema.

A run is described by one JSON document. Every block is optional and falls
back to the module defaults; unknown keys anywhere are rejected.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .chiral import ChiralMode, SuperpositionSpec
from .scalar import PulseParams

EXPERIMENTS = ("fields", "verify", "energy", "characterize", "trace", "scan", "quantum")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _check_modes(labels):
    for label in labels:
        ChiralMode.parse(label)
    return labels


class PulseBlock(_Strict):
    lam: float = Field(1.0, gt=0)
    psi1: float = Field(1.0, gt=0)
    psi2: float = Field(100.0, gt=0)
    phi: float = Field(1.0, gt=0)
    xi: float = Field(1.0, gt=0)
    ell0: float = Field(1.0e-6, gt=0)

    def build(self, **override) -> PulseParams:
        return PulseParams(**{**self.model_dump(), **override})


class AxisBlock(_Strict):
    lo: float
    hi: float
    n: int = Field(ge=1)


class FieldsBlock(_Strict):
    t: list[float] = [0.0]
    x: AxisBlock = AxisBlock(lo=-5.0, hi=5.0, n=21)
    y: AxisBlock = AxisBlock(lo=0.0, hi=0.0, n=1)
    z: AxisBlock = AxisBlock(lo=-5.0, hi=5.0, n=41)


class VerifyBlock(_Strict):
    n_points: int = Field(1000, ge=1)
    n_shape_pairs: int = Field(5, ge=1)
    n_superpositions: int = Field(3, ge=0)
    psi_range: tuple[float, float] = (0.5, 200.0)
    box: float = Field(10.0, gt=0)
    wave_tol: float = 1e-9
    maxwell_tol: float = 1e-5
    eigenphase_tol: float = 1e-9


class QuadBlock(_Strict):
    rtol: float = Field(1e-6, gt=0)
    max_subdivisions: int = Field(20000, ge=1)


class EnergyBlock(_Strict):
    planes: list[float] = [1.0]
    times: list[float] = [0.0]
    quad: QuadBlock = QuadBlock()
    consistency_tol: float = 5e-3


class CharacterizeBlock(_Strict):
    n_picoseconds: float = Field(1.0, gt=0)
    spot_z: Optional[float] = None
    beta_tol: float = 1e-3
    roundtrip_tol: float = 1e-9
    quad_rtol: float = Field(1e-9, gt=0)


class IntegratorBlock(_Strict):
    rtol: float = Field(1e-9, gt=0)
    atol: float = Field(1e-12, gt=0)
    method: Literal["RK45", "DOP853"] = "RK45"
    n_output: int = Field(201, ge=2)


class RingBlock(_Strict):
    n_particles: int = Field(12, ge=1)
    radius: float = Field(5.0, ge=0)
    z_plane: float = 0.0
    initial_velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)
    phase: float = 0.0


class TraceBlock(_Strict):
    modes: list[str] = ["CM,+1", "CM,-1", "CM,0"]
    ring: RingBlock = RingBlock()
    t_start: float = -10.0
    t_end: float = 10.0
    settle_ratio: Optional[float] = 1e-8
    max_lab_time: float = 1e5
    charge_sign: Literal[-1, 1] = -1
    integrator: IntegratorBlock = IntegratorBlock()
    shell_tol: float = 1e-8
    congruence_tol: float = 1e-6
    symmetry_tol: float = 1e-2

    _modes = field_validator("modes")(classmethod(lambda cls, v: _check_modes(v)))


class ScanBlock(_Strict):
    lams: list[float] = [20.0, 40.0, 80.0]
    modes: list[str] = ["CM,-1"]
    particle: tuple[float, float, float] = (3.0, 0.0, 0.0)
    t_start: float = -10.0
    t_end: float = 10.0
    settle_ratio: Optional[float] = 1e-8
    max_lab_time: float = 1e5
    charge_sign: Literal[-1, 1] = -1
    integrator: IntegratorBlock = IntegratorBlock()
    energy_plane: float = 1.0
    quad: QuadBlock = QuadBlock()
    scaling_tol: float = 1e-6
    expect_monotone: bool = True
    shell_tol: float = 1e-8

    _modes = field_validator("modes")(classmethod(lambda cls, v: _check_modes(v)))

    @field_validator("lams")
    @classmethod
    def _positive(cls, v):
        if not v or any(x <= 0 for x in v):
            raise ValueError("lams must be a non-empty list of positive values")
        return v


class PacketBlock(_Strict):
    momentum: tuple[float, float, float] = (0.0, 0.0, 0.0)
    width: tuple[float, float, float] = (1.0, 1.0, 1.0)
    position: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @field_validator("width")
    @classmethod
    def _widths(cls, v):
        if any(w <= 0 for w in v):
            raise ValueError("packet widths must be > 0")
        return v


class GridBlock(_Strict):
    n: tuple[int, int, int] = (64, 64, 64)
    half_width_sigmas: float = Field(8.0, gt=0)


class QuantumBlock(_Strict):
    mu1: float = Field(1.0, gt=0)
    mu2: float = Field(1.0, gt=0)
    hbar: float = Field(1.0, gt=0)
    c: float = Field(1.0, gt=0)
    relativistic: bool = False
    times: list[float] = [0.0, 1.0, 10.0, 100.0, 1000.0]
    modes: dict[str, tuple[float, float]] = {"CM,+1": (1.0, 0.0), "CM,-1": (1.0, 0.0)}
    packet1: PacketBlock = PacketBlock()
    packet2: PacketBlock = PacketBlock()
    grid: Optional[GridBlock] = None
    norm_tol: float = 1e-12

    @field_validator("modes")
    @classmethod
    def _labels(cls, v):
        _check_modes(v)
        if not v:
            raise ValueError("at least one mode coefficient is required")
        return v


class RunConfig(_Strict):
    experiment: Optional[Literal[EXPERIMENTS]] = None
    seed: int = 0
    pulse: PulseBlock = PulseBlock()
    spec: dict[str, tuple[float, float]] = {"CM,-1": (1.0, 0.0)}
    fields: FieldsBlock = FieldsBlock()
    verify: VerifyBlock = VerifyBlock()
    energy: EnergyBlock = EnergyBlock()
    characterize: CharacterizeBlock = CharacterizeBlock()
    trace: TraceBlock = TraceBlock()
    scan: ScanBlock = ScanBlock()
    quantum: QuantumBlock = QuantumBlock()

    @field_validator("spec")
    @classmethod
    def _spec(cls, v):
        return _check_modes(v)

    def superposition(self) -> SuperpositionSpec:
        return SuperpositionSpec.from_dict(self.spec)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True)


class ConfigError(ValueError):
    """Invalid configuration, with the offending field path and source line."""

    def __init__(self, message: str, field: str = "", line: int | None = None):
        where = f" (field {field!r}" + (f", line {line})" if line else ")") if field else ""
        super().__init__(message + where)
        self.field = field
        self.line = line


def _line_of(text: str, loc: tuple) -> int | None:
    """Best-effort line of the last key in ``loc`` within the JSON ``text``."""
    pos = 0
    found = None
    for key in loc:
        if not isinstance(key, str):
            continue
        idx = text.find(f'"{key}"', pos)
        if idx < 0:
            break
        pos, found = idx, idx
    return None if found is None else text.count("\n", 0, found) + 1


def _set_path(data: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node = data
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot set {dotted!r}: {k!r} is not a block", dotted)
    node[keys[-1]] = value


def parse_config(text: str = "{}", overrides: dict | None = None) -> RunConfig:
    """Parse and validate a JSON config; ``overrides`` maps dotted keys to values."""
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc.msg}", "", exc.lineno) from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    for key, value in (overrides or {}).items():
        _set_path(data, key, value)
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        err = exc.errors()[0]
        loc = tuple(err["loc"])
        field = ".".join(str(k) for k in loc)
        raise ConfigError(err["msg"], field, _line_of(text, loc)) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path | None, overrides: dict | None = None) -> RunConfig:
    text = Path(path).read_text() if path else "{}"
    return parse_config(text, overrides)
