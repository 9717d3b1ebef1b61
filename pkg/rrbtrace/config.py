"""
JSON configuration documents for simulations.

A simulation document looks like:

    {
      "cell": {"total_rbs": 100, "rbg_size": 4, "tbs_per_rb": 100, "subframe_ms": 1},
      "duration_subframes": 4000,
      "seed": 7,
      "ues": [
        {"profile": "netflix"},
        {"profile": {"class_label": "custom", "shape": "Linear", "qci": 9,
                     "uplink": {"base_rate": 200}, "downlink": {"base_rate": 1200}},
         "crnti": 4242}
      ]
    }

A profile given as a string names an entry of the built-in catalogue.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ConfigurationError, NotFoundError
from .profiles import AppProfile, DirectionParams, Shape, catalogue_profile
from .radio import CRNTI_MAX, CRNTI_MIN, CellConfig, standard_qos
from .simulator import SimConfig, UeSpec


class _Document(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class CellDocument(_Document):
    total_rbs: int = Field(100, gt=0)
    rbg_size: int = Field(4, gt=0)
    tbs_per_rb: int = Field(100, gt=0)
    subframe_ms: int = Field(1, gt=0)

    def to_cell(self) -> CellConfig:
        return CellConfig(self.total_rbs, self.rbg_size, self.tbs_per_rb, self.subframe_ms)


class DirectionDocument(_Document):
    base_rate: float = Field(..., ge=0)
    amplitude: float = Field(0.0, ge=0)
    period: int = Field(1, ge=1)
    noise_std: float = Field(0.0, ge=0)
    persistent_rbs: int = Field(0, ge=0)
    burst_probability: float = Field(0.0, ge=0, le=1)
    burst_bytes: float = Field(0.0, ge=0)

    def to_params(self) -> DirectionParams:
        return DirectionParams(**self.model_dump())


class ProfileDocument(_Document):
    class_label: str = Field(..., min_length=1)
    shape: Literal["Sinusoidal", "Convex", "Linear", "BurstyDecay"]
    qci: int = Field(9, ge=1, le=26)
    uplink: DirectionDocument
    downlink: DirectionDocument

    def to_profile(self) -> AppProfile:
        return AppProfile(self.class_label, Shape(self.shape), self.uplink.to_params(),
                          self.downlink.to_params(), standard_qos(self.qci))


class UeDocument(_Document):
    profile: str | ProfileDocument
    crnti: int | None = Field(None, ge=CRNTI_MIN, le=CRNTI_MAX)

    def to_spec(self) -> UeSpec:
        profile = catalogue_profile(self.profile) if isinstance(self.profile, str) else self.profile.to_profile()
        return UeSpec(profile, self.crnti)


class SimConfigDocument(_Document):
    cell: CellDocument = CellDocument()
    duration_subframes: int = Field(..., ge=1)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    ues: list[UeDocument] = Field(..., min_length=1)

    def to_config(self) -> SimConfig:
        return SimConfig(
            cell=self.cell.to_cell(),
            ues=tuple(ue.to_spec() for ue in self.ues),
            duration_subframes=self.duration_subframes,
            seed=self.seed,
        )


def parse_sim_config(text: str, source: str = "config") -> SimConfig:
    """Validate a JSON simulation document; failures name the offending field."""
    try:
        document = SimConfigDocument.model_validate_json(text)
    except ValidationError as error:
        first = error.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or source
        raise ConfigurationError(f"{first['msg']} (in {source})", context=field)
    return document.to_config()


def load_sim_config(path: Path) -> SimConfig:
    if not path.is_file():
        raise NotFoundError(f"Config file '{path}' not found", context=str(path))
    return parse_sim_config(path.read_text(encoding="utf-8"), source=str(path))


def cell_from_json(path: Path) -> CellConfig:
    """Cell parameters from a simulation document, ignoring the rest of it."""
    if not path.is_file():
        raise NotFoundError(f"Config file '{path}' not found", context=str(path))
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        return CellDocument.model_validate(raw.get("cell", {})).to_cell()
    except (json.JSONDecodeError, AttributeError) as error:
        raise ConfigurationError(f"Unreadable config: {error}", context=str(path))
    except ValidationError as error:
        first = error.errors()[0]
        raise ConfigurationError(first["msg"], context="cell." + ".".join(str(p) for p in first["loc"]))
