"""JSON run configurations for the command-line interface.

A spectrum configuration looks like::

    {
      "medium": {"preset": "air_bubble", "a": 1.0},
      "disk": {"R": 2.0},
      "incident": {"direction": [1.0, 0.0]},
      "grid": {"min": 0.05, "max": 1.0, "count": 50, "spacing": "linear",
               "unit": "normalized", "length": 1.0},
      "C": 1.5,
      "lmax": 0,
      "modeset": null
    }

``medium`` is either a preset (``homogeneous``, ``air_bubble``,
``sound_hard``, each with radius ``a``) or explicit ``layers`` of
``{"outer_radius", "rho", "kappa"}`` with optional ``core_radius``; both
accept ``rho0`` and ``kappa0``. Grid values are angular frequencies when
``unit`` is ``"omega"`` and ``omega * length / (2 pi c)`` when it is
``"normalized"`` (``length`` defaults to ``R``). ``lmax`` may be omitted to
use the multipole rule at the top of the grid; ``modeset`` names a mode-set
file to use instead of computing modes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, ModeSetFormatError
from .model import FictitiousDisk, IncidentField, Layer, MediumSpec

__all__ = [
    "FrequencyGrid",
    "SweepConfig",
    "incident_from_dict",
    "load_json",
    "medium_from_dict",
]


def load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ModeSetFormatError(f"no such file {path}") from None
    except json.JSONDecodeError as exc:
        raise ModeSetFormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: "
                                 f"{exc.msg}") from None


def _number(d, key, where, default=None, positive=False):
    if key not in d or d[key] is None:
        if default is None:
            raise ModeSetFormatError("missing", f"{where}.{key}")
        return default
    try:
        v = float(d[key])
    except (TypeError, ValueError):
        raise ModeSetFormatError("not a number", f"{where}.{key}") from None
    if positive and not v > 0:
        raise ModeSetFormatError("must be positive", f"{where}.{key}")
    return v


def medium_from_dict(d, where="medium") -> MediumSpec:
    if not isinstance(d, dict):
        raise ModeSetFormatError("must be an object", where)
    rho0 = _number(d, "rho0", where, 1.0, positive=True)
    kappa0 = _number(d, "kappa0", where, 1.0, positive=True)
    preset = d.get("preset")
    try:
        if preset is not None:
            a = _number(d, "a", where, 1.0, positive=True)
            if preset == "homogeneous":
                return MediumSpec.homogeneous(rho0, kappa0)
            if preset == "air_bubble":
                return MediumSpec.air_bubble(a, rho0, kappa0)
            if preset == "sound_hard":
                return MediumSpec.sound_hard(a, rho0, kappa0)
            raise ModeSetFormatError(f"unknown preset {preset!r}", f"{where}.preset")
        layers = []
        for i, l in enumerate(d.get("layers", [])):
            w = f"{where}.layers[{i}]"
            if not isinstance(l, dict):
                raise ModeSetFormatError("must be an object", w)
            layers.append(Layer(_number(l, "outer_radius", w), _number(l, "rho", w),
                                _number(l, "kappa", w)))
        core = _number(d, "core_radius", where, 0.0)
        return MediumSpec(tuple(layers), rho0, kappa0, core)
    except DomainError as exc:
        raise ModeSetFormatError(str(exc), where) from None


def incident_from_dict(d, where="incident") -> IncidentField:
    if d is None:
        return IncidentField.plane_wave((1.0, 0.0))
    if not isinstance(d, dict):
        raise ModeSetFormatError("must be an object", where)
    try:
        if "direction" in d:
            p = np.asarray(d["direction"], dtype=float)
            if p.shape != (2,):
                raise ModeSetFormatError("must be a 2-vector", f"{where}.direction")
            return IncidentField.plane_wave(p / np.hypot(*p))
        coeffs = {}
        for key, v in d.get("coefficients", {}).items():
            if isinstance(v, dict):
                coeffs[int(key)] = complex(float(v["re"]), float(v["im"]))
            else:
                coeffs[int(key)] = complex(float(v))
        return IncidentField(coefficients=coeffs)
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModeSetFormatError):
            raise
        raise ModeSetFormatError(str(exc), where) from None


@dataclass(frozen=True)
class FrequencyGrid:
    """Sweep points; ``unit`` is ``"omega"`` or ``"normalized"`` (``omega length / (2 pi c)``)."""

    min: float
    max: float
    count: int
    spacing: str = "linear"
    unit: str = "normalized"
    length: float | None = None

    def __post_init__(self):
        if self.count < 2:
            raise ModeSetFormatError("needs at least 2 points", "grid.count")
        if not 0 < self.min < self.max:
            raise ModeSetFormatError("needs 0 < min < max", "grid")
        if self.spacing not in ("linear", "log"):
            raise ModeSetFormatError("must be 'linear' or 'log'", "grid.spacing")
        if self.unit not in ("omega", "normalized"):
            raise ModeSetFormatError("must be 'omega' or 'normalized'", "grid.unit")

    @classmethod
    def from_dict(cls, d, where="grid"):
        if not isinstance(d, dict):
            raise ModeSetFormatError("must be an object", where)
        length = d.get("length")
        return cls(_number(d, "min", where), _number(d, "max", where),
                   int(_number(d, "count", where)), d.get("spacing", "linear"),
                   d.get("unit", "normalized"),
                   None if length is None else _number(d, "length", where, positive=True))

    def values(self):
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)

    def omegas(self, c0, R):
        x = self.values()
        if self.unit == "omega":
            return x
        length = R if self.length is None else self.length
        return 2.0 * np.pi * c0 * x / length


@dataclass(frozen=True)
class SweepConfig:
    medium: MediumSpec
    disk: FictitiousDisk
    incident: IncidentField
    grid: FrequencyGrid
    C: float = 1.5
    lmax: int | None = None
    modeset: str | None = None
    compare: str | None = None

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ModeSetFormatError("configuration must be an object")
        medium = medium_from_dict(d.get("medium", {"preset": "homogeneous"}))
        disk_d = d.get("disk", {})
        R = _number(disk_d, "R", "disk", 1.0, positive=True)
        try:
            medium.check_disk(R)
        except DomainError as exc:
            raise ModeSetFormatError(str(exc), "disk.R") from None
        C = _number(d, "C", "config", 1.5, positive=True)
        lmax = d.get("lmax")
        if lmax is not None and (not isinstance(lmax, int) or lmax < 0):
            raise ModeSetFormatError("must be a non-negative integer", "lmax")
        compare = d.get("compare")
        if compare not in (None, "exact"):
            raise ModeSetFormatError("must be 'exact' or null", "compare")
        if "grid" not in d:
            raise ModeSetFormatError("missing", "grid")
        return cls(medium, FictitiousDisk(R), incident_from_dict(d.get("incident")),
                   FrequencyGrid.from_dict(d["grid"]), C, lmax, d.get("modeset"), compare)

    @classmethod
    def load(cls, path):
        return cls.from_dict(load_json(path))

    def omegas(self):
        return self.grid.omegas(self.medium.c0, self.disk.R)
