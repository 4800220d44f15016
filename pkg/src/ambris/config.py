"""JSON run configuration: parsing, validation and default filling.

Schema (version 1). Only ``source``, ``tag`` and ``reader`` are required::

    {
      "version": 1,
      "source": [x, y, z], "tag": [x, y, z], "reader": [x, y, z],
      "frequency_hz": 2.45e9,            # or "wavelength_m" (not both)
      "amplitude_law": "free_space",     # or "unit"
      "noise_sigma": 1e-4,
      "calibrate_ber": null,             # e.g. 0.0537: sets sigma from the no-RIS contrast
      "tag_reflection": {"magnitude": 1.0, "phase_deg": 0.0},
      "ris": {"origin": null, "axis_u": [0, 0, 1], "axis_v": [0, 1, 0],
              "rows": 16, "cols": 16, "spacing_m": null, "phase_bits": null},
      "desk": {"origin": [0.25, -0.175, 0.0], "axis_u": [1, 0, 0], "axis_v": [0, 1, 0],
               "nx": 8, "ny": 8, "spacing_m": 0.05},
      "phases": 16,
      "thresholds": {"hot": 0.1, "dual": 0.25},
      "search": {"bits": 8, "range_max": null, "budget": null},
      "map": {"grid": null, "floor_db": -120.0, "include_direct": false,
              "beam": 1, "delta_deg": 0.0},
      "output_dir": "."
    }

RIS ``spacing_m`` defaults to half a wavelength; its ``origin`` (first cell
center) defaults to centering the columns on the origin's axis_v line with
the bottom row 5 cm above the desk plane. ``map.grid`` takes a desk-style
object and defaults to the desk grid. ``search.range_max`` defaults to a
provable upper bound on the contrast; ``search.budget`` to N*P. Angles are
degrees in the file and radians internally.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import AmbrisError, ConfigError
from .geometry import DeskGrid, RisGeometry
from .metrics import DEFAULT_DUAL, DEFAULT_HOT, contrast_ref, sigma_for_ber
from .propagation import SPEED_OF_LIGHT, AmplitudeLaw, ChannelSet, Scenario, build_channel_set

SCHEMA_VERSION = 1
DEFAULT_FREQUENCY_HZ = 2.45e9
DEFAULT_SIGMA = 1e-4
DEFAULT_PHASES = 16
RIS_BASE_HEIGHT = 0.05

_TOP_KEYS = {
    "version", "source", "tag", "reader", "frequency_hz", "wavelength_m", "amplitude_law",
    "noise_sigma", "calibrate_ber", "tag_reflection", "ris", "desk", "phases", "thresholds",
    "search", "map", "output_dir",
}
_RIS_KEYS = {"origin", "axis_u", "axis_v", "rows", "cols", "spacing_m", "phase_bits"}
_GRID_KEYS = {"origin", "axis_u", "axis_v", "nx", "ny", "spacing_m"}
_REFL_KEYS = {"magnitude", "phase_deg"}
_THRESH_KEYS = {"hot", "dual"}
_SEARCH_KEYS = {"bits", "range_max", "budget"}
_MAP_KEYS = {"grid", "floor_db", "include_direct", "beam", "delta_deg"}

DEFAULT_DESK = {
    "origin": [0.25, -0.175, 0.0],
    "axis_u": [1.0, 0.0, 0.0],
    "axis_v": [0.0, 1.0, 0.0],
    "nx": 8,
    "ny": 8,
    "spacing_m": 0.05,
}


@dataclass(frozen=True, eq=False)
class RunConfig:
    scenario: Scenario
    channels: ChannelSet
    phases: int = DEFAULT_PHASES
    phase_bits: int | None = None
    eps_hot: float = DEFAULT_HOT
    eps_dual: float = DEFAULT_DUAL
    search_bits: int = 8
    search_range_max: float | None = None
    search_budget: int | None = None
    map_grid: DeskGrid | None = None
    floor_db: float = -120.0
    include_direct: bool = False
    map_beam: int = 1
    map_delta_deg: float = 0.0
    output_dir: Path = Path(".")
    calibrate_ber: float | None = None

    @property
    def budget(self) -> int:
        full = self.scenario.num_locations * self.phases
        return full if self.search_budget is None else self.search_budget


def _fail(field: str, constraint: str, value=None) -> ConfigError:
    got = "" if value is None else f" (got {value!r})"
    return ConfigError(f"{field}: {constraint}{got}")


def _check_keys(obj, allowed: set[str], where: str) -> dict:
    if not isinstance(obj, dict):
        raise _fail(where, "must be an object", obj)
    unknown = sorted(set(obj) - allowed)
    if unknown:
        prefix = f"{where}." if where else ""
        raise ConfigError("unknown key(s): " + ", ".join(prefix + k for k in unknown))
    return obj


def _number(obj: dict, key: str, field: str, default=None, *, positive=False, allow_none=False):
    v = obj.get(key, default)
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise _fail(field, "must be a finite number", v)
    if positive and not v > 0:
        raise _fail(field, "must be > 0", v)
    return float(v)


def _integer(obj: dict, key: str, field: str, default=None, *, minimum=1, allow_none=False):
    v = obj.get(key, default)
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, int):
        raise _fail(field, "must be an integer", v)
    if v < minimum:
        raise _fail(field, f"must be >= {minimum}", v)
    return v


def _vector(obj: dict, key: str, field: str, default=None):
    v = obj.get(key, default)
    if v is None:
        raise _fail(field, "is required")
    if (
        not isinstance(v, list)
        or len(v) != 3
        or any(isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x) for x in v)
    ):
        raise _fail(field, "must be a list of 3 finite numbers", v)
    return np.array(v, dtype=float)


def _unit_axes(u, v, where: str):
    for name, a in (("axis_u", u), ("axis_v", v)):
        if abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise _fail(f"{where}.{name}", "must be a unit vector", a.tolist())
    if abs(np.dot(u, v)) > 1e-12:
        raise _fail(f"{where}.axis_v", "must be orthogonal to axis_u", v.tolist())


def _grid(obj, where: str) -> DeskGrid:
    merged = dict(DEFAULT_DESK)
    merged.update(_check_keys(obj, _GRID_KEYS, where))
    u = _vector(merged, "axis_u", f"{where}.axis_u")
    v = _vector(merged, "axis_v", f"{where}.axis_v")
    _unit_axes(u, v, where)
    return DeskGrid(
        origin=_vector(merged, "origin", f"{where}.origin"),
        axis_u=u,
        axis_v=v,
        spacing=_number(merged, "spacing_m", f"{where}.spacing_m", positive=True),
        nx=_integer(merged, "nx", f"{where}.nx"),
        ny=_integer(merged, "ny", f"{where}.ny"),
    )


def _ris(obj, wavelength: float) -> tuple[RisGeometry, int | None]:
    obj = _check_keys(obj, _RIS_KEYS, "ris")
    rows = _integer(obj, "rows", "ris.rows", 16)
    cols = _integer(obj, "cols", "ris.cols", 16)
    spacing = _number(obj, "spacing_m", "ris.spacing_m", wavelength / 2, positive=True)
    u = _vector(obj, "axis_u", "ris.axis_u", [0.0, 0.0, 1.0])
    v = _vector(obj, "axis_v", "ris.axis_v", [0.0, 1.0, 0.0])
    _unit_axes(u, v, "ris")
    if obj.get("origin") is None:
        origin = RIS_BASE_HEIGHT * np.array([0.0, 0.0, 1.0]) - (cols - 1) / 2 * spacing * v
    else:
        origin = _vector(obj, "origin", "ris.origin")
    bits = _integer(obj, "phase_bits", "ris.phase_bits", None, allow_none=True)
    return RisGeometry(origin=origin, axis_u=u, axis_v=v, spacing=spacing, rows=rows, cols=cols), bits


def parse_config(text: str, base_dir: Path | None = None) -> RunConfig:
    """Parse and validate a JSON configuration, filling defaults.

    Raises
    ------
    ConfigError
        On malformed JSON, unknown keys, or any violated constraint; the
        message names the offending field.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
    raw = _check_keys(raw, _TOP_KEYS, "")
    version = raw.get("version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise _fail("version", f"must be {SCHEMA_VERSION}", version)

    if "frequency_hz" in raw and "wavelength_m" in raw:
        raise ConfigError("frequency_hz, wavelength_m: give at most one")
    if "wavelength_m" in raw:
        wavelength = _number(raw, "wavelength_m", "wavelength_m", positive=True)
    else:
        freq = _number(raw, "frequency_hz", "frequency_hz", DEFAULT_FREQUENCY_HZ, positive=True)
        wavelength = SPEED_OF_LIGHT / freq

    law_name = raw.get("amplitude_law", AmplitudeLaw.FREE_SPACE.value)
    try:
        law = AmplitudeLaw(law_name)
    except ValueError:
        choices = ", ".join(x.value for x in AmplitudeLaw)
        raise _fail("amplitude_law", f"must be one of {choices}", law_name) from None

    sigma = _number(raw, "noise_sigma", "noise_sigma", DEFAULT_SIGMA, positive=True)
    target = _number(raw, "calibrate_ber", "calibrate_ber", None, allow_none=True)
    if target is not None and not 0 < target < 0.5:
        raise _fail("calibrate_ber", "must lie in (0, 0.5)", target)

    refl = _check_keys(raw.get("tag_reflection", {}), _REFL_KEYS, "tag_reflection")
    mag = _number(refl, "magnitude", "tag_reflection.magnitude", 1.0)
    if not 0 <= mag <= 1:
        raise _fail("tag_reflection.magnitude", "must lie in [0, 1]", mag)
    phase = math.radians(_number(refl, "phase_deg", "tag_reflection.phase_deg", 0.0))
    # keep the ideal tag exactly 1 + 0j
    reflection = complex(mag) if phase == 0 else mag * complex(math.cos(phase), math.sin(phase))

    ris, phase_bits = _ris(raw.get("ris", {}), wavelength)
    desk = _grid(raw.get("desk", {}), "desk")

    thresholds = _check_keys(raw.get("thresholds", {}), _THRESH_KEYS, "thresholds")
    eps_hot = _number(thresholds, "hot", "thresholds.hot", DEFAULT_HOT, positive=True)
    eps_dual = _number(thresholds, "dual", "thresholds.dual", DEFAULT_DUAL, positive=True)

    search = _check_keys(raw.get("search", {}), _SEARCH_KEYS, "search")
    bits = _integer(search, "bits", "search.bits", 8)
    range_max = _number(search, "range_max", "search.range_max", None, positive=True, allow_none=True)
    budget = _integer(search, "budget", "search.budget", None, allow_none=True)

    fmap = _check_keys(raw.get("map", {}), _MAP_KEYS, "map")
    grid = None if fmap.get("grid") is None else _grid(fmap["grid"], "map.grid")
    floor_db = _number(fmap, "floor_db", "map.floor_db", -120.0)
    include_direct = fmap.get("include_direct", False)
    if not isinstance(include_direct, bool):
        raise _fail("map.include_direct", "must be true or false", include_direct)
    beam = _integer(fmap, "beam", "map.beam", 1)
    if beam > desk.size:
        raise _fail("map.beam", f"must be <= number of desk locations ({desk.size})", beam)
    delta_deg = _number(fmap, "delta_deg", "map.delta_deg", 0.0)

    phases = _integer(raw, "phases", "phases", DEFAULT_PHASES)
    out = raw.get("output_dir", ".")
    if not isinstance(out, str):
        raise _fail("output_dir", "must be a string", out)
    out = Path(out)
    if base_dir is not None and not out.is_absolute():
        out = base_dir / out

    try:
        scenario = Scenario(
            source_pos=_vector(raw, "source", "source"),
            tag_pos=_vector(raw, "tag", "tag"),
            reader_pos=_vector(raw, "reader", "reader"),
            wavelength=wavelength,
            ris=ris,
            desk=desk,
            noise_sigma=sigma,
            amplitude_law=law,
            tag_reflection=reflection,
        )
        channels = build_channel_set(scenario)
        if target is not None:
            scenario = replace(scenario, noise_sigma=sigma_for_ber(contrast_ref(channels, reflection), target))
    except ConfigError:
        raise
    except AmbrisError as exc:
        raise ConfigError(f"scenario: {exc}") from None

    return RunConfig(
        scenario=scenario,
        channels=channels,
        phases=phases,
        phase_bits=phase_bits,
        eps_hot=eps_hot,
        eps_dual=eps_dual,
        search_bits=bits,
        search_range_max=range_max,
        search_budget=budget,
        map_grid=grid,
        floor_db=floor_db,
        include_direct=include_direct,
        map_beam=beam,
        map_delta_deg=delta_deg,
        output_dir=out,
        calibrate_ber=target,
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


def default_config_text() -> str:
    """The committed default desk scenario shipped with the package."""
    return (Path(__file__).parent / "data" / "default_scenario.json").read_text(encoding="utf-8")
