"""Run configuration: YAML schema, parsing, validation and emission.

Schema (all keys at top level)::

    case: II                     # "I" (no hole) or "II" (plane with a hole)
    hole: [[2, 2], [3, 2], [3, 3]]
    boundary: [[2, 1], [3, 1], ...]
    k: sqrt(2)                   # number, or "sqrt(<number>)"
    eps: 1.0e-6                  # damping used by the Green engine
    n_max: auto                  # or an integer shell count
    eta: 1.0                     # coupling constant, case II only
    data: 1.0                    # constant, or [[x1, x2, re, im], ...]
    window: {x1: [-15, 20], x2: [-15, 20]}
    radiation: {rays: [10, 55, ...], radii: [20, 80], center: auto}   # rays in degrees
    output: {dir: out, prefix: field}
    stability_check: false
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import yaml

from .lattice import Point, RegionError
from .radiation import K_MAX
from .solver import ProblemSpec


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"field {key!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.key = key


class ValidationError(ValueError):
    def __init__(self, message: str, check: str):
        super().__init__(f"{check}: {message}")
        self.check = check


DEFAULT_RAYS = (10.0, 55.0, 100.0, 145.0, 190.0, 235.0, 280.0, 325.0)


@dataclass(frozen=True)
class RunConfig:
    case: str
    boundary: Tuple[Point, ...]
    k: float
    hole: Tuple[Point, ...] = ()
    eps: float = 1e-6
    n_max: Optional[int] = None
    eta: float = 1.0
    data: object = 1.0  # complex constant or tuple of (point, complex)
    window: Tuple[Tuple[int, int], Tuple[int, int]] = ((-15, 20), (-15, 20))
    rays: Tuple[float, ...] = DEFAULT_RAYS
    radii: Tuple[int, int] = (20, 80)
    center: Optional[Tuple[float, float]] = None
    out_dir: str = "out"
    prefix: str = "field"
    stability_check: bool = False

    def boundary_data(self) -> Dict[Point, complex]:
        if isinstance(self.data, tuple):
            return {p: v for p, v in self.data}
        return {p: complex(self.data) for p in self.boundary}

    def problem(self) -> ProblemSpec:
        return ProblemSpec(case=self.case, boundary=frozenset(self.boundary), k=self.k,
                           data=self.boundary_data(), hole=frozenset(self.hole), eta=self.eta,
                           eps=self.eps, n_max=self.n_max, window=self.window)


_SQRT = re.compile(r"^\s*sqrt\(\s*([0-9.eE+-]+)\s*\)\s*$")


def _number(value, key: str, line: Optional[int]) -> float:
    if isinstance(value, bool):
        raise ParseError("expected a number", line, key)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _SQRT.match(value)
        if m:
            return math.sqrt(float(m.group(1)))
        try:
            return float(value)
        except ValueError:
            pass
    raise ParseError(f"expected a number, got {value!r}", line, key)


def _complex(value, line: Optional[int]) -> complex:
    if isinstance(value, str) and "j" in value:
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            raise ParseError(f"bad complex constant {value!r}", line, "data") from None
    return complex(_number(value, "data", line))


def _points(value, key: str, line: Optional[int]) -> Tuple[Point, ...]:
    if value is None:
        return ()
    try:
        pts = tuple((int(a), int(b)) for a, b in value)
    except (TypeError, ValueError):
        raise ParseError("expected a list of integer pairs", line, key) from None
    if any(float(a) != int(a) or float(b) != int(b) for (a, b) in value):
        raise ParseError("coordinates must be integers", line, key)
    if len(set(pts)) != len(pts):
        raise ParseError("duplicate points", line, key)
    return pts


def _key_lines(text: str) -> Dict[str, int]:
    lines = {}
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return lines
    if isinstance(node, yaml.MappingNode):
        for knode, _ in node.value:
            lines[knode.value] = knode.start_mark.line + 1
    return lines


_KNOWN = {"case", "hole", "boundary", "k", "eps", "n_max", "eta", "data", "window",
          "radiation", "output", "stability_check"}


def parse_config(text: str, validate: bool = True) -> RunConfig:
    """Parse YAML text into a validated :class:`RunConfig`."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(str(exc), mark.line + 1 if mark else None) from None
    if not isinstance(raw, dict):
        raise ParseError("top level must be a mapping")
    lines = _key_lines(text)
    unknown = sorted(set(raw) - _KNOWN)
    if unknown:
        raise ParseError("unknown key", lines.get(unknown[0]), unknown[0])
    for key in ("case", "boundary", "k"):
        if key not in raw:
            raise ParseError("missing required key", None, key)

    case = str(raw["case"]).strip().upper()
    if case not in ("I", "II"):
        raise ParseError("case must be I or II", lines.get("case"), "case")
    boundary = _points(raw["boundary"], "boundary", lines.get("boundary"))
    hole = _points(raw.get("hole"), "hole", lines.get("hole"))
    k = _number(raw["k"], "k", lines.get("k"))
    eps = _number(raw.get("eps", 1e-6), "eps", lines.get("eps"))
    eta = _number(raw.get("eta", 1.0), "eta", lines.get("eta"))

    n_max_raw = raw.get("n_max", "auto")
    if n_max_raw in (None, "auto"):
        n_max = None
    elif isinstance(n_max_raw, int) and not isinstance(n_max_raw, bool) and n_max_raw >= 1:
        n_max = n_max_raw
    else:
        raise ParseError("n_max must be 'auto' or a positive integer", lines.get("n_max"), "n_max")

    data_raw = raw.get("data", 1.0)
    if isinstance(data_raw, list):
        table = []
        for row in data_raw:
            if not isinstance(row, list) or len(row) not in (3, 4):
                raise ParseError("rows must be [x1, x2, re] or [x1, x2, re, im]",
                                 lines.get("data"), "data")
            im = row[3] if len(row) == 4 else 0.0
            table.append(((int(row[0]), int(row[1])),
                          complex(_number(row[2], "data", None), _number(im, "data", None))))
        data: object = tuple(sorted(table, key=lambda row: row[0]))
    else:
        data = _complex(data_raw, lines.get("data"))
        if data.imag == 0:
            data = data.real

    window_raw = raw.get("window", {"x1": [-15, 20], "x2": [-15, 20]})
    try:
        window = tuple((int(window_raw[a][0]), int(window_raw[a][1])) for a in ("x1", "x2"))
    except (KeyError, TypeError, IndexError, ValueError):
        raise ParseError("window needs x1 and x2 ranges", lines.get("window"), "window") from None

    rad = raw.get("radiation") or {}
    rays = tuple(_number(a, "radiation.rays", lines.get("radiation"))
                 for a in rad.get("rays", DEFAULT_RAYS))
    radii_raw = rad.get("radii", [20, 80])
    if not isinstance(radii_raw, list) or len(radii_raw) != 2:
        raise ParseError("radii must be [r_min, r_max]", lines.get("radiation"), "radiation.radii")
    radii = (int(radii_raw[0]), int(radii_raw[1]))
    center_raw = rad.get("center", "auto")
    center = None if center_raw in (None, "auto") else (
        _number(center_raw[0], "radiation.center", None),
        _number(center_raw[1], "radiation.center", None))

    out = raw.get("output") or {}
    config = RunConfig(case=case, boundary=boundary, hole=hole, k=k, eps=eps, n_max=n_max,
                       eta=eta, data=data, window=window, rays=rays, radii=radii, center=center,
                       out_dir=str(out.get("dir", "out")), prefix=str(out.get("prefix", "field")),
                       stability_check=bool(raw.get("stability_check", False)))
    if validate:
        validate_config(config)
    return config


def validate_config(config: RunConfig) -> None:
    if not config.boundary:
        raise ValidationError("boundary list is empty", "boundary")
    if not 0.0 < config.k < K_MAX:
        raise ValidationError(f"k={config.k} outside (0, 2*sqrt(2))", "k")
    if config.eps < 0:
        raise ValidationError("eps must be non-negative", "eps")
    if config.case == "II" and config.eta == 0:
        raise ValidationError("eta must be non-zero", "eta")
    if config.case == "II" and not config.hole:
        raise ValidationError("case II needs hole points", "hole")
    if config.case == "I" and config.hole:
        raise ValidationError("case I takes no hole points", "hole")
    if isinstance(config.data, tuple):
        given = {p for p, _ in config.data}
        if given != set(config.boundary):
            raise ValidationError("data table must cover exactly the boundary points", "data")
    (a0, a1), (b0, b1) = config.window
    if a0 > a1 or b0 > b1:
        raise ValidationError("empty window", "window")
    if not 0 < config.radii[0] < config.radii[1]:
        raise ValidationError("radii must satisfy 0 < r_min < r_max", "radiation.radii")
    try:
        config.problem().validate()
    except RegionError as exc:
        raise ValidationError(str(exc), type(exc).__name__) from None


def _data_yaml(data) -> object:
    if isinstance(data, tuple):
        return [[p[0], p[1], v.real, v.imag] for p, v in data]
    if isinstance(data, complex):
        return f"{data.real!r}{data.imag:+}j" if data.imag else data.real
    return data


def emit_config(config: RunConfig) -> str:
    """YAML text that :func:`parse_config` maps back to ``config``."""
    doc = {
        "case": config.case,
        "hole": [list(p) for p in config.hole],
        "boundary": [list(p) for p in config.boundary],
        "k": config.k,
        "eps": config.eps,
        "n_max": "auto" if config.n_max is None else config.n_max,
        "eta": config.eta,
        "data": _data_yaml(config.data),
        "window": {"x1": list(config.window[0]), "x2": list(config.window[1])},
        "radiation": {"rays": list(config.rays), "radii": list(config.radii),
                      "center": "auto" if config.center is None else list(config.center)},
        "output": {"dir": config.out_dir, "prefix": config.prefix},
        "stability_check": config.stability_check,
    }
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


EXAMPLE_CONFIG = """\
# Plane with a three-point hole, unit Dirichlet data, k = sqrt(2).
case: II
hole: [[2, 2], [3, 2], [3, 3]]
boundary: [[2, 1], [3, 1], [4, 1], [4, 2], [4, 3], [3, 4], [2, 4], [2, 3], [1, 3], [1, 2]]
k: sqrt(2)
eps: 1.0e-6
n_max: auto
eta: 1.0
data: 1.0
window: {x1: [-15, 20], x2: [-15, 20]}
radiation: {rays: [10, 55, 100, 145, 190, 235, 280, 325], radii: [20, 80]}
output: {dir: out, prefix: field}
"""

