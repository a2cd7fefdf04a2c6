"""Scenario files: flat ``key = value`` text with dotted namespaces.

Grammar (one entry per line, ``#`` starts a comment)::

    metric.name = schwarzschild          # family from families.METRICS
    metric.M = 1                         # any other metric.* key is a family parameter
    potential.name = zero
    region.lo = -1, 3, 0.5, -1           # sampling box (t, x1, x2, x3)
    region.hi =  1, 10, 2.6, 1
    grid.kind = random                   # random | line | points
    grid.n = 50
    grid.seed = 42
    grid.from = 0, 3, 1.5707963, 0       # line endpoints
    grid.to = 0, 10, 1.5707963, 0
    grid.points = 0,4,1.57,0 ; 0,5,1.57,0
    fd.h = 1e-3
    tolerances.koszul = 1e-6             # see DEFAULT_TOLERANCES
    tolerances.residual = 1e-5           # optional pass/fail bound for residuals
    verify.triples = 20
    verify.seed = 0                      # section sampling; --seed overrides it and grid.seed
    sources.Tmass = 16 numbers, row-major, lowered indices
    sources.J = 4 numbers, contravariant
    sources.H = 0
    sources.table = path                 # per-point rows: Tmass(16) J(4) H(1)
    geodesic.x = 0, 10, 1.5707963, 0
    geodesic.u = ...
    geodesic.normalize = false

Matrices elsewhere (affine input files) use ``;`` between rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .families import METRICS, POTENTIALS, make_metric, make_potential
from .field_equation import SourceBlocks
from .geometry import DEFAULT_STEP, Box, MetricField
from .em_extension import PotentialField

DEFAULT_TOLERANCES = {
    "koszul": 1e-6,
    "curvature": 1e-5,
    "ricci": 1e-6,
    "scalar": 1e-6,
    "blocks": 1e-6,
    "symmetry": 1e-8,
    # residual norms are reported, not judged, unless this is set
    "residual": math.inf,
}


class ScenarioError(ValueError):
    def __init__(self, message, line: Optional[int] = None, key: Optional[str] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.key = key


def parse_text(text: str) -> dict[str, tuple[str, int]]:
    """Map key -> (raw value, line number)."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError("expected 'key = value'", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or any(c.isspace() for c in key):
            raise ScenarioError("malformed key", lineno, key)
        if key in out:
            raise ScenarioError(f"duplicate key (first on line {out[key][1]})", lineno, key)
        out[key] = (value, lineno)
    return out


def _number(text):
    return float(text.strip())


class Entries:
    """Typed access to parsed entries with line-aware diagnostics."""

    def __init__(self, raw: dict[str, tuple[str, int]]):
        self.raw = raw
        self.used: set[str] = set()

    def has(self, key) -> bool:
        return key in self.raw

    def _get(self, key):
        self.used.add(key)
        return self.raw[key]

    def float(self, key, default=None) -> float:
        if key not in self.raw:
            if default is None:
                raise ScenarioError("missing required key", key=key)
            return default
        value, line = self._get(key)
        try:
            return _number(value)
        except ValueError:
            raise ScenarioError(f"not a number: {value!r}", line, key) from None

    def int(self, key, default=None) -> int:
        x = self.float(key, None if default is None else float(default))
        if x != int(x):
            raise ScenarioError("expected an integer", self.raw.get(key, (None, None))[1], key)
        return int(x)

    def str(self, key, default=None) -> str:
        if key not in self.raw:
            if default is None:
                raise ScenarioError("missing required key", key=key)
            return default
        return self._get(key)[0]

    def bool(self, key, default=False) -> bool:
        if key not in self.raw:
            return default
        value, line = self._get(key)
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ScenarioError(f"not a boolean: {value!r}", line, key)

    def vector(self, key, n=None, default=None) -> np.ndarray:
        if key not in self.raw:
            if default is None:
                raise ScenarioError("missing required key", key=key)
            return np.asarray(default, dtype=float)
        value, line = self._get(key)
        try:
            v = np.array([_number(s) for s in value.split(",")], dtype=float)
        except ValueError:
            raise ScenarioError(f"not a list of numbers: {value!r}", line, key) from None
        if n is not None and v.size != n:
            raise ScenarioError(f"expected {n} numbers, got {v.size}", line, key)
        return v

    def matrix(self, key) -> np.ndarray:
        value, line = self._get(key)
        try:
            rows = [[_number(s) for s in row.split(",")] for row in value.split(";")]
            M = np.array(rows, dtype=float)
        except ValueError:
            raise ScenarioError(f"not a matrix: {value!r}", line, key) from None
        if M.ndim != 2:
            raise ScenarioError("ragged matrix rows", line, key)
        return M

    def namespace(self, prefix) -> dict[str, tuple[str, int]]:
        return {k[len(prefix) + 1:]: v for k, v in self.raw.items() if k.startswith(prefix + ".")}

    def family_params(self, prefix) -> dict:
        params = {}
        for name, (value, line) in self.namespace(prefix).items():
            if name == "name":
                continue
            self.used.add(f"{prefix}.{name}")
            try:
                params[name] = _number(value)
            except ValueError:
                raise ScenarioError(f"not a number: {value!r}", line, f"{prefix}.{name}") from None
        return params

    def unused(self) -> list[str]:
        return sorted(set(self.raw) - self.used)


@dataclass
class Scenario:
    metric: MetricField
    potential: PotentialField
    region: Box
    points: np.ndarray
    h: float = DEFAULT_STEP
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    triples: int = 20
    seed: int = 0
    sources: list = field(default_factory=list)
    geodesic_x: Optional[np.ndarray] = None
    geodesic_u: Optional[np.ndarray] = None
    geodesic_normalize: bool = False

    def source_at(self, i) -> SourceBlocks:
        if not self.sources:
            return SourceBlocks()
        return self.sources[i if len(self.sources) > 1 else 0]

    def describe(self) -> list[str]:
        def fmt(params):
            return ", ".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}"
                             for k, v in sorted(params.items()))
        return [f"metric: {self.metric.name}({fmt(self.metric.params)})",
                f"potential: {self.potential.name}({fmt(self.potential.params)})",
                f"points: {len(self.points)}", f"fd step: {self.h:g}"]


def _family(entries: Entries, prefix, registry, maker):
    name = entries.str(f"{prefix}.name")
    if name not in registry:
        raise ScenarioError(f"unknown family {name!r}; known: {', '.join(sorted(registry))}",
                            entries.raw[f"{prefix}.name"][1], f"{prefix}.name")
    params = entries.family_params(prefix)
    try:
        return maker(name, **params)
    except TypeError as exc:
        raise ScenarioError(f"bad parameters for {name}: {exc}", key=prefix) from None
    except ValueError as exc:
        raise ScenarioError(str(exc), key=prefix) from None


def _grid(entries: Entries, region: Box, seed: int, margin: float,
          override: Optional[int]) -> np.ndarray:
    kind = entries.str("grid.kind", "random")
    if kind == "random":
        n = entries.int("grid.n", 10)
        grid_seed = entries.int("grid.seed", seed)
        rng = np.random.default_rng(grid_seed if override is None else override)
        lo, hi = region.lo + margin, region.hi - margin
        if np.any(hi <= lo):
            raise ScenarioError("region too small for the finite-difference margin", key="region.lo")
        return lo + (hi - lo) * rng.random((n, 4))
    if kind == "line":
        n = entries.int("grid.n", 10)
        a, b = entries.vector("grid.from", 4), entries.vector("grid.to", 4)
        return a + np.linspace(0.0, 1.0, n)[:, None] * (b - a)
    if kind == "points":
        value, line = entries._get("grid.points")
        try:
            pts = np.array([[_number(s) for s in row.split(",")] for row in value.split(";")])
        except ValueError:
            raise ScenarioError("bad point list", line, "grid.points") from None
        if pts.ndim != 2 or pts.shape[1] != 4:
            raise ScenarioError("each point needs 4 coordinates", line, "grid.points")
        return pts
    raise ScenarioError(f"unknown grid kind {kind!r} (random | line | points)",
                        entries.raw["grid.kind"][1], "grid.kind")


def _sources(entries: Entries, base_dir: Path) -> list[SourceBlocks]:
    if entries.has("sources.table"):
        value, line = entries._get("sources.table")
        path = Path(value)
        if not path.is_absolute():
            path = base_dir / path
        try:
            rows = np.atleast_2d(np.loadtxt(path, comments="#"))
        except (OSError, ValueError) as exc:
            raise ScenarioError(f"cannot read source table: {exc}", line, "sources.table") from None
        if rows.shape[1] != 21:
            raise ScenarioError(f"source table rows need 21 columns, got {rows.shape[1]}",
                                line, "sources.table")
        try:
            return [SourceBlocks(r[:16].reshape(4, 4), r[16:20], r[20]) for r in rows]
        except ValueError as exc:
            raise ScenarioError(f"malformed source table: {exc}", line, "sources.table") from None
    if not any(entries.has(k) for k in ("sources.Tmass", "sources.J", "sources.H")):
        return []
    T = entries.vector("sources.Tmass", 16, np.zeros(16)).reshape(4, 4)
    try:
        return [SourceBlocks(T, entries.vector("sources.J", 4, np.zeros(4)),
                             entries.float("sources.H", 0.0))]
    except ValueError as exc:
        raise ScenarioError(str(exc), key="sources.Tmass") from None


def load(text: str, base_dir: Path = Path("."), seed: Optional[int] = None) -> Scenario:
    entries = Entries(parse_text(text))
    gf = _family(entries, "metric", METRICS, make_metric)
    pf = _family(entries, "potential", POTENTIALS, make_potential)
    h = entries.float("fd.h", DEFAULT_STEP)
    if h <= 0:
        raise ScenarioError("must be positive", entries.raw["fd.h"][1], "fd.h")
    if entries.has("region.lo") or entries.has("region.hi"):
        lo, hi = entries.vector("region.lo", 4), entries.vector("region.hi", 4)
        try:
            region = Box(lo, hi)
        except ValueError as exc:
            raise ScenarioError(str(exc), entries.raw["region.lo"][1], "region.lo") from None
        if not (gf.box.contains(lo) and gf.box.contains(hi)):
            raise ScenarioError("region leaves the metric family's validity box",
                                entries.raw["region.lo"][1], "region.lo")
    else:
        region = gf.box
    base_seed = entries.int("verify.seed", 0) if seed is None else int(seed)
    points = _grid(entries, region, base_seed, 10 * h, seed)
    for i, p in enumerate(points):
        if not region.contains(p, 4 * h):
            raise ScenarioError(f"grid point {i} {p.tolist()} too close to the region boundary",
                                key="grid")
    tol = dict(DEFAULT_TOLERANCES)
    for name, (value, line) in entries.namespace("tolerances").items():
        if name not in tol:
            raise ScenarioError(f"unknown tolerance; known: {', '.join(tol)}", line,
                                f"tolerances.{name}")
        v = entries.float(f"tolerances.{name}")
        if v <= 0:
            raise ScenarioError("tolerance must be positive", line, f"tolerances.{name}")
        tol[name] = v
    sc = Scenario(
        metric=gf, potential=pf, region=region, points=points, h=h, tolerances=tol,
        triples=entries.int("verify.triples", 20), seed=base_seed,
        sources=_sources(entries, base_dir),
        geodesic_x=entries.vector("geodesic.x", 4) if entries.has("geodesic.x") else None,
        geodesic_u=entries.vector("geodesic.u", 4) if entries.has("geodesic.u") else None,
        geodesic_normalize=entries.bool("geodesic.normalize", False),
    )
    if sc.sources and len(sc.sources) not in (1, len(points)):
        raise ScenarioError(f"source table has {len(sc.sources)} rows for {len(points)} points",
                            key="sources.table")
    unused = entries.unused()
    if unused:
        raise ScenarioError(f"unknown keys: {', '.join(unused)}")
    return sc


def load_file(path, seed: Optional[int] = None) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from None
    return load(text, path.parent, seed)
