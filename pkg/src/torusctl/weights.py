"""Observation-weight and damping-coefficient constructors.

All constructors produce real nonnegative fields with positive L4 norm, so
the results are usable both as observation weights W and as damping
coefficients a.  Rough examples: the fat-Cantor indicator (positive measure,
no interior at grid resolution when the depth matches the grid) and the
capped power singularity (L4 but not L-infinity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import tcf
from .errors import ConfigError, GeometryMismatchError
from .geometry import SpatialField, TorusGeometry


@dataclass(frozen=True)
class WeightSpec:
    """Constructor tag plus parameters; see ``WEIGHT_DEFAULTS`` for kinds."""

    kind: str
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, data: dict) -> "WeightSpec":
        if "kind" not in data:
            raise ConfigError("weight spec needs a 'kind'")
        params = {k: v for k, v in data.items() if k != "kind"}
        params.update(params.pop("params", {}) if isinstance(params.get("params"), dict) else {})
        return cls(kind=str(data["kind"]), params=params)


WEIGHT_DEFAULTS = {
    "uniform": {"value": 1.0},
    "strip": {"x0": 0.0, "x1": None},  # None -> A/2
    "disk": {"cx": None, "cy": None, "r": None},  # None -> centered, A/4
    "checkerboard": {"blocks": 4},
    "fat_cantor": {"depth": 4, "ratio": 0.5},
    "power_singularity": {"x0": None, "y0": None, "beta": 0.4},
    "file": {"path": ""},
}


def fat_cantor_intervals(depth: int, ratio: float) -> list[tuple[float, float]]:
    """Closed kept intervals in [0, 1] after removing middle open fractions.

    Step k removes the middle fraction ratio**k from each current interval,
    so the kept length is the product of (1 - ratio**k), positive for all
    depths.
    """
    if not 0.0 < ratio < 1.0:
        raise ConfigError(f"fat_cantor ratio must lie in (0, 1), got {ratio}")
    if depth < 1:
        raise ConfigError(f"fat_cantor depth must be >= 1, got {depth}")
    intervals = [(0.0, 1.0)]
    for k in range(1, depth + 1):
        frac = ratio**k
        nxt = []
        for a, b in intervals:
            length = b - a
            keep = 0.5 * (1.0 - frac) * length
            nxt.append((a, a + keep))
            nxt.append((b - keep, b))
        intervals = nxt
    return intervals


def fat_cantor_measure(depth: int, ratio: float) -> float:
    """Closed-form kept length: prod_{k<=depth} (1 - ratio**k)."""
    out = 1.0
    for k in range(1, depth + 1):
        out *= 1.0 - ratio**k
    return out


def _fat_cantor_indicator(points: np.ndarray, period: float, depth: int, ratio: float):
    scaled = points / period
    flags = np.zeros(points.shape, dtype=bool)
    for a, b in fat_cantor_intervals(depth, ratio):
        flags |= (scaled >= a) & (scaled < b)
    return flags


def _torus_distance(x: np.ndarray, x0: float, period: float) -> np.ndarray:
    d = np.abs(x - x0)
    return np.minimum(d, period - d)


def _build_values(spec: WeightSpec, geometry: TorusGeometry):
    """Grid values plus a constructor-info dict (cap values etc.)."""
    a, b = geometry.periods
    x, y = geometry.meshgrid()
    kind = spec.kind
    p = dict(spec.params)
    info: dict = {"kind": kind}

    if kind == "uniform":
        value = float(p.get("value", 1.0))
        if value <= 0:
            raise ConfigError(f"uniform weight value must be positive, got {value}")
        return np.full((geometry.nx, geometry.ny), value), info

    if kind == "strip":
        x0 = float(p.get("x0", 0.0))
        x1 = float(p.get("x1") if p.get("x1") is not None else a / 2)
        if not 0.0 <= x0 < x1 <= a:
            raise ConfigError(f"strip needs 0 <= x0 < x1 <= A, got [{x0}, {x1}]")
        vals = ((x >= x0) & (x < x1)).astype(float)
        info["measure_fraction"] = float(vals.mean())
        return vals, info

    if kind == "disk":
        cx = float(p.get("cx") if p.get("cx") is not None else a / 2)
        cy = float(p.get("cy") if p.get("cy") is not None else b / 2)
        r = float(p.get("r") if p.get("r") is not None else a / 4)
        if r <= 0:
            raise ConfigError(f"disk radius must be positive, got {r}")
        dist2 = _torus_distance(x, cx, a) ** 2 + _torus_distance(y, cy, b) ** 2
        vals = (dist2 <= r * r).astype(float)
        info["measure_fraction"] = float(vals.mean())
        return vals, info

    if kind == "checkerboard":
        blocks = int(p.get("blocks", 4))
        if blocks < 1:
            raise ConfigError(f"checkerboard needs >= 1 block, got {blocks}")
        ix = np.floor(blocks * x / a).astype(int)
        iy = np.floor(blocks * y / b).astype(int)
        vals = (((ix + iy) % 2) == 0).astype(float)
        info["measure_fraction"] = float(vals.mean())
        return vals, info

    if kind == "fat_cantor":
        depth = int(p.get("depth", 4))
        ratio = float(p.get("ratio", 0.5))
        fx = _fat_cantor_indicator(x[:, 0], a, depth, ratio)
        vals_x = fx[:, None]
        if geometry.dim == 2:
            fy = _fat_cantor_indicator(y[0, :], b, depth, ratio)
            vals = (vals_x & fy[None, :]).astype(float)
        else:
            vals = vals_x.astype(float)
        info["measure_fraction"] = float(vals.mean())
        info["closed_form_measure"] = fat_cantor_measure(depth, ratio) ** geometry.dim
        return vals, info

    if kind == "power_singularity":
        beta = float(p.get("beta", 0.4))
        if not 0.0 < beta < 0.5:
            raise ConfigError(f"power singularity needs 0 < beta < 1/2, got {beta}")
        x0 = float(p.get("x0") if p.get("x0") is not None else a / 2)
        y0 = float(p.get("y0") if p.get("y0") is not None else b / 2)
        dist = np.sqrt(_torus_distance(x, x0, a) ** 2 + _torus_distance(y, y0, b) ** 2)
        vals = np.zeros_like(dist)
        positive = dist > 0.0
        vals[positive] = dist[positive] ** (-beta)
        # cap the cell at the singularity by the average of its grid neighbors
        sx, sy = np.unravel_index(np.argmin(dist), dist.shape)
        neighbors = [
            vals[(sx + 1) % geometry.nx, sy],
            vals[(sx - 1) % geometry.nx, sy],
        ]
        if geometry.dim == 2:
            neighbors += [vals[sx, (sy + 1) % geometry.ny], vals[sx, (sy - 1) % geometry.ny]]
        cap = float(np.mean(neighbors))
        vals[sx, sy] = min(vals[sx, sy], cap) if dist[sx, sy] > 0 else cap
        info["cap_value"] = cap
        info["cap_cell"] = [int(sx), int(sy)]
        return vals, info

    if kind == "file":
        path = p.get("path")
        if not path:
            raise ConfigError("file weight needs a 'path'")
        loaded = tcf.load_field(path, role="weight")
        if loaded.geometry != geometry:
            raise GeometryMismatchError(
                f"weight file {path} has geometry {loaded.geometry.describe()}, "
                f"scenario wants {geometry.describe()}"
            )
        return loaded.values.real.copy(), info

    raise ConfigError(f"unknown weight kind {kind!r}")


def build_weight(spec: WeightSpec, geometry: TorusGeometry) -> SpatialField:
    """Construct the weight field for a spec on a geometry."""
    vals, _ = _build_values(spec, geometry)
    field = SpatialField(geometry, vals.astype(np.complex128), role="weight")
    if field.lp_norm(4) <= 1e-12:
        raise ConfigError(f"weight {spec.kind!r} has vanishing L4 norm")
    return field


def weight_report(spec: WeightSpec, geometry: TorusGeometry):
    """(field, info) where info records constructor details for manifests."""
    vals, info = _build_values(spec, geometry)
    field = SpatialField(geometry, vals.astype(np.complex128), role="weight")
    if field.lp_norm(4) <= 1e-12:
        raise ConfigError(f"weight {spec.kind!r} has vanishing L4 norm")
    info.update(
        {
            "l2": field.lp_norm(2),
            "l4": field.lp_norm(4),
            "linf": float(np.max(np.abs(vals))),
            "min": float(np.min(vals)),
        }
    )
    return field, info
