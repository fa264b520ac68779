"""Weight constructors: measures, roughness, validation."""

import numpy as np
import pytest

from torusctl import SpatialField, TorusGeometry, save_field
from torusctl.errors import ConfigError, GeometryMismatchError
from torusctl.weights import (
    WeightSpec,
    build_weight,
    fat_cantor_intervals,
    fat_cantor_measure,
    weight_report,
)


def test_uniform_and_strip(square_torus):
    w = build_weight(WeightSpec("uniform", {}), square_torus)
    assert np.all(w.values.real == 1.0)
    strip = build_weight(WeightSpec("strip", {"x0": 0.0, "x1": np.pi}), square_torus)
    mean_sq = float((strip.values.real**2).mean())
    assert abs(mean_sq - 0.5) < 1e-15


def test_checkerboard_measure(square_torus):
    w = build_weight(WeightSpec("checkerboard", {"blocks": 4}), square_torus)
    assert abs(float(w.values.real.mean()) - 0.5) < 1e-15


def test_disk_measure_close_to_area(square_torus):
    r = square_torus.periods[0] / 4
    w = build_weight(WeightSpec("disk", {"r": r}), square_torus)
    area_fraction = np.pi * r**2 / (square_torus.periods[0] * square_torus.periods[1])
    assert abs(float(w.values.real.mean()) - area_fraction) < 0.05 * area_fraction + 0.01


def test_fat_cantor_interval_bookkeeping():
    intervals = fat_cantor_intervals(3, 0.5)
    assert len(intervals) == 8
    total = sum(b - a for a, b in intervals)
    assert abs(total - fat_cantor_measure(3, 0.5)) < 1e-15
    assert abs(fat_cantor_measure(3, 0.5) - 0.328125) < 1e-15
    # intervals are disjoint and ordered
    flat = [v for ab in intervals for v in ab]
    assert flat == sorted(flat)


def test_fat_cantor_grid_measure_matches_closed_form():
    # dyadic ratio on a power-of-two grid: the boundaries align with cells
    geo = TorusGeometry(dim=2, periods=(1.0, 1.0), grid=(512, 512))
    field, info = weight_report(WeightSpec("fat_cantor", {"depth": 3, "ratio": 0.5}), geo)
    measured = float(field.values.real.mean())
    expected = fat_cantor_measure(3, 0.5) ** 2
    assert info["closed_form_measure"] == expected
    assert abs(measured - expected) < 1e-3
    assert expected >= 0.25**2


def test_fat_cantor_positive_measure_and_no_long_runs():
    # positive measure but no kept segment spans more than a few cells:
    # the set is structured at the finest scale the grid can resolve
    geo = TorusGeometry.square(n=64)
    field = build_weight(WeightSpec("fat_cantor", {"depth": 4, "ratio": 0.5}), geo)
    flags = field.values.real > 0
    assert flags.mean() > 0.05
    # longest admissible run: two ~3-cell intervals glued across the period
    max_run = 6
    horizontal = np.ones_like(flags)
    vertical = np.ones_like(flags)
    for shift in range(max_run + 1):
        horizontal &= np.roll(flags, shift, axis=0)
        vertical &= np.roll(flags, shift, axis=1)
    assert not horizontal.any()
    assert not vertical.any()


def test_power_singularity_l4_stable_linf_grows():
    spec = WeightSpec("power_singularity", {"beta": 0.4})
    l4s, linfs = [], []
    for n in (32, 64, 128):
        geo = TorusGeometry.square(n=n)
        field, info = weight_report(spec, geo)
        l4s.append(field.lp_norm(4))
        linfs.append(info["linf"])
        assert info["cap_value"] > 0
    assert abs(l4s[1] - l4s[0]) < 0.05 * l4s[0]
    assert abs(l4s[2] - l4s[1]) < 0.05 * l4s[1]
    assert linfs[0] < linfs[1] < linfs[2]


def test_power_singularity_cap_rule():
    geo = TorusGeometry.square(n=32)
    # singularity exactly on a grid point
    field, info = weight_report(
        WeightSpec("power_singularity", {"x0": 0.0, "y0": 0.0, "beta": 0.4}), geo
    )
    vals = field.values.real
    sx, sy = info["cap_cell"]
    assert (sx, sy) == (0, 0)
    neighbors = [vals[1, 0], vals[-1, 0], vals[0, 1], vals[0, -1]]
    assert vals[0, 0] == pytest.approx(np.mean(neighbors))
    assert np.isfinite(vals).all()


def test_invalid_parameters_rejected(square_torus):
    with pytest.raises(ConfigError):
        build_weight(WeightSpec("power_singularity", {"beta": 0.6}), square_torus)
    with pytest.raises(ConfigError):
        build_weight(WeightSpec("fat_cantor", {"depth": 3, "ratio": 1.5}), square_torus)
    with pytest.raises(ConfigError):
        build_weight(WeightSpec("strip", {"x0": 3.0, "x1": 1.0}), square_torus)
    with pytest.raises(ConfigError):
        build_weight(WeightSpec("nonsense", {}), square_torus)


def test_file_weight_round_trip(tmp_path, square_torus, rng):
    vals = np.abs(rng.standard_normal((32, 32)))
    field = SpatialField(square_torus, vals, role="weight")
    path = tmp_path / "w.tcf1"
    save_field(field, path)
    loaded = build_weight(WeightSpec("file", {"path": str(path)}), square_torus)
    assert np.array_equal(loaded.values.real, vals)
    other = TorusGeometry.square(n=16)
    with pytest.raises(GeometryMismatchError):
        build_weight(WeightSpec("file", {"path": str(path)}), other)


def test_weights_usable_as_damping(square_torus):
    for kind, params in (
        ("uniform", {}),
        ("strip", {}),
        ("disk", {}),
        ("checkerboard", {}),
        ("fat_cantor", {}),
        ("power_singularity", {}),
    ):
        w = build_weight(WeightSpec(kind, params), square_torus)
        assert np.min(w.values.real) >= 0.0
        assert w.lp_norm(4) > 1e-12
