"""Scenario orchestration: config parsing, weight construction, reports.

Subcommands: ``run`` (execute scenarios from a TOML config), ``sweep``
(K(lambda_max) curve), ``explain`` (print defaults), ``verify`` (re-run the
acceptance suite).  Exit codes: 0 ok, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import math
import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import __version__, tcf
from .damping import DECAY_HEADER, damped_evolve
from .diagnostics import direction_mass, flow_average_defect, time_averaged_density
from .errors import ConfigError, TorusError
from .geometry import SpatialField, TorusGeometry, random_state
from .hum import controlled_trajectory_norms, synthesize_control
from .inequalities import (
    INGHAM_HEADER,
    ZYGMUND_BOUND,
    ZYGMUND_HEADER,
    distinct_eigenvalues,
    ingham_chart,
    observability_from_ingham,
    zygmund_sweep,
)
from .observability import (
    SWEEP_HEADER,
    ObservationSetup,
    observability_constant,
    sweep_constants,
    sweep_rows,
)
from .reporting import write_csv, write_json
from .spectral import from_fourier
from .weights import WEIGHT_DEFAULTS, WeightSpec, weight_report

TWO_PI = 2.0 * math.pi

KINDS = ("observability", "control", "damp", "zygmund", "ingham", "density", "directions")

GEOMETRY_DEFAULTS = {"dim": 2, "periods": [TWO_PI, TWO_PI], "grid": [64, 64]}

PARAM_DEFAULTS = {
    "observability": {
        "horizon": 1.0,
        "lambda_max": 16.0,
        "nt": 0,  # 0 -> sampling rule
        "rule": "midpoint",
        "tol": 1e-8,
        "max_outer": 80,
        "lambda_values": [],  # used by the sweep subcommand
    },
    "control": {
        "horizon": 1.0,
        "lambda_max": 16.0,
        "nt": 0,
        "tol": 1e-8,
        "control_form": "plain",
        "state_lambda_max": 0.0,  # 0 -> lambda_max
        "snapshots": 4,
        "fine_factor": 4,
    },
    "damp": {
        "t_max": 4.0,
        "dt": 0.02,
        "state_lambda_max": 32.0,
        "fit_fraction": 0.2,
    },
    "zygmund": {"lambda_limit": 500, "min_circle": 8, "trials": 20},
    "ingham": {
        "lambda_cutoff": 100.0,
        "t_min": 1.0,
        "t_max": 8.0,
        "t_count": 29,
        "bound_horizon": 7.0,
        "bound_lambda_cutoff": 25.0,
    },
    "density": {"tau": 1.0, "nt": 0, "state_lambda_max": 32.0},
    "directions": {
        "m_max": 8,
        "state_lambda_max": 48.0,
        "defect_tau": 4.0,
        "defect_directions": [[0, 1], [1, 0], [1, 1]],
    },
}


@dataclass(frozen=True)
class Scenario:
    """One fully-specified run of a primary module."""

    kind: str
    seed: int
    geometry: dict = field(default_factory=lambda: copy.deepcopy(GEOMETRY_DEFAULTS))
    weight: dict = field(default_factory=lambda: {"kind": "uniform"})
    params: dict = field(default_factory=dict)
    name: str = ""
    out: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}; choose from {KINDS}")
        if not isinstance(self.seed, int):
            raise ConfigError("seed is mandatory and must be an integer")
        merged = copy.deepcopy(PARAM_DEFAULTS[self.kind])
        for key, value in self.params.items():
            if key not in merged:
                raise ConfigError(
                    f"unknown parameter {key!r} for kind {self.kind!r}; "
                    f"known: {sorted(merged)}"
                )
            merged[key] = value
        object.__setattr__(self, "params", merged)
        geo = dict(GEOMETRY_DEFAULTS)
        for key, value in self.geometry.items():
            if key not in geo:
                raise ConfigError(f"unknown geometry key {key!r}")
            geo[key] = value
        object.__setattr__(self, "geometry", geo)
        if not self.name:
            object.__setattr__(self, "name", f"{self.kind}-seed{self.seed}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "geometry": dict(self.geometry),
            "weight": dict(self.weight),
            "params": dict(self.params),
            "name": self.name,
            "out": self.out,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        data = dict(data)
        unknown = set(data) - {"kind", "seed", "geometry", "weight", "params", "name", "out"}
        if unknown:
            raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
        if "kind" not in data:
            raise ConfigError("scenario needs a 'kind'")
        if "seed" not in data:
            raise ConfigError("scenario needs a 'seed' (randomized runs must be seeded)")
        return cls(
            kind=data["kind"],
            seed=data["seed"],
            geometry=dict(data.get("geometry", {})),
            weight=dict(data.get("weight", {"kind": "uniform"})),
            params=dict(data.get("params", {})),
            name=str(data.get("name", "")),
            out=str(data.get("out", "")),
        )

    def build_geometry(self) -> TorusGeometry:
        g = self.geometry
        try:
            return TorusGeometry(
                dim=int(g["dim"]),
                periods=(float(g["periods"][0]), float(g["periods"][1 % len(g["periods"])])),
                grid=(int(g["grid"][0]), int(g["grid"][1 % len(g["grid"])])),
            )
        except (TorusError, ValueError, IndexError, TypeError) as exc:
            raise ConfigError(f"bad geometry section: {exc}") from exc


def _parse_override_value(text: str):
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def apply_override(data: dict, dotted: str):
    """Apply one ``path.to.key=value`` override to a scenario dict."""
    if "=" not in dotted:
        raise ConfigError(f"override {dotted!r} is not of the form key=value")
    path, raw = dotted.split("=", 1)
    keys = [k for k in path.strip().split(".") if k]
    if not keys:
        raise ConfigError(f"override {dotted!r} has an empty key path")
    node = data
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override path {path!r} crosses a non-table value")
    node[keys[-1]] = _parse_override_value(raw.strip())


def load_scenarios(config_path, overrides=(), seed=None) -> list[Scenario]:
    """Parse a TOML config into scenarios, applying CLI overrides."""
    if config_path is None:
        raw_list = [{"kind": "observability", "seed": 1}]
    else:
        try:
            text = Path(config_path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        try:
            doc = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{config_path}: {exc}") from exc
        block = doc.get("scenario")
        if block is None:
            raise ConfigError(f"{config_path}: missing [scenario] table")
        raw_list = block if isinstance(block, list) else [block]
    scenarios = []
    for raw in raw_list:
        raw = copy.deepcopy(raw)
        for override in overrides:
            apply_override(raw, override)
        if seed is not None:
            raw["seed"] = seed
        scenarios.append(Scenario.from_dict(raw))
    return scenarios


# -- scenario execution -----------------------------------------------------


def _report_paths(outputs: dict) -> dict:
    return {key: str(path) for key, path in outputs.items()}


def _int_or_none(value) -> int | None:
    value = int(value)
    return None if value == 0 else value


def _run_observability(scenario: Scenario, geo, weight, out_dir: Path) -> dict:
    p = scenario.params
    setup = ObservationSetup(
        weight=weight,
        horizon=float(p["horizon"]),
        lambda_max=float(p["lambda_max"]),
        nt=_int_or_none(p["nt"]),
        rule=str(p["rule"]),
    )
    report = observability_constant(
        setup, tol=float(p["tol"]), seed=scenario.seed, max_outer=int(p["max_outer"])
    )
    payload = report.to_dict()
    payload["scenario"] = scenario.to_dict()
    write_json(out_dir / "gramian.json", payload)
    return {"observability_constant": report.observability_constant, "lambda_min": report.lambda_min}


def _run_sweep(scenario: Scenario, geo, weight, out_dir: Path) -> dict:
    p = scenario.params
    lams = [float(v) for v in p["lambda_values"]] or [2.0, 4.0, 8.0, 16.0, 32.0]
    reports = sweep_constants(
        weight,
        float(p["horizon"]),
        lams,
        tol=float(p["tol"]),
        seed=scenario.seed,
        rule=str(p["rule"]),
    )
    write_csv(out_dir / "ksweep.csv", SWEEP_HEADER, sweep_rows(reports))
    payload = {
        "scenario": scenario.to_dict(),
        "reports": [r.to_dict() for r in reports],
    }
    write_json(out_dir / "sweep.json", payload)
    ks = [r.observability_constant for r in reports]
    return {"k_values": ks}


def _run_control(scenario: Scenario, geo, weight, out_dir: Path) -> dict:
    p = scenario.params
    state_band = float(p["state_lambda_max"]) or float(p["lambda_max"])
    rng = np.random.default_rng(scenario.seed)
    u0 = random_state(geo, rng, lambda_max=state_band)
    solution = synthesize_control(
        u0,
        weight,
        horizon=float(p["horizon"]),
        lambda_max=float(p["lambda_max"]),
        tol=float(p["tol"]),
        nt=_int_or_none(p["nt"]),
        control_form=str(p["control_form"]),
        fine_factor=int(p["fine_factor"]),
    )
    tcf.save_field(from_fourier(solution.v0), out_dir / "v0.tcf1")
    snapshots = max(0, int(p["snapshots"]))
    if snapshots:
        stride = max(1, solution.tgrid.count // snapshots)
        for j in range(0, solution.tgrid.count, stride):
            tcf.save_field(solution.control[j], out_dir / f"f_{j:04d}.tcf1")
    avals = weight.values.real
    if solution.control_form == "plain":
        sources = [SpatialField(geo, avals * f.values) for f in solution.control]
    else:
        sources = [SpatialField(geo, avals * avals * f.values) for f in solution.control]
    u_norms = controlled_trajectory_norms(u0, sources, solution.tgrid)
    f_norms = [f.norm() for f in solution.control]
    rows = list(zip(solution.tgrid.nodes, u_norms, f_norms))
    write_csv(out_dir / "control.csv", ("t", "u_norm", "f_norm"), rows)
    payload = solution.describe()
    payload["scenario"] = scenario.to_dict()
    write_json(out_dir / "control.json", payload)
    return {
        "forward_residual_subspace": solution.forward_residual_subspace,
        "fine_residual_subspace": solution.fine.residual_subspace,
    }


def _run_damp(scenario: Scenario, geo, weight, out_dir: Path) -> dict:
    p = scenario.params
    rng = np.random.default_rng(scenario.seed)
    u0 = from_fourier(random_state(geo, rng, lambda_max=float(p["state_lambda_max"])))
    report = damped_evolve(
        u0,
        weight,
        t_max=float(p["t_max"]),
        dt=float(p["dt"]),
        fit_fraction=float(p["fit_fraction"]),
        damping_info={"weight": scenario.weight},
    )
    write_csv(out_dir / "decay.csv", DECAY_HEADER, report.rows())
    payload = report.describe()
    payload["scenario"] = scenario.to_dict()
    write_json(out_dir / "decay.json", payload)
    return {"rate": report.rate, "r_squared": report.r_squared}


def _run_zygmund(scenario: Scenario, geo, weight, out_dir: Path) -> dict:
    p = scenario.params
    rows = zygmund_sweep(
        int(p["lambda_limit"]),
        min_circle=int(p["min_circle"]),
        trials=int(p["trials"]),
        seed=scenario.seed,
    )
    write_csv(out_dir / "zygmund.csv", ZYGMUND_HEADER, rows)
    max_ratio = max((r[2] for r in rows), default=0.0)
    payload = {
        "scenario": scenario.to_dict(),
        "bound": ZYGMUND_BOUND,
        "max_ratio": max_ratio,
        "circles": len(rows),
        "within_bound": bool(max_ratio <= ZYGMUND_BOUND),
    }
    write_json(out_dir / "zygmund.json", payload)
    return {"max_ratio": max_ratio}


def _run_ingham(scenario: Scenario, geo, weight, out_dir: Path) -> dict:
    p = scenario.params
    freqs = distinct_eigenvalues(geo, float(p["lambda_cutoff"]))
    horizons = np.linspace(float(p["t_min"]), float(p["t_max"]), int(p["t_count"]))
    rows = ingham_chart(freqs, horizons)
    write_csv(out_dir / "ingham.csv", INGHAM_HEADER, rows)
    payload = {
        "scenario": scenario.to_dict(),
        "frequency_count": len(freqs),
        "lambda_cutoff": float(p["lambda_cutoff"]),
        "b_at_t_max": rows[-1][1],
    }
    bound_t = float(p["bound_horizon"])
    if bound_t > 0:
        bound = observability_from_ingham(weight, bound_t, float(p["bound_lambda_cutoff"]))
        payload["observability_bound"] = {
            "horizon": bound_t,
            "lambda_cutoff": float(p["bound_lambda_cutoff"]),
            "reciprocal_constant_lower_bound": bound,
        }
    write_json(out_dir / "ingham.json", payload)
    return {"b_at_t_max": rows[-1][1]}


def _run_density(scenario: Scenario, geo, weight, out_dir: Path) -> dict:
    p = scenario.params
    rng = np.random.default_rng(scenario.seed)
    u0 = random_state(geo, rng, lambda_max=float(p["state_lambda_max"]))
    density = time_averaged_density(
        u0, float(p["tau"]), nt=_int_or_none(p["nt"])
    )
    tcf.save_field(density.as_field(), out_dir / "density.tcf1")
    x, y = geo.meshgrid()
    rows = list(zip(x.ravel(), y.ravel(), density.values.ravel()))
    write_csv(out_dir / "density.csv", ("x", "y", "density"), rows)
    payload = density.describe()
    payload["scenario"] = scenario.to_dict()
    payload["mass_identity_residual"] = abs(
        density.mass() - float(p["tau"]) * u0.norm() ** 2
    )
    write_json(out_dir / "density.json", payload)
    return {"mass": density.mass()}


def _run_directions(scenario: Scenario, geo, weight, out_dir: Path) -> dict:
    p = scenario.params
    rng = np.random.default_rng(scenario.seed)
    u0 = random_state(geo, rng, lambda_max=float(p["state_lambda_max"]))
    hist = direction_mass(u0, m_max=int(p["m_max"]))
    write_csv(out_dir / "directions.csv", ("p", "q", "mass"), hist.rows())
    write_csv(out_dir / "direction_tails.csv", ("m", "tail_mass"), hist.tail_rows())
    defects = {}
    for direction in p["defect_directions"]:
        dp, dq = int(direction[0]), int(direction[1])
        defects[f"({dp},{dq})"] = flow_average_defect(
            u0, float(p["defect_tau"]), (dp, dq)
        )
    payload = hist.describe()
    payload["scenario"] = scenario.to_dict()
    payload["flow_average_defects"] = defects
    write_json(out_dir / "directions.json", payload)
    return {"zero_mode": hist.zero_mode}


_RUNNERS = {
    "observability": _run_observability,
    "control": _run_control,
    "damp": _run_damp,
    "zygmund": _run_zygmund,
    "ingham": _run_ingham,
    "density": _run_density,
    "directions": _run_directions,
}


def run_scenario(scenario: Scenario, out_root, sweep: bool = False) -> Path:
    """Execute one scenario; returns its output directory."""
    out_dir = Path(scenario.out) if scenario.out else Path(out_root) / scenario.name
    out_dir.mkdir(parents=True, exist_ok=True)
    geo = scenario.build_geometry()
    weight, weight_info = weight_report(WeightSpec.from_dict(dict(scenario.weight)), geo)
    tcf.save_field(weight, out_dir / "weight.tcf1")
    started = time.time()
    runner = _run_sweep if sweep else _RUNNERS[scenario.kind]
    summary = runner(scenario, geo, weight, out_dir)
    manifest = {
        "package": "torusctl",
        "version": __version__,
        "scenario": scenario.to_dict(),
        "weight_info": weight_info,
        "summary": summary,
        "outputs": sorted(
            p.name for p in out_dir.iterdir() if p.name != "manifest.json"
        ),
        "created_at": started,  # excluded from determinism comparisons
    }
    write_json(out_dir / "manifest.json", manifest)
    return out_dir


def _cmd_run(args, sweep=False) -> int:
    import dataclasses

    scenarios = load_scenarios(args.config, overrides=args.override, seed=args.seed)
    if sweep:
        for scenario in scenarios:
            if scenario.kind != "observability":
                raise ConfigError("the sweep subcommand needs kind = 'observability'")
    out_root = Path(args.out or "out")
    if len(scenarios) == 1:
        # --out names the single run's directory directly
        scenario = scenarios[0]
        if args.out:
            scenario = dataclasses.replace(scenario, out=str(out_root))
        run_scenario(scenario, out_root, sweep=sweep)
        return 0
    # several scenarios: --out is the root, one subdirectory per scenario name
    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        futures = [pool.submit(run_scenario, s, out_root, sweep) for s in scenarios]
        for future in futures:
            future.result()
    return 0


def _cmd_explain(args) -> int:
    print(f"torusctl {__version__} scenario defaults\n")
    print(f"kinds: {', '.join(KINDS)}\n")
    print("geometry defaults:", GEOMETRY_DEFAULTS)
    print("\nweight kinds and defaults:")
    for kind, defaults in WEIGHT_DEFAULTS.items():
        print(f"  {kind}: {defaults}")
    print("\nper-kind parameters (params table):")
    for kind, defaults in PARAM_DEFAULTS.items():
        print(f"  [{kind}]")
        for key, value in defaults.items():
            print(f"    {key} = {value!r}")
    print("\nnotes:")
    print("  nt = 0 means the sampling rule ceil(4 T lambda_max / 2pi) is used")
    print("  seed is mandatory; fixed seeds give byte-identical outputs")
    print("  exit codes: 0 ok, 2 config error, 3 numerical failure")
    return 0


def _cmd_verify(args) -> int:
    tests = Path(args.tests)
    if not tests.exists():
        raise ConfigError(f"acceptance tests not found at {tests}")
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", str(tests), "-v", "-s"], check=False
    )
    return 0 if proc.returncode == 0 else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusctl",
        description="observability, control, and damping experiments on tori",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="TOML scenario file")
        p.add_argument("--seed", type=int, default=None, help="override the seed")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--threads", type=int, default=1, help="scenario worker pool size")
        p.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="dotted-key config override (repeatable)",
        )

    add_common(sub.add_parser("run", help="run scenarios from a config"))
    add_common(sub.add_parser("sweep", help="K(lambda_max) sweep for an observability scenario"))
    sub.add_parser("explain", help="print all scenario defaults")
    verify = sub.add_parser("verify", help="re-run the acceptance suite")
    verify.add_argument(
        "--tests", default="tests/test_acceptance.py", help="path to the acceptance tests"
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_run(args, sweep=True)
        if args.command == "explain":
            return _cmd_explain(args)
        if args.command == "verify":
            return _cmd_verify(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TorusError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
