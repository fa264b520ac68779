"""Observability, exact control, and damping on rectangular tori."""

from .geometry import FourierField, SpatialField, TorusGeometry, random_state
from .spectral import (
    CutoffProfile,
    DyadicSpec,
    dyadic_pieces,
    dyadic_project,
    from_fourier,
    multiply,
    project_spectral,
    propagate,
    to_fourier,
)
from .timegrid import TimeGrid, sampling_rule
from .observability import (
    GramianReport,
    ObservationSetup,
    assemble_dense,
    eigenspace_observability,
    gramian_apply,
    mixed_norm_L4L2,
    observability_constant,
    sweep_constants,
)
from .hum import (
    ControlSolution,
    apply_R,
    apply_S,
    forward_with_source,
    synthesize_control,
)
from .damping import DecayReport, damped_evolve, damped_step
from .inequalities import (
    InghamReport,
    LatticeCircle,
    ingham_gram,
    lattice_circle,
    observability_from_ingham,
    zygmund_ratio,
    zygmund_sweep,
)
from .diagnostics import (
    DirectionHistogram,
    TimeAveragedDensity,
    direction_mass,
    flow_average_defect,
    time_averaged_density,
)
from .weights import WeightSpec, build_weight
from .tcf import load_field, save_field

__version__ = "0.1.0"

__all__ = [
    "ControlSolution",
    "CutoffProfile",
    "DecayReport",
    "DirectionHistogram",
    "DyadicSpec",
    "FourierField",
    "GramianReport",
    "InghamReport",
    "LatticeCircle",
    "ObservationSetup",
    "SpatialField",
    "TimeAveragedDensity",
    "TimeGrid",
    "TorusGeometry",
    "WeightSpec",
    "apply_R",
    "apply_S",
    "assemble_dense",
    "build_weight",
    "damped_evolve",
    "damped_step",
    "direction_mass",
    "dyadic_pieces",
    "dyadic_project",
    "eigenspace_observability",
    "flow_average_defect",
    "forward_with_source",
    "from_fourier",
    "gramian_apply",
    "ingham_gram",
    "lattice_circle",
    "load_field",
    "mixed_norm_L4L2",
    "multiply",
    "observability_constant",
    "observability_from_ingham",
    "project_spectral",
    "propagate",
    "random_state",
    "sampling_rule",
    "save_field",
    "sweep_constants",
    "synthesize_control",
    "time_averaged_density",
    "to_fourier",
    "zygmund_ratio",
    "zygmund_sweep",
]
