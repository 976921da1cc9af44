"""Flow lines, fans and light cones traced on discrete fields."""

from .cone import CONE_ANGLE, LightConeSet, area_fraction, fan, fan_angles, light_cone
from .detectors import (
    Crossing,
    all_crossings,
    brute_force_crossings,
    count_crossings,
    count_transversal_crossings,
    detect_first_crossing,
    detect_merge,
    directed_hausdorff,
    transversal_crossings,
)
from .io import read_path_csv, read_paths_csv, write_light_cone_csv, write_path_csv, write_paths_csv
from .tracer import (
    AngleSchedule,
    FlowPath,
    MergeRegistry,
    Termination,
    TerminationKind,
    default_max_length,
    default_step,
    trace_angle_varying,
    trace_flow_line,
    trace_many,
)

__all__ = [
    "CONE_ANGLE",
    "AngleSchedule",
    "Crossing",
    "FlowPath",
    "LightConeSet",
    "MergeRegistry",
    "Termination",
    "TerminationKind",
    "all_crossings",
    "area_fraction",
    "brute_force_crossings",
    "count_crossings",
    "count_transversal_crossings",
    "default_max_length",
    "default_step",
    "detect_first_crossing",
    "detect_merge",
    "directed_hausdorff",
    "fan",
    "fan_angles",
    "light_cone",
    "read_path_csv",
    "read_paths_csv",
    "trace_angle_varying",
    "trace_flow_line",
    "trace_many",
    "transversal_crossings",
    "write_light_cone_csv",
    "write_path_csv",
    "write_paths_csv",
]
