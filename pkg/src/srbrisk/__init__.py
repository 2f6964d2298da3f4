"""Schedule risk baselines for choosing among equal-duration project schedules."""
from .errors import (
    InfeasibleScheduleError,
    ParseError,
    ScheduleError,
    SRBError,
    UnschedulableError,
    UnsupportedFormatError,
    ValidationError,
)
from .instance_io import (
    Activity,
    MultiProjectProblem,
    ProjectInstance,
    Schedule,
    load_instance,
    load_multiproject,
    load_schedule,
    make_instance,
    parse_instance,
    parse_multiproject,
    parse_schedule,
    schedule_from_starts,
    write_instance,
    write_multiproject,
    write_schedule,
)
from .schedule_core import (
    FeasibilityReport,
    MultiProjectMetrics,
    build_network,
    cpm_makespan,
    makespan,
    multiproject_metrics,
    resource_profile,
    validate,
)
from .sgs import PriorityRule, generate_candidates, same_makespan_candidates, serial_sgs
from .srb import (
    ControlGrid,
    RiskReport,
    SRBCurve,
    conditional_spec,
    rank_schedules,
    simulate_duration,
    srb_curve,
    srv,
    srv_standard_error,
)
from .uncertainty import DurationModel, DurationSpec, assign_cvs, build_model, lognormal_params, sample_duration
from .data import fixture_path

__version__ = "0.1.0"
