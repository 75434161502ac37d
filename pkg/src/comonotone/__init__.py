"""Solve ``0 in A(x)`` for maximally comonotone ``A`` with inertial schemes."""

from .algorithms import (
    AlgoParams,
    IterateLog,
    IterState,
    StoppingRule,
    initial_state,
    run,
    step_hppa,
    step_ins,
    step_ohm,
    step_ipa,
    validate_params,
)
from .diagnostics import (
    continuous_energy,
    discrete_energy,
    fit_rate,
    rate_slope,
    summability_report,
)
from .dynamics import IntegratorConfig, Trajectory, integrate_damped, integrate_ds
from .operators import (
    CountingOperator,
    DenseLinearOperator,
    check_averaged,
    check_cocoercivity,
    check_graph_identity,
    comonotone_modulus,
    property_suite,
    resolvent,
    yosida,
)
from .problems import (
    ProblemInstance,
    example1,
    example2,
    load_problem,
    random_cohypomonotone,
    random_spd,
)

__version__ = "0.1.0"
