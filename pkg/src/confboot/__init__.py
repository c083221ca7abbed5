"""Conservative Bayesian confidence in future mishap-free operation.

Worst-case posterior reliability from mishap-free history, extension
coefficients, and calendar-time confidence horizons for growing fleets.
"""

from .errors import (
    ConfbootError,
    DegenerateEvidenceError,
    ImpossibleEvidenceError,
    InsufficientConditioningError,
    ScheduleFormatError,
    ValidationError,
)
from .horizon import (
    Anticipation,
    HorizonResult,
    ScenarioTrace,
    horizon_closed_form_double_rate,
    horizon_time,
    k_linear,
    scenario_trace,
)
from .inference import (
    UNBOUNDED,
    PfdBounded,
    PfdPrior,
    PfdZero,
    WorstCaseResult,
    check_negligibility,
    extension_coefficient,
    posterior_reliability,
    survival_probability,
    worst_case_posterior,
    worst_case_posterior_bounded,
    worst_case_posterior_pfd_zero,
    worst_case_prior,
)
from .oracles import (
    SimulationConfig,
    atom_grid_worst_case,
    monte_carlo_conditional_survival,
    two_atom_sufficiency,
)
from .schedule import DeploymentSchedule, Segment, load_schedule

__version__ = "0.1.0"
