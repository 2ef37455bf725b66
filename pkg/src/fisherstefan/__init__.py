"""Travelling waves, spectra and moving-boundary simulation for the Fisher-Stefan equation."""

from .errors import (
    FisherStefanError,
    NoCrossing,
    NumericalFailure,
    OutOfRange,
    SeriesDivergenceWarning,
    Undecided,
)
from .essential import (
    Region,
    apply_resolvent,
    border_curve,
    classify_lambda,
    derivative_jump,
    fredholm_border,
    greens_function,
)
from .profile import (
    ManifoldSeries,
    WaveParameters,
    WaveProfile,
    axis_crossing,
    c_from_mu,
    closed_form_u0,
    evaluate_manifold,
    manifold_series,
    mu_from_c,
    shoot_profile,
    unstable_eigenvalue,
)
from .prufer import (
    OscillationReport,
    PruferTrajectory,
    eigenvalue_scan,
    half_line_winding,
    integrate_prufer,
    kpp_line_winding_demo,
    oscillation_check,
    theta_minus_infinity,
)
from .stefan import (
    DecayReport,
    RunOutcome,
    StefanRun,
    StefanState,
    cosine_data,
    detect_outcome,
    moving_frame_compare,
    perturb_decay_experiment,
    simulate,
)
from .vanishing import Verdict, classify_vanishing, critical_length, eigenvalue, eigenfunction, spectrum

__version__ = "0.1.0"
