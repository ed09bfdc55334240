"""Negative spectra, zero-energy resonances and low-lying eigenvalue asymptotics
for one-dimensional Schroedinger operators with piecewise-constant potentials."""

from .asymptotics import (
    DeltaPrediction,
    LowLyingPrediction,
    ResonantPrediction,
    delta_prediction,
    existence_verdict,
    low_lying_prediction,
    resonant_finite_prediction,
)
from .errors import ConvergenceError, PreconditionError
from .harness import (
    CountReport,
    SweepConfig,
    SweepRow,
    assemble_scaled,
    fit_order,
    sweep,
    verify_bound,
    verify_counting,
)
from .point_models import (
    InterfaceParams,
    ThresholdResult,
    check_resonant_condition,
    closed_form,
    interface_spectrum,
    threshold_alpha0,
)
from .potential import (
    Potential,
    PotentialSpec,
    builtin,
    constant,
    make_piecewise,
    moment,
    scale,
    square_barrier,
    square_well,
    step_dipole,
    sum_potentials,
)
from .propagator import ScaledMatrix, State, piece_propagator, propagate, propagate_nodes
from .spectrum import (
    HalfBoundState,
    SpectralResult,
    count_negative,
    half_bound_state,
    mismatch,
    negative_eigenvalues,
    regge_eigenvalues,
    resonance_set,
    theta_eta,
)

__version__ = "0.1.0"
