"""Harmonic boundary profile of the coupling and checks of its martingale structure."""

from .observables import CouplingObservable, ObservableTrajectory, evaluate_h_batch, evaluate_h_t
from .profile import HarmonicProfile, harmonic_profile_value, harmonic_step_extension, poisson_extension
from .verifiers import (
    MIN_DECREMENT,
    VARIANCE_BAND,
    ChunkSamples,
    decrement_samples,
    fitted_coefficient,
    martingale_samples,
    martingale_test,
    stop_at_decrement,
    variance_vs_logCR_test,
)

__all__ = [
    "MIN_DECREMENT",
    "VARIANCE_BAND",
    "ChunkSamples",
    "CouplingObservable",
    "HarmonicProfile",
    "ObservableTrajectory",
    "decrement_samples",
    "evaluate_h_batch",
    "evaluate_h_t",
    "fitted_coefficient",
    "harmonic_profile_value",
    "harmonic_step_extension",
    "martingale_samples",
    "martingale_test",
    "poisson_extension",
    "stop_at_decrement",
    "variance_vs_logCR_test",
]
