"""Reference solutions used for verification only."""

from .exact_riemann import ExactRiemannSolution, exact_profile, exact_riemann, pressure_function, sample_exact

__all__ = ["ExactRiemannSolution", "exact_profile", "exact_riemann", "pressure_function", "sample_exact"]
