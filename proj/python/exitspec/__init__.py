"""Exit-moment spectra of metric balls in warped-product model spaces."""

try:
    from ._exitspec import (
        DomainError,
        HypothesisError,
        NumericError,
        RadialProfileSet,
        UsageError,
        ValidationError,
        compare_intrinsic,
        compare_space,
        mesh_verify,
        moment_spectrum,
        run_suite,
        simulate,
        solve_hierarchy,
    )
except ImportError:  # build-tree layout: extension dir sits on sys.path
    from _exitspec import (
        DomainError,
        HypothesisError,
        NumericError,
        RadialProfileSet,
        UsageError,
        ValidationError,
        compare_intrinsic,
        compare_space,
        mesh_verify,
        moment_spectrum,
        run_suite,
        simulate,
        solve_hierarchy,
    )

__all__ = [
    "DomainError",
    "HypothesisError",
    "NumericError",
    "RadialProfileSet",
    "UsageError",
    "ValidationError",
    "compare_intrinsic",
    "compare_space",
    "mesh_verify",
    "moment_spectrum",
    "run_suite",
    "simulate",
    "solve_hierarchy",
]

__version__ = "0.1.0"
