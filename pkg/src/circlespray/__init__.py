"""Geodesic flows of right-invariant metrics on the circle diffeomorphism group."""

from .algebra import ad, ad_transpose, arnold_b, covariant_derivative_id, energy, spray_s
from .diffeo import (
    CircleDiffeo,
    adjoint_action,
    compose_diffeos,
    compose_field_with_diffeo,
    invert_diffeo,
    make_diffeo,
)
from .flows import (
    SprayState,
    Trajectory,
    conservation_report,
    euler_arnold_rhs,
    eulerian_velocity,
    flow_from_velocity,
    integrate_euler_arnold,
    integrate_spray,
    spray_rhs,
    step_rk4,
)
from .inertia import InertiaOperator, apply_inertia, apply_inverse_inertia, inner_a, make_inertia
from .spectral import (
    PeriodicField,
    derivative,
    evaluate_at,
    inner_l2,
    make_field_from_modes,
    mean,
    pointwise_product,
)

__version__ = "0.1.0"

__all__ = [
    "ad",
    "ad_transpose",
    "adjoint_action",
    "apply_inertia",
    "apply_inverse_inertia",
    "arnold_b",
    "CircleDiffeo",
    "compose_diffeos",
    "compose_field_with_diffeo",
    "conservation_report",
    "covariant_derivative_id",
    "derivative",
    "energy",
    "euler_arnold_rhs",
    "eulerian_velocity",
    "evaluate_at",
    "flow_from_velocity",
    "InertiaOperator",
    "inner_a",
    "inner_l2",
    "integrate_euler_arnold",
    "integrate_spray",
    "invert_diffeo",
    "make_diffeo",
    "make_field_from_modes",
    "make_inertia",
    "mean",
    "PeriodicField",
    "pointwise_product",
    "spray_rhs",
    "spray_s",
    "SprayState",
    "step_rk4",
    "Trajectory",
]
