"""
Lie-algebra operators on C∞(S¹) for a right-invariant metric.

Conventions
-----------
``ad_u v = u_x v - v_x u`` and ``<u, v>_A = ∫ u · A v dx``.  The Arnold
operator is characterised by

    <B(u, v), w>_A = <u, ad_v w>_A      for all w,

which integrates by parts to ``B(u, v) = A^{-1}{ v (A u)_x + 2 (A u) v_x }``.
Its transpose form is ``ad^T_u v = B(v, u) = A^{-1}{ u (A v)_x + 2 (A v) u_x }``,
so that ``<ad^T_u v, w>_A = <v, ad_u w>_A``.  Both agree on the diagonal,
where ``u_t = -B(u, u)`` is the Euler-Arnold equation.
"""

from __future__ import annotations

from .inertia import InertiaOperator, apply_inertia, apply_inverse_inertia, inner_a
from .spectral import PeriodicField, derivative, pointwise_product


def ad(u: PeriodicField, v: PeriodicField) -> PeriodicField:
    """``ad_u v = u_x v - v_x u`` (minus the vector-field bracket)."""
    return pointwise_product(derivative(u), v) - pointwise_product(derivative(v), u)


def arnold_b(A: InertiaOperator, u: PeriodicField, v: PeriodicField) -> PeriodicField:
    """Arnold operator ``B(u, v) = A^{-1}{ v (Au)_x + 2 (Au) v_x }``."""
    u._same_grid(v)
    m = apply_inertia(A, u)
    rhs = pointwise_product(v, derivative(m)) + 2.0 * pointwise_product(m, derivative(v))
    return apply_inverse_inertia(A, rhs)


def ad_transpose(A: InertiaOperator, u: PeriodicField, v: PeriodicField) -> PeriodicField:
    """``ad^T_u v``, the ``<.,.>_A``-transpose of ``ad_u`` applied to ``v``."""
    return arnold_b(A, v, u)


def spray_s(A: InertiaOperator, u: PeriodicField) -> PeriodicField:
    """Lagrangian spray nonlinearity at the identity.

    Evaluates ``A^{-1}{ [A, u] Du + u [A, D] u - 2 (Au) Du }`` term by term,
    with ``[A, u] w = A(u w) - u A w``.  It reduces to ``u u_x - B(u, u)``;
    that identity is kept as an independent check and not used here.
    """
    du = derivative(u)
    au = apply_inertia(A, u)
    a_du = apply_inertia(A, du)
    commutator_au = apply_inertia(A, pointwise_product(u, du)) - pointwise_product(u, a_du)
    commutator_ad = pointwise_product(u, a_du - derivative(au))
    total = commutator_au + commutator_ad - 2.0 * pointwise_product(au, du)
    return apply_inverse_inertia(A, total)


def covariant_derivative_id(
    A: InertiaOperator, u: PeriodicField, v: PeriodicField
) -> PeriodicField:
    """Levi-Civita ``∇_u v`` for the right-invariant fields generated by ``u`` and ``v``."""
    return 0.5 * (-ad(u, v) + ad_transpose(A, u, v) + ad_transpose(A, v, u))


def energy(A: InertiaOperator, u: PeriodicField) -> float:
    return 0.5 * inner_a(A, u, u)
