"""
Orientation-preserving circle diffeomorphisms ``φ(x) = x + f(x)``.

The displacement ``f`` is a :class:`PeriodicField`, so rotations are exact
and the circle topology never has to be unwrapped.  Resampling ``v∘φ`` goes
through the truncated Fourier series of ``v``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .spectral import (
    GridMismatchError,
    PeriodicField,
    _series_matrix,
    derivative,
    evaluate_at,
    grid_points,
    pointwise_product,
    wavenumbers,
)

MONOTONICITY_MARGIN = 1e-8
NEWTON_MAX_ITER = 50


class MonotonicityError(ValueError):
    """``1 + f'`` dropped below the admissible margin on the grid."""

    def __init__(self, min_slope: float, where: float | None = None):
        self.min_slope = float(min_slope)
        self.where = where
        msg = f"map is not orientation preserving: min(1 + f') = {self.min_slope:.6g}"
        if where is not None:
            msg += f" at x = {where:.6g}"
        super().__init__(msg)


class InversionError(RuntimeError):
    """Newton iteration for ``φ^{-1}`` failed to converge."""


@dataclass(frozen=True, eq=False)
class CircleDiffeo:
    displacement: PeriodicField

    def __post_init__(self) -> None:
        slope = 1.0 + derivative(self.displacement).values
        j = int(np.argmin(slope))
        if not slope[j] >= MONOTONICITY_MARGIN:
            raise MonotonicityError(slope[j], float(grid_points(self.n)[j]))

    @property
    def n(self) -> int:
        return self.displacement.n

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts + evaluate_at(self.displacement, pts)

    def values(self) -> np.ndarray:
        """``φ(x_j)`` on the collocation grid (not wrapped)."""
        return self.displacement.x + self.displacement.values

    def min_slope(self) -> float:
        return float(np.min(1.0 + derivative(self.displacement).values))

    def _check(self, other) -> None:
        if other.n != self.n:
            raise GridMismatchError(f"grid sizes differ: {self.n} vs {other.n}")


def make_diffeo(f: PeriodicField) -> CircleDiffeo:
    return CircleDiffeo(f)


def identity(n: int) -> CircleDiffeo:
    return CircleDiffeo(PeriodicField.zeros(n))


def rotation(n: int, c: float) -> CircleDiffeo:
    return CircleDiffeo(PeriodicField.constant(n, c))


def compose_field_with_diffeo(v: PeriodicField, phi: CircleDiffeo) -> PeriodicField:
    """Right translation ``v∘φ`` sampled on the grid."""
    phi._check(v)
    return PeriodicField.from_values(evaluate_at(v, phi.values()))


def compose_diffeos(phi: CircleDiffeo, psi: CircleDiffeo) -> CircleDiffeo:
    """``φ∘ψ``, with displacement ``f_φ(ψ(x)) + f_ψ(x)``."""
    phi._check(psi)
    f = compose_field_with_diffeo(phi.displacement, psi) + psi.displacement
    return CircleDiffeo(f)


def invert_diffeo(phi: CircleDiffeo, tol: float = 1e-13) -> CircleDiffeo:
    """Solve ``x + f(x) = y_j`` at every collocation target by guarded Newton.

    Iterates start at ``y - f(y)`` and stay inside the bracket
    ``[y - |f|_bound, y + |f|_bound]``; a Newton step leaving the current
    bracket is replaced by bisection.
    """
    f = phi.displacement
    y = grid_points(f.n)
    k = wavenumbers(f.n)
    c = f.coeffs
    dc = 1j * k * c
    bound = float(np.abs(c[0]) + 2.0 * np.abs(c[1:-1]).sum() + np.abs(c[-1]))
    lo = y - bound - 1e-15
    hi = y + bound + 1e-15
    x = np.clip(y - f.values, lo, hi)

    for _ in range(NEWTON_MAX_ITER):
        m = _series_matrix(f.n, x)
        resid = x + (m @ c).real - y
        slope = 1.0 + (m @ dc).real
        done = np.abs(resid) <= tol
        if np.all(done):
            break
        neg = resid < 0
        lo = np.where(neg, x, lo)
        hi = np.where(neg, hi, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_new = x - resid / slope
        bad = ~np.isfinite(x_new) | (slope <= 0) | (x_new <= lo) | (x_new >= hi)
        x_new = np.where(bad, 0.5 * (lo + hi), x_new)
        x = np.where(done, x, x_new)
    else:
        m = _series_matrix(f.n, x)
        resid = x + (m @ c).real - y
        worst = float(np.max(np.abs(resid)))
        if worst > tol:
            raise InversionError(
                f"Newton inversion did not converge in {NEWTON_MAX_ITER} iterations "
                f"(max residual {worst:.3g}); the map is close to degenerate"
            )
    return CircleDiffeo(PeriodicField.from_values(x - y))


def adjoint_action(phi: CircleDiffeo, u: PeriodicField) -> PeriodicField:
    """Group adjoint ``Ad_φ u = (φ_x u)∘φ^{-1}``."""
    phi._check(u)
    stretched = u + pointwise_product(derivative(phi.displacement), u)
    return compose_field_with_diffeo(stretched, invert_diffeo(phi))


def write_diffeo_csv(phi: CircleDiffeo, path: str | Path) -> None:
    """``x,phi_of_x`` rows on the collocation grid, 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "phi_of_x"])
        for x, p in zip(phi.displacement.x, phi.values()):
            w.writerow([f"{x:.17g}", f"{p:.17g}"])


def read_diffeo_csv(path: str | Path) -> CircleDiffeo:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    x = np.array([float(r["x"]) for r in rows])
    p = np.array([float(r["phi_of_x"]) for r in rows])
    return CircleDiffeo(PeriodicField.from_values(p - x))
