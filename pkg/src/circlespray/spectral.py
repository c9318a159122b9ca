"""
Band-limited periodic fields on the circle [0, 2π).

A :class:`PeriodicField` holds both the ``n`` collocation samples
``u(x_j)``, ``x_j = 2πj/n``, and the one-sided Fourier coefficients

    û_k = (1/n) Σ_j u_j exp(-i k x_j),    k = 0 .. n/2,

so that ``u(x) = Re[û_0 + 2 Σ_{0<k<n/2} û_k e^{ikx}] + û_{n/2} cos(n x / 2)``.

Quadratic products are evaluated on a 3/2-padded grid and truncated back,
which makes every retained mode of a product of two band-limited fields
exact.  The Nyquist mode is dropped after differentiation and products.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * np.pi


class NonFiniteFieldError(ValueError):
    """Raised when a field would hold NaN or infinite samples."""


class GridMismatchError(ValueError):
    """Two fields (or a field and an operator) live on different grids."""


def _check_n(n: int) -> int:
    n = int(n)
    if n < 2 or n % 2:
        raise ValueError(f"grid size must be an even integer >= 2, got {n}")
    return n


def grid_points(n: int) -> np.ndarray:
    """Collocation points ``2πj/n`` for ``j = 0 .. n-1``."""
    n = _check_n(n)
    return TWO_PI * np.arange(n) / n


def wavenumbers(n: int) -> np.ndarray:
    """Non-negative wavenumbers ``0 .. n/2`` matching the coefficient layout."""
    return np.arange(n // 2 + 1)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PeriodicField:
    """Real trigonometric polynomial on the circle, stored as samples and modes.

    Build instances with :meth:`from_values`, :meth:`from_coeffs` or
    :func:`make_field_from_modes`.  Instances are immutable; the
    arithmetic operators return new fields.
    """

    n: int
    values: np.ndarray
    coeffs: np.ndarray = field(repr=False)

    @classmethod
    def from_values(cls, values: Sequence[float] | np.ndarray) -> "PeriodicField":
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1:
            raise ValueError("field values must be one-dimensional")
        n = _check_n(vals.size)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteFieldError("field values must be finite")
        coeffs = np.fft.rfft(vals) / n
        coeffs[0] = coeffs[0].real
        coeffs[-1] = coeffs[-1].real
        return cls(n, _frozen(vals), _frozen(coeffs))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[complex] | np.ndarray) -> "PeriodicField":
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 1 or c.size < 2:
            raise ValueError("coefficients must be a 1-d array of length n/2 + 1")
        n = 2 * (c.size - 1)
        # Hermitian symmetry forces real mean and Nyquist amplitudes.
        c[0] = c[0].real
        c[-1] = c[-1].real
        vals = np.fft.irfft(c * n, n)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteFieldError("field values must be finite")
        return cls(n, _frozen(vals), _frozen(c))

    @classmethod
    def zeros(cls, n: int) -> "PeriodicField":
        return cls.from_values(np.zeros(_check_n(n)))

    @classmethod
    def constant(cls, n: int, c: float) -> "PeriodicField":
        return cls.from_values(np.full(_check_n(n), float(c)))

    @property
    def x(self) -> np.ndarray:
        return grid_points(self.n)

    def _same_grid(self, other: "PeriodicField") -> None:
        if not isinstance(other, PeriodicField):
            raise TypeError(f"expected PeriodicField, got {type(other).__name__}")
        if other.n != self.n:
            raise GridMismatchError(f"grid sizes differ: {self.n} vs {other.n}")

    def __add__(self, other: "PeriodicField") -> "PeriodicField":
        self._same_grid(other)
        return PeriodicField.from_values(self.values + other.values)

    def __sub__(self, other: "PeriodicField") -> "PeriodicField":
        self._same_grid(other)
        return PeriodicField.from_values(self.values - other.values)

    def __neg__(self) -> "PeriodicField":
        return PeriodicField.from_values(-self.values)

    def __mul__(self, scalar: float) -> "PeriodicField":
        if isinstance(scalar, PeriodicField):
            raise TypeError("use pointwise_product for field-field products")
        return PeriodicField.from_values(float(scalar) * self.values)

    __rmul__ = __mul__

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __repr__(self) -> str:
        return f"PeriodicField(n={self.n}, sup={self.sup_norm():.3g})"


def make_field_from_modes(
    n: int,
    modes: Iterable[tuple[int, float, float]],
) -> PeriodicField:
    """Sample ``Σ c_k cos(kx) + s_k sin(kx)`` on the ``n``-point grid.

    ``modes`` is an iterable of ``(k, c, s)`` triples with ``0 <= k <= n/2``.
    Repeated wavenumbers add up.
    """
    n = _check_n(n)
    x = grid_points(n)
    values = np.zeros(n)
    for k, c, s in modes:
        if int(k) != k or abs(k) > n // 2:
            raise ValueError(f"wavenumber {k} outside the band |k| <= {n // 2}")
        k = int(k)
        values += c * np.cos(k * x) + s * np.sin(k * x)
    return PeriodicField.from_values(values)


def derivative(u: PeriodicField) -> PeriodicField:
    """Exact derivative of the band-limited field; Nyquist mode set to zero."""
    k = wavenumbers(u.n)
    c = 1j * k * u.coeffs
    c[-1] = 0.0
    return PeriodicField.from_coeffs(c)


def _padded_values(u: PeriodicField, m: int) -> np.ndarray:
    c = np.zeros(m // 2 + 1, dtype=complex)
    c[: u.n // 2 + 1] = u.coeffs
    # On the finer grid the old Nyquist cosine is an ordinary mode.
    c[u.n // 2] *= 0.5
    return np.fft.irfft(c * m, m)


def pointwise_product(u: PeriodicField, v: PeriodicField) -> PeriodicField:
    """Alias-free product ``u·v`` truncated to the original band (3/2 rule)."""
    u._same_grid(v)
    n = u.n
    m = 3 * n // 2
    if m % 2:
        m += 1
    prod = _padded_values(u, m) * _padded_values(v, m)
    c = np.fft.rfft(prod)[: n // 2 + 1] / m
    c[-1] = 0.0
    return PeriodicField.from_coeffs(c)


def inner_l2(u: PeriodicField, v: PeriodicField) -> float:
    """``∫ u v dx`` over one period (trapezoid rule, exact below Nyquist)."""
    u._same_grid(v)
    return float(TWO_PI / u.n * np.dot(u.values, v.values))


def mean(u: PeriodicField) -> float:
    return float(u.coeffs[0].real)


_BLOCK = 8


def _series_matrix(n: int, points: np.ndarray) -> np.ndarray:
    """Weighted ``exp(i k x)`` for ``k = 0..n/2``, rows indexed by point.

    Exact exponentials every ``_BLOCK`` wavenumbers, short powers in
    between; cheaper than a full complex ``exp`` and within ~10 ulp of it.
    """
    nk = n // 2 + 1
    nb = -(-nk // _BLOCK)
    base = np.exp(1j * np.outer(points, _BLOCK * np.arange(nb)))
    step = np.empty((points.size, _BLOCK), dtype=complex)
    step[:, 0] = 1.0
    step[:, 1:] = np.exp(1j * points)[:, None]
    step = np.cumprod(step, axis=1)
    m = (base[:, :, None] * step[:, None, :]).reshape(points.size, nb * _BLOCK)[:, :nk]
    m[:, 1:-1] *= 2.0
    return m


def evaluate_at(u: PeriodicField, points: Sequence[float] | np.ndarray) -> np.ndarray:
    """Sum the Fourier series of ``u`` directly at arbitrary points.

    Points are wrapped modulo 2π.  The cost is O(n * len(points)).
    """
    pts = np.mod(np.asarray(points, dtype=float), TWO_PI)
    return (_series_matrix(u.n, np.atleast_1d(pts)) @ u.coeffs).real.reshape(pts.shape)


def spectral_tail(u: PeriodicField) -> float:
    """Fraction of the spectral energy held in the top third of the modes."""
    power = np.abs(u.coeffs) ** 2
    total = float(power.sum())
    if total == 0.0:
        return 0.0
    cut = (2 * (u.n // 2)) // 3
    return float(power[cut + 1 :].sum() / total)


def random_field(
    n: int,
    rng: np.random.Generator,
    kmax: int | None = None,
) -> PeriodicField:
    """Smooth random field with modes ``|k| <= kmax`` (default ``n // 4``).

    Cosine and sine amplitudes are drawn uniformly from ``[-1, 1]`` and
    damped by ``1 / (1 + k^2)``.
    """
    kmax = n // 4 if kmax is None else kmax
    k = np.arange(kmax + 1)
    amps = rng.uniform(-1.0, 1.0, size=(2, kmax + 1)) / (1.0 + k**2)
    amps[1, 0] = 0.0
    return make_field_from_modes(n, zip(k, amps[0], amps[1]))


def write_field_csv(u: PeriodicField, path: str | Path) -> None:
    """Write ``x,value`` rows, one per collocation point, 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "value"])
        for x, val in zip(u.x, u.values):
            w.writerow([f"{x:.17g}", f"{val:.17g}"])


def read_field_csv(path: str | Path) -> PeriodicField:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return PeriodicField.from_values([float(r["value"]) for r in rows])
