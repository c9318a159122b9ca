"""Fourier-multiplier inertia operators and the inner product they induce."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .spectral import GridMismatchError, PeriodicField, inner_l2, wavenumbers

KINDS = ("helmholtz", "sobolev", "custom")


class DegenerateInertiaError(ValueError):
    """The symbol vanishes or changes sign somewhere.

    Such operators (Hunter-Saxton ``-D^2``, the Wunsch operator ``HD``, ...)
    are not isomorphisms onto the regular dual: their geodesic problems live
    on a homogeneous space Diff(S^1)/Rot(S^1), which this package does not
    model.
    """


@dataclass(frozen=True, eq=False)
class InertiaOperator:
    """Even Fourier multiplier ``(A u)^_k = a(|k|) û_k`` on an ``n``-point grid.

    ``forward_symbol`` is normally identical to ``symbol``; it only differs
    for operators built by :func:`corrupt_symbol`, which deliberately break
    the pairing between ``A`` and ``A^{-1}``.
    """

    n: int
    symbol: np.ndarray
    kind: str = "custom"
    forward_symbol: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        sym = np.array(self.symbol, dtype=float)
        if sym.shape != (self.n // 2 + 1,):
            raise ValueError(
                f"symbol for n={self.n} needs {self.n // 2 + 1} entries, got {sym.size}"
            )
        if not np.all(np.isfinite(sym)):
            raise ValueError("symbol entries must be finite")
        bad = np.flatnonzero(sym <= 0.0)
        if bad.size:
            raise DegenerateInertiaError(
                f"symbol must be strictly positive; a({bad[0]}) = {sym[bad[0]]!r}. "
                "Degenerate inertia operators define geodesics on the homogeneous "
                "space Diff(S^1)/Rot(S^1) and are not supported"
            )
        sym.setflags(write=False)
        object.__setattr__(self, "symbol", sym)
        fwd = sym if self.forward_symbol is None else np.array(self.forward_symbol, dtype=float)
        fwd.setflags(write=False)
        object.__setattr__(self, "forward_symbol", fwd)

    @property
    def a_min(self) -> float:
        return float(self.symbol.min())

    def _check(self, u: PeriodicField) -> None:
        if u.n != self.n:
            raise GridMismatchError(f"operator built for n={self.n}, field has n={u.n}")


def make_inertia(n: int, kind: str = "helmholtz", params: Sequence[float] = ()) -> InertiaOperator:
    """Build an inertia operator.

    ``helmholtz``: ``a(k) = 1 + k^2`` (``A = 1 - D^2``, Camassa-Holm).
    ``sobolev``:   ``a(k) = (1 + k^2)^s`` with ``params = [s]``, ``s > 0``.
    ``custom``:    ``params`` lists ``a(0) .. a(n/2)`` explicitly.
    """
    n = int(n)
    if n < 2 or n % 2:
        raise ValueError(f"grid size must be an even integer >= 2, got {n}")
    k = wavenumbers(n).astype(float)
    params = list(params)
    if kind == "helmholtz":
        sym = 1.0 + k**2
    elif kind == "sobolev":
        if len(params) != 1 or not params[0] > 0:
            raise ValueError("sobolev inertia needs one parameter s > 0")
        sym = (1.0 + k**2) ** float(params[0])
    elif kind == "custom":
        if len(params) != n // 2 + 1:
            raise ValueError(f"custom symbol for n={n} needs {n // 2 + 1} values, got {len(params)}")
        sym = np.asarray(params, dtype=float)
    else:
        raise ValueError(f"unknown inertia kind {kind!r}; expected one of {KINDS}")
    return InertiaOperator(n, sym, kind)


def corrupt_symbol(A: InertiaOperator, k: int = 2) -> InertiaOperator:
    """Negative control: copy of ``A`` whose forward symbol has ``a(k)`` negated.

    The inverse keeps the original symbol, so ``A A^{-1} != I`` on mode ``k``.
    """
    fwd = A.symbol.copy()
    fwd[k] = -fwd[k]
    return InertiaOperator(A.n, A.symbol, A.kind + "-corrupted", forward_symbol=fwd)


def apply_inertia(A: InertiaOperator, u: PeriodicField) -> PeriodicField:
    A._check(u)
    return PeriodicField.from_coeffs(A.forward_symbol * u.coeffs)


def apply_inverse_inertia(A: InertiaOperator, m: PeriodicField) -> PeriodicField:
    A._check(m)
    return PeriodicField.from_coeffs(m.coeffs / A.symbol)


def inner_a(A: InertiaOperator, u: PeriodicField, v: PeriodicField) -> float:
    """``<u, v>_A = ∫ u · A v dx``."""
    return inner_l2(u, apply_inertia(A, v))


def load_symbol_csv(path: str | Path, n: int | None = None) -> InertiaOperator:
    """Read a custom symbol from ``k,a`` rows covering ``k = 0 .. n/2``."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no symbol rows")
    table = {}
    for row in rows:
        k = int(row["k"])
        if k in table:
            raise ValueError(f"{path}: duplicate wavenumber {k}")
        table[k] = float(row["a"])
    kmax = max(table)
    if n is None:
        n = 2 * kmax
    if sorted(table) != list(range(n // 2 + 1)):
        raise ValueError(f"{path}: rows must cover k = 0..{n // 2} exactly once")
    return make_inertia(n, "custom", [table[k] for k in range(n // 2 + 1)])


def write_symbol_csv(A: InertiaOperator, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "a"])
        for k, a in enumerate(A.symbol):
            w.writerow([k, f"{a:.17g}"])
