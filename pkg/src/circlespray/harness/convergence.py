"""Self-convergence studies for the fixed-step integrators."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..flows import SprayState, integrate_euler_arnold, integrate_spray
from .config import ConfigError, ScenarioConfig

# Pairs whose errors sit below this multiple of machine epsilon (relative to
# the reference solution) carry no order information.
ROUNDOFF_FLOOR = 16 * np.finfo(float).eps


@dataclass
class OrderTable:
    integrator: str
    reference_dt: float
    dts: list[float] = field(default_factory=list)
    errors: list[float] = field(default_factory=list)
    orders: list[float | None] = field(default_factory=list)
    fitted_order: float | None = None

    def rows(self):
        return list(zip(self.dts, self.errors, self.orders))

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["dt", "error", "order"])
            for dt, err, order in self.rows():
                w.writerow([f"{dt:.17g}", f"{err:.17g}", "n/a" if order is None else f"{order:.17g}"])

    def to_dict(self) -> dict:
        return {
            "integrator": self.integrator,
            "reference_dt": self.reference_dt,
            "dt": self.dts,
            "error": self.errors,
            "order": self.orders,
            "fitted_order": self.fitted_order,
        }


def _final_eulerian(cfg: ScenarioConfig, A, u0, dt: float) -> np.ndarray:
    traj = integrate_euler_arnold(A, u0, cfg.t_final, dt, record_every=10**9)
    if traj.breakdown:
        raise RuntimeError(f"breakdown at dt={dt}: {traj.message}")
    return traj.final.values


def _final_spray(cfg: ScenarioConfig, A, u0, dt: float) -> np.ndarray:
    traj = integrate_spray(A, u0, cfg.t_final, dt, record_every=10**9)
    if traj.breakdown:
        raise RuntimeError(f"breakdown at dt={dt}: {traj.message}")
    s: SprayState = traj.final
    return np.concatenate([s.phi.displacement.values, s.v.values])


def order_table(integrator: str, dts: Sequence[float], finals: Sequence[np.ndarray]) -> OrderTable:
    """Errors of every run against the last (finest) one and pairwise orders."""
    ref = finals[-1]
    floor = ROUNDOFF_FLOOR * max(1.0, float(np.max(np.abs(ref))))
    table = OrderTable(integrator, float(dts[-1]))
    table.dts = [float(d) for d in dts[:-1]]
    table.errors = [float(np.max(np.abs(f - ref))) for f in finals[:-1]]
    table.orders = [None]
    for i in range(1, len(table.errors)):
        e0, e1 = table.errors[i - 1], table.errors[i]
        if min(e0, e1) <= floor:
            table.orders.append(None)
        else:
            table.orders.append(math.log(e0 / e1) / math.log(table.dts[i - 1] / table.dts[i]))
    usable = [(d, e) for d, e in zip(table.dts, table.errors) if e > floor]
    if len(usable) >= 2:
        x, y = np.log([d for d, _ in usable]), np.log([e for _, e in usable])
        table.fitted_order = float(np.polyfit(x, y, 1)[0])
    return table


def run_convergence_study(config: ScenarioConfig, dt_list: Sequence[float]) -> dict[str, OrderTable]:
    """Self-convergence of the integrators selected by ``config.mode``.

    ``dt_list`` must hold at least three strictly decreasing steps; the last
    one is the reference, so errors and orders are reported for the others.
    """
    dts = [float(d) for d in dt_list]
    if len(dts) < 3:
        raise ConfigError("--dts", "need at least three time steps")
    if any(not d > 0 for d in dts) or any(b >= a for a, b in zip(dts, dts[1:])):
        raise ConfigError("--dts", f"time steps must be positive and strictly decreasing, got {dts}")
    for d in dts:
        steps = round(config.t_final / d)
        if abs(steps * d - config.t_final) > 1e-9 * config.t_final:
            raise ConfigError("--dts", f"{d} does not divide time.t_final = {config.t_final}")

    A = config.inertia()
    u0 = config.initial_velocity()
    tables = {}
    if config.mode in ("eulerian", "both"):
        tables["eulerian"] = order_table("eulerian", dts, [_final_eulerian(config, A, u0, d) for d in dts])
    if config.mode in ("lagrangian", "both"):
        tables["lagrangian"] = order_table("lagrangian", dts, [_final_spray(config, A, u0, d) for d in dts])
    return tables
