"""Run a configured scenario and write its CSV/JSON artifacts."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from ..diffeo import write_diffeo_csv
from ..flows import (
    SPECTRAL_TAIL_WARN,
    Trajectory,
    conservation_report,
    eulerian_velocity,
    integrate_euler_arnold,
    integrate_spray,
    write_trajectory_csv,
)
from ..spectral import write_field_csv
from .config import ScenarioConfig

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BREAKDOWN = 2
EXIT_IDENTITY_FAILURE = 3


@dataclass
class ScenarioResult:
    summary: dict
    exit_code: int
    eulerian: Trajectory | None = None
    lagrangian: Trajectory | None = None


def write_json(data: dict, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, allow_nan=True)
        fh.write("\n")


def run_scenario(config: ScenarioConfig, write: bool = True) -> ScenarioResult:
    A = config.inertia()
    u0 = config.initial_velocity()
    out = Path(config.output_dir)
    if write:
        out.mkdir(parents=True, exist_ok=True)

    eul = lag = None
    drifts: dict[str, dict] = {}
    if config.mode in ("eulerian", "both"):
        eul = integrate_euler_arnold(A, u0, config.t_final, config.dt, config.record_every)
        drifts["eulerian"] = conservation_report(A, eul)
    if config.mode in ("lagrangian", "both"):
        lag = integrate_spray(A, u0, config.t_final, config.dt, config.record_every)
        drifts["lagrangian"] = conservation_report(A, lag)

    breakdown = any(t.breakdown for t in (eul, lag) if t is not None)
    gap = None
    if eul is not None and lag is not None and not breakdown:
        gap = (eul.final - eulerian_velocity(lag.final)).sup_norm()

    for name, d in drifts.items():
        if d["max_spectral_tail"] > SPECTRAL_TAIL_WARN:
            log.warning("%s run: spectral tail reached %.3g", name, d["max_spectral_tail"])

    summary = {
        "config": config.echo(),
        "drifts": drifts,
        "equivalence_gap": gap,
        "breakdown": breakdown,
        "breakdown_message": "; ".join(t.message for t in (eul, lag) if t is not None and t.message),
        "residuals": None,
    }

    if write:
        if eul is not None:
            write_trajectory_csv(eul, out / "eulerian_trajectory.csv")
            write_field_csv(eul.final, out / "eulerian_final_velocity.csv")
        if lag is not None:
            write_trajectory_csv(lag, out / "lagrangian_trajectory.csv")
            write_field_csv(lag.final.v, out / "lagrangian_final_v.csv")
            write_diffeo_csv(lag.final.phi, out / "lagrangian_final_phi.csv")
            write_field_csv(eulerian_velocity(lag.final), out / "lagrangian_final_velocity.csv")
        write_json(summary, out / "summary.json")

    return ScenarioResult(summary, EXIT_BREAKDOWN if breakdown else EXIT_OK, eul, lag)
