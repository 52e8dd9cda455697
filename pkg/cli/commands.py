# cli/commands.py
"""The four subcommands: potential, propagator, evolve, verify."""

import itertools
import logging
import os
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import integrate

from cli import __version__
from models.grid import Grid1D
from models.kernel import Method, closed_form_kernel, propagate_state, spectral_kernel, theorem_kernel
from models.oracle import EvolutionConfig, check_packet_resolution, cn_evolve, gaussian_packet
from models.susy import PartnerModel, make_oscillator_transform, make_soliton_transform
from utils.config import ScenarioConfig
from utils.datasets import (
    EVOLVE_COLUMNS,
    POTENTIAL_COLUMNS,
    PROPAGATOR_COLUMNS,
    complex_columns,
    write_dataset,
    write_json,
)
from utils.errors import PropagatorError
from utils.report import config_digest

logger = logging.getLogger(__name__)

# flag of partial spectral sums, whose err_est is written as NaN
TRUNCATED_FLAG = "truncated"


def build_partner_model(cfg: ScenarioConfig) -> PartnerModel:
    if cfg.example == "oscillator":
        fact = make_oscillator_transform(cfg.oscillator.C)
    else:
        fact = make_soliton_transform(cfg.soliton.a, cfg.soliton.b)
    return PartnerModel.from_factorization(fact)


# --- potential -------------------------------------------------------------------


def potential_frame(cfg: ScenarioConfig) -> pd.DataFrame:
    pm = build_partner_model(cfg)
    grid = Grid1D(cfg.potential.x_min, cfg.potential.x_max, cfg.potential.n_points)
    xs = grid.points
    return pd.DataFrame({"x": xs, **complex_columns(pm.potential(xs), "v")})


def cmd_potential(cfg: ScenarioConfig, out: Optional[str] = None) -> pd.DataFrame:
    frame = potential_frame(cfg)
    path = out or cfg.output.potential
    write_dataset(frame, path, POTENTIAL_COLUMNS)
    logger.info("✅ potential: wrote %d rows to %s", len(frame), path)
    return frame


# --- propagator ------------------------------------------------------------------


def _evaluate(pm: PartnerModel, method: str, xs: np.ndarray, y: float, t: float, cfg: ScenarioConfig):
    if method == Method.THEOREM_QUAD.value:
        result = theorem_kernel(pm, xs, y, t, cfg.quadrature)
    elif method == Method.CLOSED_FORM.value:
        result = closed_form_kernel(pm, xs, y, t, cfg.quadrature)
    else:
        result = spectral_kernel(pm, cfg.methods.spectral_terms, xs, y, t)
    values = np.broadcast_to(np.asarray(result.value, dtype=complex), xs.shape)
    if result.truncated:
        return values, float("nan"), TRUNCATED_FLAG
    return values, result.err_estimate, ""


def _rows_for(pm, method, xs, y, t, cfg) -> List[Dict]:
    """Rows for one (y, t, method); failures are isolated per x and flagged."""

    def row(x, value, err, flag):
        return {"x": x, "y": y, "t": t, "method": method, "re_k": value.real, "im_k": value.imag,
                "err_est": err, "flag": flag}

    try:
        values, err, flag = _evaluate(pm, method, xs, y, t, cfg)
        return [row(x, v, err, flag) for x, v in zip(xs, values)]
    except (PropagatorError, ValueError, NotImplementedError):
        pass

    rows = []
    for x in xs:
        try:
            values, err, flag = _evaluate(pm, method, np.array([x]), y, t, cfg)
            rows.append(row(x, values[0], err, flag))
        except (PropagatorError, ValueError, NotImplementedError) as exc:
            flag = getattr(exc, "code", "unsupported")
            logger.debug("flagged (%g, %g, %g, %s): %s", x, y, t, method, exc)
            rows.append(row(x, complex(np.nan, np.nan), np.nan, flag))
    return rows


def propagator_frame(cfg: ScenarioConfig) -> pd.DataFrame:
    pm = build_partner_model(cfg)
    xs = np.asarray(cfg.lattice.x, dtype=float)
    tasks = list(itertools.product(cfg.lattice.y, cfg.lattice.t, cfg.methods.propagator))
    batches = Parallel(n_jobs=cfg.threads, prefer="threads")(
        delayed(_rows_for)(pm, method, xs, y, t, cfg) for y, t, method in tasks
    )
    frame = pd.DataFrame([r for batch in batches for r in batch], columns=list(PROPAGATOR_COLUMNS))
    return frame.sort_values(["x", "y", "t", "method"], kind="mergesort").reset_index(drop=True)


def cmd_propagator(cfg: ScenarioConfig, out: Optional[str] = None) -> pd.DataFrame:
    frame = propagator_frame(cfg)
    path = out or cfg.output.propagator
    write_dataset(frame, path, PROPAGATOR_COLUMNS)
    truncated = int((frame["flag"] == TRUNCATED_FLAG).sum())
    flagged = int((frame["flag"] != "").sum()) - truncated
    logger.info("✅ propagator: wrote %d rows to %s (%d flagged)", len(frame), path, flagged)
    if truncated:
        logger.info("ℹ️ %d SpectralSum rows are truncated eigen-sums without an error estimate", truncated)
    if flagged:
        logger.warning("⚠️ %d lattice points could not be evaluated; see the flag column", flagged)
    return frame


# --- evolve -----------------------------------------------------------------------


def l2_norm(values, xs) -> float:
    return float(np.sqrt(integrate.simpson(np.abs(values) ** 2, x=xs)))


def initial_state(cfg: ScenarioConfig, pm: PartnerModel, xs: np.ndarray, grid: Grid1D) -> np.ndarray:
    packet = cfg.packet
    if packet.kind == "bound_state":
        return np.asarray(pm.bound_state(xs), dtype=complex)
    check_packet_resolution(packet.width, grid)
    return gaussian_packet(xs, packet.center, packet.width, packet.momentum)


def evolve_states(cfg: ScenarioConfig) -> Dict[str, np.ndarray]:
    """Final-time states on the kernel grid, one per requested method, plus the initial state."""
    pm = build_partner_model(cfg)
    evolution = cfg.evolution
    grid = Grid1D.from_spacing(evolution.x_min, evolution.x_max, evolution.spacing)
    xs = grid.points
    states = {"initial": initial_state(cfg, pm, xs, grid)}
    for method in cfg.methods.evolve:
        if method == Method.ORACLE_CN.value:
            fine = grid.refined(evolution.cn_refine)
            run = EvolutionConfig.for_duration(fine, evolution.t, evolution.dt, boundary_cap=evolution.boundary_cap)
            phi0 = initial_state(cfg, pm, fine.points, fine)
            states[method] = cn_evolve(pm.potential(fine.points), phi0, run)[:: evolution.cn_refine]
        elif method == Method.SPECTRAL_SUM.value and pm.base.energy(0) is None:
            logger.warning("⚠️ SpectralSum skipped: the %s base has no discrete spectrum", pm.base.kind)
        else:
            states[method] = propagate_state(method, pm, states["initial"], grid, evolution.t, cfg.quadrature,
                                             cfg.methods.spectral_terms, cfg.threads)
        logger.info("🔄 evolve: %s done", method)
    return states


def evolve_summary(cfg: ScenarioConfig, states: Dict[str, np.ndarray], xs: np.ndarray) -> Dict:
    methods = [m for m in states if m != "initial"]
    pairwise = []
    for first, second in itertools.combinations(methods, 2):
        scale = l2_norm(states[second], xs)
        pairwise.append({"a": first, "b": second,
                         "rel_l2": l2_norm(states[first] - states[second], xs) / scale})
    initial_modulus = np.abs(states["initial"])
    drift = {m: float(np.max(np.abs(np.abs(states[m]) - initial_modulus))) for m in methods}
    return {
        "version": __version__,
        "config_digest": config_digest(cfg.to_dict()),
        "example": cfg.example,
        "t": cfg.evolution.t,
        "packet": cfg.packet.kind,
        "methods": methods,
        "pairwise": pairwise,
        "max_pairwise_rel_l2": max((p["rel_l2"] for p in pairwise), default=0.0),
        "modulus_drift": drift,
    }


def summary_path_for(out: str) -> str:
    """evolve.csv -> evolve_summary.json in the same directory."""
    return os.path.splitext(out)[0] + "_summary.json"


def cmd_evolve(cfg: ScenarioConfig, out: Optional[str] = None):
    states = evolve_states(cfg)
    evolution = cfg.evolution
    xs = Grid1D.from_spacing(evolution.x_min, evolution.x_max, evolution.spacing).points
    frames = [
        pd.DataFrame({"t": evolution.t, "x": xs, **complex_columns(values, "phi"), "method": method})
        for method, values in states.items()
        if method != "initial"
    ]
    frame = pd.concat(frames, ignore_index=True)
    summary = evolve_summary(cfg, states, xs)
    path = out or cfg.output.evolve
    write_dataset(frame, path, EVOLVE_COLUMNS)
    summary_path = summary_path_for(out) if out else cfg.output.evolve_summary
    write_json(summary, summary_path)
    logger.info("✅ evolve: wrote %d rows to %s, summary to %s; max pairwise rel L2 = %.3e",
                len(frame), path, summary_path, summary["max_pairwise_rel_l2"])
    return frame, summary


# --- verify ------------------------------------------------------------------------


def cmd_verify(cfg: ScenarioConfig, out: Optional[str] = None):
    from cli.checks import run_checks

    report = run_checks(cfg)
    path = out or cfg.output.report
    write_json(report.to_document(), path)
    counts = report.summary()
    icon = "✅" if report.all_pass else "❌"
    logger.info("%s verify: %d/%d checks passed; report at %s", icon, counts["passed"], counts["total"], path)
    for failure in report.failures():
        logger.error("❌ %s: metric %.3e vs tolerance %.3e", failure.name, failure.metric, failure.tolerance)
    return report
