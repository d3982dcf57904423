"""Run a validated :class:`ExperimentConfig` and persist its artifacts.

Each run writes ``summary.json`` (parameters, seed, version, headline
metrics), ``series.csv`` (fixed column order, header row) and, for searches,
``witness.json``. CSV bytes depend only on the config and the code version.
"""

from __future__ import annotations

import csv
import json
import subprocess
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from ._accel import BACKEND
from .circle_geom import Arc
from .config import ExperimentConfig
from .experiments import birkhoff_average, eproperty_modulus, modulus_of_continuity, test_function
from .ifs_core import RandomWordStream
from .structure_analysis import Kind, classify, detect_symmetry, omega_atoms, witness_length
from .transfer_ops import (
    GridFunction,
    ParticleMeasure,
    invariant_measure_estimate,
    stability_test,
    wasserstein_circle,
    wasserstein_to_lebesgue,
)

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY, EXIT_INCONCLUSIVE = 0, 2, 3, 4


@dataclass
class RunOutcome:
    exit_code: int
    summary: dict
    output_dir: Path


def version_string() -> str:
    """``git describe`` of the source tree when available, else the package version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _init_measure(item, n_particles):
    if item == "uniform":
        return ParticleMeasure.uniform(n_particles)
    return ParticleMeasure.dirac(item["dirac"])


def _stability(cfg, out, threads):
    p = cfg.parameters
    inits = [_init_measure(i, p["n_particles"]) for i in p["inits"]]
    rep = stability_test(cfg.system, inits, p["n"], p["n_particles"], RandomWordStream(cfg.seed, 0),
                         threads=threads or p["threads"])
    _write_csv(out / "series.csv", ["step", "pair_i", "pair_j", "w1"], rep.rows)
    metrics = {
        "final_max_w1": rep.final_max_w1,
        "final_w1_to_lebesgue": [wasserstein_to_lebesgue(m) for m in rep.final_measures],
        "checkpoints": rep.checkpoints,
    }
    return EXIT_OK, metrics, None


def _classify(cfg, out, threads):
    p = cfg.parameters
    J = Arc(p["arc_start"], p["arc_length"])
    c = classify(cfg.system, p["probe_arcs"], p["shrink_budget"], p["tol"], J)
    rows = []
    if c.witness is not None:
        length = J.length
        for i, r in enumerate(c.witness.round_ratios):
            length *= r
            rows.append((i + 1, float(r), float(length)))
    _write_csv(out / "series.csv", ["round", "ratio", "length"], rows)
    metrics = {"kind": c.kind.value, "isometry": c.isometry, "message": c.message}
    witness = None
    if c.witness is not None:
        metrics.update(
            final_length=c.witness.final_length,
            replay_length=witness_length(cfg.system, c.witness),
            word_length=int(c.witness.word.size),
            alpha=c.witness.alpha,
        )
        witness = c.witness.to_dict()
    return (EXIT_INCONCLUSIVE if c.kind is Kind.INCONCLUSIVE else EXIT_OK), metrics, witness


def _symmetry(cfg, out, threads):
    p = cfg.parameters
    rep = detect_symmetry(cfg.system, p["denominator_cap"], p["tol"], p["samples"], p["resolution"], p["budget"])
    _write_csv(out / "series.csv", ["x", "r_hat"], rep.radius_samples)
    metrics = rep.to_dict()
    if rep.M > 1:
        est = invariant_measure_estimate(cfg.system, p["n_steps"], p["n_particles"], RandomWordStream(cfg.seed, 0))
        r = float(rep.r)
        metrics["w1_rotated_invariant"] = wasserstein_circle(est.measure.rotate(r), est.measure)
        metrics["invariant_convergence_w1"] = est.convergence_w1
    ok = rep.success and rep.confident
    return (EXIT_OK if ok else EXIT_INCONCLUSIVE), metrics, None


def _omega(cfg, out, threads):
    p = cfg.parameters
    rows, runs = [], []
    for rep in range(p["repeats"]):
        res = omega_atoms(cfg.system, RandomWordStream(cfg.seed, rep), p["n_backward"],
                          ParticleMeasure.uniform(p["n_atoms"]), p["gap_threshold"], p["m_cap"])
        for ci, c in enumerate(res.clusters):
            rows.append((rep, ci, c.center, c.mass, c.diameter))
        runs.append(res.to_dict())
    _write_csv(out / "series.csv", ["repeat", "cluster", "center", "mass", "diameter"], rows)
    metrics = {"M_hat": [r["M_hat"] for r in runs], "converged": [r["converged"] for r in runs], "runs": runs}
    return (EXIT_OK if all(metrics["converged"]) else EXIT_INCONCLUSIVE), metrics, None


def _slln(cfg, out, threads):
    p = cfg.parameters
    phi = test_function(p["phi"])
    est = invariant_measure_estimate(cfg.system, p["n_steps"], p["n_particles"], RandomWordStream(cfg.seed, 0))
    ref = est.measure.integrate(phi)
    rows = []
    for i, x in enumerate(p["starts"]):
        b = birkhoff_average(cfg.system, x, phi, p["n"], RandomWordStream(cfg.seed, i + 1))
        z = (b.average - ref) / b.batch_means_sigma if b.batch_means_sigma > 0 else 0.0
        rows.append((float(x), b.average, b.batch_means_sigma, float(z)))
    _write_csv(out / "series.csv", ["start", "average", "sigma", "z"], rows)
    metrics = {"reference": ref, "max_abs_z": max(abs(r[3]) for r in rows), "invariant_convergence_w1": est.convergence_w1}
    return EXIT_OK, metrics, None


def _eproperty(cfg, out, threads):
    p = cfg.parameters
    fn = test_function(p["f"])
    f = GridFunction.from_callable(fn, p["grid"])
    deltas = sorted(p["deltas"], reverse=True)
    table = eproperty_modulus(cfg.system, f, deltas, p["N_horizon"], p["base_points"], p["method"], p["samples"],
                              RandomWordStream(cfg.seed, 0), f_spec=p["f"])
    omegas = [modulus_of_continuity(fn, d) for d in deltas]
    _write_csv(out / "series.csv", ["delta", "modulus", "stderr", "omega_f"],
               zip(table.deltas, table.moduli, table.stderr, omegas))
    metrics = table.to_dict()
    metrics["monotone_within_2se"] = table.monotone_within(2.0)
    return EXIT_OK, metrics, None


DISPATCH = {
    "stability": _stability,
    "classify": _classify,
    "symmetry": _symmetry,
    "omega": _omega,
    "slln": _slln,
    "eproperty": _eproperty,
}


def _jsonable(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    raise TypeError(f"not JSON serializable: {type(v).__name__}")


def run_config(cfg: ExperimentConfig, output_dir: str | Path | None = None, threads: int | None = None) -> RunOutcome:
    """Dispatch to the configured experiment and write its artifacts under ``output_dir``."""
    out = Path(output_dir or cfg.output_dir or "runs")
    out.mkdir(parents=True, exist_ok=True)
    code, metrics, witness = DISPATCH[cfg.experiment](cfg, out, threads)
    summary = {
        "experiment": cfg.experiment,
        "system": cfg.system.to_dict(),
        "parameters": cfg.parameters,
        "seed": cfg.seed,
        "version": version_string(),
        "backend": BACKEND,
        "exit_code": code,
        "metrics": metrics,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, default=_jsonable) + "\n")
    if witness is not None:
        (out / "witness.json").write_text(json.dumps(witness, indent=2) + "\n")
    return RunOutcome(code, summary, out)
