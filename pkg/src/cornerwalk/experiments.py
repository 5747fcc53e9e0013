"""Experiment runners: campaigns plus the statistics the study cares about.

Each runner takes an :class:`ExperimentConfig`, runs what it needs, and
returns an :class:`ExperimentResult` whose ``metrics`` are a pure function of
the config (wall-clock time lives outside them).  With an output directory
the runner also writes delimited side tables, the result JSON, and, when
asked, SVG figures; re-running the same config and seed reproduces the
metrics JSON and tables byte for byte.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, plots
from .config import ExperimentConfig
from .dim_entropy import (
    delta_jk,
    dim_cantor,
    entropy_ratio_dimension,
)
from .errors import InsufficientCounts, ParameterError
from .cantor_geometry import CylinderAddress, ScaleSequence
from .measure_table import CylinderMeasureTable, codim_compare, harnack_ratio_scan
from .oracle_grid import grid_harmonic_measure
from .stats import line_fit, wilson_interval
from .wos_engine import run_campaign


@dataclass
class ExperimentResult:
    """What one runner produced: deterministic metrics plus provenance."""

    kind: str
    config: dict
    metrics: dict
    seed: int
    version: str = __version__
    wall_clock_s: float = 0.0
    files: list = field(default_factory=list)

    def save(self, out_dir) -> Path:
        """Write ``<kind>_result.json`` (with timing) and ``<kind>_metrics.json``.

        The metrics file deliberately omits wall-clock so identical runs are
        byte-identical; the result file carries everything.
        """
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        metrics_path = out / f"{self.kind}_metrics.json"
        with open(metrics_path, "w") as fh:
            json.dump(
                {"kind": self.kind, "config": self.config, "metrics": self.metrics,
                 "seed": self.seed, "version": self.version},
                fh, indent=2, sort_keys=True,
            )
            fh.write("\n")
        result_path = out / f"{self.kind}_result.json"
        with open(result_path, "w") as fh:
            json.dump(
                {"kind": self.kind, "config": self.config, "metrics": self.metrics,
                 "seed": self.seed, "version": self.version,
                 "wall_clock_s": self.wall_clock_s,
                 "files": [str(f) for f in self.files]},
                fh, indent=2, sort_keys=True,
            )
            fh.write("\n")
        self.files.extend([metrics_path.name, result_path.name])
        return result_path

    @staticmethod
    def load(path) -> "ExperimentResult":
        with open(path) as fh:
            raw = json.load(fh)
        return ExperimentResult(
            kind=raw["kind"],
            config=raw["config"],
            metrics=raw["metrics"],
            seed=raw["seed"],
            version=raw.get("version", ""),
            wall_clock_s=raw.get("wall_clock_s", 0.0),
            files=list(raw.get("files", [])),
        )


def _campaign(cfg: ExperimentConfig, seq=None, seed=None, depth=None) -> CylinderMeasureTable:
    seq = cfg.sequence() if seq is None else seq
    return run_campaign(
        seq,
        cfg.wos_params(depth),
        cfg.walkers,
        cfg.seed if seed is None else seed,
        workers=cfg.workers,
        batch_size=cfg.batch_size,
    )


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return Path(path).name


# -- sample ------------------------------------------------------------------


def run_sample(cfg: ExperimentConfig, out_dir=None) -> ExperimentResult:
    """One campaign; saves the cylinder table and summarizes generation 1."""
    t0 = time.perf_counter()
    table = _campaign(cfg)
    wall = time.perf_counter() - t0
    gen1 = table.counts_at(1)
    metrics = {
        "n_effective": table.n_effective,
        "discarded": table.discarded,
        "total_steps": table.meta.get("total_steps"),
        "fingerprint": table.fingerprint,
        "generation1": {
            CylinderAddress.from_code(c, 1).word: {
                "count": int(gen1[c]),
                "probability": float(gen1[c] / table.n_effective),
                "wilson": list(wilson_interval(int(gen1[c]), table.n_effective)),
            }
            for c in range(4)
        },
    }
    result = ExperimentResult(
        kind="sample", config=cfg.as_dict(), metrics=metrics, seed=cfg.seed,
        wall_clock_s=wall,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        csv_path, json_path = table.save(out / "sample_table")
        result.files += [Path(csv_path).name, Path(json_path).name]
        if cfg.plots:
            result.files.append(
                Path(plots.plot_set(cfg.sequence(), cfg.depth, out / "sample_set.svg")).name
            )
        result.save(out)
    return result


# -- dimensions ----------------------------------------------------------------


def _dims_metrics(cfg: ExperimentConfig, table: CylinderMeasureTable, seq: ScaleSequence):
    report = entropy_ratio_dimension(
        table, seq, bootstrap_reps=cfg.bootstrap_reps, seed=cfg.seed
    )
    window = cfg.dim_window if cfg.dim_window is not None else 2 * len(seq.values)
    dim_set = dim_cantor(seq, n_max=cfg.dim_n_max, window=window)
    return report, {
        "entropy_report": report.as_dict(),
        "dim_set": dim_set,
        "estimate": report.estimate,
        "uncertainty": report.uncertainty,
        "gap": dim_set - report.estimate,
    }


def run_dims(cfg: ExperimentConfig, out_dir=None, table=None) -> ExperimentResult:
    """Entropy-ratio dimension of one campaign against the set dimension."""
    t0 = time.perf_counter()
    seq = cfg.sequence()
    if table is None:
        table = _campaign(cfg)
    report, metrics = _dims_metrics(cfg, table, seq)
    wall = time.perf_counter() - t0
    result = ExperimentResult(
        kind="dims", config=cfg.as_dict(), metrics=metrics, seed=cfg.seed,
        wall_clock_s=wall,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        rows = [
            (n, report.entropy[i], report.entropy_corrected[i],
             report.neg_log_side[i], report.ratios[i], report.ratios_plugin[i])
            for i, n in enumerate(report.generations)
        ]
        result.files.append(_write_csv(
            out / "dims_ratios.csv",
            ["generation", "entropy", "entropy_corrected", "neg_log_side",
             "ratio", "ratio_plugin"],
            rows,
        ))
        if cfg.plots:
            result.files.append(Path(plots.plot_dims(
                report.as_dict(), metrics["dim_set"], out / "dims_ratios.svg"
            )).name)
        result.save(out)
    return result


def run_gap_test(cfg: ExperimentConfig, out_dir=None, table=None) -> ExperimentResult:
    """Is the exit-measure dimension three sigma below the set dimension?"""
    t0 = time.perf_counter()
    seq = cfg.sequence()
    if table is None:
        table = _campaign(cfg)
    report, metrics = _dims_metrics(cfg, table, seq)
    gap_sigmas = (
        math.inf if report.uncertainty == 0
        else (metrics["dim_set"] - report.estimate) / report.uncertainty
    )
    metrics.update(
        {
            "gap_sigmas": gap_sigmas,
            "passed": bool(report.estimate + 3 * report.uncertainty < metrics["dim_set"]),
        }
    )
    wall = time.perf_counter() - t0
    result = ExperimentResult(
        kind="gap", config=cfg.as_dict(), metrics=metrics, seed=cfg.seed,
        wall_clock_s=wall,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if cfg.plots:
            result.files.append(Path(plots.plot_dims(
                report.as_dict(), metrics["dim_set"], out / "gap_ratios.svg"
            )).name)
        result.save(out)
    return result


# -- continuity ----------------------------------------------------------------


def run_continuity_sweep(cfg: ExperimentConfig, out_dir=None) -> ExperimentResult:
    """Perturb the ratios by each delta and watch the dimension move.

    The sweep runs the base sequence, a delta = 0 control with a shifted
    seed, and one campaign per delta (descending).  Checks, all with explicit
    noise allowances:

    * shifts shrink with delta: diff(smaller) <= diff(larger) + 2 combined sigma;
    * the control shift is within 3 sigma of zero;
    * shift/delta ratios admit one constant: the lower edge at the smallest
      delta does not exceed the upper edge at the largest
      (a Lipschitz trend, no particular constant asserted).
    """
    t0 = time.perf_counter()
    seq = cfg.sequence()
    base_table = _campaign(cfg)
    base_report, base_metrics = _dims_metrics(cfg, base_table, seq)

    control_table = _campaign(cfg, seed=cfg.seed + cfg.control_seed_offset)
    control_report, _ = _dims_metrics(cfg, control_table, seq)
    control = {
        "estimate": control_report.estimate,
        "diff": abs(control_report.estimate - base_report.estimate),
        "combined_sigma": math.hypot(base_report.uncertainty, control_report.uncertainty),
    }
    control["consistent_with_zero"] = bool(
        control["diff"] <= 3.0 * control["combined_sigma"]
    )

    deltas = sorted(cfg.deltas, reverse=True)
    rows = []
    for i, delta in enumerate(deltas):
        pert = ScaleSequence.perturbed(seq, delta, cfg.pattern)
        table = _campaign(cfg, seq=pert, seed=cfg.seed + 1 + i)
        report, _ = _dims_metrics(cfg, table, pert)
        comp = codim_compare(
            base_table, table, floor=cfg.count_floor,
            bootstrap_reps=cfg.bootstrap_reps, seed=cfg.seed + 100 + i,
        )
        diff = abs(report.estimate - base_report.estimate)
        sigma = math.hypot(base_report.uncertainty, report.uncertainty)
        rows.append(
            {
                "delta": delta,
                "estimate": report.estimate,
                "uncertainty": report.uncertainty,
                "diff": diff,
                "combined_sigma": sigma,
                "ratio": diff / delta,
                "codim_max": comp.max_deviation,
                "codim_lo": comp.bootstrap_lo,
                "codim_hi": comp.bootstrap_hi,
            }
        )

    monotone = all(
        rows[i + 1]["diff"]
        <= rows[i]["diff"]
        + 2.0 * math.hypot(rows[i]["combined_sigma"], rows[i + 1]["combined_sigma"])
        for i in range(len(rows) - 1)
    )
    small, large = rows[-1], rows[0]
    lipschitz = (
        (small["diff"] - 2 * small["combined_sigma"]) / small["delta"]
        <= (large["diff"] + 2 * large["combined_sigma"]) / large["delta"]
    )
    metrics = {
        "base_estimate": base_report.estimate,
        "base_uncertainty": base_report.uncertainty,
        "dim_set_base": base_metrics["dim_set"],
        "control": control,
        "sweep": rows,
        "monotone_within_ci": bool(monotone),
        "lipschitz_trend": bool(lipschitz),
        "ratio_bound": max(
            (r["diff"] + 2 * r["combined_sigma"]) / r["delta"] for r in rows
        ),
    }
    wall = time.perf_counter() - t0
    result = ExperimentResult(
        kind="continuity", config=cfg.as_dict(), metrics=metrics, seed=cfg.seed,
        wall_clock_s=wall,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        result.files.append(_write_csv(
            out / "continuity_sweep.csv",
            ["delta", "estimate", "uncertainty", "diff", "combined_sigma",
             "ratio", "codim_max", "codim_lo", "codim_hi"],
            [[r[k] for k in ("delta", "estimate", "uncertainty", "diff",
                             "combined_sigma", "ratio", "codim_max",
                             "codim_lo", "codim_hi")] for r in rows],
        ))
        if cfg.plots:
            result.files.append(Path(plots.plot_continuity(
                rows, control, out / "continuity_sweep.svg"
            )).name)
        result.save(out)
    return result


# -- decay scans ---------------------------------------------------------------


def run_harnack_scan(cfg: ExperimentConfig, out_dir=None, table=None) -> ExperimentResult:
    """Conditional-ratio deviations against offset generation, with a decay fit.

    Fits log(deviation) linearly in k; the decay rate estimate is
    q = exp(slope).  A scan whose deviations are flat or zero (the synthetic
    product measure does this) is flagged non-decaying instead of fitted.
    """
    t0 = time.perf_counter()
    if table is None:
        table = _campaign(cfg)
    ks = list(range(1, cfg.k_max + 1))
    devs, lows, highs, pairs = [], [], [], []
    for k in ks:
        rep = harnack_ratio_scan(
            table, cfg.harnack_n, k, cfg.harnack_m,
            floor=cfg.count_floor, bootstrap_reps=cfg.bootstrap_reps,
            seed=cfg.seed + k,
        )
        devs.append(rep.max_deviation)
        lows.append(rep.bootstrap_lo)
        highs.append(rep.bootstrap_hi)
        pairs.append(rep.pairs_used)

    flat = max(devs) - min(devs) <= 1e-12 or any(d <= 0.0 for d in devs)
    if flat:
        slope, intercept, r2 = 0.0, 0.0, 0.0
        q_hat = 1.0
    else:
        slope, intercept, r2 = line_fit(ks, np.log(devs))
        q_hat = math.exp(slope)
    decaying = bool((not flat) and q_hat < 1.0 and r2 >= cfg.r2_threshold)
    metrics = {
        "k": ks,
        "deviation": devs,
        "bootstrap_lo": lows,
        "bootstrap_hi": highs,
        "pairs_used": pairs,
        "slope": slope,
        "intercept": intercept,
        "r2": r2,
        "q_hat": q_hat,
        "decaying": decaying,
        "n": cfg.harnack_n,
        "m": cfg.harnack_m,
        "floor": cfg.count_floor,
    }
    wall = time.perf_counter() - t0
    result = ExperimentResult(
        kind="harnack", config=cfg.as_dict(), metrics=metrics, seed=cfg.seed,
        wall_clock_s=wall,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        result.files.append(_write_csv(
            out / "harnack_decay.csv",
            ["k", "deviation", "bootstrap_lo", "bootstrap_hi", "pairs_used"],
            list(zip(ks, devs, lows, highs, pairs)),
        ))
        if cfg.plots:
            fit = None if flat else (slope, intercept)
            result.files.append(Path(plots.plot_decay(
                ks, devs, lows, highs, fit, out / "harnack_decay.svg",
                "max conditional-ratio deviation",
            )).name)
        result.save(out)
    return result


def run_delta_decay(cfg: ExperimentConfig, out_dir=None, table=None) -> ExperimentResult:
    """Oscillations Delta_j^k at the root and below each generation-1 cell."""
    t0 = time.perf_counter()
    if table is None:
        table = _campaign(cfg)
    if cfg.delta_j + cfg.k_max > table.depth:
        raise ParameterError(
            f"oscillation scan needs j + k_max <= depth, got "
            f"{cfg.delta_j}+{cfg.k_max} > {table.depth}"
        )
    ks = list(range(1, cfg.k_max + 1))
    root = []
    for k in ks:
        root.append(delta_jk(table, "", cfg.delta_j, k, floor=cfg.count_floor).delta)
    per_base = {}
    for code in range(4):
        word = CylinderAddress.from_code(code, 1).word
        vals = []
        for k in ks:
            if 1 + cfg.delta_j + k > table.depth:
                vals.append(None)
                continue
            try:
                vals.append(
                    delta_jk(table, word, cfg.delta_j, k, floor=cfg.count_floor).delta
                )
            except InsufficientCounts:
                vals.append(None)
        per_base[word] = vals
    decreasing = all(root[i + 1] < root[i] for i in range(len(root) - 1))
    metrics = {
        "j": cfg.delta_j,
        "k": ks,
        "delta_root": root,
        "delta_per_base": per_base,
        "decreasing_root": bool(decreasing),
        "floor": cfg.count_floor,
    }
    wall = time.perf_counter() - t0
    result = ExperimentResult(
        kind="delta", config=cfg.as_dict(), metrics=metrics, seed=cfg.seed,
        wall_clock_s=wall,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        rows = [[k, root[i]] + [per_base[w][i] for w in sorted(per_base)]
                for i, k in enumerate(ks)]
        result.files.append(_write_csv(
            out / "delta_decay.csv",
            ["k", "delta_root"] + [f"delta_{w}" for w in sorted(per_base)],
            rows,
        ))
        if cfg.plots:
            result.files.append(Path(plots.plot_decay(
                ks, root, None, None, None, out / "delta_decay.svg",
                "entropy oscillation",
            )).name)
        result.save(out)
    return result


# -- oracle comparison -----------------------------------------------------------


def run_oracle_compare(cfg: ExperimentConfig, out_dir=None) -> ExperimentResult:
    """Sphere-walk engine against the lattice oracle, cell by cell."""
    t0 = time.perf_counter()
    seq = cfg.sequence()
    depth = cfg.oracle_depth
    wos_table = run_campaign(
        seq, cfg.wos_params(depth), cfg.walkers, cfg.seed,
        workers=cfg.workers, batch_size=cfg.batch_size,
    )
    oracle_table = grid_harmonic_measure(
        seq, cfg.oracle_params(), cfg.oracle_walkers, cfg.seed + 1,
    )
    pw = wos_table.counts / wos_table.n_effective
    po = oracle_table.counts / oracle_table.n_effective
    # joint z threshold: two-sided 99 percent over all cells (Bonferroni)
    from scipy.stats import norm

    z = float(norm.ppf(1.0 - 0.01 / (2 * pw.size)))
    se = np.sqrt(
        pw * (1 - pw) / wos_table.n_effective + po * (1 - po) / oracle_table.n_effective
    )
    outside = np.abs(pw - po) > z * se
    cells = []
    for code in range(pw.size):
        word = CylinderAddress.from_code(code, depth).word
        cells.append(
            {
                "address": word,
                "p_wos": float(pw[code]),
                "p_oracle": float(po[code]),
                "abs_diff": float(abs(pw[code] - po[code])),
                "combined_se": float(se[code]),
                "outside_joint_ci": bool(outside[code]),
            }
        )
    metrics = {
        "depth": depth,
        "max_abs_diff": float(np.abs(pw - po).max()),
        "joint_z": z,
        "cells_outside_ci": int(outside.sum()),
        "cells": cells,
        "wos_n_effective": wos_table.n_effective,
        "oracle_n_effective": oracle_table.n_effective,
    }
    wall = time.perf_counter() - t0
    result = ExperimentResult(
        kind="oracle_compare", config=cfg.as_dict(), metrics=metrics, seed=cfg.seed,
        wall_clock_s=wall,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for tbl, stem in ((wos_table, "oracle_compare_wos"), (oracle_table, "oracle_compare_grid")):
            csv_path, json_path = tbl.save(out / stem)
            result.files += [Path(csv_path).name, Path(json_path).name]
        result.files.append(_write_csv(
            out / "oracle_compare_cells.csv",
            ["address", "p_wos", "p_oracle", "abs_diff", "combined_se",
             "outside_joint_ci"],
            [[c["address"], c["p_wos"], c["p_oracle"], c["abs_diff"],
              c["combined_se"], c["outside_joint_ci"]] for c in cells],
        ))
        if cfg.plots:
            words = [c["address"] for c in cells]
            err_w = 1.96 * np.sqrt(pw * (1 - pw) / wos_table.n_effective)
            err_o = 1.96 * np.sqrt(po * (1 - po) / oracle_table.n_effective)
            result.files.append(Path(plots.plot_oracle_cells(
                words, [c["p_wos"] for c in cells], [c["p_oracle"] for c in cells],
                err_w.tolist(), err_o.tolist(),
                out / "oracle_compare_cells.svg",
            )).name)
        result.save(out)
    return result
