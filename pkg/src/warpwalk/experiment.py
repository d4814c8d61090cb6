"""Drive one configured experiment and write its observable files."""
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    ObservableSeries,
    dft_momenta,
    entropy,
    expected_y,
    extract_fpd,
    fpd_from_column,
    marginal_with_up_share,
    mode_decompose,
)
from .config import ExperimentConfig, LocalizedInit
from .eigenmodes import ModeIndex, build_basis, eigenmode_profile
from .evolution import FrontTracker, WalkEngine, step
from .geometry import WarpGeometry
from .lattice import CoinState, build_grid, localized_state, plane_wave_mode_state

__all__ = ["format_value", "write_series", "run_experiment", "run_single", "uses_front_engine"]

SCHEMAS = {
    "entropy": ("t", "entropy"),
    "marginal": ("t", "y", "probability", "up_share"),
    "expected_y": ("t", "y_right", "y_left", "weight_right", "weight_left"),
    "modes": ("t", "n", "branch", "B"),
}


def format_value(v) -> str:
    """Shortest round-trip decimal for floats; plain text otherwise."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_series(series: ObservableSeries, path) -> None:
    if len(series) == 0:
        raise ValueError("refusing to write an empty series")
    lines = [",".join(series.columns)]
    lines.extend(",".join(format_value(x) for x in row) for row in series.rows())
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def uses_front_engine(cfg: ExperimentConfig) -> bool:
    if cfg.engine != "auto":
        return cfg.engine == "fronts"
    if not isinstance(cfg.initial, LocalizedInit) or cfg.initial.x_halfwidth:
        return False
    if any(o in cfg.observables for o in ("marginal", "entropy")):
        return False
    return not ("modes" in cfg.observables and cfg.mode_target == "field")


def _kl_tag(kL: float) -> str:
    return "kL" + format(kL, "g")


def _initial_field(cfg: ExperimentConfig, geom: WarpGeometry):
    ini = cfg.initial
    grid = build_grid(cfg.L, cfg.n_y, ini.x_halfwidth)
    if isinstance(ini, LocalizedInit):
        c0 = CoinState(*ini.coin)
        return grid, localized_state(grid, ini.y0, c0, mirror_eta=ini.mirror_eta)
    prof = eigenmode_profile(geom, grid, ModeIndex(ini.n, ini.branch, ini.eta), ini.q)
    return grid, plane_wave_mode_state(grid, prof)


def _mode_rows(dec):
    rows = []
    per_n = {}
    for (n, branch), val in sorted(dec.B.items(), key=lambda kv: (kv[0][0], -kv[0][1])):
        rows.append((n, "+" if branch > 0 else "-", val))
        per_n[n] = per_n.get(n, 0.0) + val
    rows.extend((n, "sum", v) for n, v in sorted(per_n.items()))
    return rows


def run_single(cfg: ExperimentConfig, kL: float, outdir) -> list:
    """Run one ``kL`` value of a sweep; returns the written file names."""
    outdir = Path(outdir)
    geom = WarpGeometry.from_kL(kL, cfg.L)
    grid, field = _initial_field(cfg, geom)
    eta = cfg.initial.eta if not isinstance(cfg.initial, LocalizedInit) else (cfg.initial.mirror_eta or 1)
    engine = WalkEngine(geom, grid, eta=eta)
    eps = grid.epsilon
    n_steps = cfg.n_steps
    obs = set(cfg.observables)
    sample = set(range(0, n_steps + 1, cfg.sample_stride))
    if cfg.mode_times is not None:
        mode_steps = {int(round(t / eps)) for t in cfg.mode_times}
        if max(mode_steps) > n_steps:
            raise ValueError("modes.times extends past the end of the run")
    else:
        mode_steps = sample
    series = {name: ObservableSeries(SCHEMAS[name]) for name in obs if name != "modes"}
    mode_series = {}
    front_bases = None

    def fronts_bases():
        nonlocal front_bases
        if front_bases is None:
            front_bases = [build_basis(geom, grid, q, cfg.basis_eta) for q in dft_momenta(cfg.n_q, eps)]
        return front_bases

    field_bases = {}

    def record(j, slices, fld):
        t = eps * j
        if j in sample:
            if "entropy" in obs:
                series["entropy"].append(t, [(entropy(fld),)])
            if "marginal" in obs:
                cols = None
                if cfg.marginal_interior:
                    hw = cfg.initial.x_halfwidth
                    cols = (-hw + j, hw - j)
                    if cols[0] > cols[1]:
                        raise ValueError("marginal.interior: no x site is free of window-edge influence")
                p, share = marginal_with_up_share(fld, cols)
                series["marginal"].append(t, list(zip(grid.y_values.tolist(), p.tolist(), share.tolist())))
            if "expected_y" in obs and j >= 1:
                vals = []
                for s in slices:
                    vals.append(expected_y(s) if s.weight > 0 else float("nan"))
                series["expected_y"].append(t, [(vals[0], vals[1], slices[0].weight, slices[1].weight)])
        if "modes" in obs and j in mode_steps and j >= 1:
            if cfg.mode_target == "fronts":
                for s in slices:
                    dec = mode_decompose(s, fronts_bases())
                    mode_series.setdefault(s.side, ObservableSeries(SCHEMAS["modes"])).append(t, _mode_rows(dec))
            else:
                n_x = fld.n_x
                if n_x not in field_bases:
                    field_bases.clear()
                    field_bases[n_x] = [build_basis(geom, grid, q, cfg.basis_eta) for q in dft_momenta(n_x, eps)]
                dec = mode_decompose(fld, field_bases[n_x])
                mode_series.setdefault("field", ObservableSeries(SCHEMAS["modes"])).append(t, _mode_rows(dec))

    if uses_front_engine(cfg):
        tracker = FrontTracker(engine, field)
        for j in range(1, n_steps + 1):
            tracker.advance()
            if j in sample or j in mode_steps:
                slices = [fpd_from_column(tracker.front(side), side, j, grid) for side in ("right", "left")]
                record(j, slices, None)
    else:
        for j in range(0, n_steps + 1):
            if j > 0:
                field = step(engine, field)
            if j in sample or j in mode_steps:
                slices = [extract_fpd(field, side) for side in ("right", "left")] if j >= 1 else []
                record(j, slices, field)

    written = []
    tag = _kl_tag(kL)
    for name, s in sorted(series.items()):
        if len(s):
            fname = f"{name}_{tag}.csv"
            write_series(s, outdir / fname)
            written.append(fname)
    for side, s in sorted(mode_series.items()):
        fname = f"modes_{side}_{tag}.csv"
        write_series(s, outdir / fname)
        written.append(fname)
    return written


def _run_single_star(args):
    return run_single(*args)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1, label: str | None = None) -> list:
    """Run every ``kL`` of the sweep; write files plus ``manifest.json``.

    ``jobs > 1`` runs sweep members in separate processes.  Output bytes do
    not depend on ``jobs``.
    """
    outdir = Path(cfg.output_path)
    outdir.mkdir(parents=True, exist_ok=True)
    tasks = [(cfg, kL, outdir) for kL in cfg.kL]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            results = list(pool.map(_run_single_star, tasks))
    else:
        results = [run_single(*t) for t in tasks]
    files = [f for group in results for f in group]
    manifest = {
        "tool": "warpwalk",
        "version": __version__,
        "numpy": np.__version__,
        "label": label,
        # the output directory is left out so that a rerun elsewhere is byte-identical
        "config": {k: v for k, v in cfg.to_dict().items() if k != "output_path"},
        "steps": cfg.n_steps,
        "epsilon": cfg.epsilon,
        "engine": "fronts" if uses_front_engine(cfg) else "full",
        "files": {f: hashlib.sha256((outdir / f).read_bytes()).hexdigest() for f in files},
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return [str(outdir / f) for f in files] + [str(outdir / "manifest.json")]

