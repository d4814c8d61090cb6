"""Command line interface: ``warpwalk {evolve,entropy,decompose,modes,preset}``."""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

from . import __version__
from .config import ConfigError, ExperimentConfig, parse_config, tomllib, validate
from .eigenmodes import ModeIndex, ModeUndefinedError, eigenmode_profile, mode_energy
from .experiment import format_value, run_experiment
from .geometry import WarpGeometry
from .lattice import build_grid

PRESET_PACKAGE = "warpwalk.presets"


def list_presets() -> list[str]:
    files = resources.files(PRESET_PACKAGE).iterdir()
    return sorted(p.name[:-5] for p in files if p.name.endswith(".toml"))


def preset_text(name: str) -> str:
    path = resources.files(PRESET_PACKAGE) / f"{name}.toml"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return path.read_text(encoding="utf-8")


def _add_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kl", type=float, nargs="+", help="kL value(s); overrides the config sweep")
    p.add_argument("--ny", type=int, help="number of y sites")
    p.add_argument("--steps", type=int, help="number of time steps")
    p.add_argument("--t-max", type=float, help="final time in units of L (instead of --steps)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="processes for a kL sweep (output is identical for any value)")


def _apply_overrides(cfg: ExperimentConfig, args, force_observables=None) -> ExperimentConfig:
    kw = {}
    if args.kl:
        kw["kL"] = tuple(args.kl)
    if args.ny is not None:
        kw["n_y"] = args.ny
    if args.out is not None:
        kw["output_path"] = args.out
    if args.steps is not None:
        kw.update(steps=args.steps, t_max=None)
    if args.t_max is not None:
        kw.update(t_max=args.t_max, steps=None)
    if force_observables:
        kw["observables"] = force_observables
    return validate(replace(cfg, **kw))


def _load(args) -> ExperimentConfig:
    if args.config:
        text = Path(args.config).read_text(encoding="utf-8")
    else:
        text = ""
    try:
        return parse_config(text)
    except ConfigError as exc:
        if args.config or "steps or t_max" not in str(exc):
            raise
    # no config file: defaults plus whatever the flags give
    cfg = ExperimentConfig(t_max=0.0)
    if args.steps is None and args.t_max is None:
        raise ConfigError("give a config file or one of --steps/--t-max")
    return cfg


def _run(cfg: ExperimentConfig, jobs: int, label=None) -> int:
    files = run_experiment(cfg, jobs=jobs, label=label)
    for f in files:
        print(f)
    return 0


def write_profiles(kLs, n_y, q, ns, branch, eta, out, L=1.0) -> list[str]:
    """Sampled stationary states and their energies, one file pair per kL."""
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for kL in kLs:
        geom = WarpGeometry.from_kL(kL, L)
        grid = build_grid(L, n_y)
        profile_rows, spectrum_rows = [], []
        for n in ns:
            try:
                p = eigenmode_profile(geom, grid, ModeIndex(n, branch, eta), q)
            except ModeUndefinedError as exc:
                print(f"skipping n={n}: {exc}", file=sys.stderr)
                continue
            spectrum_rows.append((n, branch, p.energy, mode_energy(geom, n, q, branch, eta)[1]))
            for y, u, d in zip(grid.y_values.tolist(), p.samples[0].tolist(), p.samples[1].tolist()):
                profile_rows.append((y, n, branch, u.real, u.imag, d.real, d.imag, abs(u) ** 2 + abs(d) ** 2))
        tag = "kL" + format(kL, "g")
        for fname, header, rows in (
            (f"profiles_{tag}.csv", PROFILE_COLUMNS, profile_rows),
            (f"spectrum_{tag}.csv", ("n", "branch", "E", "alpha"), spectrum_rows),
        ):
            _write_rows(outdir / fname, header, rows)
            written.append(str(outdir / fname))
    manifest = {
        "tool": "warpwalk",
        "version": __version__,
        "command": "modes",
        "config": {"kL": list(kLs), "L": L, "n_y": n_y, "q": q, "n": list(ns), "branch": branch, "eta": eta},
        "files": {Path(f).name: hashlib.sha256(Path(f).read_bytes()).hexdigest() for f in written},
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return written + [str(outdir / "manifest.json")]


PROFILE_COLUMNS = ("y", "n", "branch", "up_re", "up_im", "down_re", "down_im", "probability")


def _write_rows(path: Path, header, rows) -> None:
    lines = [",".join(header)] + [",".join(format_value(x) for x in r) for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _profiles_from_preset(doc: dict, args) -> int:
    allowed = {"kL", "n_y", "q", "n", "branch", "eta", "output", "L"}
    table = doc["profiles"]
    unknown = sorted(set(table) - allowed)
    if unknown or set(doc) - {"profiles"}:
        raise ConfigError(f"unknown key(s) in profiles preset: {', '.join(unknown + sorted(set(doc) - {'profiles'}))}")
    kLs = args.kl or table.get("kL", [3.0])
    kLs = kLs if isinstance(kLs, list) else [kLs]
    ny = args.ny or table.get("n_y", 100)
    if ny % 2:
        raise ConfigError(f"n_y must be even (got {ny})")
    files = write_profiles(
        [float(k) for k in kLs], ny, float(table.get("q", 10.0)), list(table.get("n", [0, 1, 2, 3])),
        int(table.get("branch", 1)), int(table.get("eta", 1)), args.out or table.get("output", "out/profiles"),
        float(table.get("L", 1.0)),
    )
    for f in files:
        print(f)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="warpwalk", description=__doc__)
    ap.add_argument("--version", action="version", version=f"warpwalk {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("evolve", "run a configured experiment"),
        ("entropy", "run a configured experiment recording only the coin entropy"),
        ("decompose", "run a configured experiment recording only mode weights B_n"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", nargs="?", help="TOML experiment file")
        _add_overrides(p)

    p = sub.add_parser("modes", help="write sampled stationary states and their energies")
    p.add_argument("--kl", type=float, nargs="+", default=[3.0])
    p.add_argument("--ny", type=int, default=100)
    p.add_argument("--q", type=float, default=10.0)
    p.add_argument("--n", type=int, nargs="+", default=[0, 1, 2, 3])
    p.add_argument("--branch", type=int, choices=(1, -1), default=1)
    p.add_argument("--eta", type=int, choices=(1, -1), default=1)
    p.add_argument("--out", default="out/modes")

    p = sub.add_parser("preset", help="run a packaged figure preset")
    p.add_argument("figure", nargs="?", help="preset id, e.g. fig4")
    p.add_argument("--list", action="store_true", help="list preset ids")
    p.add_argument("--show", action="store_true", help="print the preset file instead of running it")
    _add_overrides(p)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("evolve", "entropy", "decompose"):
            force = {"entropy": ("entropy",), "decompose": ("modes",)}.get(args.command)
            cfg = _apply_overrides(_load(args), args, force)
            return _run(cfg, args.jobs)
        if args.command == "modes":
            if args.ny % 2:
                raise ConfigError(f"n_y must be even (got {args.ny})")
            for f in write_profiles(args.kl, args.ny, args.q, args.n, args.branch, args.eta, args.out):
                print(f)
            return 0
        if args.command == "preset":
            if args.list or not args.figure:
                print("\n".join(list_presets()))
                return 0
            text = preset_text(args.figure)
            if args.show:
                print(text, end="")
                return 0
            doc = tomllib.loads(text)
            if "profiles" in doc:
                return _profiles_from_preset(doc, args)
            cfg = _apply_overrides(parse_config(text), args)
            return _run(cfg, args.jobs, label=args.figure)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
