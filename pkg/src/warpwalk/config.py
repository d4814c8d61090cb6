"""Experiment configuration: a TOML document validated fail-closed.

Grammar (all keys optional unless noted; unknown keys are errors)::

    kL = 3.0                 # number or list of numbers (a sweep)
    L = 1.0
    n_y = 100                # even, >= 4
    steps = 500              # or t_max = 10.0 (time in units of L); not both
    sample_stride = 1        # observe every this many steps
    observables = ["expected_y"]   # subset of marginal, expected_y, modes, entropy
    engine = "auto"          # auto | full | fronts
    output = "out/run"       # directory for the output files

    [initial]
    kind = "localized"       # or "mode"
    y0 = 0.5                 # localized: lattice coordinate of the start
    coin = ["1", "1i"]       # localized: coin amplitudes, normalized on load
    mirror_eta = 1           # localized, optional: add the orbifold image
    n = 2                    # mode: quantum number
    branch = 1               # mode: +1 or -1
    eta = 1                  # mode: parity sector
    q = 10.0                 # mode: x momentum
    x_halfwidth = 0          # initial x half-extent of the window

    [marginal]
    interior = false         # average only over x sites the window edges
                             # cannot have influenced yet

    [modes]
    times = [50.0, 1000.0]   # sample times; default: every sample_stride
    target = "fronts"        # fronts | field
    n_q = 64                 # momentum points for front slices
    eta = 1                  # parity sector of the basis

Complex numbers are strings accepted by Python's ``complex`` with ``i``
allowed for the imaginary unit (``"1"``, ``"2i"``, ``"0.5-0.5i"``).
"""
from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field, replace

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

__all__ = [
    "ConfigError",
    "LocalizedInit",
    "ModeInit",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "OBSERVABLES",
]

OBSERVABLES = ("marginal", "expected_y", "modes", "entropy")
ENGINES = ("auto", "full", "fronts")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class LocalizedInit:
    y0: float = 0.5
    coin: tuple = (complex(2 ** -0.5), complex(0, 2 ** -0.5))
    mirror_eta: int | None = None
    x_halfwidth: int = 0
    kind: str = "localized"


@dataclass(frozen=True)
class ModeInit:
    n: int = 2
    branch: int = 1
    eta: int = 1
    q: float = 10.0
    x_halfwidth: int = 0
    kind: str = "mode"


@dataclass(frozen=True)
class ExperimentConfig:
    kL: tuple = (3.0,)
    L: float = 1.0
    n_y: int = 100
    steps: int | None = None
    t_max: float | None = None
    sample_stride: int = 1
    observables: tuple = ("expected_y",)
    engine: str = "auto"
    output_path: str = "out"
    initial: LocalizedInit | ModeInit = field(default_factory=LocalizedInit)
    marginal_interior: bool = False
    mode_times: tuple | None = None
    mode_target: str = "fronts"
    n_q: int = 64
    basis_eta: int = 1

    @property
    def epsilon(self) -> float:
        return 2.0 * self.L / self.n_y

    @property
    def n_steps(self) -> int:
        if self.steps is not None:
            return self.steps
        return int(round(self.t_max / self.epsilon))

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        if "steps" in kw:
            kw["t_max"] = None
        return validate(replace(self, **kw))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["initial"] = {k: _plain(v) for k, v in d["initial"].items()}
        return {k: _plain(v) for k, v in d.items()}


def _plain(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (tuple, list)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    return v


def _complex(text, key):
    if isinstance(text, (int, float)):
        return complex(text)
    if not isinstance(text, str):
        raise ConfigError(f"{key}: expected a complex number string, got {text!r}")
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"{key}: cannot parse complex number {text!r}") from None


def _take(table: dict, allowed: dict, where: str) -> dict:
    unknown = sorted(set(table) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")
    out = {}
    for key, typ in allowed.items():
        if key not in table:
            continue
        v = table[key]
        if typ is float and isinstance(v, int) and not isinstance(v, bool):
            v = float(v)
        if typ is not None and (not isinstance(v, typ) or (isinstance(v, bool) and typ is not bool)):
            raise ConfigError(f"{where}.{key}: expected {typ.__name__}, got {type(v).__name__}")
        out[key] = v
    return out


_TOP = {
    "kL": None, "L": float, "n_y": int, "steps": int, "t_max": float,
    "sample_stride": int, "observables": list, "engine": str, "output": str,
    "initial": dict, "marginal": dict, "modes": dict,
}
_INITIAL = {
    "kind": str, "y0": float, "coin": list, "mirror_eta": int,
    "n": int, "branch": int, "eta": int, "q": float, "x_halfwidth": int,
}
_LOCALIZED_KEYS = {"kind", "y0", "coin", "mirror_eta", "x_halfwidth"}
_MODE_KEYS = {"kind", "n", "branch", "eta", "q", "x_halfwidth"}


def parse_config(source: str) -> ExperimentConfig:
    """Parse and validate a TOML experiment document."""
    try:
        doc = tomllib.loads(source)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    top = _take(doc, _TOP, "config")
    kw = {}
    if "kL" in top:
        v = top["kL"]
        vals = v if isinstance(v, list) else [v]
        if not vals or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in vals):
            raise ConfigError("kL: expected a number or a non-empty list of numbers")
        kw["kL"] = tuple(float(x) for x in vals)
    for key in ("L", "n_y", "steps", "t_max", "sample_stride", "engine"):
        if key in top:
            kw[key] = top[key]
    if "output" in top:
        kw["output_path"] = top["output"]
    if "observables" in top:
        kw["observables"] = tuple(top["observables"])
    if "initial" in top:
        ini = _take(top["initial"], _INITIAL, "initial")
        kind = ini.get("kind", "localized")
        if kind == "localized":
            bad = sorted(set(ini) - _LOCALIZED_KEYS)
            if bad:
                raise ConfigError(f"initial: key(s) {', '.join(bad)} do not apply to kind 'localized'")
            args = {k: ini[k] for k in ("y0", "mirror_eta", "x_halfwidth") if k in ini}
            if "coin" in ini:
                if len(ini["coin"]) != 2:
                    raise ConfigError("initial.coin: expected two amplitudes [up, down]")
                up, down = (_complex(x, "initial.coin") for x in ini["coin"])
                norm = (abs(up) ** 2 + abs(down) ** 2) ** 0.5
                if norm == 0:
                    raise ConfigError("initial.coin: coin state cannot be zero")
                args["coin"] = (up / norm, down / norm)
            kw["initial"] = LocalizedInit(**args)
        elif kind == "mode":
            bad = sorted(set(ini) - _MODE_KEYS)
            if bad:
                raise ConfigError(f"initial: key(s) {', '.join(bad)} do not apply to kind 'mode'")
            kw["initial"] = ModeInit(**{k: v for k, v in ini.items() if k != "kind"})
        else:
            raise ConfigError(f"initial.kind must be 'localized' or 'mode', got {kind!r}")
    if "marginal" in top:
        m = _take(top["marginal"], {"interior": bool}, "marginal")
        if "interior" in m:
            kw["marginal_interior"] = m["interior"]
    if "modes" in top:
        m = _take(top["modes"], {"times": list, "target": str, "n_q": int, "eta": int}, "modes")
        if "times" in m:
            if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in m["times"]):
                raise ConfigError("modes.times: expected a list of numbers")
            kw["mode_times"] = tuple(float(x) for x in m["times"])
        if "target" in m:
            kw["mode_target"] = m["target"]
        if "n_q" in m:
            kw["n_q"] = m["n_q"]
        if "eta" in m:
            kw["basis_eta"] = m["eta"]
    return validate(ExperimentConfig(**kw))


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.n_y % 2 != 0:
        raise ConfigError(f"n_y must be even (got {cfg.n_y})")
    if cfg.n_y < 4:
        raise ConfigError(f"n_y must be at least 4 (got {cfg.n_y})")
    if not cfg.L > 0:
        raise ConfigError("L must be > 0")
    if any(k < 0 for k in cfg.kL):
        raise ConfigError("kL must be >= 0")
    if cfg.steps is not None and cfg.t_max is not None:
        raise ConfigError("give either steps or t_max, not both")
    if cfg.steps is None and cfg.t_max is None:
        raise ConfigError("one of steps or t_max is required")
    if cfg.steps is not None and cfg.steps < 0:
        raise ConfigError("steps must be >= 0")
    if cfg.t_max is not None and cfg.t_max < 0:
        raise ConfigError("t_max must be >= 0")
    if cfg.sample_stride < 1:
        raise ConfigError("sample_stride must be >= 1")
    bad = [o for o in cfg.observables if o not in OBSERVABLES]
    if bad or not cfg.observables:
        raise ConfigError(f"observables must be a non-empty subset of {OBSERVABLES}; bad: {bad}")
    if len(set(cfg.observables)) != len(cfg.observables):
        raise ConfigError("observables must not repeat")
    if cfg.engine not in ENGINES:
        raise ConfigError(f"engine must be one of {ENGINES}")
    if cfg.mode_target not in ("fronts", "field"):
        raise ConfigError("modes.target must be 'fronts' or 'field'")
    if cfg.n_q < 1:
        raise ConfigError("modes.n_q must be >= 1")
    if cfg.basis_eta not in (1, -1):
        raise ConfigError("modes.eta must be +1 or -1")
    ini = cfg.initial
    if ini.x_halfwidth < 0:
        raise ConfigError("initial.x_halfwidth must be >= 0")
    eps = cfg.epsilon
    if isinstance(ini, LocalizedInit):
        u = ini.y0 / eps
        if abs(u - round(u)) > 1e-9:
            raise ConfigError(
                f"initial.y0={ini.y0} is off the lattice for n_y={cfg.n_y} (eps={eps}); "
                f"snap it to a site such as {round(u) * eps:g}"
            )
        if abs(ini.y0) > cfg.L:
            raise ConfigError("initial.y0 must lie in [-L, L]")
        if ini.mirror_eta not in (None, 1, -1):
            raise ConfigError("initial.mirror_eta must be +1 or -1")
    else:
        if ini.n < 0:
            raise ConfigError("initial.n must be >= 0")
        if ini.branch not in (1, -1) or ini.eta not in (1, -1):
            raise ConfigError("initial.branch and initial.eta must be +1 or -1")
        import math
        if not (-math.pi / eps < ini.q <= math.pi / eps):
            raise ConfigError(f"initial.q={ini.q} lies outside the Brillouin zone for eps={eps}")
    needs_full = any(o in cfg.observables for o in ("marginal", "entropy")) or (
        "modes" in cfg.observables and cfg.mode_target == "field"
    ) or isinstance(ini, ModeInit) or ini.x_halfwidth > 0
    if cfg.engine == "fronts" and needs_full:
        raise ConfigError(
            "engine 'fronts' only supports expected_y and modes on front slices from a localized start"
        )
    if "modes" in cfg.observables and cfg.mode_target == "fronts" and isinstance(ini, ModeInit):
        raise ConfigError("modes.target 'fronts' needs a localized start")
    return cfg
