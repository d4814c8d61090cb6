"""One-step walk operator as an explicit six-term recurrence.

Coordinates follow the convention in which the up component travels
toward ``+x`` and the down component toward ``-x``.  With ``y = eps*s``,
``h = eps/2``, ``U``/``D`` the old up/down amplitudes and ``theta`` the
local coin angle (``cos theta = c``, ``sin theta = s``), one step reads::

    U'(r,s) = -(i/2) e^{i theta(y)} [s(y+h) + s(y-h)] U(r-1,s)
              + (1/2) [s(y+h) - s(y-h)] D(r+1,s)
              + (1/2) f(y) f(y+eps) c(y+h) U(r-1,s+1)
              + (1/2) f(y) f(y-eps) c(y-h) U(r-1,s-1)
              - (i/2) f(y) f*(y+eps) c(y+h) D(r+1,s+1)
              + (i/2) f(y) f*(y-eps) c(y-h) D(r+1,s-1)

    D'(r,s) = +(i/2) e^{-i theta(y)} [s(y+h) + s(y-h)] D(r+1,s)
              + (1/2) [s(y+h) - s(y-h)] U(r-1,s)
              + (1/2) f*(y) f*(y+eps) c(y+h) D(r+1,s+1)
              + (1/2) f*(y) f*(y-eps) c(y-h) D(r+1,s-1)
              + (i/2) f*(y) f(y+eps) c(y+h) U(r-1,s+1)
              - (i/2) f*(y) f(y-eps) c(y-h) U(r-1,s-1)

y neighbours wrap periodically.  This is the expanded form of
``r^-1 theta S_y(h) theta^dagger S_y(h) r S_x(eps)`` (see
:func:`warpwalk.geometry.local_coins`), hence exactly unitary.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .geometry import WarpGeometry, coin_profiles
from .lattice import Grid, SpinorField

__all__ = [
    "COEFFICIENT_NAMES",
    "WindowOverflowError",
    "recurrence_coefficients",
    "WalkEngine",
    "step",
    "run",
    "step_high_kl_limit",
    "FrontTracker",
]

# u*/d* = target component; second letter = source component;
# 0 / p / m = source at s, s+1, s-1.
COEFFICIENT_NAMES = (
    "uu0", "ud0", "uup", "uum", "udp", "udm",
    "dd0", "du0", "ddp", "ddm", "dup", "dum",
)


class WindowOverflowError(RuntimeError):
    """The field would grow past the engine's maximum x half-width."""


def recurrence_coefficients(geom: WarpGeometry, y, eps: float) -> dict:
    """The twelve recurrence prefactors at coordinate(s) ``y``.

    Half-integer arguments ``y +- eps/2`` are evaluated from the analytic
    profiles, never interpolated.
    """
    y = np.asarray(y, dtype=float)
    h = 0.5 * eps
    c0, s0, f0 = coin_profiles(geom, y)
    cp, sp, _ = coin_profiles(geom, y + h)
    cm, sm, _ = coin_profiles(geom, y - h)
    _, _, fp = coin_profiles(geom, y + eps)
    _, _, fm = coin_profiles(geom, y - eps)
    e_plus = c0 + 1j * s0
    ssum = sp + sm
    sdiff = sp - sm
    f0c, fpc, fmc = np.conj(f0), np.conj(fp), np.conj(fm)
    return {
        "uu0": -0.5j * e_plus * ssum,
        "ud0": 0.5 * sdiff + 0j,
        "uup": 0.5 * f0 * fp * cp,
        "uum": 0.5 * f0 * fm * cm,
        "udp": -0.5j * f0 * fpc * cp,
        "udm": 0.5j * f0 * fmc * cm,
        "dd0": 0.5j * np.conj(e_plus) * ssum,
        "du0": 0.5 * sdiff + 0j,
        "ddp": 0.5 * f0c * fpc * cp,
        "ddm": 0.5 * f0c * fmc * cm,
        "dup": 0.5j * f0c * fp * cp,
        "dum": -0.5j * f0c * fm * cm,
    }


@dataclass(frozen=True)
class WalkEngine:
    """Cached per-site recurrence coefficients for one geometry and grid.

    ``eta`` records the parity sector the caller intends to evolve in; it
    does not enter the dynamics.  ``max_halfwidth`` bounds x growth.
    """

    geometry: WarpGeometry
    grid: Grid
    eta: int = 1
    max_halfwidth: int | None = None
    coeffs: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.eta not in (1, -1):
            raise ValueError("eta must be +1 or -1")
        if abs(self.grid.L - self.geometry.L) > 1e-15 * self.geometry.L:
            raise ValueError("grid and geometry disagree on L")
        raw = recurrence_coefficients(self.geometry, self.grid.y_values, self.grid.epsilon)
        frozen = {}
        for name in COEFFICIENT_NAMES:
            a = np.ascontiguousarray(raw[name], dtype=complex)
            a.setflags(write=False)
            frozen[name] = a
        object.__setattr__(self, "coeffs", frozen)


def _sources(field: SpinorField, periodic: bool):
    """Up amplitudes from ``r-1`` and down amplitudes from ``r+1``, on the new window."""
    up, down = field.psi[0], field.psi[1]
    if periodic:
        return np.roll(up, 1, axis=0), np.roll(down, -1, axis=0), field.r_min
    n_x, n_y = up.shape
    us = np.zeros((n_x + 2, n_y), dtype=complex)
    ds = np.zeros((n_x + 2, n_y), dtype=complex)
    us[2:] = up
    ds[:n_x] = down
    return us, ds, field.r_min - 1


def _check_window(engine: WalkEngine, r_min: int, n_x: int):
    if engine.max_halfwidth is None or engine.grid.x_periodic:
        return
    if max(-r_min, r_min + n_x - 1) > engine.max_halfwidth:
        raise WindowOverflowError(
            f"x window would exceed half-width {engine.max_halfwidth}; grow the grid first"
        )


def step(engine: WalkEngine, field: SpinorField) -> SpinorField:
    """Advance ``field`` by one time step; the input is not modified."""
    if field.grid.n_y != engine.grid.n_y:
        raise ValueError("field and engine grids differ")
    periodic = engine.grid.x_periodic
    us, ds, r_min = _sources(field, periodic)
    _check_window(engine, r_min, us.shape[0])
    k = engine.coeffs
    us_p = np.roll(us, -1, axis=1)  # value from s+1
    us_m = np.roll(us, 1, axis=1)  # value from s-1
    ds_p = np.roll(ds, -1, axis=1)
    ds_m = np.roll(ds, 1, axis=1)
    new = np.empty((2,) + us.shape, dtype=complex)
    new[0] = (k["uu0"] * us + k["ud0"] * ds + k["uup"] * us_p
              + k["uum"] * us_m + k["udp"] * ds_p + k["udm"] * ds_m)
    new[1] = (k["dd0"] * ds + k["du0"] * us + k["ddp"] * ds_p
              + k["ddm"] * ds_m + k["dup"] * us_p + k["dum"] * us_m)
    return SpinorField(field.grid, new, r_min, field.step_index + 1, dict(field.meta))


def step_high_kl_limit(field: SpinorField, engine: WalkEngine | None = None) -> SpinorField:
    """Leading-order step for ``kL -> infinity``: pure opposite x shifts.

    Up moves one site toward ``+x``, down one site toward ``-x``; y is
    untouched.
    """
    periodic = field.grid.x_periodic
    us, ds, r_min = _sources(field, periodic)
    if engine is not None:
        _check_window(engine, r_min, us.shape[0])
    return SpinorField(field.grid, np.stack([us, ds]), r_min, field.step_index + 1, dict(field.meta))


Observer = Callable[[float, SpinorField], None]


def run(
    engine: WalkEngine,
    field: SpinorField,
    steps: int,
    observers: Iterable[Observer] = (),
    stride: int = 1,
    stepper: Callable | None = None,
) -> SpinorField:
    """Apply ``steps`` steps, calling observers at ``j % stride == 0`` (including j=0 of this run).

    ``stepper(engine, field)`` defaults to :func:`step`; pass a wrapper of
    :func:`step_high_kl_limit` to run the limit map.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    observers = list(observers)
    advance = stepper or step
    eps = field.grid.epsilon
    j0 = field.step_index
    for obs in observers:
        obs(eps * field.step_index, field)
    for n in range(1, steps + 1):
        field = advance(engine, field)
        if n % stride == 0:
            for obs in observers:
                obs(eps * field.step_index, field)
    assert field.step_index == j0 + steps
    return field


class FrontTracker:
    """Exact propagation of the two light-cone front columns only.

    For a walker starting on the column ``r = 0``, the column ``r = +j``
    after ``j`` steps depends only on the up component of the previous
    right front, and ``r = -j`` only on the down component of the previous
    left front.  Tracking just these columns costs ``O(n_y)`` per step
    and reproduces the full evolution's fronts exactly, which makes very
    long runs affordable when only those columns are observed.
    """

    def __init__(self, engine: WalkEngine, field: SpinorField):
        nz = np.flatnonzero(np.any(field.psi != 0, axis=(0, 2)))
        if nz.size and not (nz.size == 1 and field.r_values[nz[0]] == 0):
            raise ValueError("front tracking needs an initial field supported on the column r=0 only")
        self.engine = engine
        col = field.column(0)
        self.right = col.copy()
        self.left = col.copy()
        self.step_index = field.step_index
        self.grid = field.grid

    @property
    def time(self) -> float:
        return self.grid.epsilon * self.step_index

    def advance(self) -> None:
        k = self.engine.coeffs
        u = self.right[0]
        u_p, u_m = np.roll(u, -1), np.roll(u, 1)
        d = self.left[1]
        d_p, d_m = np.roll(d, -1), np.roll(d, 1)
        self.right = np.stack([
            k["uu0"] * u + k["uup"] * u_p + k["uum"] * u_m,
            k["du0"] * u + k["dup"] * u_p + k["dum"] * u_m,
        ])
        self.left = np.stack([
            k["ud0"] * d + k["udp"] * d_p + k["udm"] * d_m,
            k["dd0"] * d + k["ddp"] * d_p + k["ddm"] * d_m,
        ])
        self.step_index += 1

    def front(self, side: str) -> np.ndarray:
        if side == "right":
            return self.right.copy()
        if side == "left":
            return self.left.copy()
        raise ValueError("side must be 'left' or 'right'")
