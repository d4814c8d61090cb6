"""Lattice, spinor field storage, initial states and orbifold checks.

Sites are ``x = eps*r``, ``y = eps*s`` with ``eps = 2L/n_y``.  The y
direction is periodic: ``s`` runs over ``-n_y/2 .. n_y/2 - 1`` and
``s = n_y/2`` (``y = L``) is the same site as ``s = -n_y/2``.

Field amplitudes are stored as one array ``psi`` of shape
``(2, n_x, n_y)``: component (0 = up, 1 = down), x index ``r - r_min`` and
y index ``s + n_y/2``.  The norm convention is ``eps**2 * sum |psi|**2 = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "Grid",
    "SpinorField",
    "CoinState",
    "build_grid",
    "localized_state",
    "plane_wave_mode_state",
    "z2_residual",
    "mirror_y",
    "field_norm",
    "normalize",
]


@dataclass(frozen=True)
class Grid:
    """Equally spaced lattice over ``[-L, L)`` in y and a growing x window.

    ``x_halfwidth`` is the x extent of freshly built fields.  With
    ``x_periodic`` the x direction is a ring of ``2*x_halfwidth + 1`` sites
    that never grows (used for small closed test systems).
    """

    L: float
    n_y: int
    x_halfwidth: int = 0
    x_periodic: bool = False

    def __post_init__(self):
        if int(self.n_y) != self.n_y or self.n_y % 2 != 0:
            raise ValueError(
                f"n_y must be even so that y=0 and y=L fall on lattice sites, got {self.n_y}"
            )
        if self.n_y < 4:
            raise ValueError(f"n_y must be at least 4, got {self.n_y}")
        if not (np.isfinite(self.L) and self.L > 0):
            raise ValueError(f"L must be finite and > 0, got {self.L}")
        if self.x_halfwidth < 0:
            raise ValueError(f"x_halfwidth must be >= 0, got {self.x_halfwidth}")

    @property
    def epsilon(self) -> float:
        return 2.0 * self.L / self.n_y

    @property
    def half(self) -> int:
        return self.n_y // 2

    @property
    def s_values(self) -> np.ndarray:
        return np.arange(-self.half, self.half)

    @property
    def y_values(self) -> np.ndarray:
        return self.epsilon * self.s_values

    def wrap(self, s):
        """Map any integer site label onto ``-n_y/2 .. n_y/2 - 1``."""
        return (np.asarray(s) + self.half) % self.n_y - self.half

    def index(self, s):
        """Array index along y of site label ``s`` (wrapped)."""
        return self.wrap(s) + self.half

    def site_of(self, y: float) -> int:
        """Site label of coordinate ``y``; rejects off-lattice values."""
        u = y / self.epsilon
        s = int(round(u))
        if abs(u - s) > 1e-9:
            raise ValueError(
                f"y0={y} is not on the lattice (eps={self.epsilon}); "
                f"snap it to a site, e.g. y0={s * self.epsilon}"
            )
        return int(self.wrap(s))

    def with_halfwidth(self, x_halfwidth: int) -> "Grid":
        return replace(self, x_halfwidth=int(x_halfwidth))


def build_grid(L: float, n_y: int, initial_x_halfwidth: int = 0, x_periodic: bool = False) -> Grid:
    return Grid(L=float(L), n_y=int(n_y), x_halfwidth=int(initial_x_halfwidth), x_periodic=x_periodic)


@dataclass(frozen=True)
class CoinState:
    """Normalized two-component coin state."""

    up: complex
    down: complex

    def __post_init__(self):
        n = abs(self.up) ** 2 + abs(self.down) ** 2
        if abs(n - 1.0) > 1e-12:
            raise ValueError(f"coin state must have unit norm, got |c|^2={n}")

    @classmethod
    def normalized(cls, up, down) -> "CoinState":
        n = np.sqrt(abs(up) ** 2 + abs(down) ** 2)
        if n == 0:
            raise ValueError("coin state cannot be zero")
        return cls(complex(up) / n, complex(down) / n)

    def as_array(self) -> np.ndarray:
        return np.array([self.up, self.down], dtype=complex)


@dataclass
class SpinorField:
    """Amplitudes on the window ``r_min .. r_min + n_x - 1`` at step ``j``."""

    grid: Grid
    psi: np.ndarray
    r_min: int
    step_index: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.psi.ndim != 3 or self.psi.shape[0] != 2 or self.psi.shape[2] != self.grid.n_y:
            raise ValueError(f"psi must have shape (2, n_x, {self.grid.n_y}), got {self.psi.shape}")

    @property
    def up(self) -> np.ndarray:
        return self.psi[0]

    @property
    def down(self) -> np.ndarray:
        return self.psi[1]

    @property
    def n_x(self) -> int:
        return self.psi.shape[1]

    @property
    def r_values(self) -> np.ndarray:
        return np.arange(self.r_min, self.r_min + self.n_x)

    @property
    def time(self) -> float:
        return self.grid.epsilon * self.step_index

    def column(self, r: int) -> np.ndarray:
        """Spinor column at x site ``r``, shape ``(2, n_y)``; zeros outside the window."""
        i = r - self.r_min
        if 0 <= i < self.n_x:
            return self.psi[:, i, :].copy()
        return np.zeros((2, self.grid.n_y), dtype=complex)

    def copy(self) -> "SpinorField":
        return SpinorField(self.grid, self.psi.copy(), self.r_min, self.step_index, dict(self.meta))


def field_norm(field: SpinorField) -> float:
    eps = field.grid.epsilon
    return float(eps * eps * np.sum(np.abs(field.psi) ** 2))


def normalize(field: SpinorField) -> SpinorField:
    n = field_norm(field)
    if n == 0:
        raise ValueError("cannot normalize a zero field")
    out = field.copy()
    out.psi /= np.sqrt(n)
    return out


def _empty(grid: Grid) -> np.ndarray:
    return np.zeros((2, 2 * grid.x_halfwidth + 1, grid.n_y), dtype=complex)


def localized_state(grid: Grid, y0: float, c0: CoinState, mirror_eta: int | None = None) -> SpinorField:
    """Walker on the single site ``(r=0, y=y0)`` with spinor ``c0/eps``.

    With ``mirror_eta`` set, the orbifold image ``eta*sigma_z*c0`` is
    placed at ``-y0`` as well and the pair is renormalized, which gives an
    exactly Z2-covariant start in that sector.
    """
    s0 = grid.site_of(y0)
    psi = _empty(grid)
    i0 = grid.x_halfwidth
    spin = c0.as_array() / grid.epsilon
    psi[:, i0, grid.index(s0)] += spin
    f = SpinorField(grid, psi, -grid.x_halfwidth, 0)
    if mirror_eta is not None:
        if mirror_eta not in (1, -1):
            raise ValueError("mirror_eta must be +1 or -1")
        f.psi += mirror_y(f, mirror_eta).psi
        f = normalize(f)
    return f


def plane_wave_mode_state(grid: Grid, mode, q: float | None = None) -> SpinorField:
    """Mode profile times ``exp(i q eps r)`` over the whole x window.

    ``mode`` is a :class:`warpwalk.eigenmodes.ModeProfile` sampled on this
    grid.  The state is normalized over the finite window.
    """
    if q is None:
        q = mode.q
    elif abs(q - mode.q) > 1e-12 * max(1.0, abs(q)):
        raise ValueError(f"momentum {q} does not match the mode's momentum {mode.q}")
    eps = grid.epsilon
    if not (-np.pi / eps < q <= np.pi / eps):
        raise ValueError(f"q={q} lies outside the Brillouin zone (-pi/eps, pi/eps] = (-{np.pi / eps}, {np.pi / eps}]")
    samples = np.asarray(mode.samples)
    if samples.shape != (2, grid.n_y):
        raise ValueError(f"mode samples have shape {samples.shape}, expected (2, {grid.n_y})")
    r = np.arange(-grid.x_halfwidth, grid.x_halfwidth + 1)
    phase = np.exp(1j * q * eps * r)
    psi = samples[:, None, :] * phase[None, :, None]
    f = SpinorField(grid, psi.astype(complex), -grid.x_halfwidth, 0)
    return normalize(f)


def mirror_y(field: SpinorField, eta: int) -> SpinorField:
    """The image ``eta * sigma_z * chi(-s)`` of a field under the orbifold map."""
    g = field.grid
    idx = (g.n_y - np.arange(g.n_y)) % g.n_y
    out = field.copy()
    out.psi = field.psi[:, :, idx] * np.array([eta, -eta])[:, None, None]
    return out


def z2_residual(field: SpinorField, eta: int) -> float:
    """``max |chi(r, -s) - eta sigma_z chi(r, s)|``; zero for a covariant walker."""
    if field.psi.size == 0:
        return 0.0
    return float(np.max(np.abs(mirror_y(field, eta).psi - field.psi)))
