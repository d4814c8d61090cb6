"""Observables: y marginals, light-cone fronts, mode weights, coin entropy."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .eigenmodes import ModeBasis
from .geometry import orbifold_distance
from .lattice import CoinState, Grid, SpinorField

__all__ = [
    "marginal_y",
    "marginal_with_up_share",
    "FpdSlice",
    "fpd_from_column",
    "extract_fpd",
    "expected_y",
    "dft_momenta",
    "Decomposition",
    "mode_decompose",
    "reconstruct_field",
    "coin_density_matrix",
    "entropy",
    "binary_entropy",
    "s_min",
    "ObservableSeries",
]


def _column_slice(field: SpinorField, columns):
    if columns is None:
        return field.psi
    lo, hi = columns
    i0 = max(lo - field.r_min, 0)
    i1 = min(hi - field.r_min + 1, field.n_x)
    return field.psi[:, i0:i1, :]


def marginal_with_up_share(field: SpinorField, columns: tuple[int, int] | None = None):
    """``(P, up_share)`` over y sites.

    ``P(s)`` sums ``|chi|^2`` over x (optionally only ``columns = (r_lo,
    r_hi)``) and is renormalized to ``eps * sum P = 1``; ``up_share(s)`` is
    the up-component fraction at each y (0 where ``P`` vanishes).
    """
    psi = _column_slice(field, columns)
    w = np.abs(psi) ** 2
    per = w.sum(axis=1)
    tot = per.sum(axis=0)
    z = tot.sum()
    if z == 0:
        raise ValueError("marginal of a zero field is undefined")
    p = tot / (field.grid.epsilon * z)
    share = np.divide(per[0], tot, out=np.zeros_like(tot), where=tot > 0)
    return p, share


def marginal_y(field: SpinorField, columns: tuple[int, int] | None = None) -> np.ndarray:
    return marginal_with_up_share(field, columns)[0]


@dataclass(frozen=True)
class FpdSlice:
    """Spinor column at one edge of the light cone.

    ``samples`` has shape ``(2, n_y)`` in field units; ``weight`` is the
    column's probability ``eps^2 sum |chi|^2`` (its share of the unit total).
    """

    side: str
    samples: np.ndarray
    t: float
    weight: float
    step_index: int
    epsilon: float

    def renormalized(self) -> np.ndarray:
        """Samples rescaled to ``eps * sum |chi|^2 = 1``."""
        z = self.epsilon * np.sum(np.abs(self.samples) ** 2)
        if z == 0:
            raise ValueError("zero-weight slice cannot be renormalized")
        return self.samples / np.sqrt(z)

    @property
    def up_share(self) -> float:
        w = np.abs(self.samples) ** 2
        return float(w[0].sum() / w.sum()) if w.sum() > 0 else 0.0


def fpd_from_column(column: np.ndarray, side: str, step_index: int, grid: Grid) -> FpdSlice:
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    eps = grid.epsilon
    col = np.array(column, dtype=complex)
    return FpdSlice(side, col, eps * step_index, float(eps * eps * np.sum(np.abs(col) ** 2)), step_index, eps)


def extract_fpd(field: SpinorField, side: str) -> FpdSlice:
    """Column ``r = +j`` (right) or ``r = -j`` (left) at step ``j >= 1``."""
    j = field.step_index
    if j < 1:
        raise ValueError("fronts are defined from step 1 on")
    r = j if side == "right" else -j
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    return fpd_from_column(field.column(r), side, j, field.grid)


def expected_y(slice: FpdSlice, grid: Grid | None = None, folded: bool = True) -> float:
    """Slice-renormalized mean position along y.

    With ``folded`` (default) the position is the orbifold distance
    ``|y|`` from the hidden fixed point, i.e. the coordinate on the
    physical segment ``[0, L]``.  With ``folded=False`` the signed
    coordinate ``y`` of the full periodic domain is averaged, which
    vanishes for any Z2-covariant slice.
    """
    eps = slice.epsilon
    n_y = slice.samples.shape[1]
    if grid is not None and grid.n_y != n_y:
        raise ValueError("grid does not match slice")
    L = eps * n_y / 2
    y = eps * np.arange(-n_y // 2, n_y // 2)
    w = np.sum(np.abs(slice.samples) ** 2, axis=0)
    z = w.sum()
    if z == 0:
        raise ValueError("expected position of a zero-weight slice is undefined")
    coord = orbifold_distance(y, L) if folded else y
    return float(np.sum(coord * w) / z)


def dft_momenta(n: int, eps: float) -> np.ndarray:
    """Discrete Fourier momenta of an ``n``-site window, in ``np.fft`` order."""
    return 2.0 * np.pi * np.fft.fftfreq(n, d=eps)


@dataclass
class Decomposition:
    """Mode coefficients ``beta[m][i]`` at momentum ``qs[m]`` for basis vector ``i``.

    ``B`` maps ``(n, branch)`` to the momentum-integrated weight
    ``sum_m |beta|^2 dq/(2 pi)`` with ``dq = 2 pi / (n_q eps)``.
    """

    qs: np.ndarray
    beta: list
    labels: list
    B: dict
    n_q: int
    epsilon: float

    def by_n(self) -> dict:
        out = {}
        for (n, _), v in self.B.items():
            out[n] = out.get(n, 0.0) + v
        return dict(sorted(out.items()))

    @property
    def total(self) -> float:
        return float(sum(self.B.values()))

    def argmax_n(self) -> int:
        bn = self.by_n()
        return max(bn, key=lambda n: (bn[n], -n))


def _project(basis: ModeBasis, spinor: np.ndarray, eps: float) -> np.ndarray:
    # beta_n = eps^2 sum_s phi_n^dagger chi
    v = basis.vectors.reshape(basis.vectors.shape[0], -1)
    return eps * eps * (v.conj() @ spinor.reshape(-1))


def mode_decompose(target, bases: Sequence[ModeBasis], momenta_tol: float = 1e-9) -> Decomposition:
    """Project a field or a front slice onto stationary-state bases.

    For a :class:`SpinorField`, the x dependence is Fourier transformed
    with kernel ``exp(-i q eps r)``; ``bases`` must hold one basis per DFT
    momentum of the field's x window, in ``np.fft`` order.  For an
    :class:`FpdSlice` the transform of the single column at ``r = +-j``
    is ``exp(-+i q t)`` times the column; ``bases`` may sit on any
    uniform DFT momentum grid (``dft_momenta(n_q, eps)``), which sets the
    resolution of the momentum integral.
    """
    bases = list(bases)
    if not bases:
        raise ValueError("need at least one basis")
    n_q = len(bases)
    if isinstance(target, SpinorField):
        eps = target.grid.epsilon
        qs = dft_momenta(target.n_x, eps)
        if n_q != target.n_x:
            raise ValueError(f"need one basis per DFT momentum: window has {target.n_x}, got {n_q}")
        kernel_shift = np.exp(-1j * qs * eps * target.r_min)
        chi_q = np.fft.fft(target.psi, axis=1) * kernel_shift[None, :, None]
        spinors = [chi_q[:, m, :] for m in range(n_q)]
    elif isinstance(target, FpdSlice):
        eps = target.epsilon
        qs = dft_momenta(n_q, eps)
        sign = -1.0 if target.side == "right" else 1.0
        spinors = [np.exp(1j * sign * q * target.t) * target.samples for q in qs]
    else:
        raise TypeError("target must be a SpinorField or an FpdSlice")
    for b, q in zip(bases, qs):
        if abs(b.q - q) > momenta_tol * max(1.0, abs(q)):
            raise ValueError(f"basis momentum {b.q} does not match grid momentum {q}")
        if b.vectors.shape[2] != spinors[0].shape[1]:
            raise ValueError("basis and grid differ in n_y")
    weight = 1.0 / (n_q * eps)
    betas, labels, B = [], [], {}
    for b, chi in zip(bases, spinors):
        beta = _project(b, chi, eps)
        betas.append(beta)
        labels.append(b.labels)
        for lab, val in zip(b.labels, np.abs(beta) ** 2 * weight):
            B[lab] = B.get(lab, 0.0) + float(val)
    return Decomposition(qs=qs, beta=betas, labels=labels, B=B, n_q=n_q, epsilon=eps)


def reconstruct_field(dec: Decomposition, bases: Sequence[ModeBasis], r_values: np.ndarray) -> np.ndarray:
    """Inverse of :func:`mode_decompose` for a field: amplitudes of shape ``(2, n_x, n_y)``."""
    eps = dec.epsilon
    out = None
    for q, beta, b in zip(dec.qs, dec.beta, bases):
        spin = np.tensordot(beta, b.vectors, axes=(0, 0))  # (2, n_y)
        term = np.exp(1j * q * eps * np.asarray(r_values))[None, :, None] * spin[:, None, :]
        out = term if out is None else out + term
    return out / (dec.n_q * eps)


def coin_density_matrix(field: SpinorField) -> np.ndarray:
    """Reduced coin matrix ``eps^2 sum_{r,s} chi chi^dagger``."""
    eps2 = field.grid.epsilon ** 2
    up, down = field.psi[0], field.psi[1]
    a = eps2 * np.sum(np.abs(up) ** 2)
    d = eps2 * np.sum(np.abs(down) ** 2)
    b = eps2 * np.sum(up * np.conj(down))
    return np.array([[a, b], [np.conj(b), d]], dtype=complex)


def binary_entropy(p: float) -> float:
    terms = [x for x in (p, 1.0 - p) if x > 0]
    return float(-sum(x * np.log2(x) for x in terms)) + 0.0  # no signed zero


def entropy(field: SpinorField, clip: float = 1e-14) -> float:
    """Von Neumann entropy (base 2) of the coin, from the closed-form 2x2 spectrum."""
    rho = coin_density_matrix(field)
    a, d = rho[0, 0].real, rho[1, 1].real
    b = abs(rho[0, 1])
    mean, half = 0.5 * (a + d), np.hypot(0.5 * (a - d), b)
    lam = np.array([mean + half, mean - half]) / (a + d)
    lam = np.where((lam < 0) & (lam >= -clip), 0.0, lam)
    s = -sum(x * np.log2(x) for x in lam if x > 0)
    return float(min(max(s, 0.0), 1.0)) + 0.0  # no signed zero


def s_min(c0: CoinState) -> float:
    """Entropy floor ``-|C_up|^2 log2 |C_up|^2 - |C_down|^2 log2 |C_down|^2``."""
    return binary_entropy(abs(c0.up) ** 2)


@dataclass
class ObservableSeries:
    """Rows grouped by sample time; the first column is always ``t``."""

    columns: tuple
    times: list = field(default_factory=list)
    values: list = field(default_factory=list)

    def append(self, t: float, rows) -> None:
        if self.times and not t > self.times[-1]:
            raise ValueError("sample times must be strictly increasing")
        rows = [tuple(r) for r in rows]
        for r in rows:
            if len(r) + 1 != len(self.columns):
                raise ValueError(f"row {r} does not match columns {self.columns}")
        self.times.append(float(t))
        self.values.append(rows)

    def __len__(self) -> int:
        return len(self.times)

    def rows(self):
        for t, rows in zip(self.times, self.values):
            for r in rows:
                yield (t,) + r
