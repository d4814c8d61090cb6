"""Warped orbifold geometry and the position-dependent coin matrices.

The warp profile is ``A(y) = k|y|`` on the circle of circumference ``2L``
with ``y`` and ``-y`` identified.  Everything the walk needs from the
geometry is packed into three profiles::

    c(y) = exp(-A(y))
    s(y) = sqrt(1 - c(y)**2)
    f(y) = sqrt((1 + c)/2) + i sqrt((1 - c)/2)

All functions accept scalars or numpy arrays and are pure.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "WarpGeometry",
    "CoinPair",
    "orbifold_distance",
    "warp_A",
    "coin_profiles",
    "local_coins",
]


@dataclass(frozen=True)
class WarpGeometry:
    """Warp coefficient ``k`` (1/length) and orbifold half-period ``L``."""

    k: float
    L: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.k) and self.k >= 0):
            raise ValueError(f"warp coefficient k must be finite and >= 0, got {self.k}")
        if not (np.isfinite(self.L) and self.L > 0):
            raise ValueError(f"half-period L must be finite and > 0, got {self.L}")

    @classmethod
    def from_kL(cls, kL: float, L: float = 1.0) -> "WarpGeometry":
        return cls(k=kL / L, L=L)

    @property
    def kL(self) -> float:
        return self.k * self.L


@dataclass(frozen=True)
class CoinPair:
    """Local coin ``theta`` and frame rotation ``r`` (with its inverse)."""

    theta: np.ndarray
    r: np.ndarray
    r_inv: np.ndarray


def _check_finite(y):
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("coordinate y must be finite")
    return y


def orbifold_distance(y, L: float):
    """Distance from ``y`` to the nearest periodic image of the fixed point 0.

    Exactly odd-symmetric under ``y -> -y`` in floating point, so profiles
    built from it are bitwise even.  Values in ``[0, L]``.
    """
    y = _check_finite(y)
    period = 2.0 * L
    return np.abs(y - period * np.round(y / period))


def warp_A(geom: WarpGeometry, y):
    """Warp exponent ``k|y|``; ``y`` is folded onto ``[-L, L]`` first."""
    out = geom.k * orbifold_distance(y, geom.L)
    return float(out) if np.ndim(out) == 0 else out


def coin_profiles(geom: WarpGeometry, y):
    """Return ``(c, s, f)`` at ``y``.

    Both radicands lie in ``[0, 1]`` by construction; they are clipped at 0
    to guard against a negative rounding residue.
    """
    c = np.exp(-warp_A(geom, y))
    s = np.sqrt(np.clip(1.0 - c * c, 0.0, None))
    f = np.sqrt(np.clip((1.0 + c) / 2.0, 0.0, None)) + 1j * np.sqrt(
        np.clip((1.0 - c) / 2.0, 0.0, None)
    )
    if np.ndim(c) == 0:
        return float(c), float(s), complex(f)
    return c, s, f


def local_coins(geom: WarpGeometry, y: float) -> CoinPair:
    """Coin matrices at a single point ``y``.

    ``theta = [[c, i s], [i s, c]]`` is a rotation by ``theta(y)`` with
    ``cos = c`` and ``sin = s``.  ``r = (1/sqrt 2) [[f, i f*], [f, -i f*]]``
    is the frame change that diagonalizes the y-shift.  Both are unitary;
    with them the one-step operator factorizes as

        U = r^-1 . theta . S_y(eps/2) . theta^dagger . S_y(eps/2) . r . S_x(eps)

    (coins evaluated at the current position of each stage), which is the
    product the explicit recurrence in :mod:`warpwalk.evolution` expands.
    """
    c, s, f = coin_profiles(geom, float(y))
    theta = np.array([[c, 1j * s], [1j * s, c]], dtype=complex)
    r = np.array([[f, 1j * np.conj(f)], [f, -1j * np.conj(f)]], dtype=complex) / np.sqrt(2.0)
    return CoinPair(theta=theta, r=r, r_inv=r.conj().T)
