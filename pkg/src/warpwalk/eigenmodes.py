"""Stationary states of the continuum generator at fixed x-momentum ``q``.

In the walk's orientation (up moves toward ``+x``) the continuum generator
at momentum ``q`` is::

    H(q) = sigma_z q - sigma_y D,   D = (e^{-A} p_y + p_y e^{-A}) / 2

and plane waves ``phi(y) exp(i q x - i E t)`` built from its eigenvectors
are stationary under the walk.  Its spectrum is
``E = +-sqrt(q^2 + (k alpha_n)^2)`` with ``alpha_n = n pi / (e^{kL} - 1)``.

Closed forms, with ``u = alpha (e^{k|y|} - 1)`` and
``N = sqrt(2k/(e^{kL}-1)) / sqrt((E+q)^2 + (k alpha)^2)``:

* ``eta = +1``: ``up = N (E+q) e^{k|y|/2} cos u``,
  ``down = N k alpha e^{k|y|/2} sin u sign y``.
* ``eta = -1``: ``up = -N' k alpha e^{k|y|/2} sin u sign y``,
  ``down = N' (E-q) e^{k|y|/2} cos u`` with ``N'`` as ``N`` but ``E-q``
  in place of ``E+q`` (equivalently ``q -> -q`` and up/down swapped).
* ``n = 0``: a single component ``sqrt(k/(e^{kL}-1)) e^{k|y|/2}``
  (up for ``eta = +1``, down for ``eta = -1``), defined only when the
  accompanying sign factor is non-zero.

The sign function is periodic and vanishes at both fixed points
``y = 0`` and ``y = -L``; the factor it multiplies vanishes there anyway.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import WarpGeometry, orbifold_distance
from .lattice import Grid

__all__ = [
    "ModeUndefinedError",
    "ModeIndex",
    "ModeProfile",
    "ModeBasis",
    "mode_energy",
    "mode_spinor",
    "eigenmode_profile",
    "sampled_mode_matrix",
    "build_basis",
    "apply_hamiltonian",
    "hamiltonian_residual",
]


class ModeUndefinedError(ValueError):
    """Requested stationary state does not exist."""


@dataclass(frozen=True)
class ModeIndex:
    n: int
    branch: int = 1
    eta: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"mode number must be a non-negative integer, got {self.n}")
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        if self.eta not in (1, -1):
            raise ValueError("eta must be +1 or -1")


@dataclass(frozen=True)
class ModeProfile:
    """Mode sampled on the y sites, rescaled to ``eps * sum |phi|^2 = 1``.

    ``samples`` has shape ``(2, n_y)`` (up, down).  ``scale`` is the factor
    that was applied to the continuum values to reach unit grid norm.
    """

    index: ModeIndex
    q: float
    energy: float
    samples: np.ndarray
    scale: float = 1.0


def _alpha(geom: WarpGeometry, n: int) -> float:
    if geom.k == 0:
        raise ValueError("stationary states are defined here for k > 0")
    return n * np.pi / np.expm1(geom.kL)


def mode_energy(geom: WarpGeometry, n: int, q: float, branch: int = 1, eta: int = 1):
    """Return ``(E, alpha_n)``.

    Raises :class:`ModeUndefinedError` for ``n = 0`` when the sign factor
    ``sign(E + eta q)`` vanishes.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    alpha = _alpha(geom, n)
    energy = branch * np.hypot(q, geom.k * alpha)
    if n == 0 and energy + eta * q == 0:
        raise ModeUndefinedError(
            f"mode undefined: n=0 on branch {branch:+d} with q={q} (energy and momentum of different sign)"
        )
    return float(energy), float(alpha)


def orbifold_sign(y, L):
    """Periodic sign of ``y``; zero at the fixed points ``0`` and ``+-L``."""
    y = np.asarray(y, dtype=float)
    z = y - 2.0 * L * np.round(y / (2.0 * L))
    sg = np.sign(z)
    return np.where(orbifold_distance(y, L) == L, 0.0, sg)


def mode_spinor(geom: WarpGeometry, index: ModeIndex, q: float, y):
    """Continuum values ``(up, down)`` of a stationary state at ``y``."""
    energy, alpha = mode_energy(geom, index.n, q, index.branch, index.eta)
    k, kL = geom.k, geom.kL
    ay = orbifold_distance(y, geom.L)
    sg = orbifold_sign(y, geom.L)
    grow = np.exp(0.5 * k * ay)
    zero = np.zeros_like(grow)
    if index.n == 0:
        amp = np.sqrt(k / np.expm1(kL)) * grow
        if index.eta == 1:
            return amp * np.sign(energy + q), zero
        return zero, amp * np.sign(energy - q)
    u = alpha * np.expm1(k * ay)
    if index.eta == 1:
        norm = np.sqrt(2 * k / np.expm1(kL)) / np.hypot(energy + q, k * alpha)
        return norm * (energy + q) * grow * np.cos(u), norm * k * alpha * grow * np.sin(u) * sg
    # eta = -1: odd up, even down; written with (E - q) so that n -> 0
    # continues to the down-only state.
    norm = np.sqrt(2 * k / np.expm1(kL)) / np.hypot(energy - q, k * alpha)
    return -norm * k * alpha * grow * np.sin(u) * sg, norm * (energy - q) * grow * np.cos(u)


def eigenmode_profile(geom: WarpGeometry, grid: Grid, index: ModeIndex, q: float) -> ModeProfile:
    energy, _ = mode_energy(geom, index.n, q, index.branch, index.eta)
    up, down = mode_spinor(geom, index, q, grid.y_values)
    samples = np.stack([up, down]).astype(complex)
    nrm = np.sqrt(grid.epsilon * np.sum(np.abs(samples) ** 2))
    samples /= nrm
    samples.setflags(write=False)
    return ModeProfile(index=index, q=float(q), energy=energy, samples=samples, scale=float(1.0 / nrm))


def sampled_mode_matrix(geom: WarpGeometry, grid: Grid, q: float, eta: int, n_max: int):
    """Rows = unit-norm sampled modes for ``n = 0..n_max``, + branch before - at each n.

    Undefined ``n = 0`` states are skipped.  Returns ``(matrix, labels)``
    with ``matrix`` of shape ``(m, 2*n_y)`` and labels ``(n, branch)``.
    """
    rows, labels = [], []
    for n in range(n_max + 1):
        for branch in (1, -1):
            try:
                p = eigenmode_profile(geom, grid, ModeIndex(n, branch, eta), q)
            except ModeUndefinedError:
                continue
            rows.append(p.samples.reshape(-1))
            labels.append((n, branch))
    return np.array(rows), labels


@dataclass(frozen=True)
class ModeBasis:
    """Grid-orthonormal basis of one parity sector at momentum ``q``.

    ``vectors[i]`` (shape ``(2, n_y)``) descends from the sampled mode
    ``labels[i] = (n, branch)`` by ordered Gram-Schmidt, so leading
    vectors coincide with the sampled modes up to the sampling error.
    """

    q: float
    eta: int
    vectors: np.ndarray
    labels: tuple
    epsilon: float

    @property
    def complete(self) -> bool:
        return self.vectors.shape[0] == self.vectors.shape[2]


def build_basis(
    geom: WarpGeometry,
    grid: Grid,
    q: float,
    eta: int = 1,
    tol: float = 1e-6,
    complete: bool = True,
    n_max: int | None = None,
    n_limit: int | None = None,
) -> ModeBasis:
    """Ordered Gram-Schmidt over sampled modes in increasing ``n``.

    Modes whose residual after projecting out all earlier ones drops below
    ``tol`` are discarded.  With ``complete`` the sweep continues in ``n``
    until ``n_y`` vectors are kept, which spans the whole parity sector
    (dimension ``n_y``: the sector is fixed by the values on
    ``0 <= y <= L`` with one component pinned at each fixed point).
    Otherwise modes ``0..n_max`` are used.
    """
    eps = grid.epsilon
    dim = grid.n_y
    if n_limit is None:
        n_limit = 200 * grid.n_y
    stop = n_limit if complete else (grid.n_y // 2 if n_max is None else n_max)
    kept = np.zeros((dim, 2 * grid.n_y), dtype=complex)
    labels = []
    m = 0
    for n in range(stop + 1):
        for branch in (1, -1):
            try:
                p = eigenmode_profile(geom, grid, ModeIndex(n, branch, eta), q)
            except ModeUndefinedError:
                continue
            v = p.samples.reshape(-1) * np.sqrt(eps)
            if m:
                a = kept[:m]
                for _ in range(2):
                    v = v - a.T @ (a.conj() @ v)
            nv = np.linalg.norm(v)
            if nv > tol:
                kept[m] = v / nv
                labels.append((n, branch))
                m += 1
                if m == dim:
                    break
        if m == dim:
            break
    if complete and m < dim:
        raise RuntimeError(f"basis incomplete after n={stop}: {m} of {dim} vectors")
    vecs = (kept[:m] / np.sqrt(eps)).reshape(m, 2, grid.n_y)
    vecs.setflags(write=False)
    return ModeBasis(q=float(q), eta=eta, vectors=vecs, labels=tuple(labels), epsilon=eps)


def apply_hamiltonian(geom: WarpGeometry, grid: Grid, samples: np.ndarray, q: float) -> np.ndarray:
    """Central-difference ``H(q)`` applied to a sampled spinor of shape ``(2, n_y)``.

    ``D phi = (e^{-A} p phi + p (e^{-A} phi)) / 2`` with
    ``p g(y) = -i (g(y+eps) - g(y-eps)) / (2 eps)`` on the periodic grid.
    """
    eps = grid.epsilon
    w = np.exp(-geom.k * orbifold_distance(grid.y_values, geom.L))

    def p(g):
        return -1j * (np.roll(g, -1) - np.roll(g, 1)) / (2 * eps)

    def d(g):
        return 0.5 * (w * p(g) + p(w * g))

    up, down = samples[0], samples[1]
    # sigma_y = [[0, -i], [i, 0]]
    out_up = q * up + 1j * d(down)
    out_down = -q * down - 1j * d(up)
    return np.stack([out_up, out_down])


def hamiltonian_residual(geom: WarpGeometry, grid: Grid, profile: ModeProfile) -> float:
    """``||H phi - E phi|| / ||phi||`` in the ``eps * sum`` norm."""
    phi = np.asarray(profile.samples)
    r = apply_hamiltonian(geom, grid, phi, profile.q) - profile.energy * phi
    return float(np.sqrt(np.sum(np.abs(r) ** 2) / np.sum(np.abs(phi) ** 2)))
