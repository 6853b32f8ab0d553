"""Central configurations: Newton solver and spectral classification."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .core import (
    MassedConfiguration,
    cartesian_gradient,
    center_and_project,
    hessian_blocks,
    mass_inner,
    mass_norm,
    moment_of_inertia,
    potential,
    rotate90,
    translation_vectors,
)

ZERO_TOL = 1e-8
N3_TOL = 1e-9


class NoConvergence(RuntimeError):
    """Newton iteration failed to reach the requested tolerance."""

    def __init__(self, iterations: int, residual: float):
        super().__init__(f"no convergence after {iterations} iterations (residual {residual:.3e})")
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class CentralConfiguration:
    """A centered central configuration.

    ``lam = U/I`` and ``residual`` is the mass norm of ``grad U + lam r``.
    """

    config: MassedConfiguration
    lam: float
    residual: float
    iterations: int = 0

    @property
    def inertia(self) -> float:
        return moment_of_inertia(self.config)

    def normalized(self) -> "CentralConfiguration":
        """Same CC rescaled to ``I = 1``; ``lam`` scales as ``rho^-3``."""
        rho = np.sqrt(self.inertia)
        c = self.config.with_x(self.config.x / rho)
        return CentralConfiguration(c, self.lam * rho**3, self.residual * rho**2, self.iterations)


def cc_residual(c: MassedConfiguration, lam: float) -> float:
    g = cartesian_gradient(c) / c.mass_diag
    return mass_norm(g + lam * c.x, c.masses)


def cc_from_config(c: MassedConfiguration) -> CentralConfiguration:
    """Wrap a configuration believed to be a CC (no iteration)."""
    c = center_and_project(c)
    lam = potential(c) / moment_of_inertia(c)
    return CentralConfiguration(c, lam, cc_residual(c, lam))


def solve_cc(seed: MassedConfiguration, tol: float = 1e-10, max_iter: int = 50,
             normalize: bool = True) -> CentralConfiguration:
    """Newton iteration for ``grad U + lam r = 0``.

    The augmented system also enforces ``I(r) = I0``, the rotation gauge
    ``<r, i seed> = 0`` and a zero center of mass. The overdetermined but
    consistent linear systems are solved in the least-squares sense.

    Parameters
    ----------
    seed : MassedConfiguration
        Collision-free starting guess.
    tol : float
        Target for the mass norm of ``grad U + lam r`` at ``I = 1``.
    max_iter : int
        Maximum number of Newton steps.
    normalize : bool
        If True the result has ``I = 1``; otherwise the seed's inertia is kept.

    Raises
    ------
    NoConvergence
    CollisionError
    """
    seed = center_and_project(seed)
    md = seed.mass_diag
    n2 = seed.x.size
    I0 = 1.0 if normalize else moment_of_inertia(seed)
    x = seed.x / np.sqrt(moment_of_inertia(seed) / I0)
    gauge = rotate90(x) * md
    T = translation_vectors(seed.n) * md

    def state(x):
        c = seed.with_x(x)
        lam = potential(c) / moment_of_inertia(c)
        return c, lam

    c, lam = state(x)
    for it in range(max_iter + 1):
        res = cc_residual(c, lam) * I0  # value at I = 1
        if res <= tol:
            out = CentralConfiguration(seed.with_x(x), lam, cc_residual(c, lam), it)
            return out
        if it == max_iter:
            break
        g = cartesian_gradient(c)
        F = np.concatenate([g + lam * md * x, [0.5 * (np.sum(md * x * x) - I0)], [gauge @ x], T @ x])
        J = np.zeros((F.size, n2 + 1))
        J[:n2, :n2] = hessian_blocks(c) + lam * np.diag(md)
        J[:n2, n2] = md * x
        J[n2, :n2] = md * x
        J[n2 + 1, :n2] = gauge
        J[n2 + 2:, :n2] = T
        step = np.linalg.lstsq(J, -F, rcond=None)[0]
        x = x + step[:n2]
        c, lam = state(x)
    raise NoConvergence(max_iter, float(res))


@dataclass(frozen=True)
class Partition:
    n0: int
    np: int
    n1: int
    n2: int
    n3: int

    def as_tuple(self):
        return (self.n0, self.np, self.n1, self.n2, self.n3)

    def to_json(self):
        return {"n0": self.n0, "np": self.np, "n1": self.n1, "n2": self.n2, "n3": self.n3}


@dataclass(frozen=True)
class SpectralReport:
    """Spectrum of the restricted Hessian of the normalized potential.

    Attributes
    ----------
    cc : CentralConfiguration
        The CC in the coordinates it was given (``I`` arbitrary).
    unit : CentralConfiguration
        The same CC at ``I = 1``.
    mu : ndarray
        Restricted-Hessian eigenvalues ``sqrt(I) * eig(lam + M^-1 B)`` at the
        coordinates of ``cc`` (sorted ascending).
    eig : ndarray
        Eigenvalues of ``lam I + M^-1 B`` on the complement, at ``cc`` coordinates.
    mu_unit, lam_unit, kappa : reals at ``I = 1``; these define the partition.
    basis : ndarray, shape (2N-4, 2N)
        Mass-orthonormal eigenvectors at ``I = 1`` (rows).
    e3, e4 : ndarray
        ``r0/|r0|`` and ``i r0/|r0|``.
    """

    cc: CentralConfiguration
    unit: CentralConfiguration
    mu: np.ndarray
    eig: np.ndarray
    mu_unit: np.ndarray
    lam_unit: float
    kappa: float
    basis: np.ndarray
    e3: np.ndarray
    e4: np.ndarray
    partition: Partition
    zero_tol: float
    scale_note: str = ""
    n3_tol: float = N3_TOL
    extras: dict = field(default_factory=dict)

    @property
    def lam(self) -> float:
        return self.cc.lam

    @property
    def tilde_mu(self) -> np.ndarray:
        return tilde_mu(self.mu_unit, self.kappa)

    @property
    def zero_mask(self) -> np.ndarray:
        return np.abs(self.mu_unit) <= self.zero_tol * self.lam_unit

    def to_json(self) -> dict:
        tm = self.tilde_mu
        return {
            "lambda": float(self.lam),
            "kappa": float(self.kappa),
            "lambda_unit": float(self.lam_unit),
            "inertia": float(self.cc.inertia),
            "mu": [float(v) for v in self.mu],
            "mu_unit": [float(v) for v in self.mu_unit],
            "tilde_mu": [[float(v.real), float(v.imag)] for v in tm],
            "partition": self.partition.to_json(),
            "scale_note": self.scale_note,
        }


def tilde_mu(mu, kappa) -> np.ndarray:
    """``-sqrt(kappa)/4 + sqrt(mu + kappa/16)`` (complex when negative)."""
    mu = np.asarray(mu, dtype=float)
    return -np.sqrt(kappa) / 4 + np.sqrt((mu + kappa / 16).astype(complex))


def _complement_basis(c: MassedConfiguration) -> np.ndarray:
    """Orthonormal basis (in ``M^{1/2}`` coordinates) of the complement of
    ``span{E1, E2, r, i r}``."""
    sq = np.sqrt(c.mass_diag)
    fixed = np.vstack([translation_vectors(c.n), c.x, rotate90(c.x)]) * sq
    q, _ = np.linalg.qr(fixed.T)
    return linalg.null_space(q.T).T  # rows, orthonormal


def _sign_fix(v: np.ndarray) -> np.ndarray:
    out = v.copy()
    for row in out:
        nz = np.flatnonzero(np.abs(row) > 1e-12 * np.abs(row).max())
        if nz.size and row[nz[0]] < 0:
            row *= -1
    return out


def restricted_spectrum(c: MassedConfiguration, lam: float):
    """Eigenpairs of ``lam I + M^-1 B`` on the complement of the forced space.

    Returns eigenvalues (ascending) and mass-orthonormal eigenvectors (rows).
    """
    sq = np.sqrt(c.mass_diag)
    A = lam * np.diag(c.mass_diag) + hessian_blocks(c)
    S = A / np.outer(sq, sq)
    W = _complement_basis(c)
    R = W @ S @ W.T
    w, V = linalg.eigh(0.5 * (R + R.T))
    vecs = (V.T @ W) / sq
    return w, _sign_fix(vecs)


def partition_of(mu_unit, lam_unit, zero_tol=ZERO_TOL, n3_tol=N3_TOL) -> Partition:
    mu = np.asarray(mu_unit)
    kappa = 2 * lam_unit
    zero = np.abs(mu) <= zero_tol * lam_unit
    n3m = ~zero & (np.abs(mu + kappa / 16) <= n3_tol * kappa)
    rest = ~zero & ~n3m
    return Partition(
        n0=int(zero.sum()),
        np=int((rest & (mu > 0)).sum()),
        n1=int((rest & (mu < 0) & (mu > -kappa / 16)).sum()),
        n2=int((rest & (mu < -kappa / 16)).sum()),
        n3=int(n3m.sum()),
    )


def classify(cc: CentralConfiguration, zero_tol: float = ZERO_TOL) -> SpectralReport:
    """Restricted-Hessian spectrum, degeneracy degree and partition.

    The Hessian of ``I^{1/2} U`` at ``r0`` is
    ``I^{1/2}(lam + M^-1 B) - 3 I^{-1/2} lam r0 r0^T M``; on the complement of
    ``span{E1, E2, r0, i r0}`` the last term vanishes so
    ``mu_j = sqrt(I) eig_j(lam + M^-1 B)``.

    The partition is always evaluated at ``I = 1`` where ``kappa = 2 lam``.
    """
    c = center_and_project(cc.config)
    I = moment_of_inertia(c)
    eig, _ = restricted_spectrum(c, cc.lam)
    unit = cc.normalized()
    eig_u, vecs = restricted_spectrum(unit.config, unit.lam)
    lam_u = unit.lam
    mu_u = eig_u  # sqrt(I) = 1
    part = partition_of(mu_u, lam_u, zero_tol)
    e3 = unit.config.x.copy()
    e4 = rotate90(e3)
    note = (f"mu = sqrt(I)*eig(lam + M^-1 B) with I = {I:.17g}; "
            f"quantities quoted per sqrt(I) equal eig; partition uses I = 1")
    return SpectralReport(
        cc=CentralConfiguration(c, cc.lam, cc.residual, cc.iterations),
        unit=unit,
        mu=np.sqrt(I) * eig,
        eig=eig,
        mu_unit=mu_u,
        lam_unit=lam_u,
        kappa=2 * lam_u,
        basis=vecs,
        e3=e3,
        e4=e4,
        partition=part,
        zero_tol=zero_tol,
        scale_note=note,
    )


def bordered_nullity(cc: CentralConfiguration, zero_tol: float = ZERO_TOL) -> int:
    """Nullity of ``lam M + B + M E4 E4^T M`` at ``I = 1``.

    ``(lam M + B)`` annihilates ``i r0`` and nothing else that is forced; the
    border term lifts that direction, so the nullity equals ``n0``.
    """
    unit = cc.normalized()
    c = center_and_project(unit.config)
    md = c.mass_diag
    e4 = rotate90(c.x) * md
    A = unit.lam * np.diag(md) + hessian_blocks(c) + np.outer(e4, e4)
    sq = np.sqrt(md)
    w = linalg.eigvalsh(A / np.outer(sq, sq))
    return int(np.sum(np.abs(w) <= zero_tol * unit.lam))


@dataclass(frozen=True)
class DimensionCount:
    dimension: int
    exact: bool
    note: str


def collision_manifold_dimension(report: SpectralReport) -> DimensionCount:
    """``n_p + 8`` for a nondegenerate CC, else the bound ``n0 + n_p + 8``."""
    p = report.partition
    if p.n0 == 0:
        return DimensionCount(p.np + 8, True, "nondegenerate")
    return DimensionCount(p.n0 + p.np + 8, False, "upper bound (degenerate CC)")


def critical_gradient_check(cc: CentralConfiguration) -> float:
    """Largest ``<grad U~, v>`` over unit ``v`` orthogonal to ``r0, i r0``."""
    c = center_and_project(cc.config)
    g = cartesian_gradient(c) / c.mass_diag
    W = _complement_basis(c) / np.sqrt(c.mass_diag)
    return float(np.max(np.abs([mass_inner(g, w, c.masses) for w in W]))) if len(W) else 0.0
