"""Moving-frame chart ``(r, theta, z)`` about a central configuration.

A centered configuration is written as::

    x = r * exp(i theta) * (z3 E3 + sum_k z_k E_k),   z3 = sqrt(1 - |z|^2)

with ``E3 = r0/|r0|``, ``E4 = i E3`` and ``E5..E2N`` the mass-orthonormal
eigenvectors of the restricted Hessian. ``theta`` is fixed by requiring
that the ``E4`` component vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg

from .ccfind import SpectralReport
from .core import (
    MassedConfiguration,
    cartesian_gradient,
    center_and_project,
    hessian_blocks,
    mass_norm,
    potential,
    rotate90,
    third_derivative_tensor,
)

EAGER_A_MAX_N = 5


class DegenerateProjection(ValueError):
    """The configuration is orthogonal to both E3 and E4."""


class ChartDomainError(ValueError):
    """``|z| >= 1``: outside the chart."""


@dataclass(frozen=True)
class ChartPoint:
    r: float
    theta: float
    z: np.ndarray

    @property
    def z3(self) -> float:
        return float(np.sqrt(1.0 - np.dot(self.z, self.z)))


@dataclass(frozen=True, eq=False)
class FrameChart:
    """Orthonormal eigenframe, coupling matrix ``Q`` and Taylor data of ``U(z)``.

    Attributes
    ----------
    masses : ndarray
    e3, e4 : ndarray
        ``r0`` at ``I = 1`` and ``i r0``.
    E : ndarray, shape (d, 2N)
        ``E5..E2N`` as rows, ``d = 2N - 4``.
    Q : ndarray, shape (d, d)
        ``Q[j, k] = <E_j, i E_k>``.
    lam, kappa : float
        Values at ``I = 1``.
    mu : ndarray
        Diagonal of the Hessian of ``U(z)`` at 0.
    zero_tol : float
        Relative threshold used to decide ``mu = 0``.
    """

    masses: np.ndarray
    e3: np.ndarray
    e4: np.ndarray
    E: np.ndarray
    Q: np.ndarray
    lam: float
    kappa: float
    mu: np.ndarray
    zero_tol: float = 1e-8
    report: SpectralReport | None = None

    @property
    def d(self) -> int:
        return self.E.shape[0]

    @property
    def mass_diag(self) -> np.ndarray:
        return np.repeat(self.masses, 2)

    @property
    def base(self) -> MassedConfiguration:
        return MassedConfiguration(self.masses, self.e3)

    @cached_property
    def a(self) -> np.ndarray:
        """Symmetric tensor ``a_ijk = d^3 U at E3 along (E_i, E_j, E_k)``."""
        return third_derivative_tensor(self.base, self.E)

    @property
    def zero_mask(self) -> np.ndarray:
        return np.abs(self.mu) <= self.zero_tol * self.lam

    @property
    def n0(self) -> int:
        return int(self.zero_mask.sum())

    def to_json(self) -> dict:
        d = self.d
        idx = [(i, j, k) for i in range(d) for j in range(i, d) for k in range(j, d)]
        return {
            "masses": self.masses.tolist(),
            "lambda": self.lam,
            "kappa": self.kappa,
            "E3": self.e3.tolist(),
            "basis": self.E.tolist(),
            "Q": self.Q.tolist(),
            "mu": self.mu.tolist(),
            "a": {f"{i + 5},{j + 5},{k + 5}": float(self.a[i, j, k]) for i, j, k in idx},
        }


def _mass_gram_schmidt(V: np.ndarray, md: np.ndarray) -> np.ndarray:
    sq = np.sqrt(md)
    q, _ = np.linalg.qr((V * sq).T)
    sgn = np.sign(np.sum(q.T * (V * sq), axis=1))
    return (q.T * sgn[:, None]) / sq


def build_chart(report: SpectralReport, basis=None, eager: bool | None = None) -> FrameChart:
    """Build the chart from a spectral report.

    Parameters
    ----------
    report : SpectralReport
    basis : array_like, shape (k, 2N), optional
        Explicit vectors to use as the first ``k`` frame vectors of the
        eigenspace they span (for instance a published kernel basis). They
        are mass-normalized in the given order; the remaining frame vectors
        are re-diagonalized on the orthogonal complement.
    eager : bool, optional
        Compute ``a_ijk`` immediately. Defaults to True for ``N <= 5``.
    """
    unit = report.unit
    c = center_and_project(unit.config)
    md = c.mass_diag
    lam = unit.lam
    e3 = c.x / mass_norm(c.x, c.masses)
    e4 = rotate90(e3)
    A = lam * np.diag(md) + hessian_blocks(c)
    E = report.basis
    if basis is not None:
        V = np.atleast_2d(np.asarray(basis, dtype=float))
        V = V - np.outer((V * md) @ e3, e3) - np.outer((V * md) @ e4, e4)
        V = _mass_gram_schmidt(V, md)
        rest = E - (E * md) @ V.T @ V
        sq = np.sqrt(md)
        u, s, _ = linalg.svd((rest * sq).T, full_matrices=False)
        W = (u[:, : E.shape[0] - V.shape[0]].T) / sq
        R = W @ A @ W.T
        w, P = linalg.eigh(0.5 * (R + R.T))
        W = P.T @ W
        E = np.vstack([V, W])
        mu = np.einsum("ij,jk,ik->i", E, A, E)
        key = np.where(np.abs(mu) <= report.zero_tol * lam, 0.0, mu)
        order = np.argsort(key, kind="stable")
        E, mu = E[order], mu[order]
    else:
        mu = report.mu_unit.copy()
    Q = (E * md) @ np.array([rotate90(v) for v in E]).T
    chart = FrameChart(
        masses=c.masses, e3=e3, e4=e4, E=E, Q=Q, lam=lam, kappa=2 * lam, mu=mu,
        zero_tol=report.zero_tol, report=report,
    )
    if eager if eager is not None else c.n <= EAGER_A_MAX_N:
        chart.a  # noqa: B018 - populate cache
    return chart


def _center(chart: FrameChart, c) -> np.ndarray:
    if isinstance(c, MassedConfiguration):
        return center_and_project(c).x
    p = np.asarray(c, dtype=float).reshape(-1, 2)
    return (p - chart.masses @ p / chart.masses.sum()).ravel()


def to_chart(chart: FrameChart, c, theta_hint: float | None = None) -> ChartPoint:
    """Chart coordinates of a configuration.

    ``theta`` solves ``<x, i e^{i theta} E3> = 0`` with ``<x, e^{i theta} E3> > 0``.
    Without a hint it lies in ``(-pi, pi]``; with a hint the branch nearest to
    the hint is chosen.
    """
    x = _center(chart, c)
    md = chart.mass_diag
    r = float(np.sqrt(np.sum(md * x * x)))
    a = float(np.sum(md * x * chart.e3))
    b = float(np.sum(md * x * chart.e4))
    if np.hypot(a, b) <= 1e-14 * max(r, np.finfo(float).tiny):
        raise DegenerateProjection("configuration orthogonal to the CC circle")
    theta = float(np.arctan2(b, a))
    if theta_hint is not None:
        theta += 2 * np.pi * np.round((theta_hint - theta) / (2 * np.pi))
    xh = x / r
    p1 = (chart.E * md) @ xh
    p2 = (np.array([rotate90(v) for v in chart.E]) * md) @ xh
    z = np.cos(theta) * p1 + np.sin(theta) * p2
    return ChartPoint(r, theta, z)


def shape_vector(chart: FrameChart, z) -> np.ndarray:
    """``z3 E3 + sum z_k E_k`` (unit mass norm)."""
    z = np.asarray(z, dtype=float)
    q = float(np.dot(z, z))
    if q >= 1.0:
        raise ChartDomainError("|z| >= 1")
    return np.sqrt(1.0 - q) * chart.e3 + z @ chart.E


def from_chart(chart: FrameChart, p: ChartPoint) -> MassedConfiguration:
    """Configuration ``r e^{i theta} (z3 E3 + sum z_k E_k)``."""
    s = shape_vector(chart, p.z)
    x = p.r * (np.cos(p.theta) * s + np.sin(p.theta) * rotate90(s))
    return MassedConfiguration(chart.masses, x, centered=True)


def potential_in_chart(chart: FrameChart, z):
    """``U(z)`` on the unit shape sphere and its gradient in ``z``."""
    z = np.asarray(z, dtype=float)
    s = shape_vector(chart, z)
    c = MassedConfiguration(chart.masses, s)
    U = potential(c)
    g = cartesian_gradient(c)
    z3 = np.sqrt(1.0 - np.dot(z, z))
    grad = chart.E @ g - (z / z3) * (chart.e3 @ g)
    return U, grad
