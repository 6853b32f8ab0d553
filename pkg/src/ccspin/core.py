"""Mass-metric geometry of planar configurations.

Configurations are stored as flat arrays ``x = (x1, y1, x2, y2, ...)``.
All inner products use the mass metric ``<a, b> = sum_j m_j (a_j, b_j)``.
The gradient returned by :func:`potential_gradient` is the mass-metric
gradient, so that a central configuration satisfies ``grad U = -lambda r``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

COLLISION_RTOL = 1e-12


class CollisionError(ValueError):
    """Raised when two bodies (nearly) coincide."""


@dataclass(frozen=True, eq=False)
class MassedConfiguration:
    """Masses plus planar positions.

    Parameters
    ----------
    masses : array_like, shape (N,)
        Strictly positive masses.
    x : array_like, shape (2N,)
        Flattened coordinates ``(x1, y1, ..., xN, yN)``.
    """

    masses: np.ndarray
    x: np.ndarray
    centered: bool = field(default=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float).ravel()
        x = np.asarray(self.x, dtype=float).ravel()
        if m.size < 2:
            raise ValueError("need at least two bodies")
        if np.any(m <= 0) or not np.all(np.isfinite(m)):
            raise ValueError("masses must be finite and strictly positive")
        if x.size != 2 * m.size:
            raise ValueError(f"expected {2 * m.size} coordinates, got {x.size}")
        if not np.all(np.isfinite(x)):
            raise ValueError("coordinates must be finite")
        m.flags.writeable = False
        x.flags.writeable = False
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.masses.size

    @property
    def points(self) -> np.ndarray:
        return self.x.reshape(-1, 2)

    @property
    def mass_diag(self) -> np.ndarray:
        """Diagonal of the mass matrix, ``(m1, m1, m2, m2, ...)``."""
        return np.repeat(self.masses, 2)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MassedConfiguration):
            return NotImplemented
        return np.array_equal(self.masses, other.masses) and np.array_equal(self.x, other.x)

    __hash__ = None

    def with_x(self, x) -> "MassedConfiguration":
        return MassedConfiguration(self.masses, x)

    @classmethod
    def from_points(cls, masses, points) -> "MassedConfiguration":
        return cls(masses, np.asarray(points, dtype=float).ravel())

    def to_json(self) -> dict:
        return {"masses": self.masses.tolist(), "points": self.points.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "MassedConfiguration":
        return cls.from_points(data["masses"], data["points"])


def _vec(a) -> np.ndarray:
    return a.x if isinstance(a, MassedConfiguration) else np.asarray(a, dtype=float).ravel()


def _check_same(a: MassedConfiguration, b) -> None:
    if isinstance(b, MassedConfiguration):
        if b.n != a.n or not np.array_equal(a.masses, b.masses):
            raise ValueError("configurations have different masses")
    elif np.asarray(b).size != a.x.size:
        raise ValueError("dimension mismatch")


def rotate90(v) -> np.ndarray:
    """Apply the complex structure ``i`` pointwise: ``(x, y) -> (-y, x)``."""
    p = _vec(v).reshape(-1, 2)
    return np.column_stack([-p[:, 1], p[:, 0]]).ravel()


def mass_inner(a, b, masses=None) -> float:
    """Mass scalar product ``sum_j m_j (a_j, b_j)``.

    ``a`` or ``b`` may be plain arrays if ``masses`` is given or if the other
    argument is a :class:`MassedConfiguration`.
    """
    if masses is None:
        ref = a if isinstance(a, MassedConfiguration) else b
        if not isinstance(ref, MassedConfiguration):
            raise ValueError("masses required for plain arrays")
        _check_same(ref, b if ref is a else a)
        masses = ref.masses
    md = np.repeat(np.asarray(masses, dtype=float), 2)
    va, vb = _vec(a), _vec(b)
    if va.size != md.size or vb.size != md.size:
        raise ValueError("dimension mismatch")
    return float(np.sum(md * va * vb))


def mass_norm(a, masses=None) -> float:
    return float(np.sqrt(mass_inner(a, a, masses)))


def center_of_mass(c: MassedConfiguration) -> np.ndarray:
    return c.masses @ c.points / c.masses.sum()


def moment_of_inertia(c: MassedConfiguration) -> float:
    """``I = sum m_j |r_j - r_c|^2``."""
    d = c.points - center_of_mass(c)
    return float(np.sum(c.masses * np.sum(d * d, axis=1)))


def center_and_project(c: MassedConfiguration) -> MassedConfiguration:
    """Translate so that the center of mass sits at the origin."""
    p = c.points - center_of_mass(c)
    return MassedConfiguration(c.masses, p.ravel(), centered=True)


def rotate_scale(c: MassedConfiguration, rho: float, alpha: float) -> MassedConfiguration:
    """Map each point to ``rho * exp(i alpha) * r_k``."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    ca, sa = np.cos(alpha), np.sin(alpha)
    R = np.array([[ca, -sa], [sa, ca]])
    return MassedConfiguration(c.masses, (rho * c.points @ R.T).ravel(), centered=c.centered)


def translation_vectors(n: int) -> np.ndarray:
    """Rows ``E1 = (1,0,1,0,...)`` and ``E2 = (0,1,0,1,...)``."""
    e = np.zeros((2, 2 * n))
    e[0, 0::2] = 1.0
    e[1, 1::2] = 1.0
    return e


@lru_cache(maxsize=32)
def _pairs(n: int):
    j, k = np.triu_indices(n, k=1)
    j.flags.writeable = False
    k.flags.writeable = False
    return j, k


def _diffs(c: MassedConfiguration):
    """Pair differences ``r_j - r_k`` and distances, with collision check."""
    j, k = _pairs(c.n)
    p = c.points
    d = p[j] - p[k]
    r = np.sqrt(np.sum(d * d, axis=1))
    diam = np.ptp(p, axis=0).max() if c.n > 1 else 0.0
    if np.any(r <= COLLISION_RTOL * max(diam, np.finfo(float).tiny)):
        raise CollisionError("collision: some separation is below threshold")
    return j, k, d, r


def pair_table(c: MassedConfiguration) -> np.ndarray:
    """Symmetric matrix of separations ``|r_j - r_k|``."""
    j, k, _, r = _diffs(c)
    out = np.zeros((c.n, c.n))
    out[j, k] = r
    out[k, j] = r
    return out


def potential(c: MassedConfiguration) -> float:
    """Force function ``U = sum_{k<j} m_k m_j / r_jk``."""
    j, k, _, r = _diffs(c)
    return float(np.sum(c.masses[j] * c.masses[k] / r))


def cartesian_gradient(c: MassedConfiguration) -> np.ndarray:
    """Partial derivatives ``dU/dx`` (no mass division)."""
    j, k, d, r = _diffs(c)
    f = (c.masses[j] * c.masses[k] / r**3)[:, None] * d
    g = np.zeros((c.n, 2))
    np.add.at(g, j, -f)
    np.add.at(g, k, f)
    return g.ravel()


def potential_gradient(c: MassedConfiguration) -> MassedConfiguration:
    """Mass-metric gradient: component ``k`` is ``(1/m_k) dU/dr_k``."""
    return c.with_x(cartesian_gradient(c) / c.mass_diag)


def hessian_blocks(c: MassedConfiguration) -> np.ndarray:
    """Cartesian Hessian ``B`` of ``U``.

    Off-diagonal blocks ``B_jk = m_j m_k / r^3 (I - 3 D D^T / r^2)`` and
    diagonal blocks ``B_kk = -sum_{j != k} B_jk``.
    """
    j, k, d, r = _diffs(c)
    w = c.masses[j] * c.masses[k] / r**3
    blk = w[:, None, None] * (np.eye(2)[None] - 3.0 * d[:, :, None] * d[:, None, :] / (r**2)[:, None, None])
    n = c.n
    H = np.zeros((n, 2, n, 2))
    H[j, :, k, :] = blk
    H[k, :, j, :] = blk
    np.add.at(H, (j, slice(None), j, slice(None)), -blk)
    np.add.at(H, (k, slice(None), k, slice(None)), -blk)
    return H.reshape(2 * n, 2 * n)


def third_derivative_tensor(c: MassedConfiguration, basis) -> np.ndarray:
    """Third derivatives ``d^3 U(e_a, e_b, e_c)`` for all rows of ``basis``.

    Uses the closed-form third derivative of ``1/|D|``::

        T[p,q,w] = -15 (D.p)(D.q)(D.w)/r^7 + 3[(p.q)(D.w) + (p.w)(D.q) + (q.w)(D.p)]/r^5

    summed over pairs with weight ``m_j m_k``.

    Parameters
    ----------
    c : MassedConfiguration
        Base point.
    basis : array_like, shape (d, 2N)
        Direction vectors.

    Returns
    -------
    ndarray, shape (d, d, d)
    """
    j, k, d, r = _diffs(c)
    E = np.atleast_2d(np.asarray(basis, dtype=float))
    P = E.reshape(E.shape[0], c.n, 2)
    dp = P[:, j, :] - P[:, k, :]                      # (b, pairs, 2)
    w = c.masses[j] * c.masses[k]
    s = np.einsum("bpi,pi->bp", dp, d)                 # D.p
    g = np.einsum("api,bpi->pab", dp, dp)              # p.q
    t1 = -15.0 * np.einsum("p,ap,bp,cp->abc", w / r**7, s, s, s)
    c5 = 3.0 * w / r**5
    t2 = np.einsum("p,pab,cp->abc", c5, g, s)
    return t1 + t2 + t2.transpose(0, 2, 1) + t2.transpose(2, 1, 0)


def third_directional(c: MassedConfiguration, u, v, w) -> float:
    """Exact third directional derivative ``d^3 U(c)(u, v, w)``."""
    for a in (u, v, w):
        _check_same(c, a)
    j, k, d, r = _diffs(c)
    m = c.masses[j] * c.masses[k]
    du, dv, dw = (_vec(a).reshape(-1, 2)[j] - _vec(a).reshape(-1, 2)[k] for a in (u, v, w))
    su, sv, sw = (np.sum(d * q, axis=1) for q in (du, dv, dw))
    uv, uw, vw = np.sum(du * dv, 1), np.sum(du * dw, 1), np.sum(dv * dw, 1)
    val = -15.0 * su * sv * sw / r**7 + 3.0 * (uv * sw + uw * sv + vw * su) / r**5
    return float(np.sum(m * val))


@lru_cache(maxsize=32)
def _incidence(n: int) -> np.ndarray:
    j, k = _pairs(n)
    inc = np.zeros((j.size, n))
    inc[np.arange(j.size), j] = 1.0
    inc[np.arange(j.size), k] = -1.0
    inc.flags.writeable = False
    return inc


def batch_potential_gradient(masses: np.ndarray, X: np.ndarray):
    """Vectorized ``U`` and Cartesian ``dU/dx`` for a batch of configurations.

    Parameters
    ----------
    masses : ndarray, shape (N,)
    X : ndarray, shape (B, 2N)

    Returns
    -------
    U : ndarray, shape (B,)
    G : ndarray, shape (B, 2N)
    """
    n = masses.size
    inc = _incidence(n)
    j, k = _pairs(n)
    P = X.reshape(X.shape[0], n, 2)
    D = inc @ P                                   # (B, pairs, 2)
    r2 = D[..., 0] ** 2 + D[..., 1] ** 2
    if np.any(r2 <= 0.0):
        raise CollisionError("collision in batch evaluation")
    r = np.sqrt(r2)
    mm = masses[j] * masses[k]
    U = (mm / r).sum(axis=1)
    F = (mm / (r2 * r))[:, :, None] * D
    G = -(inc.T @ F)
    return U, G.reshape(X.shape)
