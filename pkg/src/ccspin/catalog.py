"""Closed-form four-body families: rhombic, equilateral-with-centre, kite.

All configurations use the body order ``(1, 2, 3, 4)`` with bodies 1 and 2
of unit mass placed symmetrically about the y-axis and bodies 3 and 4 on the
y-axis.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

from .ccfind import cc_from_config, classify
from .core import MassedConfiguration, hessian_blocks, rotate90

SQRT3 = np.sqrt(3.0)
RHOMBIC_INTERVAL = (SQRT3, SQRT3 + 2.0)
M4_STAR = (81.0 + 64.0 * SQRT3) / 249.0
EQUILATERAL_KITE_POINT = (2.0 + SQRT3, SQRT3)
LOCUS_TOL = 1e-12


class ExcludedLocus(ValueError):
    """The kite parameters lie on a locus where the mass formulas break down."""


class BracketError(ValueError):
    """The bracket does not straddle a sign change."""


# ---------------------------------------------------------------- rhombic


def _rhombic_polys(z):
    D = z**6 + 3 * z**4 - 64 * z**3 + 3 * z**2 + 1
    Ln = (z**12 + 6 * z**10 - 512 * z**9 + 15 * z**8 + 1536 * z**7 + 20 * z**6
          - 1536 * z**5 + 15 * z**4 + 512 * z**3 + 6 * z**2 + 1)
    P6 = (z**12 - 4 * z**10 - 64 * z**9 + 5 * z**8 + 224 * z**7 - 160 * z**5
          - 5 * z**4 + 64 * z**3 + 4 * z**2 - 1)
    return D, Ln, P6


def rhombic_mass(zeta):
    """Mass ``m~`` of the pair on the short diagonal."""
    z = np.asarray(zeta, dtype=float)
    return (-8 * z**3 * (z**2 - 3) * (7 * z**4 - 6 * z**2 + 3)
            / ((z**2 - 1) ** 3 * (z**2 - 4 * z + 1) * (z**4 + 4 * z**3 + 18 * z**2 + 4 * z + 1)))


def rhombic_family(zeta: float) -> dict:
    """Rhombic central configuration with masses ``(1, 1, m~, m~)``.

    Positions are ``(-s, 0), (s, 0), (0, 1/2), (0, -1/2)`` with
    ``s = (zeta^2 - 1) / (4 zeta)``.

    Returns
    -------
    dict
        ``zeta, m_tilde, lambda, I, kappa, kappa_unit, positive, configuration``.
        ``kappa = 2 lambda`` in these coordinates; ``kappa_unit`` is the
        value at ``I = 1``. ``positive`` is False outside ``(sqrt3, sqrt3+2)``;
        the values are still returned.
    """
    z = float(zeta)
    D, Ln, P6 = _rhombic_polys(z)
    mt = float(rhombic_mass(z))
    lam = 16 * z**3 * Ln / ((z**4 - 1) ** 3 * D)
    inertia = (z**2 + 1) ** 2 * P6 / (8 * z**2 * (z**2 - 1) ** 3 * D)
    s = (z**2 - 1) / (4 * z)
    positive = bool(mt > 0)
    cfg = None
    if positive:
        cfg = MassedConfiguration([1.0, 1.0, mt, mt], [-s, 0.0, s, 0.0, 0.0, 0.5, 0.0, -0.5])
    return {
        "zeta": z,
        "m_tilde": mt,
        "lambda": lam,
        "I": inertia,
        "kappa": 2 * lam,
        "kappa_unit": 2 * lam * inertia**1.5,
        "positive": positive,
        "configuration": cfg,
    }


def rhombic_eigenvalues(zeta: float) -> dict:
    """Closed-form ``mu5..mu8`` and ``sqrt(kappa)``, all divided by ``sqrt(I)``.

    These equal the eigenvalues of ``lam I + M^-1 B`` on the complement at the
    coordinates of :func:`rhombic_family`. The labels follow the closed
    forms; they are not sorted.
    """
    z = float(zeta)
    D, Ln, P6 = _rhombic_polys(z)
    mu5 = (-48 * z**3 * (7 * z**10 - 45 * z**8 + 70 * z**6 + 256 * z**5 - 90 * z**4 + 35 * z**2 - 9)
           / ((z**2 - 1) ** 3 * (z**2 + 1) ** 2 * D))
    mu6 = 384 * z**3 * P6 / ((z**2 - 1) ** 3 * (z**2 + 1) ** 3 * D)
    p7 = np.polyval([7, 0, -88, -448, -44, 12352, 184, -37504, -70, 34176, -296, -13248,
                     -12, 576, 72, 0, -9], z)
    p8 = np.polyval([17, 0, -56, -2432, -4, 14720, 248, -32768, 70, 30720, -136, -14976,
                     60, 2688, 72, 0, -15], z)
    mu7 = 16 * z**3 * p7 / ((1 - z**2) ** 3 * (z**2 + 1) ** 5 * D)
    mu8 = 16 * z**3 * p8 / ((z**2 - 1) ** 3 * (z**2 + 1) ** 5 * D)
    kh = 16 * np.sqrt(z**5 * Ln / ((z**2 + 1) ** 5 * P6))
    return {"zeta": z, "mu5": float(mu5), "mu6": float(mu6), "mu7": float(mu7),
            "mu8": float(mu8), "kappa_half": float(kh)}


def rhombic_table(zetas) -> list[dict]:
    """Family table rows ``zeta, m_tilde, lambda, mu5..mu8, kappa``."""
    rows = []
    for z in zetas:
        f = rhombic_family(z)
        e = rhombic_eigenvalues(z)
        rows.append({"zeta": f["zeta"], "m_tilde": f["m_tilde"], "lambda": f["lambda"],
                     "mu5": e["mu5"], "mu6": e["mu6"], "mu7": e["mu7"], "mu8": e["mu8"],
                     "kappa": f["kappa"]})
    return rows


# ------------------------------------------------------------ equilateral


def equilateral_configuration(m4: float) -> MassedConfiguration:
    """Unit masses at ``(+-sqrt3/2, -1/2), (0, 1)`` and ``m4`` at the centroid."""
    if not m4 > 0:
        raise ValueError("m4 must be positive")
    return MassedConfiguration([1.0, 1.0, 1.0, float(m4)],
                               [-SQRT3 / 2, -0.5, SQRT3 / 2, -0.5, 0.0, 1.0, 0.0, 0.0])


def equilateral_family(m4: float, zero_tol: float = 1e-8) -> dict:
    """The equilateral CC with a central mass, its spectrum and ``lambda``.

    Returns ``{"cc", "report", "lambda"}``; ``lambda = 1/sqrt3 + m4``.
    """
    cc = cc_from_config(equilateral_configuration(m4))
    return {"cc": cc, "report": classify(cc, zero_tol), "lambda": cc.lam}


def _min_restricted(m4: float) -> float:
    return float(equilateral_family(m4)["report"].eig[0])


def locate_degenerate_mass(bracket=(0.5, 1.0), tol: float = 1e-14) -> float:
    """Central mass where the smallest restricted eigenvalue changes sign.

    Raises
    ------
    BracketError
        If the smallest eigenvalue has the same sign at both ends.
    """
    a, b = map(float, bracket)
    fa, fb = _min_restricted(a), _min_restricted(b)
    if fa * fb > 0:
        raise BracketError(f"no sign change on [{a}, {b}]: {fa:.3e}, {fb:.3e}")
    return float(optimize.brentq(_min_restricted, a, b, xtol=tol, rtol=4 * np.finfo(float).eps))


def degenerate_equilateral_vectors() -> np.ndarray:
    """Closed-form kernel vectors ``(E5, E6)`` at ``m4*`` (rows, unnormalized).

    ``E5`` is not mass-orthogonal to ``i r0``; project before using the pair
    as an orthonormal frame.
    """
    s3 = SQRT3
    e5 = [(64 * s3 + 81) / 498, -(741 * s3 + 908) / 1494, (64 * s3 + 81) / 498,
          (741 * s3 + 908) / 1494, 0, 0, -1, 0]
    e6 = [(165 * s3 + 179) / 747, -(371 * s3 + 738) / 2241, -(165 * s3 + 179) / 747,
          -(371 * s3 + 738) / 2241, 0, (2 * s3 + 9) / 27, 0, 1]
    return np.array([e5, e6], dtype=float)


def degenerate_equilateral_eigenvalue() -> float:
    """The double nonzero eigenvalue of ``lam I + M^-1 B`` at ``m4*``."""
    return (799 * SQRT3 + 1233) / 498


def mass_principal_angles(A, B, masses) -> np.ndarray:
    """Principal angles between row spans of ``A`` and ``B`` in the mass metric."""
    sq = np.sqrt(np.repeat(np.asarray(masses, dtype=float), 2))
    return linalg.subspace_angles((np.atleast_2d(A) * sq).T, (np.atleast_2d(B) * sq).T)


# ------------------------------------------------------------------ kite


@dataclass(frozen=True)
class KiteShape:
    """Kite parameters ``(xi, eta)`` with derived geometry.

    Bodies: ``(-s, -t), (s, -t)`` of unit mass, ``(0, u)`` of mass ``m3``
    and ``(0, u - 1)`` of mass ``m4``.
    """

    xi: float
    eta: float
    s: float = field(init=False)
    w: float = field(init=False)  # u + t
    d1: float = field(init=False)
    d2: float = field(init=False)

    def __post_init__(self):
        xi, eta = float(self.xi), float(self.eta)
        reason = excluded_reason(xi, eta)
        if reason:
            raise ExcludedLocus(reason)
        a = (xi**2 - 1) / (2 * xi)
        b = (eta**2 - 1) / (2 * eta)
        s = 1.0 / (a - b)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "w", s * a)
        object.__setattr__(self, "d1", s * (xi**2 + 1) / (2 * xi))
        object.__setattr__(self, "d2", s * (eta**2 + 1) / (2 * eta))


def excluded_reason(xi: float, eta: float, tol: float = LOCUS_TOL) -> str:
    """Empty string if ``(xi, eta)`` is admissible, else the violated condition."""
    if not (xi > eta > 0):
        return "require xi > eta > 0"
    for name, v in (("xi", xi), ("eta", eta)):
        if abs(v - 1) <= tol:
            return f"{name} = 1 (collinear triple)"
        for r in (2 - SQRT3, 2 + SQRT3):
            if abs(v - r) <= tol:
                return f"{name} = 2 +- sqrt3 (vanishing mass or equilateral)"
    if abs(xi * eta - 1) <= tol:
        return "xi*eta = 1 (rhombus)"
    return ""


def kite_masses_rational(xi, eta):
    """Closed-form ``(m3, m4)`` as rational functions of ``(xi, eta)``."""
    x, e = np.asarray(xi, dtype=float), np.asarray(eta, dtype=float)
    m3 = (-(e - 1) * (e + 1) * (e**2 - 4 * e + 1) * (e**4 + 4 * e**3 + 18 * e**2 + 4 * e + 1)
          * (x**2 + 1) ** 3 * (e - x) ** 2 * (e * x + 1) ** 2
          / (32 * (e**2 + 1) ** 3 * x**2 * (e**2 * x + 2 * e - x)
             * (e**4 * x**2 - 3 * e**3 * x**3 + e**3 * x + 3 * e**2 * x**4 - 2 * e**2 * x**2
                + e**2 + 3 * e * x**3 - e * x + x**2)))
    m4 = ((e**2 + 1) ** 3 * (x - 1) * (x + 1) * (x**2 - 4 * x + 1)
          * (x**4 + 4 * x**3 + 18 * x**2 + 4 * x + 1) * (e - x) ** 2 * (e * x + 1) ** 2
          / (32 * e**3 * (x**2 + 1) ** 3 * (2 * e * x - x**2 + 1)
             * (e**4 * x**2 - e**3 * x**3 + e**3 * x + e**2 * x**4 - 2 * e**2 * x**2 + e**2
                + 3 * e * x**3 - 3 * e * x + 3 * x**2)))
    return m3, m4


def kite_masses_geometric(shape: KiteShape):
    """``(m3, m4, lambda)`` from the force balance in geometric form."""
    s, w, d1, d2 = shape.s, shape.w, shape.d1, shape.d2
    m3 = 2 * (w - 1) * (1 / (8 * s**3) - 1 / d2**3) / (1 / d1**3 - 1)
    m4 = 2 * w * (1 / (8 * s**3) - 1 / d1**3) / (1 - 1 / d2**3)
    lam = 1 / (4 * s**3) + m3 / d1**3 + m4 / d2**3
    return m3, m4, lam


def positivity_predicates(xi, eta):
    """Sign conditions equivalent to ``m3 > 0`` and ``m4 > 0``."""
    x, e = np.asarray(xi, dtype=float), np.asarray(eta, dtype=float)
    p3 = (1 - e) * (e**2 - 4 * e + 1) * (e**2 * x + 2 * e - x) > 0
    p4 = (x - 1) * (x**2 - 4 * x + 1) * (2 * e * x - x**2 + 1) > 0
    return p3, p4


@dataclass(frozen=True)
class KiteMasses:
    """Masses and multiplier of a kite CC; iterates as ``(m3, m4, lam)``."""

    m3: float
    m4: float
    lam: float
    m3_positive: bool
    m4_positive: bool

    @property
    def positive(self) -> bool:
        return self.m3_positive and self.m4_positive

    def __iter__(self):
        return iter((self.m3, self.m4, self.lam))


def kite_masses(shape: KiteShape) -> KiteMasses:
    """Closed-form masses and ``lambda`` for a kite shape.

    Negative masses are returned with their flags cleared, not raised.
    """
    m3, m4 = (float(v) for v in kite_masses_rational(shape.xi, shape.eta))
    s, d1, d2 = shape.s, shape.d1, shape.d2
    lam = 1 / (4 * s**3) + m3 / d1**3 + m4 / d2**3
    p3, p4 = positivity_predicates(shape.xi, shape.eta)
    return KiteMasses(m3, m4, lam, bool(p3), bool(p4))


def kite_positions(s: float, w: float, m3: float, m4: float) -> np.ndarray:
    """Centered coordinates for half-width ``s``, apex offset ``w = u + t``."""
    u = (2 * w + m4) / (m3 + m4 + 2)
    t = w - u
    return np.array([-s, -t, s, -t, 0.0, u, 0.0, u - 1.0])


def kite_configuration(shape: KiteShape, masses: KiteMasses | None = None) -> MassedConfiguration:
    """Kite configuration; requires positive masses."""
    km = masses or kite_masses(shape)
    if not km.positive:
        raise ValueError("kite masses are not both positive")
    return MassedConfiguration([1.0, 1.0, km.m3, km.m4], kite_positions(shape.s, shape.w, km.m3, km.m4))


def kite_test_vectors(masses, x) -> np.ndarray:
    """Rows ``(V~, P~, iV~, iP~)`` spanning the complement for a kite.

    ``V`` moves the unit pair apart horizontally, ``P`` moves the pair
    vertically against the axial pair; both are projected off ``r0``.
    """
    m = np.asarray(masses, dtype=float)
    md = np.repeat(m, 2)
    c = 2.0 / (m[2] + m[3])
    V = np.array([-1.0, 0, 1, 0, 0, 0, 0, 0])
    P = np.array([0.0, -1, 0, -1, 0, c, 0, c])
    x = np.asarray(x, dtype=float)
    I = np.sum(md * x * x)
    Vt = V - np.sum(md * V * x) / I * x
    Pt = P - np.sum(md * P * x) / I * x
    return np.array([Vt, Pt, rotate90(Vt), rotate90(Pt)])


def kite_determinants(masses, x, lam: float | None = None) -> dict:
    """Scale-free degeneracy tests on a kite (or any axial four-body) CC.

    ``det1`` and ``det2`` are ``det(S^T A S) / (det(S^T M S) lam^2)`` with
    ``A = lam M + B`` and ``S = (V~, P~)`` or ``(iV~, iP~)``. ``full_zero``
    is ``max |S^T A S| / lam`` over the first pair after mass normalization.
    """
    c = MassedConfiguration(masses, x)
    md = c.mass_diag
    if lam is None:
        from .core import moment_of_inertia, potential
        lam = potential(c) / moment_of_inertia(c)
    A = lam * np.diag(md) + hessian_blocks(c)
    T = kite_test_vectors(c.masses, c.x)
    out = {}
    for key, S in (("det1", T[:2]), ("det2", T[2:])):
        G = S @ A @ S.T
        Mg = (S * md) @ S.T
        out[key] = float(np.linalg.det(G) / np.linalg.det(Mg) / lam**2)
        if key == "det1":
            L = np.linalg.cholesky(Mg)
            Li = np.linalg.inv(L)
            out["full_zero"] = float(np.abs(Li @ G @ Li.T).max() / lam)
    return out


# ---------------------------------------------------------------- batched


def _batch_hessian(masses: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Hessians of ``U`` for a stack of configurations (B, 2N) with masses (B, N)."""
    Bn, n2 = X.shape
    n = n2 // 2
    P = X.reshape(Bn, n, 2)
    H = np.zeros((Bn, n, 2, n, 2))
    eye = np.eye(2)
    for j in range(n):
        for k in range(j + 1, n):
            d = P[:, j] - P[:, k]
            r2 = np.sum(d * d, axis=1)
            w = masses[:, j] * masses[:, k] / r2**1.5
            blk = w[:, None, None] * (eye - 3 * d[:, :, None] * d[:, None, :] / r2[:, None, None])
            H[:, j, :, k, :] = blk
            H[:, k, :, j, :] = blk
            H[:, j, :, j, :] -= blk
            H[:, k, :, k, :] -= blk
    return H.reshape(Bn, n2, n2)


def _batch_potential(masses, X):
    Bn, n2 = X.shape
    n = n2 // 2
    P = X.reshape(Bn, n, 2)
    U = np.zeros(Bn)
    for j in range(n):
        for k in range(j + 1, n):
            U += masses[:, j] * masses[:, k] / np.linalg.norm(P[:, j] - P[:, k], axis=1)
    return U


def _scan_row(xi: float, etas: np.ndarray) -> np.ndarray:
    """Evaluate one grid row; columns ``xi, eta, m3, m4, det1, det2, min_eig, full_zero``."""
    k = etas.size
    out = np.full((k, 8), np.nan)
    out[:, 0] = xi
    out[:, 1] = etas
    ok = np.array([not excluded_reason(xi, e) for e in etas])
    if not ok.any():
        return out
    e = etas[ok]
    m3, m4 = kite_masses_rational(xi, e)
    out[ok, 2] = m3
    out[ok, 3] = m4
    p3, p4 = positivity_predicates(xi, e)
    good = p3 & p4
    if not good.any():
        return out
    idx = np.flatnonzero(ok)[good]
    e, m3, m4 = e[good], m3[good], m4[good]
    a = (xi**2 - 1) / (2 * xi)
    b = (e**2 - 1) / (2 * e)
    s = 1 / (a - b)
    w = s * a
    u = (2 * w + m4) / (m3 + m4 + 2)
    t = w - u
    z = np.zeros_like(s)
    X = np.column_stack([-s, -t, s, -t, z, u, z, u - 1])
    Ms = np.column_stack([np.ones_like(m3), np.ones_like(m3), m3, m4])
    md = np.repeat(Ms, 2, axis=1)
    I = np.sum(md * X * X, axis=1)
    lam = _batch_potential(Ms, X) / I
    A = lam[:, None, None] * (md[:, :, None] * np.eye(8)) + _batch_hessian(Ms, X)
    # test vectors
    c = 2.0 / (m3 + m4)
    one = np.ones_like(c)
    V = np.column_stack([-one, z, one, z, z, z, z, z])
    Pv = np.column_stack([z, -one, z, -one, z, c, z, c])

    def proj(v):
        return v - (np.sum(md * v * X, axis=1) / I)[:, None] * X

    def rot(v):
        p = v.reshape(-1, 4, 2)
        return np.stack([-p[..., 1], p[..., 0]], axis=-1).reshape(-1, 8)

    Vt, Pt = proj(V), proj(Pv)
    for col, (S1, S2) in ((4, (Vt, Pt)), (5, (rot(Vt), rot(Pt)))):
        S = np.stack([S1, S2], axis=1)
        G = np.einsum("bik,bkl,bjl->bij", S, A, S)
        Mg = np.einsum("bik,bk,bjk->bij", S, md, S)
        out[idx, col] = np.linalg.det(G) / np.linalg.det(Mg) / lam**2
        if col == 4:
            L = np.linalg.cholesky(Mg)
            Li = np.linalg.inv(L)
            Gn = Li @ G @ np.swapaxes(Li, 1, 2)
            out[idx, 7] = np.abs(Gn).max(axis=(1, 2)) / lam
    # smallest restricted eigenvalue, forced directions shifted away
    sq = np.sqrt(md)
    Sym = A / (sq[:, :, None] * sq[:, None, :])
    forced = np.stack([
        np.tile([1.0, 0.0], 4) * sq,
        np.tile([0.0, 1.0], 4) * sq,
        X * sq,
        rot(X) * sq,
    ], axis=1)
    forced /= np.linalg.norm(forced, axis=2, keepdims=True)
    shift = 1e3 * lam
    Sym = Sym + shift[:, None, None] * np.einsum("bki,bkj->bij", forced, forced)
    ev = np.linalg.eigvalsh(Sym)
    out[idx, 6] = ev[:, 0] / lam
    return out


SCAN_COLUMNS = ("xi", "eta", "m3", "m4", "det1", "det2", "min_eig", "full_zero")


@dataclass
class KiteScan:
    """Result of :func:`kite_two_degree_scan`.

    ``table`` has columns :data:`SCAN_COLUMNS`; rows with non-positive
    masses or excluded parameters carry NaN determinants. The findings are
    numeric evidence only.
    """

    table: np.ndarray
    tol: float
    simultaneous: np.ndarray
    full_zero: np.ndarray
    n_positive: int
    det1_sign_changes: int
    det2_sign_changes: int
    shape: tuple

    @property
    def columns(self):
        return SCAN_COLUMNS

    def to_json(self) -> dict:
        return {
            "grid": list(self.shape),
            "tol": self.tol,
            "n_positive_cells": self.n_positive,
            "simultaneous_cells": self.simultaneous.tolist(),
            "full_zero_cells": self.full_zero.tolist(),
            "det1_sign_changes": self.det1_sign_changes,
            "det2_sign_changes": self.det2_sign_changes,
            "label": "numerical evidence on a grid; not a proof",
        }


def _sign_changes(vals: np.ndarray) -> int:
    """Sign changes between adjacent finite entries along both grid axes."""
    n = 0
    for arr in (vals, vals.T):
        a, b = arr[:, :-1], arr[:, 1:]
        m = np.isfinite(a) & np.isfinite(b)
        n += int(np.sum(m & (np.sign(a) != np.sign(b))))
    return n


def kite_two_degree_scan(xi_range=(1.0, 6.0), eta_range=(0.2, 1.0), n=200, tol=1e-8,
                         threads: int = 1) -> KiteScan:
    """Search a grid of open-interval points for two-degree degeneracy.

    Grid points are ``n`` interior midpoints per axis. A cell is flagged
    when ``|det1| < tol`` and ``|det2| < tol`` at once.
    """
    def mids(lo, hi):
        h = (hi - lo) / n
        return lo + h * (np.arange(n) + 0.5)

    xis, etas = mids(*xi_range), mids(*eta_range)
    with np.errstate(divide="ignore", invalid="ignore"):
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                rows = list(ex.map(lambda x: _scan_row(x, etas), xis))
        else:
            rows = [_scan_row(x, etas) for x in xis]
    table = np.vstack(rows)
    d1, d2 = table[:, 4], table[:, 5]
    fin = np.isfinite(d1) & np.isfinite(d2)
    simul = np.flatnonzero(fin & (np.abs(d1) < tol) & (np.abs(d2) < tol))
    full = np.flatnonzero(fin & (table[:, 7] < tol))
    return KiteScan(
        table=table,
        tol=tol,
        simultaneous=simul,
        full_zero=full,
        n_positive=int(fin.sum()),
        det1_sign_changes=_sign_changes(d1.reshape(n, n)),
        det2_sign_changes=_sign_changes(d2.reshape(n, n)),
        shape=(n, n),
    )


__all__ = [
    "BracketError", "EQUILATERAL_KITE_POINT", "ExcludedLocus", "KiteMasses", "KiteScan",
    "KiteShape", "M4_STAR", "RHOMBIC_INTERVAL", "SCAN_COLUMNS", "degenerate_equilateral_eigenvalue",
    "degenerate_equilateral_vectors", "equilateral_configuration", "equilateral_family",
    "excluded_reason", "kite_configuration", "kite_determinants", "kite_masses",
    "kite_masses_geometric", "kite_masses_rational", "kite_positions", "kite_test_vectors",
    "kite_two_degree_scan", "locate_degenerate_mass", "mass_principal_angles",
    "positivity_predicates", "rhombic_eigenvalues", "rhombic_family", "rhombic_mass",
    "rhombic_table",
]
