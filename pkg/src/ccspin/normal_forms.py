"""Linearization at the collision equilibrium, center-manifold data, the
infinite-spin verdict and planar polar analysis.

Shifted variables are ``x = (z, Z, gamma)`` with ``gamma = Upsilon - sqrt(kappa)``
on ``r = 0``. The linear part is::

    A = [[0, I, 0], [Lambda, -sqrt(kappa)/2 I, 0], [0, 0, sqrt(kappa)]]

and the quadratic parts are ``chi_k = (sum a_ijk z_i z_j - gamma Z_k)/2`` in the
``Z_k`` equation and ``chi_0 = gamma^2/2 + |Z|^2 - sum mu_j z_j^2 / 2`` in the
``gamma`` equation.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import comb

from .dynamics import rhs_batch
from .frame import FrameChart

EPS_FACTOR = 1.0 / 8.0
N3_TOL = 1e-9
DISC_TOL = 1e-12


class EmptyCenter(ValueError):
    """The CC is nondegenerate: there is no center direction."""


class IdenticallyZero(ValueError):
    """The trigonometric polynomial vanishes identically."""


class SingularTransform(RuntimeError):
    """The block transformation is singular (never for ``epsilon > 0``)."""


# ---------------------------------------------------------------- linear part

@dataclass
class LinearData:
    """Linear part ``A``, block transformation ``P`` and block form ``C``.

    ``P`` columns are ordered mode by mode, ``(q_k, p_k)`` in the ``(z_k, Z_k)``
    plane, followed by ``gamma``. ``kinds[k]`` is one of ``"zero"``, ``"real"``,
    ``"complex"`` (``mu < -kappa/16``; the pair is stored as real and imaginary
    parts) or ``"n3"`` (``mu = -kappa/16``; Jordan block coupled through ``epsilon``).
    """

    A: np.ndarray
    P: np.ndarray
    P_inv: np.ndarray
    C: np.ndarray
    tilde_mu: np.ndarray
    epsilon: float
    kinds: list
    residual: float

    @property
    def n3_engaged(self) -> bool:
        return "n3" in self.kinds


def snapped_mu(chart: FrameChart) -> np.ndarray:
    """Chart eigenvalues with the kernel set exactly to zero."""
    return np.where(chart.zero_mask, 0.0, chart.mu)


def linear_matrix(chart: FrameChart, mu=None) -> np.ndarray:
    mu = snapped_mu(chart) if mu is None else np.asarray(mu, dtype=float)
    d = mu.size
    sk = np.sqrt(chart.kappa)
    A = np.zeros((2 * d + 1, 2 * d + 1))
    A[:d, d:2 * d] = np.eye(d)
    A[d:2 * d, :d] = np.diag(mu)
    A[d:2 * d, d:2 * d] = -0.5 * sk * np.eye(d)
    A[-1, -1] = sk
    return A


def build_linearization(chart: FrameChart, epsilon: float | None = None, mu=None,
                        n3_tol: float = N3_TOL) -> LinearData:
    """Assemble ``A``, the block transformation ``P`` and ``C = P^-1 A P``.

    Parameters
    ----------
    epsilon : float, optional
        Coupling used in the ``mu = -kappa/16`` block; default ``sqrt(kappa)/8``.
    mu : array_like, optional
        Override the chart eigenvalues (synthetic spectra).
    """
    k = chart.kappa
    sk = np.sqrt(k)
    eps = sk * EPS_FACTOR if epsilon is None else float(epsilon)
    if not eps > 0:
        raise ValueError("epsilon must be positive")
    mu = snapped_mu(chart) if mu is None else np.asarray(mu, dtype=float)
    d = mu.size
    A = linear_matrix(chart, mu)
    P = np.zeros_like(A)
    C = np.zeros_like(A)
    kinds = []
    tm = np.empty(d, dtype=complex)
    for j, m in enumerate(mu):
        iz, iZ = j, d + j
        cq, cp = 2 * j, 2 * j + 1
        disc = m + k / 16
        if abs(disc) <= n3_tol * k:
            s = -sk / 4
            P[iz, cq], P[iZ, cq] = 1.0, s
            P[iz, cp], P[iZ, cp] = 1.0, s + eps
            C[cq, cq], C[cq, cp], C[cp, cp] = s, eps, s
            kinds.append("n3")
            tm[j] = s
        elif disc > 0:
            s1 = -sk / 4 + np.sqrt(disc)
            s2 = -sk / 2 - s1
            P[iz, cq], P[iZ, cq] = 1.0, s1
            P[iz, cp], P[iZ, cp] = 1.0, s2
            C[cq, cq], C[cp, cp] = s1, s2
            kinds.append("zero" if m == 0.0 else "real")
            tm[j] = s1
        else:
            a, w = -sk / 4, np.sqrt(-disc)
            # columns Re(v), Im(v) of v = (1, a + i w)
            P[iz, cq], P[iZ, cq] = 1.0, a
            P[iz, cp], P[iZ, cp] = 0.0, w
            C[cq, cq], C[cq, cp], C[cp, cq], C[cp, cp] = a, w, -w, a
            kinds.append("complex")
            tm[j] = a + 1j * w
    P[-1, -1] = 1.0
    C[-1, -1] = sk
    cond = np.linalg.cond(P)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularTransform(f"block transformation is singular (cond {cond:.3e})")
    P_inv = np.linalg.inv(P)
    res = float(np.linalg.norm(P_inv @ A @ P - C) / np.linalg.norm(A))
    return LinearData(A, P, P_inv, C, tm, eps, kinds, res)


def spectrum_multiset(chart: FrameChart, mu=None) -> np.ndarray:
    """``{sqrt(kappa)} U {tilde mu_j} U {-sqrt(kappa)/2 - tilde mu_j}``."""
    mu = snapped_mu(chart) if mu is None else np.asarray(mu, dtype=float)
    sk = np.sqrt(chart.kappa)
    t = -sk / 4 + np.sqrt((mu + chart.kappa / 16).astype(complex))
    return np.concatenate([[sk], t, -sk / 2 - t])


# ---------------------------------------------------------------- quadratics

def shifted_quadratics(chart: FrameChart, x) -> tuple[np.ndarray, float]:
    """``(chi_k, chi_0)`` at ``x = (z, Z, gamma)``."""
    x = np.asarray(x, dtype=float)
    d = chart.d
    z, Z, g = x[:d], x[d:2 * d], x[2 * d]
    mu = snapped_mu(chart)
    chi = 0.5 * (np.einsum("ijk,i,j->k", chart.a, z, z) - g * Z)
    chi0 = 0.5 * g * g + Z @ Z - 0.5 * np.sum(mu * z * z)
    return chi, float(chi0)


def truncated_rhs(chart: FrameChart, x) -> np.ndarray:
    """Linear plus quadratic part of the shifted ``r = 0`` system."""
    d = chart.d
    chi, chi0 = shifted_quadratics(chart, x)
    out = linear_matrix(chart) @ np.asarray(x, dtype=float)
    out[d:2 * d] += chi
    out[-1] += chi0
    return out


def shifted_rhs(chart: FrameChart, x) -> np.ndarray:
    """Exact ``r = 0`` right-hand side in shifted variables ``(z, Z, gamma)``."""
    x = np.asarray(x, dtype=float)
    d = chart.d
    y = np.concatenate([x[:2 * d], [0.0, np.sqrt(chart.kappa) + x[2 * d], 0.0, 0.0]])
    dy = rhs_batch(chart, y[None])[0]
    return np.concatenate([dy[:2 * d], [dy[2 * d + 1]]])


# ---------------------------------------------------------------- center manifold

@dataclass
class CenterData:
    """Quadratic center-manifold data.

    Attributes
    ----------
    n0 : int
    center : ndarray
        Chart indices of the zero modes.
    Fc2 : dict
        ``{k: S}`` with ``z_k = u^T S u`` for hyperbolic modes ``k`` (quadratic part).
    c_tensor : ndarray, shape (n0, n0, n0)
        ``u'_k = sum_ij c[i, j, k] u_i u_j`` with ``c = a / sqrt(kappa)``.
    c_reduced : ndarray
        For ``n0 = 2``: ``(c1, c2, c3, c4) = (c555, c556, c566, c666)``; for
        ``n0 = 1``: ``(c555,)``.
    """

    chart: FrameChart
    n0: int
    center: np.ndarray
    Fc2: dict
    c_tensor: np.ndarray
    c_reduced: np.ndarray
    residual_ratio: float = np.nan
    residuals: tuple = ()

    def embed(self, u) -> np.ndarray:
        """Point ``X(u) = (z, Z, gamma)`` of the truncated center manifold."""
        ch = self.chart
        d = ch.d
        u = np.asarray(u, dtype=float)
        a = ch.a
        k = ch.kappa
        x = np.zeros(2 * d + 1)
        C = self.center
        quad = np.einsum("ijk,i,j->k", a[np.ix_(C, C, range(d))], u, u)
        mu = snapped_mu(ch)
        for kk in range(d):
            if kk in set(C.tolist()):
                continue
            x[kk] = -0.5 * quad[kk] / mu[kk]
        x[C] = u - 2.0 * quad[C] / k
        x[d + C] = quad[C] / np.sqrt(k)
        return x

    def embed_jacobian(self, u) -> np.ndarray:
        ch = self.chart
        d = ch.d
        u = np.asarray(u, dtype=float)
        C = self.center
        a = ch.a[np.ix_(C, C, range(d))]
        dq = 2.0 * np.einsum("ijk,i->kj", a, u)  # d quad_k / d u_j
        mu = snapped_mu(ch)
        J = np.zeros((2 * d + 1, C.size))
        for kk in range(d):
            if kk in set(C.tolist()):
                continue
            J[kk] = -0.5 * dq[kk] / mu[kk]
        J[C] = np.eye(C.size) - 2.0 * dq[C] / ch.kappa
        J[d + C] = dq[C] / np.sqrt(ch.kappa)
        return J

    def reduced_field(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return np.einsum("ijk,i,j->k", self.c_tensor, u, u)

    def invariance_residual(self, u) -> float:
        """``|f(X(u)) - DX(u) g(u)|`` with the exact ``r = 0`` field ``f``."""
        X = self.embed(u)
        return float(np.linalg.norm(shifted_rhs(self.chart, X) - self.embed_jacobian(u) @ self.reduced_field(u)))

    def to_json(self) -> dict:
        return {"n0": self.n0, "center": self.center.tolist(), "c": self.c_reduced.tolist(),
                "residual_ratio": self.residual_ratio, "residuals": list(self.residuals)}


def center_manifold_quadratic(chart: FrameChart, u_scale: float = 1e-3, direction=None) -> CenterData:
    """Quadratic center-manifold graph, reduced field and the shrinking-ball test.

    On the center manifold, hyperbolic modes satisfy ``mu_k z_k + chi_k = 0``
    and ``Z_k = 0`` to second order; for the zero modes the partner coordinate
    gives ``z_i = u_i - 2 sum a u u / kappa`` and ``Z_i = sum a u u / sqrt(kappa)``.
    The reduced field is ``u'_k = sum_ij a_ijk u_i u_j / sqrt(kappa)``.
    """
    C = np.flatnonzero(chart.zero_mask)
    n0 = C.size
    if n0 == 0:
        raise EmptyCenter("n0 = 0")
    sk = np.sqrt(chart.kappa)
    a = chart.a
    c_t = a[np.ix_(C, C, C)] / sk
    Fc2 = {}
    mu = snapped_mu(chart)
    for kk in range(chart.d):
        if kk not in set(C.tolist()):
            Fc2[kk] = -0.5 * a[np.ix_(C, C, [kk])][:, :, 0] / mu[kk]
    if n0 == 1:
        cr = np.array([c_t[0, 0, 0]])
    elif n0 == 2:
        cr = np.array([c_t[0, 0, 0], c_t[0, 0, 1], c_t[0, 1, 1], c_t[1, 1, 1]])
    else:
        cr = np.array([c_t[i, j, k] for i in range(n0) for j in range(i, n0) for k in range(j, n0)])
    cd = CenterData(chart, n0, C, Fc2, c_t, cr)
    v = np.ones(n0) / np.sqrt(n0) if direction is None else np.asarray(direction, float)
    v = v / np.linalg.norm(v)
    r1 = cd.invariance_residual(u_scale * v)
    r2 = cd.invariance_residual(0.5 * u_scale * v)
    cd.residuals = (r1, r2)
    cd.residual_ratio = r1 / r2 if r2 > 0 else np.inf
    return cd


# ---------------------------------------------------------------- discriminant

def discriminant(a555: float, a556: float, a566: float, a666: float) -> float:
    """Discriminant of the binary cubic ``a555 x^3 + 3 a556 x^2 y + 3 a566 x y^2 + a666 y^3``."""
    a, b, c, d = a555, a556, a566, a666
    return a * a * d * d - 6 * a * b * c * d + 4 * a * c**3 + 4 * b**3 * d - 3 * b * b * c * c


def resultant_matrix(c1: float, c2: float, c3: float, c4: float) -> np.ndarray:
    """Sylvester matrix of ``c1 x^2 + 2c2 xy + c3 y^2`` and ``c2 x^2 + 2c3 xy + c4 y^2``."""
    return np.array([[c1, 2 * c2, c3, 0.0], [0.0, c1, 2 * c2, c3],
                     [c2, 2 * c3, c4, 0.0], [0.0, c2, 2 * c3, c4]])


def resultant(c1, c2, c3, c4) -> float:
    return float(np.linalg.det(resultant_matrix(c1, c2, c3, c4)))


# ---------------------------------------------------------------- verdict

@dataclass
class SpinVerdict:
    case: str
    n0: int
    discriminant: float | None = None
    normalized_discriminant: float | None = None
    passed: bool | None = None
    reason: str | None = None
    supporting: dict = field(default_factory=dict)

    @property
    def no_spin(self) -> bool:
        return self.case in ("Nondegenerate", "DegOne") or (self.case == "DegTwo" and bool(self.passed))

    def to_json(self) -> dict:
        out = {"case": self.case, "n0": self.n0}
        if self.case == "DegTwo":
            out.update(discriminant=self.discriminant, normalized_discriminant=self.normalized_discriminant,
                       **{"pass": bool(self.passed)})
        if self.reason:
            out["reason"] = self.reason
        out.update(self.supporting)
        return out


def verdict_from_a(n0: int, a_slice=None, tol: float = DISC_TOL) -> SpinVerdict:
    """Verdict from ``n0`` and, for ``n0 = 2``, ``(a555, a556, a566, a666)``."""
    if n0 == 0:
        return SpinVerdict("Nondegenerate", 0)
    if n0 == 1:
        return SpinVerdict("DegOne", 1)
    if n0 >= 3:
        return SpinVerdict("Undecided", n0, reason="n0_ge_3")
    a = np.asarray(a_slice, dtype=float)
    sup = {"a": {"555": a[0], "556": a[1], "566": a[2], "666": a[3]}}
    scale = float(np.max(np.abs(a)))
    if scale == 0.0:
        return SpinVerdict("Undecided", 2, 0.0, 0.0, False, "all tested orders zero", sup)
    D = discriminant(*a)
    Dn = D / scale**4
    if abs(Dn) <= tol:
        return SpinVerdict("Undecided", 2, D, Dn, False, "zero_discriminant", sup)
    return SpinVerdict("DegTwo", 2, D, Dn, True, None, sup)


def spin_verdict(report, chart: FrameChart, tol: float = DISC_TOL) -> SpinVerdict:
    """Infinite-spin verdict for a CC (``report`` and ``chart`` of the same CC)."""
    n0 = report.partition.n0
    if n0 != chart.n0:
        raise ValueError("report and chart disagree on n0")
    if n0 != 2:
        return verdict_from_a(n0)
    C = np.flatnonzero(chart.zero_mask)
    a = chart.a
    sl = (a[C[0], C[0], C[0]], a[C[0], C[0], C[1]], a[C[0], C[1], C[1]], a[C[1], C[1], C[1]])
    v = verdict_from_a(2, sl, tol)
    c = np.asarray(sl) / np.sqrt(chart.kappa)
    v.supporting["c"] = c.tolist()
    try:
        sys = PlanarSystem.from_c(*c)
        roots = characteristic_directions(polar_forms(sys)[1])
        phi = polar_forms(sys)[0]
        v.supporting["theta0"] = roots.tolist()
        v.supporting["Phi_theta0"] = [trig_eval(phi, t) for t in roots]
    except IdenticallyZero:
        pass
    return v


# ---------------------------------------------------------------- planar systems

@dataclass
class PlanarSystem:
    """``zeta' = P_m(zeta, eta) + ...``, ``eta' = Q_m(zeta, eta) + ...``.

    ``Pm[k]`` is the coefficient of ``zeta^{m-k} eta^k``.
    """

    m: int
    Pm: np.ndarray
    Qm: np.ndarray
    full_rhs: object = None

    def __post_init__(self):
        self.Pm = np.asarray(self.Pm, dtype=float)
        self.Qm = np.asarray(self.Qm, dtype=float)
        if self.m < 2:
            raise ValueError("degree m must be at least 2")
        if self.Pm.size != self.m + 1 or self.Qm.size != self.m + 1:
            raise ValueError("coefficient lists must have m + 1 entries")

    @classmethod
    def from_c(cls, c1, c2, c3, c4) -> "PlanarSystem":
        """Reduced two-dimensional center system ``u' = grad of a cubic``."""
        return cls(2, [c1, 2 * c2, c3], [c2, 2 * c3, c4])

    def leading(self, X) -> np.ndarray:
        X = np.atleast_2d(X)
        k = np.arange(self.m + 1)
        mon = X[:, :1] ** (self.m - k) * X[:, 1:2] ** k
        return np.column_stack([mon @ self.Pm, mon @ self.Qm])

    def rhs(self, X) -> np.ndarray:
        if self.full_rhs is not None:
            return np.asarray(self.full_rhs(np.asarray(X, dtype=float)), dtype=float)
        return self.leading(X)[0]


def polar_forms(sys: PlanarSystem) -> tuple[np.ndarray, np.ndarray]:
    """``Phi = P cos + Q sin`` and ``Psi = Q cos - P sin`` on the unit circle.

    Each is returned as coefficients ``c_k`` of ``cos^{m+1-k} sin^k``.
    """
    if not (np.any(sys.Pm) or np.any(sys.Qm)):
        raise IdenticallyZero("P_m and Q_m both vanish")
    n = sys.m + 1
    phi = np.zeros(n + 1)
    psi = np.zeros(n + 1)
    phi[: n] += sys.Pm
    phi[1:] += sys.Qm
    psi[: n] += sys.Qm
    psi[1:] -= sys.Pm
    return phi, psi


def trig_eval(c, theta):
    """Evaluate ``sum c_k cos^{n-k} sin^k`` (``n = len(c) - 1``)."""
    c = np.asarray(c, dtype=float)
    th = np.asarray(theta, dtype=float)
    n = c.size - 1
    k = np.arange(n + 1)
    cs, sn = np.cos(th)[..., None], np.sin(th)[..., None]
    return np.sum(c * cs ** (n - k) * sn**k, axis=-1)


def trig_derivative(c, theta):
    c = np.asarray(c, dtype=float)
    th = np.asarray(theta, dtype=float)
    n = c.size - 1
    k = np.arange(n + 1)
    cs, sn = np.cos(th)[..., None], np.sin(th)[..., None]
    with np.errstate(invalid="ignore", divide="ignore"):
        t1 = np.where(n - k > 0, -(n - k) * cs ** np.maximum(n - k - 1, 0) * sn ** (k + 1), 0.0)
        t2 = np.where(k > 0, k * cs ** (n - k + 1) * sn ** np.maximum(k - 1, 0), 0.0)
    return np.sum(c * (t1 + t2), axis=-1)


def characteristic_directions(psi, tol: float = 1e-10) -> np.ndarray:
    """Zeros of ``Psi`` in ``[0, 2 pi)`` via the half-angle polynomial.

    ``cos = (1 - t^2)/(1 + t^2)``, ``sin = 2t/(1 + t^2)``; the point ``theta = pi``
    (``t = inf``) is checked separately. Roots are polished by Newton steps.
    """
    psi = np.asarray(psi, dtype=float)
    scale = float(np.max(np.abs(psi)))
    if scale == 0.0:
        raise IdenticallyZero("Psi vanishes identically")
    n = psi.size - 1
    poly = np.zeros(1)
    for k, ck in enumerate(psi):
        if ck != 0.0:
            term = np.array([float(ck)])
            for _ in range(n - k):
                term = np.polymul(term, [-1.0, 0.0, 1.0])
            for _ in range(k):
                term = np.polymul(term, [2.0, 0.0])
            poly = np.polyadd(poly, term)
    # negligible leading terms are roots near t = inf (theta = pi), handled below
    big = np.abs(poly) > 1e-13 * np.max(np.abs(poly)) if poly.size else poly
    poly = poly[np.argmax(big):] if np.any(big) else poly[:0]
    thetas = []
    if poly.size > 1:
        for t in np.roots(poly):
            if abs(t.imag) <= 1e-6 * (1.0 + abs(t)):
                thetas.append(2.0 * np.arctan(t.real))
    if abs(trig_eval(psi, np.pi)) <= tol * scale:
        thetas.append(np.pi)
    out = []
    for th in thetas:
        for _ in range(30):
            f = trig_eval(psi, th)
            fp = trig_derivative(psi, th)
            if fp == 0:
                break
            step = f / fp
            th -= step
            if abs(step) < 1e-16:
                break
        th = th % (2 * np.pi)
        if abs(trig_eval(psi, th)) <= tol * scale and not any(
                min(abs(th - o), 2 * np.pi - abs(th - o)) < 1e-9 for o in out):
            out.append(th)
    return np.sort(np.array(out))


@dataclass
class RateEstimate:
    theta0: float
    phi: float
    psi_prime: float
    m: int
    sharp: bool
    prefactor: float | None
    exponent: float
    backward_attracting: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def rate_estimate(phi, theta0: float, m: int, psi=None) -> RateEstimate:
    """Analytic asymptote ``rho ~ ((m-1) Phi(theta0))^{-1/(m-1)} (-tau)^{-1/(m-1)}``.

    Sharp only for ``Phi(theta0) > 0`` (``rho -> 0`` backward); otherwise only the
    bound ``rho <= c (-tau)^{-1/(m-1)}`` applies and ``prefactor`` is None.
    """
    ph = float(trig_eval(phi, theta0))
    pp = float(trig_derivative(psi, theta0)) if psi is not None else np.nan
    sharp = ph > 0
    pref = ((m - 1) * ph) ** (-1.0 / (m - 1)) if sharp else None
    return RateEstimate(float(theta0), ph, pp, m, sharp, pref, -1.0 / (m - 1), bool(sharp and pp > 0))


def simulate_and_fit(sys: PlanarSystem, seed, tau_end: float = -1e6, rtol: float = 1e-11,
                     atol: float = 1e-16, plateau: float = 0.2, n_eval: int = 400) -> dict:
    """Integrate backward in ``tau`` and fit the polar asymptotics.

    Returns the unwrapped ``theta`` limit estimate, the plateau of
    ``rho (-tau)^{1/(m-1)}`` over the final ``plateau`` fraction (log-spaced
    samples) and the log-log exponent of ``rho``.
    """
    seed = np.asarray(seed, dtype=float)
    tau = -np.geomspace(1.0, -tau_end, n_eval)
    sol = solve_ivp(lambda _, X: sys.rhs(X), (0.0, tau_end), seed, method="DOP853", rtol=rtol,
                    atol=atol, t_eval=np.concatenate([[0.0], tau]))
    if sol.status != 0:
        raise RuntimeError(sol.message)
    X = sol.y[:, 1:]
    rho = np.hypot(*X)
    th = np.unwrap(np.arctan2(X[1], X[0]))
    m = sys.m
    nt = -tau
    tail = slice(int((1 - plateau) * len(nt)), None)
    scaled = rho * nt ** (1.0 / (m - 1))
    slope = float(np.polyfit(np.log(nt[tail]), np.log(rho[tail]), 1)[0])
    return {"theta0_num": float(th[-1] % (2 * np.pi)), "theta_drift": float(abs(th[-1] - th[tail][0])),
            "prefactor_num": float(np.mean(scaled[tail])), "prefactor_spread": float(np.ptp(scaled[tail])),
            "exponent_num": slope, "tau": tau, "rho": rho, "theta": th}


# ---------------------------------------------------------------- fixtures

def example1_rhs(X):
    u, v = X
    return np.array([-u * u * (u * u + 1.0) * v, v])


def example1_invariant(X):
    """``1/u + arctan u - v`` (constant along Example 1)."""
    u, v = np.asarray(X, dtype=float)
    return 1.0 / u + np.arctan(u) - v


def example2_series(tau):
    """``u = sin tau / sqrt(tau ln tau)``, ``v = cos tau / sqrt(tau ln tau)`` and the
    cumulative ``int (u v' - v u') dtau = -ln ln tau + ln ln tau_0``."""
    tau = np.asarray(tau, dtype=float)
    amp = 1.0 / np.sqrt(tau * np.log(tau))
    u, v = amp * np.sin(tau), amp * np.cos(tau)
    from scipy.integrate import cumulative_trapezoid

    integrand = -amp**2  # u v' - v u' = -amp^2 exactly
    cum = cumulative_trapezoid(integrand, tau, initial=0.0)
    return u, v, cum


# ---------------------------------------------------------------- resonances

@dataclass
class Resonance:
    k: int
    alpha: tuple
    order: int
    defect: float

    def to_json(self) -> dict:
        return {"k": self.k, "alpha": list(self.alpha), "order": self.order, "defect": self.defect}


def _shell(n: int, order: int):
    for combo in itertools.combinations_with_replacement(range(n), order):
        alpha = np.bincount(combo, minlength=n)
        yield tuple(int(a) for a in alpha)


def resonance_scan(eigs, max_order: int = 6, rtol: float = 1e-9, near_rtol: float = 1e-4,
                   threads: int = 1) -> dict:
    """Search ``mu_k = sum_j alpha_j mu_j`` with ``2 <= |alpha| <= max_order``.

    Relations with relative defect ``<= rtol`` are resonances; those up to
    ``near_rtol`` are reported separately. Shells ``|alpha| = const`` are
    scanned concurrently and merged in order.
    """
    if max_order > 12:
        raise ValueError("max_order must be <= 12")
    ev = np.asarray(eigs, dtype=complex).ravel()
    n = ev.size
    scale = max(float(np.max(np.abs(ev))), np.finfo(float).tiny)

    def scan(order):
        exact, near = [], []
        for alpha in _shell(n, order):
            s = np.dot(alpha, ev)
            for k in range(n):
                dfc = abs(ev[k] - s) / scale
                if dfc <= rtol:
                    exact.append(Resonance(k, alpha, order, float(dfc)))
                elif dfc <= near_rtol:
                    near.append(Resonance(k, alpha, order, float(dfc)))
        return exact, near

    orders = range(2, max_order + 1)
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(scan, orders))
    else:
        parts = [scan(o) for o in orders]
    return {"resonances": [r for p in parts for r in p[0]], "near": [r for p in parts for r in p[1]],
            "checked": int(sum(comb(n + o - 1, o, exact=True) for o in orders) * n)}
