"""Physical and blown-up equations of motion near total collision.

The blown-up state is ``y = (z, Z, r, Upsilon, theta, t)`` with
``dt = r^{3/2} dtau``, ``Z = z'``, ``Upsilon = r'/r``. The velocity-dependent
terms of the ``Z`` equation are resolved by solving the small linear system

    (I + z z^T / z3^2 - (Qz)(Qz)^T) Z' = rhs(z, Z, Upsilon)

at every evaluation. On the invariant manifold ``r = 0`` the energy relation
``Upsilon^2/2 + K - U = r H`` reads ``Upsilon' = K >= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, stats
from scipy.integrate import solve_ivp

from .core import batch_potential_gradient, rotate90
from .frame import ChartDomainError, FrameChart, to_chart

ZMAX = 0.95


class StepFailure(RuntimeError):
    """The integrator could not complete the requested span."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class DomainExit(RuntimeError):
    """The trajectory left the chart domain ``|z| < 1``."""


class SeedEscape(RuntimeError):
    """A seeded collision orbit does not return to the equilibrium backward."""


class InsufficientRange(ValueError):
    """Not enough data for an asymptotic fit."""


# ---------------------------------------------------------------- states

@dataclass(frozen=True)
class BlowupState:
    z: np.ndarray
    Z: np.ndarray
    r: float
    Upsilon: float
    theta: float = 0.0

    def pack(self, t: float = 0.0) -> np.ndarray:
        return np.concatenate([self.z, self.Z, [self.r, self.Upsilon, self.theta, t]])

    @classmethod
    def unpack(cls, y, d: int) -> "BlowupState":
        y = np.asarray(y, dtype=float)
        return cls(y[:d].copy(), y[d:2 * d].copy(), float(y[2 * d]), float(y[2 * d + 1]), float(y[2 * d + 2]))


def _split(chart: FrameChart, Y: np.ndarray):
    d = chart.d
    return Y[:, :d], Y[:, d:2 * d], Y[:, 2 * d], Y[:, 2 * d + 1]


def _shape_terms(chart: FrameChart, z: np.ndarray, Z: np.ndarray):
    q = np.einsum("bi,bi->b", z, z)
    if np.any(q >= 1.0):
        raise ChartDomainError("|z| >= 1")
    z3sq = 1.0 - q
    z3 = np.sqrt(z3sq)
    S = z3[:, None] * chart.e3 + z @ chart.E
    U, G = batch_potential_gradient(chart.masses, S)
    gz = G @ chart.E.T - (z / z3[:, None]) * (G @ chart.e3)[:, None]
    Qz = z @ chart.Q.T
    w = np.einsum("bi,bi->b", Z, Qz)
    zZ = np.einsum("bi,bi->b", z, Z)
    K = 0.5 * (zZ**2 / z3sq + np.einsum("bi,bi->b", Z, Z) - w**2)
    return dict(q=q, z3sq=z3sq, S=S, U=U, gz=gz, Qz=Qz, w=w, zZ=zZ, K=K)


def kinetic_shape(chart: FrameChart, z, Z) -> float:
    """``K = [(z.Z)^2/z3^2 + |Z|^2 - (Z^T Q z)^2] / 2``."""
    t = _shape_terms(chart, np.atleast_2d(z), np.atleast_2d(Z))
    return float(t["K"][0])


def rhs_batch(chart: FrameChart, Y: np.ndarray) -> np.ndarray:
    """Right-hand side for a batch of packed states, shape ``(B, 2d + 4)``."""
    Y = np.atleast_2d(Y)
    d = chart.d
    z, Z, r, Ups = _split(chart, Y)
    T = _shape_terms(chart, z, Z)
    z3sq, Qz, w, zZ, K = T["z3sq"], T["Qz"], T["w"], T["zZ"], T["K"]
    ZZ = np.einsum("bi,bi->b", Z, Z)
    QZ = Z @ chart.Q.T
    dK = z * (zZ / z3sq)[:, None] + Z - w[:, None] * Qz
    M = (np.eye(d)[None] + z[:, :, None] * z[:, None, :] / z3sq[:, None, None]
         - Qz[:, :, None] * Qz[:, None, :])
    rhs = (T["gz"] - z * (ZZ / z3sq)[:, None] - z * (zZ**2 / z3sq**2)[:, None]
           + 2.0 * w[:, None] * QZ - 0.5 * Ups[:, None] * dK)
    Zp = np.linalg.solve(M, rhs[:, :, None])[:, :, 0]
    out = np.empty_like(Y)
    out[:, :d] = Z
    out[:, d:2 * d] = Zp
    out[:, 2 * d] = r * Ups
    out[:, 2 * d + 1] = 0.5 * Ups**2 + 2.0 * K - T["U"]
    out[:, 2 * d + 2] = -w
    out[:, 2 * d + 3] = np.abs(r) ** 1.5
    return out


def blowup_rhs(chart: FrameChart, s: BlowupState) -> BlowupState:
    """Derivative of ``(z, Z, r, Upsilon, theta)`` with respect to ``tau``."""
    dy = rhs_batch(chart, s.pack()[None])[0]
    return BlowupState.unpack(dy, chart.d)


def energy_residual(chart: FrameChart, Y: np.ndarray, H: float = 0.0) -> np.ndarray:
    """``Upsilon^2/2 + K - U - r H`` for packed states (zero on the flow)."""
    Y = np.atleast_2d(Y)
    z, Z, r, Ups = _split(chart, Y)
    T = _shape_terms(chart, z, Z)
    return 0.5 * Ups**2 + T["K"] - T["U"] - r * H


def energy_of(chart: FrameChart, s: BlowupState) -> float:
    """Physical energy ``H`` of a state with ``r > 0``."""
    if s.r <= 0:
        raise ValueError("energy is undefined on r = 0; use the energy relation")
    T = _shape_terms(chart, s.z[None], s.Z[None])
    return float((0.5 * s.Upsilon**2 + T["K"][0] - T["U"][0]) / s.r)


def on_energy_manifold(chart: FrameChart, z, Z, r: float = 0.0, H: float = 0.0, sign: float = 1.0) -> BlowupState:
    """Solve the energy relation for ``Upsilon`` (sign chosen by ``sign``)."""
    z = np.asarray(z, dtype=float)
    Z = np.asarray(Z, dtype=float)
    T = _shape_terms(chart, z[None], Z[None])
    v = 2.0 * (T["U"][0] - T["K"][0] + r * H)
    if v < 0:
        raise ValueError("no real Upsilon on this energy level")
    return BlowupState(z, Z, float(r), float(np.copysign(np.sqrt(v), sign)))


def cartesian_state(chart: FrameChart, Y: np.ndarray):
    """Positions and velocities (physical time) for packed states with ``r > 0``."""
    Y = np.atleast_2d(Y)
    d = chart.d
    dY = rhs_batch(chart, Y)
    xs, vs = [], []
    for y, dy in zip(Y, dY):
        z, Z, r, ups, th = y[:d], y[d:2 * d], y[2 * d], y[2 * d + 1], y[2 * d + 2]
        z3 = np.sqrt(1.0 - z @ z)
        s = z3 * chart.e3 + z @ chart.E
        sp = Z @ chart.E - (z @ Z / z3) * chart.e3
        c, sn = np.cos(th), np.sin(th)
        rot = lambda u: c * u + sn * rotate90(u)  # noqa: E731
        x = r * rot(s)
        # d/dt = r^{-3/2} d/dtau
        v = rot(ups * s / np.sqrt(r) + (dy[2 * d + 2] * rotate90(s) + sp) / np.sqrt(r))
        xs.append(x)
        vs.append(v)
    return np.array(xs), np.array(vs)


def spin_constraint_residual(chart: FrameChart, Y: np.ndarray) -> np.ndarray:
    """``theta' + <i s, s'>`` with ``s'`` rebuilt from Cartesian frame vectors.

    ``J = r^{1/2}`` times this quantity, so it is the meaningful ``J = 0``
    check on ``r = 0`` where ``J`` itself vanishes identically.
    """
    Y = np.atleast_2d(Y)
    d = chart.d
    md = chart.mass_diag
    dY = rhs_batch(chart, Y)
    out = np.empty(len(Y))
    for n, (y, dy) in enumerate(zip(Y, dY)):
        z, Z = y[:d], y[d:2 * d]
        z3 = np.sqrt(1.0 - z @ z)
        s = z3 * chart.e3 + z @ chart.E
        sp = Z @ chart.E - (z @ Z / z3) * chart.e3
        out[n] = dy[2 * d + 2] + np.sum(md * rotate90(s) * sp)
    return out


def angular_momentum_blowup(chart: FrameChart, Y: np.ndarray) -> np.ndarray:
    """``J = r^{1/2}(theta' + <i s, s'>)``."""
    Y = np.atleast_2d(Y)
    return np.sqrt(np.maximum(Y[:, 2 * chart.d], 0.0)) * spin_constraint_residual(chart, Y)


# ---------------------------------------------------------------- trajectories

@dataclass
class Trajectory:
    """Samples of a blown-up integration (accepted steps).

    ``y`` rows are packed states ``(z, Z, r, Upsilon, theta, t)``.
    ``J_residual`` is :func:`spin_constraint_residual` (``J / r^{1/2}``).
    """

    chart: FrameChart
    tau: np.ndarray
    y: np.ndarray
    H: float = 0.0
    status: str = "ok"
    energy_residual: np.ndarray = field(default=None)
    J_residual: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.energy_residual is None:
            self.energy_residual = energy_residual(self.chart, self.y, self.H)
        if self.J_residual is None:
            self.J_residual = spin_constraint_residual(self.chart, self.y)

    @property
    def d(self) -> int:
        return self.chart.d

    @property
    def z(self):
        return self.y[:, : self.d]

    @property
    def Z(self):
        return self.y[:, self.d: 2 * self.d]

    @property
    def r(self):
        return self.y[:, 2 * self.d]

    @property
    def Upsilon(self):
        return self.y[:, 2 * self.d + 1]

    @property
    def theta(self):
        return self.y[:, 2 * self.d + 2]

    @property
    def t(self):
        return self.y[:, 2 * self.d + 3]

    def state(self, i: int) -> BlowupState:
        return BlowupState.unpack(self.y[i], self.d)

    def columns(self):
        d = self.d
        names = (["tau", "t", "r", "Upsilon", "theta"] + [f"z{k + 5}" for k in range(d)]
                 + [f"Z{k + 5}" for k in range(d)] + ["energy_residual", "J_residual"])
        data = np.column_stack([self.tau, self.t, self.r, self.Upsilon, self.theta, self.z, self.Z,
                                self.energy_residual, self.J_residual])
        return names, data


def integrate_blowup(chart: FrameChart, s0: BlowupState, tau_span, rtol: float = 1e-10,
                     atol: float = 1e-12, H: float | None = None, zmax: float = ZMAX,
                     t0: float = 0.0, max_step: float = np.inf, u_max: float = 50.0) -> Trajectory:
    """Integrate the blown-up system with DOP853.

    Parameters
    ----------
    chart : FrameChart
    s0 : BlowupState
    tau_span : (float, float)
        May run backward.
    H : float, optional
        Energy level for the residual; by default taken from ``s0`` (``0`` on ``r = 0``).
    zmax : float
        The integration stops (status ``"domain_exit"``) once ``|z|`` reaches it.
    u_max : float
        Stop (status ``"near_binary"``) when ``U(z)`` exceeds ``u_max * lambda``.
    """
    if H is None:
        H = energy_of(chart, s0) if s0.r > 0 else 0.0
    y0 = s0.pack(t0)
    if y0[: chart.d] @ y0[: chart.d] >= zmax**2:
        raise DomainExit("initial state outside the chart domain")
    d = chart.d

    def f(_, y):
        return rhs_batch(chart, y[None])[0]

    def exit_event(_, y):
        return zmax**2 - y[:d] @ y[:d]

    def binary_event(_, y):
        z = y[:d]
        if z @ z >= 1.0:
            return -1.0
        U, _ = batch_potential_gradient(chart.masses, (np.sqrt(1.0 - z @ z) * chart.e3 + z @ chart.E)[None])
        return u_max * chart.lam - U[0]

    exit_event.terminal = True
    binary_event.terminal = True
    sol = solve_ivp(f, tau_span, y0, method="DOP853", rtol=rtol, atol=atol,
                    events=[exit_event, binary_event], max_step=max_step)
    status = {0: "ok", -1: "failed"}.get(sol.status, "domain_exit")
    if sol.status == 1 and len(sol.t_events[1]):
        status = "near_binary"

    traj = Trajectory(chart, sol.t, sol.y.T.copy(), H=H, status=status)
    if sol.status == -1:
        raise StepFailure(sol.message, traj)
    return traj


def concat(back: Trajectory, fwd: Trajectory) -> Trajectory:
    """Join a backward and a forward trajectory sharing their first sample."""
    tau = np.concatenate([back.tau[::-1], fwd.tau[1:]])
    y = np.vstack([back.y[::-1], fwd.y[1:]])
    return Trajectory(fwd.chart, tau, y, fwd.H, fwd.status,
                      np.concatenate([back.energy_residual[::-1], fwd.energy_residual[1:]]),
                      np.concatenate([back.J_residual[::-1], fwd.J_residual[1:]]))


# ---------------------------------------------------------------- Cartesian

def accelerations(masses, X: np.ndarray) -> np.ndarray:
    """Newtonian accelerations for a batch ``X`` of shape ``(B, 2N)``."""
    m = np.asarray(masses, dtype=float)
    _, G = batch_potential_gradient(m, np.atleast_2d(X))
    return G / np.repeat(m, 2)


@dataclass
class CartesianTrajectory:
    masses: np.ndarray
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    sol: object = None
    status: str = "ok"

    def energy(self) -> np.ndarray:
        U, _ = batch_potential_gradient(self.masses, self.x)
        md = np.repeat(self.masses, 2)
        return 0.5 * np.sum(md * self.v**2, axis=1) - U

    def angular_momentum(self) -> np.ndarray:
        md = np.repeat(self.masses, 2)
        return np.sum(md * np.array([rotate90(x) for x in self.x]) * self.v, axis=1)

    def dense(self, t):
        y = self.sol(t)
        n = 2 * self.masses.size
        return y[:n], y[n:]


def integrate_cartesian(masses, x0, v0, t_span, rtol: float = 1e-10, atol: float = 1e-14,
                        r_min: float = 0.0, t_eval=None) -> CartesianTrajectory:
    """Direct Newtonian integration (DOP853, dense output).

    ``r_min`` > 0 stops the run when the smallest pair distance drops below it.
    A step failure close to a collision raises :class:`StepFailure` carrying
    the last accepted state.
    """
    m = np.asarray(masses, dtype=float)
    n = 2 * m.size
    j, k = np.triu_indices(m.size, 1)

    def f(_, y):
        return np.concatenate([y[n:], accelerations(m, y[:n][None])[0]])

    events = []
    if r_min > 0:
        def coll(_, y):
            p = y[:n].reshape(-1, 2)
            return np.min(np.hypot(*(p[j] - p[k]).T)) - r_min

        coll.terminal = True
        events.append(coll)
    y0 = np.concatenate([np.asarray(x0, float), np.asarray(v0, float)])
    t0 = t_span[0]
    first = 1e-4 * max(abs(t_span[1] - t0), 1e-300)
    try:
        sol = solve_ivp(f, t_span, y0, method="DOP853", rtol=rtol, atol=atol, events=events or None,
                        dense_output=True, t_eval=t_eval, first_step=first)
    except ValueError as exc:  # collision inside an evaluation
        raise StepFailure(str(exc)) from exc
    status = {0: "ok", 1: "collision"}.get(sol.status, "failed")
    tr = CartesianTrajectory(m, sol.t, sol.y[:n].T.copy(), sol.y[n:].T.copy(), sol.sol, status)
    if sol.status == -1:
        raise StepFailure(sol.message, tr)
    return tr


# ---------------------------------------------------------------- homothetic

def homothetic_orbit(chart: FrameChart, t, theta0: float = 0.0) -> dict:
    """Exact zero-energy homothetic ejection ``r = (9 kappa / 4)^{1/3} t^{2/3}``.

    Time is measured from the collision; ``kappa`` is the chart value (``I = 1``).
    """
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    k = chart.kappa
    A = (9.0 * k / 4.0) ** (1.0 / 3.0)
    r = A * t ** (2.0 / 3.0)
    rd = 2.0 / 3.0 * A * t ** (-1.0 / 3.0)
    rdd = -2.0 / 9.0 * A * t ** (-4.0 / 3.0)
    c, s = np.cos(theta0), np.sin(theta0)
    base = c * chart.e3 + s * rotate90(chart.e3)
    return {
        "r": r, "rdot": rd, "rddot": rdd,
        "residual": rdd + k / (2.0 * r**2),
        "Upsilon": np.sqrt(r) * rd,
        "tau": 2.0 / (3.0 * np.sqrt(k)) * np.log(t),
        "x": np.multiply.outer(r, base), "v": np.multiply.outer(rd, base),
        "I": r**2, "U": chart.lam / r,
    }


# ---------------------------------------------------------------- frame checks

def _fd_derivatives(chart: FrameChart, x, v, a, h, theta_hint):
    """First and second derivatives of ``(r, theta, z)`` along ``x + s v + s^2 a / 2``."""
    vals = []
    for s in (-2, -1, 0, 1, 2):
        p = to_chart(chart, x + s * h * v + 0.5 * (s * h) ** 2 * a, theta_hint)
        vals.append(np.concatenate([[p.r, p.theta], p.z]))
    g = np.array(vals)
    d1 = (-g[4] + 8 * g[3] - 8 * g[1] + g[0]) / (12 * h)
    d2 = (-g[4] + 16 * g[3] - 30 * g[2] + 16 * g[1] - g[0]) / (12 * h * h)
    return g[2], d1, d2


def frame_residuals(chart: FrameChart, y, yd, ydd) -> dict:
    """Relative residuals of the moving-frame Euler-Lagrange equations.

    ``y = (r, theta, z)`` with time derivatives ``yd``, ``ydd``. Returns the
    full equations (any angular momentum) and the ``J = 0`` reduced ones, each
    divided by the sum of absolute term sizes plus the natural force scale.
    """
    from .frame import potential_in_chart

    r, rd, rdd = y[0], yd[0], ydd[0]
    th_d, th_dd = yd[1], ydd[1]
    z, zd, zdd = y[2:], yd[2:], ydd[2:]
    Q = chart.Q
    z3sq = 1.0 - z @ z
    U, gU = potential_in_chart(chart, z)
    zzd = z @ zd
    Tz = zzd**2 / z3sq + zd @ zd
    w = zd @ Q @ z
    Qz, Qzd = Q @ z, Q @ zd
    fs3 = chart.lam / r**3

    def rel(terms, scale):
        terms = [np.asarray(t, dtype=float) for t in terms]
        tot = sum(terms)
        den = sum(np.abs(t) for t in terms) + scale
        return float(np.max(np.abs(tot) / den))

    common_z = [(zd @ zd + z @ zdd) * z / z3sq, zzd**2 * z / z3sq**2, zdd, -gU / r**3]
    full = {
        "r": rel([rdd, -r * Tz, -2 * r * th_d * w, -r * th_d**2, U / r**2], chart.lam / r**2),
        "theta": rel([2 * rd / r * th_d, 2 * rd / r * w, th_dd, zdd @ Qz], fs3),
        "z": rel(common_z + [2 * rd / r * (zzd * z / z3sq), 2 * rd / r * zd, 2 * rd / r * th_d * Qz,
                             th_dd * Qz, 2 * th_d * Qzd], fs3),
    }
    dK = zzd * z / z3sq + zd - w * Qz
    K = 0.5 * (Tz - w**2)
    reduced = {
        "r": rel([rdd, -2 * r * K, U / r**2], chart.lam / r**2),
        "z": rel(common_z + [-(zdd @ Qz) * Qz, -2 * w * Qzd, 2 * rd / r * dK], fs3),
        "theta_dot": rel([th_d, w], np.sqrt(fs3)),
    }
    return {"full": full, "reduced": reduced}


def crosscheck_frames(chart: FrameChart, traj: CartesianTrajectory, n_samples: int = 50,
                      reduced: bool | None = None, rel_step: float = 2e-3) -> dict:
    """Map Cartesian samples into the chart and test the frame equations.

    Derivatives of ``(r, theta, z)`` come from a five-point stencil along the
    quadratic path ``x + s v + s^2 a/2`` (exact to second order at ``s = 0``).
    ``reduced`` defaults to True when the angular momentum vanishes.
    """
    md = np.repeat(traj.masses, 2)
    J = traj.angular_momentum()
    if reduced is None:
        reduced = bool(np.max(np.abs(J)) <= 1e-8 * max(1.0, np.max(np.abs(traj.energy()))))
    idx = np.unique(np.linspace(0, len(traj.t) - 1, n_samples).round().astype(int))
    hint = None
    out = {"full": 0.0, "reduced": 0.0 if reduced else None, "n": len(idx)}
    for i in idx:
        x, v = traj.x[i], traj.v[i]
        a = accelerations(traj.masses, x[None])[0]
        r = np.sqrt(np.sum(md * x * x))
        T = min(r / max(np.sqrt(np.sum(md * v * v)), 1e-300), np.sqrt(r / max(np.sqrt(np.sum(md * a * a)), 1e-300)))
        p = to_chart(chart, x, hint)
        if p.z @ p.z >= ZMAX**2:
            raise DomainExit("sample outside the chart domain")
        hint = p.theta
        y, yd, ydd = _fd_derivatives(chart, x, v, a, rel_step * T, hint)
        res = frame_residuals(chart, y, yd, ydd)
        out["full"] = max(out["full"], *res["full"].values())
        if reduced:
            out["reduced"] = max(out["reduced"], *res["reduced"].values())
    return out


# ---------------------------------------------------------------- collision orbits

def unstable_modes(chart: FrameChart):
    """Indices, rates ``tilde mu_j > 0`` of the shape modes with ``mu_j > 0``."""
    from .ccfind import tilde_mu

    tm = tilde_mu(chart.mu, chart.kappa)
    idx = [k for k in range(chart.d) if not chart.zero_mask[k] and chart.mu[k] > 0]
    return np.array(idx, dtype=int), np.array([tm[k].real for k in idx])


def make_collision_orbit(chart: FrameChart, mix=None, delta: float = 1e-6, tau_forward: float = 40.0,
                         tau_backward: float | None = None, zmax: float = 0.3, rtol: float = 1e-10,
                         atol: float | None = None, theta0: float = 0.0) -> Trajectory:
    """Collision-ejection orbit on ``r = 0`` leaving ``(0, 0, 0, sqrt(kappa))``.

    Parameters
    ----------
    mix : array_like, optional
        Weights over the unstable shape modes (``mu_j > 0``); default is the
        leading (largest) rate only.
    delta : float
        Seed amplitude along the unstable eigenvector ``(e_j, tilde mu_j e_j)``.
    zmax : float
        Forward integration stops when ``|z|`` reaches this value.
    tau_backward : float, optional
        Length of the backward confirmation arc. Backward in ``tau`` the stable
        directions grow like ``exp(|s|tau)``, so the default keeps the arc short
        (seed amplitude shrinks by about ``e^-4``).
    atol : float, optional
        Defaults to ``1e-8 * delta``.

    Returns
    -------
    Trajectory
        Backward arc (reversed) joined with the forward arc; ``tau = 0`` at the seed.
    """
    idx, rates = unstable_modes(chart)
    if idx.size == 0:
        raise ValueError("chart has no unstable shape modes")
    if mix is None:
        mix = np.zeros(idx.size)
        mix[np.argmax(rates)] = 1.0
    mix = np.asarray(mix, dtype=float)
    if mix.size != idx.size:
        raise ValueError(f"mix needs {idx.size} weights")
    if np.linalg.norm(mix) > 0:
        mix = mix / np.linalg.norm(mix)
    z = np.zeros(chart.d)
    Z = np.zeros(chart.d)
    z[idx] = delta * mix
    Z[idx] = delta * mix * rates
    if tau_backward is None:
        tau_backward = 4.0 / float(np.max(rates[mix != 0])) if np.any(mix != 0) else 1.0
    if atol is None:
        atol = 1e-8 * delta if delta > 0 else 1e-14
    s0 = on_energy_manifold(chart, z, Z, 0.0, 0.0, +1.0)
    s0 = BlowupState(s0.z, s0.Z, 0.0, s0.Upsilon, theta0)
    back = integrate_blowup(chart, s0, (0.0, -tau_backward), rtol, atol, H=0.0, zmax=zmax)
    dist = lambda y: np.linalg.norm(np.concatenate([y[: 2 * chart.d], [y[2 * chart.d + 1] - np.sqrt(chart.kappa)]]))  # noqa: E731
    if delta > 0 and dist(back.y[-1]) > dist(back.y[0]):
        raise SeedEscape("backward arc does not approach the equilibrium")
    fwd = integrate_blowup(chart, s0, (0.0, tau_forward), rtol, atol, H=0.0, zmax=zmax)
    return concat(back, fwd)


def decay_rate(traj: Trajectory, tau_max: float = 0.0) -> float:
    """Slope of ``log |(z, Z, Upsilon - sqrt kappa)|`` over ``tau <= tau_max``."""
    d = traj.d
    sel = traj.tau <= tau_max
    dev = np.column_stack([traj.z, traj.Z, traj.Upsilon - np.sqrt(traj.chart.kappa)])[sel]
    nrm = np.linalg.norm(dev, axis=1)
    ok = nrm > 0
    return float(np.polyfit(traj.tau[sel][ok], np.log(nrm[ok]), 1)[0]) if d else 0.0


# ---------------------------------------------------------------- theta limit

@dataclass
class ThetaLimit:
    theta0: float
    converged: bool
    tail_model: str
    sigma: float = np.nan
    C: float = np.nan
    p: float = np.nan
    r2: float = np.nan
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {k: (float(v) if isinstance(v, (float, np.floating)) else v)
                for k, v in self.__dict__.items()}


def dyadic_increments(tau, theta, tau_ref: float | None = None, noise: float = 1e-13):
    """Cauchy increments of ``theta`` over dyadic windows of ``|tau - tau_ref|``.

    Returns ``(k, d_k)`` with ``d_k = |theta(2^{k+1}) - theta(2^k)|`` (distances
    measured from ``tau_ref``, the end of the data farthest from the limit).
    """
    tau = np.asarray(tau, dtype=float)
    theta = np.asarray(theta, dtype=float)
    order = np.argsort(tau)
    tau, theta = tau[order], theta[order]
    if tau_ref is None:
        tau_ref = tau[-1]
    u = np.abs(tau - tau_ref)
    o = np.argsort(u)
    u, th = u[o], theta[o]
    kmin = int(np.ceil(np.log2(max(u[u > 0].min(), 1e-300))))
    kmax = int(np.floor(np.log2(u.max()))) - 1
    ks, ds = [], []
    for k in range(kmin, kmax + 1):
        a, b = np.interp([2.0**k, 2.0 ** (k + 1)], u, th)
        ks.append(k)
        ds.append(abs(b - a))
    ds = np.array(ds)
    return np.array(ks), np.where(ds < noise * max(1.0, np.max(np.abs(theta))), 0.0, ds)


@np.errstate(over="ignore", invalid="ignore")
def theta_limit(tau, theta, direction: str = "backward", window: float = 0.4,
                noise: float = 1e-13) -> ThetaLimit:
    """Estimate ``lim theta`` toward the collision and classify the tail.

    The limit side is ``tau -> -inf`` for ``direction='backward'``. Tail fits use
    the limit-side fraction ``window`` of the informative samples (those whose
    distance to the limit estimate exceeds the noise floor), with a soft-L1
    robust loss. ``r2`` is computed on ``log |theta - theta0|``.

    Divergence is detected by dyadic Cauchy increments ``d_k`` (``k >= 1``): an
    exponential or power tail has ``log d_k`` falling faster than ``-1.5 log k``
    over the last windows; harmonic-type decay (``d_k ~ 1/k``, logarithmic
    winding) does not. Very slow power tails (``p`` below about 0.4) are
    indistinguishable from divergence at this resolution.
    """
    tau = np.asarray(tau, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if direction not in ("backward", "forward"):
        raise ValueError("direction must be 'backward' or 'forward'")
    sgn = 1.0 if direction == "backward" else -1.0
    order = np.argsort(sgn * tau)  # limit side first
    s_tau, s_th = tau[order], theta[order]
    scale = max(1.0, float(np.max(np.abs(theta))))
    floor = noise * scale
    if np.ptp(theta) <= floor:
        return ThetaLimit(float(s_th[0]), True, "constant", 0.0, 0.0, r2=1.0)

    ev = {}
    ks, dk = dyadic_increments(tau, theta, tau_ref=s_tau[-1], noise=noise)
    ev["dyadic_k"] = ks.tolist()
    ev["dyadic_d"] = dk.tolist()
    pos = ks >= 1
    ks, dk = ks[pos], dk[pos]
    nz = dk > 0
    divergent = False
    if nz.sum() >= 4 and np.all(nz[-4:]):
        kk = ks[nz]
        slope = float(np.polyfit(np.log(kk[-6:]), np.log(dk[nz][-6:]), 1)[0])
        ev["dyadic_slope"] = slope
        divergent = slope > -1.5

    th_lim = s_th[0]
    dev = np.abs(s_th - th_lim)
    info = dev > 100 * floor
    if info.sum() < 8:
        if divergent:
            return ThetaLimit(np.nan, False, "divergent", evidence=ev)
        return ThetaLimit(float(th_lim), True, "constant", 0.0, 0.0, r2=1.0, evidence=ev)
    i_info = np.flatnonzero(info)
    lo, hi = s_tau[i_info[0]], s_tau[-1]
    sel = np.flatnonzero(np.abs(s_tau - lo) <= window * abs(hi - lo))
    sel = sel[info[sel]]
    x = sgn * s_tau[sel]  # increasing away from the limit
    yv = s_th[sel]

    # exponential model theta0 + C exp(sigma x)
    sg0 = np.polyfit(x, np.log(np.abs(yv - th_lim)), 1)[0]
    C0 = np.sign(yv[-1] - th_lim) * np.abs(yv[-1] - th_lim) * np.exp(-sg0 * x[-1])

    def res_exp(p):
        m = p[0] + p[1] * np.exp(p[2] * (x - x[-1]))
        return (yv - m) / (np.abs(m - p[0]) + floor)

    p0 = np.array([th_lim, C0 * np.exp(sg0 * x[-1]), sg0])
    fe = optimize.least_squares(res_exp, p0, loss="soft_l1", f_scale=1e-3, x_scale="jac")
    t0e, Ce, se = fe.x
    Ce = Ce * np.exp(-se * x[-1])
    r2e = _log_r2(yv - t0e, Ce * np.exp(se * x))

    # power model theta0 + C (c0 - x)^(-p), with x -> -inf at the limit
    xr = x.max() + 1.0 - x  # positive, grows toward the limit
    def res_pow(p):
        m = p[0] + p[1] * (xr + p[3]) ** (-p[2])
        return (yv - m) / (np.abs(m - p[0]) + floor)

    # the origin of the power law is unknown; start from several shifts
    width = float(np.ptp(xr))
    fp, r2p = None, -np.inf
    for shift in (0.0, 0.5 * width, 2.0 * width, 10.0 * width):
        pp0 = np.array([th_lim, (yv[-1] - th_lim) * (xr[-1] + shift), 1.0, shift])
        try:
            f = optimize.least_squares(res_pow, pp0, loss="soft_l1", f_scale=1e-3, x_scale="jac",
                                       bounds=([-np.inf, -np.inf, 1e-3, -0.99],
                                               [np.inf, np.inf, 50, max(1e6, 100 * width)]))
        except ValueError:
            continue
        r2 = _log_r2(yv - f.x[0], f.x[1] * (xr + f.x[3]) ** (-f.x[2]))
        if r2 > r2p:
            fp, r2p = f, r2
    ev.update(r2_exponential=r2e, r2_power=r2p)
    if divergent:
        return ThetaLimit(np.nan, False, "divergent", evidence=ev)
    if r2e >= r2p or fp is None:
        return ThetaLimit(float(t0e), bool(se > 0), "exponential", float(se), float(Ce), r2=r2e, evidence=ev)
    return ThetaLimit(float(fp.x[0]), True, "power", C=float(fp.x[1]), p=float(fp.x[2]), r2=r2p, evidence=ev)


def _log_r2(obs, model) -> float:
    a = np.log(np.abs(obs) + 1e-300)
    b = np.log(np.abs(model) + 1e-300)
    ss = np.sum((a - b) ** 2)
    tot = np.sum((a - a.mean()) ** 2)
    return float(1.0 - ss / tot) if tot > 0 else 1.0


# ---------------------------------------------------------------- gradient-like

@dataclass
class GradientLikeReport:
    n_states: int
    n_violations: int
    worst_decrease: float
    min_initial_rate: float
    stalled_at_edge: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def random_energy_states(chart: FrameChart, n: int, rng: np.random.Generator, zr: float = 0.3,
                         Zr: float = 0.3) -> np.ndarray:
    """Random packed ``r = 0`` states on the energy manifold (both signs of Upsilon)."""
    out = []
    while len(out) < n:
        z = rng.uniform(-1, 1, chart.d)
        z *= zr * rng.uniform() ** (1 / chart.d) / max(np.linalg.norm(z), 1e-300)
        Z = rng.normal(size=chart.d) * Zr / np.sqrt(chart.d)
        try:
            s = on_energy_manifold(chart, z, Z, 0.0, 0.0, rng.choice([-1.0, 1.0]))
        except ValueError:
            continue
        out.append(s.pack())
    return np.array(out)


def gradient_like_check(chart: FrameChart, states, tau_span=(0.0, 5.0), tol: float = 1e-12,
                        rtol: float = 1e-10, atol: float = 1e-13, batch: int = 250,
                        n_eval: int = 201, z_soft: float = 0.4, z_stop: float = 0.5) -> GradientLikeReport:
    """Check that ``Upsilon`` never decreases along ``r = 0`` arcs.

    States are integrated in batches as one stacked system. Each member's
    vector field is multiplied by a smooth cutoff that falls from 1 at
    ``|z| = z_soft`` to 0 at ``|z| = z_stop``; this is a time change, so
    orbits and the monotonicity of ``Upsilon`` along them are unaffected, and
    members approaching the chart edge simply stall.
    """
    Y0 = np.atleast_2d(np.asarray(states, dtype=float))
    n = Y0.shape[1]
    d = chart.d
    if np.any(Y0[:, 2 * d] != 0.0):
        raise ValueError("states must lie on r = 0")
    viol, worst, stalled = 0, 0.0, 0
    rates = rhs_batch(chart, Y0)[:, 2 * d + 1]
    t_eval = np.linspace(*tau_span, n_eval)
    a2, b2 = z_soft**2, z_stop**2

    def cutoff(q):
        x = np.clip((b2 - q) / (b2 - a2), 0.0, 1.0)
        return x * x * (3.0 - 2.0 * x)

    for b0 in range(0, len(Y0), batch):
        Yb = Y0[b0: b0 + batch]
        B = len(Yb)

        def f(_, yy):
            Y = yy.reshape(B, n)
            q = np.einsum("bi,bi->b", Y[:, :d], Y[:, :d])
            phi = cutoff(q)
            out = np.zeros_like(Y)
            ok = phi > 0
            if ok.any():
                out[ok] = rhs_batch(chart, Y[ok]) * phi[ok, None]
            return out.ravel()

        sol = solve_ivp(f, tau_span, Yb.ravel(), method="DOP853", rtol=rtol, atol=atol, t_eval=t_eval)
        if sol.status != 0:
            raise StepFailure(sol.message)
        Ys = sol.y.reshape(B, n, -1)
        ups = Ys[:, 2 * d + 1, :]
        dec = np.diff(ups, axis=1)
        viol += int(np.sum(np.any(dec < -tol, axis=1)))
        worst = min(worst, float(dec.min()))
        zz = np.einsum("bit,bit->bt", Ys[:, :d], Ys[:, :d])
        stalled += int(np.sum(zz[:, -1] > a2))
    return GradientLikeReport(len(Y0), viol, worst, float(rates.min()), stalled)


# ---------------------------------------------------------------- asymptotics

@dataclass
class PowerFit:
    slope: float
    slope_err: float
    prefactor: float
    prefactor_rel_err: float


def asymptotic_exponents(traj: CartesianTrajectory, t_c: float | None = None, decades: float = 2.0) -> dict:
    """Log-log fits of ``I, U, K, r`` against time to collision.

    ``t_c`` defaults to a linear extrapolation of ``I^{3/4}`` over the last samples.
    Uses the final ``decades`` decades of ``|t - t_c|``.
    """
    m = traj.masses
    md = np.repeat(m, 2)
    P = traj.x.reshape(len(traj.t), -1, 2)
    cm = np.einsum("j,tjk->tk", m, P) / m.sum()
    X = (P - cm[:, None, :]).reshape(len(traj.t), -1)
    I = np.sum(md * X * X, axis=1)
    U, _ = batch_potential_gradient(m, traj.x)
    K = 0.5 * np.sum(md * traj.v**2, axis=1)
    if t_c is None:
        o = np.argsort(I)[:10]
        t_c = float(np.polyval(np.polyfit(I[o] ** 0.75, traj.t[o], 1), 0.0))
    s = np.abs(traj.t - t_c)
    ok = s > 0
    if ok.sum() < 5:
        raise InsufficientRange("too few samples")
    smin = s[ok].min()
    sel = ok & (s <= smin * 10**decades)
    if sel.sum() < 5 or s[sel].max() / smin < 10 ** (decades * 0.9):
        raise InsufficientRange("need about two decades of |t - t_c|")
    out = {"t_c": t_c, "J_max": float(np.max(np.abs(traj.angular_momentum())))}
    for name, q in (("I", I), ("U", U), ("K", K), ("r", np.sqrt(I))):
        lr = stats.linregress(np.log(s[sel]), np.log(q[sel]))
        out[name] = PowerFit(float(lr.slope), float(lr.stderr), float(np.exp(lr.intercept)),
                             float(lr.intercept_stderr))
    return out


def homothetic_cartesian(chart: FrameChart, t0: float = 1.0, t1: float = 1e-8, rtol: float = 1e-12,
                         n_eval: int = 400) -> CartesianTrajectory:
    """Integrate the exact homothetic state at ``t0`` backward to ``t1``."""
    h = homothetic_orbit(chart, np.array([t0]))
    t_eval = np.geomspace(t0, t1, n_eval)
    # coordinates that vanish up to roundoff (plus centre-of-mass drift) must
    # not drive the step-size control, hence a fixed absolute floor
    atol = 1e-16
    return integrate_cartesian(chart.masses, h["x"][0], h["v"][0], (t0, t1), rtol=rtol, atol=atol,
                               t_eval=t_eval)


__all__ = [
    "BlowupState", "Trajectory", "CartesianTrajectory", "ThetaLimit", "GradientLikeReport",
    "StepFailure", "DomainExit", "SeedEscape", "InsufficientRange", "blowup_rhs", "rhs_batch",
    "integrate_blowup", "integrate_cartesian", "crosscheck_frames", "homothetic_orbit",
    "make_collision_orbit", "theta_limit", "gradient_like_check", "asymptotic_exponents",
    "energy_residual", "on_energy_manifold", "random_energy_states", "frame_residuals",
    "accelerations", "homothetic_cartesian", "decay_rate", "unstable_modes", "kinetic_shape",
    "cartesian_state", "angular_momentum_blowup", "spin_constraint_residual", "energy_of", "concat",
]
