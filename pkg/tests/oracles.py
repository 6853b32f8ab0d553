"""Independent reference values and slow reference implementations.

Closed-form constants are transcribed from the source derivation; the
numerical routines are deliberately naive (explicit loops, finite
differences) so they share no code with the package.
"""

import numpy as np

SQRT3 = np.sqrt(3.0)

# equilateral triangle with a central mass
M4_STAR = (81 + 64 * SQRT3) / 249
M4_STAR_LINEAR_ROOT = (3 * SQRT3 + 2) / (18 - 5 * SQRT3)
EQ_DOUBLE_EIG = (799 * SQRT3 + 1233) / 498
A556_QUOTED = -6630331032 * np.sqrt(2 / (13129701006956661 * SQRT3 + 22740709543896356))
A666_QUOTED = 3269394 * np.sqrt(2 / (6312834009 * SQRT3 + 10926270656))
EQ_E3 = np.array([-SQRT3 / 2, -0.5, SQRT3 / 2, -0.5, 0, 1, 0, 0])
EQ_E5 = np.array([(64 * SQRT3 + 81) / 498, -(741 * SQRT3 + 908) / 1494, (64 * SQRT3 + 81) / 498,
                  (741 * SQRT3 + 908) / 1494, 0, 0, -1, 0])
EQ_E6 = np.array([(165 * SQRT3 + 179) / 747, -(371 * SQRT3 + 738) / 2241, -(165 * SQRT3 + 179) / 747,
                  -(371 * SQRT3 + 738) / 2241, 0, (2 * SQRT3 + 9) / 27, 0, 1])

# rhombic family
RHOMBIC_LO, RHOMBIC_HI = SQRT3, SQRT3 + 2
RHOMBIC_FLIP = 1 + np.sqrt(2)

# kite family: equilateral point in (xi, eta)
KITE_EQUILATERAL = (2 + SQRT3, SQRT3)


def potential(m, x):
    P = np.asarray(x, float).reshape(-1, 2)
    u = 0.0
    for j in range(len(m)):
        for k in range(j):
            u += m[j] * m[k] / np.linalg.norm(P[j] - P[k])
    return u


def gradient_fd(m, x, h=1e-6):
    x = np.asarray(x, float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (potential(m, x + e) - potential(m, x - e)) / (2 * h)
    return g


def hessian_loops(m, x):
    P = np.asarray(x, float).reshape(-1, 2)
    n = len(P)
    H = np.zeros((2 * n, 2 * n))
    for j in range(n):
        for k in range(n):
            if j == k:
                continue
            d = P[j] - P[k]
            r = np.linalg.norm(d)
            H[2 * j:2 * j + 2, 2 * k:2 * k + 2] = m[j] * m[k] / r**3 * (np.eye(2) - 3 * np.outer(d, d) / r**2)
    for k in range(n):
        H[2 * k:2 * k + 2, 2 * k:2 * k + 2] = -sum(H[2 * k:2 * k + 2, 2 * j:2 * j + 2] for j in range(n) if j != k)
    return H


def third_fd(m, x, u, v, w, h=1e-4):
    """Mixed third directional derivative by central differences of the Hessian."""
    Hp = hessian_loops(m, np.asarray(x) + h * np.asarray(w))
    Hm = hessian_loops(m, np.asarray(x) - h * np.asarray(w))
    return float(np.asarray(u) @ ((Hp - Hm) / (2 * h)) @ np.asarray(v))


def restricted_eigs(m, x):
    """Eigenvalues of lam I + M^-1 B on the complement of translations, x and ix."""
    m = np.asarray(m, float)
    md = np.repeat(m, 2)
    x = np.asarray(x, float)
    I = np.sum(md * x * x)
    lam = potential(m, x) / I
    sq = np.sqrt(md)
    S = (lam * np.diag(md) + hessian_loops(m, x)) / np.outer(sq, sq)
    ix = np.column_stack([-x.reshape(-1, 2)[:, 1], x.reshape(-1, 2)[:, 0]]).ravel()
    F = np.array([np.tile([1.0, 0.0], len(m)), np.tile([0.0, 1.0], len(m)), x, ix]) * sq
    Qf, _ = np.linalg.qr(F.T)
    full, _ = np.linalg.qr(np.hstack([Qf, np.eye(2 * len(m))]))
    W = full[:, 4:2 * len(m)]
    return np.sort(np.linalg.eigvalsh(W.T @ S @ W)), lam
