"""Reference (pure NumPy) propagator for the two-component Dirac system.

The stationary equation on [-a, a] is the linear first-order system

    d/dx [u]   [ -m     -q(x) ] [u]
         [ ] = [              ] [ ]          q(x) = lam*x - eps,
         [v]   [ q(x)     m   ] [v]

so the generator is A(x) = q(x)*J - m*S3 in the traceless basis

    J = [[0,-1],[1,0]],  S1 = [[0,1],[1,0]],  S3 = [[1,0],[0,-1]].

A sixth-order Magnus step with the three-point Gauss-Legendre rule is used.
Because q is linear in x, the usual node combinations collapse to closed
form and the whole step reduces to a handful of scalar operations:

    alpha1 = h*A(x_mid) = (h*q2, 0, -h*m)        (J, S1, S3 components)
    alpha2 = (lam*h^2, 0, 0),  alpha3 = 0
    Omega_J  = h*q2 + lam^2 m^2 q2 h^7 / 900
    Omega_S1 = -lam*m*h^3/6 - lam*m*(q2^2 - m^2)*h^5/90
    Omega_S3 = -h*m + lam^2*m*h^5/60 - lam^2*m^3*h^7/900

with q2 = q(x + h/2).  The matrix exponential of a traceless real 2x2
matrix B (B^2 = mu*I, mu = S1^2 + S3^2 - J^2) is evaluated through the
even/odd series cosm(mu) + sincm(mu)*B, which covers the oscillatory
(mu < 0) and hyperbolic (mu > 0) branches in one expression.

Two exactness properties matter downstream and are exploited by callers:

* m == 0: all commutators vanish and the midpoint rule integrates the
  linear phase exactly, so ONE step of any size is exact.
* lam == 0: the generator is constant, so one step is again exact.

Everything here is vectorised over a trailing "lane" axis so that a batch
of energies (or a batch of evaluation points) is propagated in lockstep.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "step_components",
    "propagate",
    "propagate_trace",
    "suggested_steps",
]

# Empirical global-error constant of the closed-form sixth-order step,
# measured against step-halved references over m in [0.5, 3], lam in
# [0.01, 5], |eps| up to 30; the step-count model applies a x30 safety
# margin on top of it.
_ERR_COEFF = 3.0e-4


def _expm_apply(om_j, om_1, om_3, u, v):
    """Apply exp(B) to (u, v) for B = om_j*J + om_1*S1 + om_3*S3.

    All arguments broadcast elementwise; returns the propagated pair.
    """
    mu = om_1 * om_1 + om_3 * om_3 - om_j * om_j
    amu = np.abs(mu)
    theta = np.sqrt(amu)
    small = amu < 1.0e-8
    # cosm/sincm: analytic in mu, series used near mu = 0.
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.where(mu >= 0.0, np.cosh(theta), np.cos(theta))
        s = np.where(
            mu >= 0.0,
            np.where(theta > 0.0, np.sinh(theta) / np.where(theta > 0, theta, 1.0), 1.0),
            np.sin(theta) / np.where(theta > 0, theta, 1.0),
        )
    if np.any(small):
        mus = np.where(small, mu, 0.0)
        c = np.where(small, 1.0 + mus / 2.0 + mus * mus / 24.0, c)
        s = np.where(small, 1.0 + mus / 6.0 + mus * mus / 120.0, s)
    # B = [[om_3, om_1 - om_j], [om_1 + om_j, -om_3]]
    u_new = (c + s * om_3) * u + s * (om_1 - om_j) * v
    v_new = s * (om_1 + om_j) * u + (c - s * om_3) * v
    return u_new, v_new


def step_components(x, h, eps, mass, lam):
    """Magnus-6 generator components (J, S1, S3) for one step [x, x+h]."""
    q2 = lam * (x + 0.5 * h) - eps
    h2 = h * h
    h3 = h2 * h
    h5 = h3 * h2
    h7 = h5 * h2
    lm = lam * mass
    om_j = h * q2 + lam * lm * mass * q2 * h7 / 900.0
    om_1 = -lm * h3 / 6.0 - lm * (q2 * q2 - mass * mass) * h5 / 90.0
    om_3 = -h * mass + lam * lm * h5 / 60.0 - lam * lm * mass * mass * h7 / 900.0
    return om_j, om_1, om_3


def propagate(eps, mass, lam, x0, x1, u0, v0, n_steps):
    """Propagate (u0, v0) from x0 to x1 in n_steps uniform Magnus-6 steps.

    ``eps`` and the state may carry a lane axis; scalars broadcast.
    Returns the final (u, v).
    """
    eps = np.asarray(eps, dtype=float)
    u = np.broadcast_to(np.asarray(u0, dtype=float), eps.shape).copy()
    v = np.broadcast_to(np.asarray(v0, dtype=float), eps.shape).copy()
    h = (x1 - x0) / n_steps
    for i in range(n_steps):
        om_j, om_1, om_3 = step_components(x0 + i * h, h, eps, mass, lam)
        u, v = _expm_apply(om_j, om_1, om_3, u, v)
    return u, v


def propagate_trace(eps, mass, lam, x0, x1, u0, v0, n_steps):
    """Propagate a single energy, recording the state after every step.

    Returns (xs, us, vs) with xs of length n_steps + 1 including x0.
    """
    xs = x0 + (x1 - x0) * np.arange(n_steps + 1) / n_steps
    us = np.empty(n_steps + 1)
    vs = np.empty(n_steps + 1)
    us[0], vs[0] = u0, v0
    h = (x1 - x0) / n_steps
    u, v = float(u0), float(v0)
    for i in range(n_steps):
        om_j, om_1, om_3 = step_components(x0 + i * h, h, eps, mass, lam)
        u, v = _expm_apply(om_j, om_1, om_3, u, v)
        us[i + 1], vs[i + 1] = u, v
    return xs, us, vs


def suggested_steps(a, mass, lam, eps_max, tol=1.0e-13):
    """Step count for one full traversal of [-a, a] hitting ``tol``.

    For mass == 0 or lam == 0 the scheme is exact and one step suffices.
    Otherwise the count follows the observed O(h^6) truncation error with
    scale lam*m*kappa^2 (kappa = worst local rate |q| + m) plus a floor
    that keeps at least ~6 steps per oscillation.
    """
    if mass == 0.0 or lam == 0.0:
        return 1
    kappa = abs(lam) * a + abs(eps_max) + mass
    length = 2.0 * a
    scale = 30.0 * _ERR_COEFF * abs(lam) * mass * kappa * kappa * max(kappa, 1.0)
    h_acc = (tol / scale) ** (1.0 / 6.0) if scale > 0.0 else length
    h_osc = 1.0 / kappa
    n = int(np.ceil(length / min(h_acc, h_osc))) + 1
    return max(n, 16)
