# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled twin of the pure-NumPy propagator in ``_magnus``.

Same closed-form sixth-order Magnus step, same small-|mu| series switch,
so the two backends agree to rounding; this one runs the step loop in C.
"""

from libc.math cimport cos, cosh, fabs, sin, sinh, sqrt


cdef inline void _step(double x, double h, double eps, double mass, double lam,
                       double *u, double *v) noexcept nogil:
    cdef double q2 = lam * (x + 0.5 * h) - eps
    cdef double h2 = h * h
    cdef double h3 = h2 * h
    cdef double h5 = h3 * h2
    cdef double h7 = h5 * h2
    cdef double lm = lam * mass
    cdef double om_j = h * q2 + lam * lm * mass * q2 * h7 / 900.0
    cdef double om_1 = -lm * h3 / 6.0 - lm * (q2 * q2 - mass * mass) * h5 / 90.0
    cdef double om_3 = -h * mass + lam * lm * h5 / 60.0 - lam * lm * mass * mass * h7 / 900.0
    cdef double mu = om_1 * om_1 + om_3 * om_3 - om_j * om_j
    cdef double amu = fabs(mu)
    cdef double theta, c, s
    if amu < 1.0e-8:
        c = 1.0 + mu / 2.0 + mu * mu / 24.0
        s = 1.0 + mu / 6.0 + mu * mu / 120.0
    elif mu >= 0.0:
        theta = sqrt(mu)
        c = cosh(theta)
        s = sinh(theta) / theta
    else:
        theta = sqrt(-mu)
        c = cos(theta)
        s = sin(theta) / theta
    cdef double un = (c + s * om_3) * u[0] + s * (om_1 - om_j) * v[0]
    cdef double vn = s * (om_1 + om_j) * u[0] + (c - s * om_3) * v[0]
    u[0] = un
    v[0] = vn


def propagate_batch(double[::1] eps, double mass, double lam, double x0, double x1,
                    double u0, double v0, int n_steps,
                    double[::1] out_u, double[::1] out_v):
    """Propagate (u0, v0) over [x0, x1] for every energy in ``eps``."""
    cdef Py_ssize_t i, n = eps.shape[0]
    cdef int k
    cdef double h = (x1 - x0) / n_steps
    cdef double u, v
    with nogil:
        for i in range(n):
            u = u0
            v = v0
            for k in range(n_steps):
                _step(x0 + k * h, h, eps[i], mass, lam, &u, &v)
            out_u[i] = u
            out_v[i] = v


def propagate_trace(double eps, double mass, double lam, double x0, double x1,
                    double u0, double v0, int n_steps,
                    double[::1] out_u, double[::1] out_v):
    """Single-energy propagation recording the state after every step."""
    cdef int k
    cdef double h = (x1 - x0) / n_steps
    cdef double u = u0
    cdef double v = v0
    out_u[0] = u
    out_v[0] = v
    with nogil:
        for k in range(n_steps):
            _step(x0 + k * h, h, eps, mass, lam, &u, &v)
            out_u[k + 1] = u
            out_v[k + 1] = v
