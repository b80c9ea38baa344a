# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dormand-Prince 5(4) stepper; ``_kernels_py`` is the line-for-line fallback."""

import numpy as np

from libc.math cimport fabs, fmax, fmin, pow, INFINITY

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0
cdef double A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0
cdef double A42 = -56.0 / 15.0
cdef double A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0
cdef double A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0
cdef double A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0
cdef double A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0
cdef double A65 = -5103.0 / 18656.0
cdef double A71 = 35.0 / 384.0
cdef double A73 = 500.0 / 1113.0
cdef double A74 = 125.0 / 192.0
cdef double A75 = -2187.0 / 6784.0
cdef double A76 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0
cdef double E3 = -71.0 / 16695.0
cdef double E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0
cdef double E6 = 22.0 / 525.0
cdef double E7 = -1.0 / 40.0
cdef double BETA = 0.04
cdef double EXPO = 0.2 - 0.75 * 0.04
cdef double SAFE = 0.9
cdef double FAC_MIN = 0.2
cdef double FAC_MAX = 10.0
cdef double EPS = 2.220446049250313e-16

STATUS_TIME_LIMIT = 0
STATUS_CONVERGED = 1
STATUS_LEFT_DOMAIN = 2
STATUS_UNDERFLOW = 3
STATUS_MAX_STEPS = 4


cdef struct Params:
    double b, pd, gamma, m, beta, alpha, beta2, alpha2, sign


cdef inline void field(const Params* q, double S, double I, double* dS, double* dI) noexcept nogil:
    cdef double inc = q.beta * S * I / (1.0 + q.alpha * I)
    dS[0] = q.sign * (-inc - q.b * S + q.b * q.m * (1.0 - I) + q.pd * I)
    dI[0] = q.sign * (inc - q.pd * I - q.gamma * I - q.beta2 * I / (1.0 + q.alpha2 * I))


def rhs(p, double S, double I):
    cdef Params q
    cdef double dS, dI
    q.b, q.pd, q.gamma, q.m = p[0], p[3] * p[1], p[2], p[4]
    q.beta, q.alpha, q.beta2, q.alpha2 = p[5], p[6], p[7], p[8]
    q.sign = 1.0
    field(&q, S, I, &dS, &dI)
    return dS, dI


def dopri_run(p, double S0, double I0, double t0, double t_end, double rtol, double atol,
              double h0, long max_steps, double conv_tol, double dom_tol, double direction=1.0):
    """Integrate from ``t0`` to ``t_end``; return accepted nodes, derivatives and statistics.

    ``direction = -1`` integrates the time-reversed field.
    """
    cdef Params q
    q.b, q.pd, q.gamma, q.m = p[0], p[3] * p[1], p[2], p[4]
    q.beta, q.alpha, q.beta2, q.alpha2 = p[5], p[6], p[7], p[8]
    q.sign = direction

    cdef Py_ssize_t cap = 1024, n = 1
    ts_a, S_a, I_a, dS_a, dI_a = (np.empty(cap) for _ in range(5))
    cdef double[::1] ts = ts_a, Ss = S_a, Is = I_a, dSs = dS_a, dIs = dI_a

    cdef double S = S0, I = I0, t = t0, h = h0, hnew, S1, I1
    cdef double k1S, k1I, k2S, k2I, k3S, k3I, k4S, k4I, k5S, k5I, k6S, k6I, k7S, k7I
    cdef double errS, errI, err, fac, fac11, facold = 1e-4
    cdef double hmin = INFINITY, hmax = 0.0
    cdef long n_acc = 0, n_rej = 0, nfev = 1
    cdef int status = STATUS_TIME_LIMIT
    cdef bint last_rejected = False, final

    field(&q, S, I, &k1S, &k1I)
    ts[0], Ss[0], Is[0], dSs[0], dIs[0] = t, S, I, k1S, k1I
    while t < t_end:
        if n_acc + n_rej >= max_steps:
            status = STATUS_MAX_STEPS
            break
        if h < 16.0 * EPS * fmax(fabs(t), 1.0):
            status = STATUS_UNDERFLOW
            break
        final = t + 1.01 * h >= t_end
        if final:
            h = t_end - t
        with nogil:
            field(&q, S + h * A21 * k1S, I + h * A21 * k1I, &k2S, &k2I)
            field(&q, S + h * (A31 * k1S + A32 * k2S), I + h * (A31 * k1I + A32 * k2I), &k3S, &k3I)
            field(&q, S + h * (A41 * k1S + A42 * k2S + A43 * k3S),
                  I + h * (A41 * k1I + A42 * k2I + A43 * k3I), &k4S, &k4I)
            field(&q, S + h * (A51 * k1S + A52 * k2S + A53 * k3S + A54 * k4S),
                  I + h * (A51 * k1I + A52 * k2I + A53 * k3I + A54 * k4I), &k5S, &k5I)
            field(&q, S + h * (A61 * k1S + A62 * k2S + A63 * k3S + A64 * k4S + A65 * k5S),
                  I + h * (A61 * k1I + A62 * k2I + A63 * k3I + A64 * k4I + A65 * k5I), &k6S, &k6I)
            S1 = S + h * (A71 * k1S + A73 * k3S + A74 * k4S + A75 * k5S + A76 * k6S)
            I1 = I + h * (A71 * k1I + A73 * k3I + A74 * k4I + A75 * k5I + A76 * k6I)
            field(&q, S1, I1, &k7S, &k7I)
        nfev += 6
        errS = h * (E1 * k1S + E3 * k3S + E4 * k4S + E5 * k5S + E6 * k6S + E7 * k7S)
        errI = h * (E1 * k1I + E3 * k3I + E4 * k4I + E5 * k5I + E6 * k6I + E7 * k7I)
        err = fmax(fabs(errS) / (atol + rtol * fmax(fabs(S), fabs(S1))),
                   fabs(errI) / (atol + rtol * fmax(fabs(I), fabs(I1))))
        fac11 = pow(err, EXPO)
        fac = fac11 / pow(facold, BETA)
        fac = fmax(1.0 / FAC_MAX, fmin(1.0 / FAC_MIN, fac / SAFE))
        hnew = h / fac
        if err <= 1.0:
            facold = fmax(err, 1e-4)
            n_acc += 1
            t = t_end if final else t + h
            S, I = S1, I1
            k1S, k1I = k7S, k7I
            hmin = fmin(hmin, h)
            hmax = fmax(hmax, h)
            if n == cap:
                cap *= 2
                ts_a, S_a, I_a, dS_a, dI_a = (np.resize(a, cap) for a in (ts_a, S_a, I_a, dS_a, dI_a))
                ts, Ss, Is, dSs, dIs = ts_a, S_a, I_a, dS_a, dI_a
            ts[n], Ss[n], Is[n], dSs[n], dIs[n] = t, S, I, k1S, k1I
            n += 1
            if last_rejected:
                hnew = fmin(hnew, h)
            last_rejected = False
            if S < -dom_tol or I < -dom_tol or S + I > 1.0 + dom_tol:
                status = STATUS_LEFT_DOMAIN
                break
            if conv_tol > 0.0 and fmax(fabs(k1S), fabs(k1I)) < conv_tol:
                status = STATUS_CONVERGED
                break
        else:
            hnew = h / fmin(1.0 / FAC_MIN, fac11 / SAFE)
            n_rej += 1
            last_rejected = True
        h = hnew
    if hmin == INFINITY:
        hmin = 0.0
    return (ts_a[:n].copy(), S_a[:n].copy(), I_a[:n].copy(), dS_a[:n].copy(), dI_a[:n].copy(),
            status, n_acc, n_rej, nfev, hmin, hmax)
