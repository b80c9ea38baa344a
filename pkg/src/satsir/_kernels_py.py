"""Pure-Python Dormand-Prince 5(4) stepper; mirrors ``_kernels.pyx`` line for line."""

import math

import numpy as np

STATUS_TIME_LIMIT = 0
STATUS_CONVERGED = 1
STATUS_LEFT_DOMAIN = 2
STATUS_UNDERFLOW = 3
STATUS_MAX_STEPS = 4

A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0
A71, A73, A74, A75, A76 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

BETA = 0.04
EXPO = 0.2 - 0.75 * BETA
SAFE = 0.9
FAC_MIN = 0.2
FAC_MAX = 10.0
EPS = 2.220446049250313e-16


def rhs(p, S, I):
    b, delta, gamma, pp, m, beta, alpha, beta2, alpha2 = p
    inc = beta * S * I / (1.0 + alpha * I)
    pd = pp * delta
    return (-inc - b * S + b * m * (1.0 - I) + pd * I,
            inc - pd * I - gamma * I - beta2 * I / (1.0 + alpha2 * I))


def dopri_run(p, S0, I0, t0, t_end, rtol, atol, h0, max_steps, conv_tol, dom_tol, direction=1.0):
    """Integrate from ``t0`` to ``t_end``; return accepted nodes, derivatives and statistics.

    ``direction = -1`` integrates the time-reversed field.
    """

    def field(S, I):
        dS, dI = rhs(p, S, I)
        return direction * dS, direction * dI

    cap = 1024
    ts = np.empty(cap)
    Ss = np.empty(cap)
    Is = np.empty(cap)
    dSs = np.empty(cap)
    dIs = np.empty(cap)
    S, I, t = S0, I0, t0
    k1S, k1I = field(S, I)
    nfev = 1
    ts[0], Ss[0], Is[0], dSs[0], dIs[0] = t, S, I, k1S, k1I
    n = 1
    n_acc = n_rej = 0
    hmin, hmax = math.inf, 0.0
    h = h0
    facold = 1e-4
    status = STATUS_TIME_LIMIT
    last_rejected = False
    while t < t_end:
        if n_acc + n_rej >= max_steps:
            status = STATUS_MAX_STEPS
            break
        if h < 16.0 * EPS * max(abs(t), 1.0):
            status = STATUS_UNDERFLOW
            break
        final = t + 1.01 * h >= t_end
        if final:
            h = t_end - t
        k2S, k2I = field(S + h * A21 * k1S, I + h * A21 * k1I)
        k3S, k3I = field(S + h * (A31 * k1S + A32 * k2S), I + h * (A31 * k1I + A32 * k2I))
        k4S, k4I = field(S + h * (A41 * k1S + A42 * k2S + A43 * k3S),
                       I + h * (A41 * k1I + A42 * k2I + A43 * k3I))
        k5S, k5I = field(S + h * (A51 * k1S + A52 * k2S + A53 * k3S + A54 * k4S),
                       I + h * (A51 * k1I + A52 * k2I + A53 * k3I + A54 * k4I))
        k6S, k6I = field(S + h * (A61 * k1S + A62 * k2S + A63 * k3S + A64 * k4S + A65 * k5S),
                       I + h * (A61 * k1I + A62 * k2I + A63 * k3I + A64 * k4I + A65 * k5I))
        S1 = S + h * (A71 * k1S + A73 * k3S + A74 * k4S + A75 * k5S + A76 * k6S)
        I1 = I + h * (A71 * k1I + A73 * k3I + A74 * k4I + A75 * k5I + A76 * k6I)
        k7S, k7I = field(S1, I1)
        nfev += 6
        errS = h * (E1 * k1S + E3 * k3S + E4 * k4S + E5 * k5S + E6 * k6S + E7 * k7S)
        errI = h * (E1 * k1I + E3 * k3I + E4 * k4I + E5 * k5I + E6 * k6I + E7 * k7I)
        err = max(abs(errS) / (atol + rtol * max(abs(S), abs(S1))),
                  abs(errI) / (atol + rtol * max(abs(I), abs(I1))))
        fac11 = err ** EXPO
        fac = fac11 / facold ** BETA
        fac = max(1.0 / FAC_MAX, min(1.0 / FAC_MIN, fac / SAFE))
        hnew = h / fac
        if err <= 1.0:
            facold = max(err, 1e-4)
            n_acc += 1
            t = t_end if final else t + h
            S, I = S1, I1
            k1S, k1I = k7S, k7I
            hmin = min(hmin, h)
            hmax = max(hmax, h)
            if n == cap:
                cap *= 2
                ts = np.resize(ts, cap)
                Ss = np.resize(Ss, cap)
                Is = np.resize(Is, cap)
                dSs = np.resize(dSs, cap)
                dIs = np.resize(dIs, cap)
            ts[n], Ss[n], Is[n], dSs[n], dIs[n] = t, S, I, k1S, k1I
            n += 1
            if last_rejected:
                hnew = min(hnew, h)
            last_rejected = False
            if S < -dom_tol or I < -dom_tol or S + I > 1.0 + dom_tol:
                status = STATUS_LEFT_DOMAIN
                break
            if conv_tol > 0.0 and max(abs(k1S), abs(k1I)) < conv_tol:
                status = STATUS_CONVERGED
                break
        else:
            hnew = h / min(1.0 / FAC_MIN, fac11 / SAFE)
            n_rej += 1
            last_rejected = True
        h = hnew
    if hmin == math.inf:
        hmin = 0.0
    return (ts[:n].copy(), Ss[:n].copy(), Is[:n].copy(), dSs[:n].copy(), dIs[:n].copy(),
            status, n_acc, n_rej, nfev, hmin, hmax)
