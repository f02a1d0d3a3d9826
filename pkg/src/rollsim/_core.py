"""Compiled numeric kernels.

Everything in this module works on packed float64 arrays so the hot loop stays
inside one nopython region:

    par: [m_p, m_s, I_p, I_s, r1, r2, R1, R2, g, d_th1, d_th2, d_ph1, d_ph2]
    mag: [enabled, B_max, P_max, A, mu0]
    q:   (theta1, theta2, phi1, phi2)          state y = (q, qdot), length 8
    tgt: (th1d, th2d, ph1d, ph2d, dth1d, dth2d, dph1d, dph2d)

The mass matrix, bias and gravity terms are evaluated from the energy
functions by finite differences (polarization for M, which is exact for a
quadratic form; Richardson-extrapolated central differences for the rest).
Closed-form partial derivatives exist only where they are cheap and
unambiguous (the tip-separation gradient).

Falls back to pure Python when numba is unavailable; import still works but
runs are orders of magnitude slower.
"""

import math

import numpy as np

try:
    from numba import njit as _njit

    HAVE_NUMBA = True

    def njit(f):
        return _njit(cache=True, nogil=True)(f)

except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(f):
        return f

# FD step. 1e-4 with one Richardson level keeps truncation ~1e-18 and rounding
# ~1e-12 in qddot; smaller steps push rounding noise above the integrator's
# own error and spoil convergence measurements.
H = 1e-4

VARIANT_VERBATIM = 0
VARIANT_GEOMETRIC = 1


@njit
def kinetic(par, q, qd):
    m_p, m_s, I_p, I_s = par[0], par[1], par[2], par[3]
    r1, r2, R1, R2 = par[4], par[5], par[6], par[7]
    c1 = math.cos(q[2] + q[0])
    s1 = math.sin(q[2] + q[0])
    c12 = math.cos(q[2] + q[3])
    s12 = math.sin(q[2] + q[3])
    c2 = math.cos(q[3] + q[1])
    s2 = math.sin(q[3] + q[1])
    L = R1 + R2
    vs1x = R1 * qd[2]
    vp1x = vs1x + r1 * (qd[2] + qd[0]) * c1
    vp1y = r1 * (qd[2] + qd[0]) * s1
    vs2x = vs1x + L * (qd[2] + qd[3]) * c12
    vs2y = L * (qd[2] + qd[3]) * s12
    vp2x = vs2x + r2 * (qd[3] + qd[1]) * c2
    vp2y = vs2y + r2 * (qd[3] + qd[1]) * s2
    return 0.5 * (m_s * (vs1x * vs1x)
                  + m_p * (vp1x * vp1x + vp1y * vp1y)
                  + m_s * (vs2x * vs2x + vs2y * vs2y)
                  + m_p * (vp2x * vp2x + vp2y * vp2y)
                  + I_p * (qd[0] * qd[0] + qd[1] * qd[1])
                  + I_s * (qd[2] * qd[2] + qd[3] * qd[3]))


@njit
def potential(par, q, variant):
    m_p, m_s, g = par[0], par[1], par[8]
    r1, r2 = par[4], par[5]
    L = par[6] + par[7]
    c31 = math.cos(q[2] + q[0])
    c42 = math.cos(q[3] + q[1])
    if variant == VARIANT_GEOMETRIC:
        mid = L * math.cos(q[2] + q[3])
    else:
        mid = L * math.sin(q[2] + q[3])
    return (-m_p * r1 * g * c31
            - m_p * g * (mid + r2 * c42)
            - m_s * g * L * math.cos(q[2] + q[3]))


@njit
def mass_matrix(par, q):
    # polarization identity: M_ij = T(e_i + e_j) - T(e_i) - T(e_j)
    M = np.empty((4, 4))
    e = np.zeros(4)
    Tii = np.empty(4)
    for i in range(4):
        e[i] = 1.0
        Tii[i] = kinetic(par, q, e)
        e[i] = 0.0
    for i in range(4):
        M[i, i] = 2.0 * Tii[i]
        for j in range(i + 1, 4):
            e[i] = 1.0
            e[j] = 1.0
            Mij = kinetic(par, q, e) - Tii[i] - Tii[j]
            e[i] = 0.0
            e[j] = 0.0
            M[i, j] = Mij
            M[j, i] = Mij
    return M


@njit
def mass_times(par, q, qd):
    # (M qd)_k from kinetic-energy evaluations; exact for a quadratic form
    out = np.empty(4)
    v = qd.copy()
    for k in range(4):
        v[k] = qd[k] + 1.0
        tp = kinetic(par, q, v)
        v[k] = qd[k] - 1.0
        tm = kinetic(par, q, v)
        v[k] = qd[k]
        out[k] = 0.5 * (tp - tm)
    return out


@njit
def bias(par, q, qd):
    # Mdot*qd - dT/dq + diag(delta)*qd.
    # Mdot*qd as a directional derivative of p(q) = M(q)*qd along qd/|qd|;
    # same contraction, four evaluations per Richardson level instead of
    # sixteen.
    nrm = math.sqrt(qd[0] ** 2 + qd[1] ** 2 + qd[2] ** 2 + qd[3] ** 2)
    out = np.empty(4)
    if nrm > 0.0:
        u = qd / nrm
        d1 = (mass_times(par, q + H * u, qd) - mass_times(par, q - H * u, qd)) / (2.0 * H)
        d2 = (mass_times(par, q + 0.5 * H * u, qd) - mass_times(par, q - 0.5 * H * u, qd)) / H
        md = (4.0 * d2 - d1) / 3.0 * nrm
    else:
        md = np.zeros(4)
    qq = q.copy()
    for k in range(4):
        qq[k] = q[k] + H
        tp = kinetic(par, qq, qd)
        qq[k] = q[k] - H
        tm = kinetic(par, qq, qd)
        qq[k] = q[k] + 0.5 * H
        tp2 = kinetic(par, qq, qd)
        qq[k] = q[k] - 0.5 * H
        tm2 = kinetic(par, qq, qd)
        qq[k] = q[k]
        d1 = (tp - tm) / (2.0 * H)
        d2 = (tp2 - tm2) / H
        out[k] = md[k] - (4.0 * d2 - d1) / 3.0 + par[9 + k] * qd[k]
    return out


@njit
def gravity(par, q, variant):
    out = np.empty(4)
    qq = q.copy()
    for k in range(4):
        qq[k] = q[k] + H
        up = potential(par, qq, variant)
        qq[k] = q[k] - H
        um = potential(par, qq, variant)
        qq[k] = q[k] + 0.5 * H
        up2 = potential(par, qq, variant)
        qq[k] = q[k] - 0.5 * H
        um2 = potential(par, qq, variant)
        qq[k] = q[k]
        d1 = (up - um) / (2.0 * H)
        d2 = (up2 - um2) / H
        out[k] = (4.0 * d2 - d1) / 3.0
    return out


@njit
def chol_solve4(M, b):
    """Solve M x = b for symmetric positive definite 4x4 M.

    Returns (x, ok). ok is False when a pivot is non-positive or non-finite;
    callers must not trust x in that case. Hand-rolled because the failure
    path needs a flag, not an exception, inside compiled code.
    """
    L = np.zeros((4, 4))
    for i in range(4):
        s = M[i, i]
        for k in range(i):
            s -= L[i, k] * L[i, k]
        if not (s > 0.0) or not math.isfinite(s):
            return b * 0.0, False
        L[i, i] = math.sqrt(s)
        for j in range(i + 1, 4):
            t = M[j, i]
            for k in range(i):
                t -= L[j, k] * L[i, k]
            L[j, i] = t / L[i, i]
    y = np.empty(4)
    for i in range(4):
        t = b[i]
        for k in range(i):
            t -= L[i, k] * y[k]
        y[i] = t / L[i, i]
    x = np.empty(4)
    for i in range(3, -1, -1):
        t = y[i]
        for k in range(i + 1, 4):
            t -= L[k, i] * x[k]
        x[i] = t / L[i, i]
    return x, True


@njit
def pm_and_grad(par, q):
    """Pendulum-tip separation p_m and its gradient d p_m / d q.

    The gradient is analytic (chain rule through the tip positions). At
    p_m = 0 the direction is undefined; the gradient is returned as zero and
    the degenerate flag set.
    """
    r1, r2, R1, R2 = par[4], par[5], par[6], par[7]
    L = R1 + R2
    s31 = math.sin(q[2] + q[0])
    c31 = math.cos(q[2] + q[0])
    s34 = math.sin(q[2] + q[3])
    c34 = math.cos(q[2] + q[3])
    s42 = math.sin(q[3] + q[1])
    c42 = math.cos(q[3] + q[1])
    p1x = R1 * q[2] + r1 * s31
    p1y = -r1 * c31
    p2x = R1 * q[2] + L * s34 + r2 * s42
    p2y = -L * c34 - r2 * c42
    dx = p1x - p2x
    dy = p1y - p2y
    p = math.sqrt(dx * dx + dy * dy)
    grad = np.zeros(4)
    if p < 1e-14:
        return p, grad, True
    grad[0] = (r1 * c31 * dx + r1 * s31 * dy) / p
    grad[1] = (-r2 * c42 * dx - r2 * s42 * dy) / p
    grad[2] = ((r1 * c31 - L * c34) * dx + (r1 * s31 - L * s34) * dy) / p
    grad[3] = (-(L * c34 + r2 * c42) * dx - (L * s34 + r2 * s42) * dy) / p
    return p, grad, False


@njit
def mag_torque(par, mag, q):
    # attractive tip force mapped through the tip Jacobians: Q = -F * grad p_m
    out = np.zeros(4)
    if mag[0] == 0.0:
        return out
    p, grad, degenerate = pm_and_grad(par, q)
    if degenerate or p > mag[2]:
        return out
    B = mag[1] * (1.0 - p / mag[2])
    F = B * B * mag[3] / (2.0 * mag[4])
    for k in range(4):
        out[k] = -F * grad[k]
    return out


@njit
def pd_input(Kp, Kd, tgt, y, sat, psi_rate):
    e0 = (y[0] - y[2]) - tgt[0]
    e1 = (y[1] - y[3]) - tgt[1]
    e2 = y[2] - tgt[2]
    e3 = y[3] - tgt[3]
    if psi_rate == 1:
        de0 = (y[4] - y[6]) - tgt[4]
        de1 = (y[5] - y[7]) - tgt[5]
    else:
        de0 = y[4] - tgt[4]
        de1 = y[5] - tgt[5]
    de2 = y[6] - tgt[6]
    de3 = y[7] - tgt[7]
    u1 = (Kp[0, 0] * e0 + Kp[0, 1] * e1 + Kp[0, 2] * e2 + Kp[0, 3] * e3
          + Kd[0, 0] * de0 + Kd[0, 1] * de1 + Kd[0, 2] * de2 + Kd[0, 3] * de3)
    u2 = (Kp[1, 0] * e0 + Kp[1, 1] * e1 + Kp[1, 2] * e2 + Kp[1, 3] * e3
          + Kd[1, 0] * de0 + Kd[1, 1] * de1 + Kd[1, 2] * de2 + Kd[1, 3] * de3)
    if sat > 0.0:
        u1 = min(max(u1, -sat), sat)
        u2 = min(max(u2, -sat), sat)
    return u1, u2


@njit
def deriv(par, mag, y, tau, variant):
    q = y[:4]
    qd = y[4:]
    rhs = tau - bias(par, q, qd) - gravity(par, q, variant)
    if mag[0] != 0.0:
        rhs = rhs + mag_torque(par, mag, q)
    M = mass_matrix(par, q)
    qdd, ok = chol_solve4(M, rhs)
    dy = np.empty(8)
    dy[:4] = qd
    dy[4:] = qdd
    return dy, ok


@njit
def run_loop(par, mag, y0, n, dt, ctrl_on, Kp, Kd, tgt, sat, psi_rate,
             stage_control, variant):
    """Integrate n fixed RK4 steps from y0.

    Controller input is evaluated at the step's start state and held over the
    step (zero-order hold) unless stage_control is 1, in which case it is
    re-evaluated at every stage state. Magnetic torque, being state
    dependent physics rather than a sampled controller, is always evaluated
    per stage.

    Returns (ys, us, n_done): samples 0..n_done are valid; n_done < n means
    the step after n_done produced a non-finite or non-solvable state.
    """
    ys = np.empty((n + 1, 8))
    us = np.zeros((n + 1, 2))
    ys[0] = y0
    y = y0.copy()
    tau = np.zeros(4)
    for i in range(n + 1):
        if ctrl_on == 1:
            u1, u2 = pd_input(Kp, Kd, tgt, y, sat, psi_rate)
            us[i, 0] = u1
            us[i, 1] = u2
            tau[0] = u1
            tau[1] = u2
            tau[2] = -u1
            tau[3] = -u2
        if i == n:
            break
        if stage_control == 1 and ctrl_on == 1:
            k1, ok1 = _deriv_stage(par, mag, y, Kp, Kd, tgt, sat, psi_rate, variant)
            k2, ok2 = _deriv_stage(par, mag, y + 0.5 * dt * k1, Kp, Kd, tgt, sat, psi_rate, variant)
            k3, ok3 = _deriv_stage(par, mag, y + 0.5 * dt * k2, Kp, Kd, tgt, sat, psi_rate, variant)
            k4, ok4 = _deriv_stage(par, mag, y + dt * k3, Kp, Kd, tgt, sat, psi_rate, variant)
        else:
            k1, ok1 = deriv(par, mag, y, tau, variant)
            k2, ok2 = deriv(par, mag, y + 0.5 * dt * k1, tau, variant)
            k3, ok3 = deriv(par, mag, y + 0.5 * dt * k2, tau, variant)
            k4, ok4 = deriv(par, mag, y + dt * k3, tau, variant)
        if not (ok1 and ok2 and ok3 and ok4):
            return ys, us, i
        yn = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        finite = True
        for j in range(8):
            if not math.isfinite(yn[j]):
                finite = False
        if not finite:
            return ys, us, i
        y = yn
        ys[i + 1] = y
    return ys, us, n


@njit
def _deriv_stage(par, mag, y, Kp, Kd, tgt, sat, psi_rate, variant):
    u1, u2 = pd_input(Kp, Kd, tgt, y, sat, psi_rate)
    tau = np.empty(4)
    tau[0] = u1
    tau[1] = u2
    tau[2] = -u1
    tau[3] = -u2
    return deriv(par, mag, y, tau, variant)


@njit
def energies_batch(par, ys, n_valid, variant):
    T = np.empty(n_valid + 1)
    U = np.empty(n_valid + 1)
    for i in range(n_valid + 1):
        T[i] = kinetic(par, ys[i, :4], ys[i, 4:])
        U[i] = potential(par, ys[i, :4], variant)
    return T, U


@njit
def pm_batch(par, ys, n_valid):
    out = np.empty(n_valid + 1)
    for i in range(n_valid + 1):
        p, _, _ = pm_and_grad(par, ys[i, :4])
        out[i] = p
    return out


def warmup():
    """Force JIT compilation of the full call graph (no-op without numba)."""
    par = np.array([0.262, 0.70, 0.1, 0.1, 0.06, 0.06, 0.065, 0.065, 9.81,
                    0.02, 0.02, 0.07, 0.06])
    mag = np.array([1.0, 0.05, 0.02, 0.0025, 1.257e-6])
    y0 = np.zeros(8)
    y0[1] = 0.5
    Kp = np.ones((2, 4))
    Kd = np.ones((2, 4))
    tgt = np.zeros(8)
    run_loop(par, mag, y0, 2, 1e-3, 1, Kp, Kd, tgt, 0.0, 0, 0, 0)
    run_loop(par, mag, y0, 2, 1e-3, 1, Kp, Kd, tgt, 1.0, 1, 1, 1)
    run_loop(par, mag, y0, 2, 1e-3, 0, Kp, Kd, tgt, 0.0, 0, 0, 0)
    energies_batch(par, np.zeros((3, 8)), 2, 0)
    pm_batch(par, np.zeros((3, 8)), 2)
