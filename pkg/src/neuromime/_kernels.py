"""Hot numeric loops, jitted with numba unless NEUROMIME_NUMBA=0.

Every kernel is a plain function of numpy arrays and scalars so the same
source runs under numba's nopython mode and as ordinary Python.  Sequential
state updates (device drift, Chua, the synapse circuit) cannot be vectorized,
so their fallback is simply the un-jitted loop; the Rosenstein neighbor
search additionally has a vectorized numpy fallback in ``dynamics``.

Voltage inputs arrive sampled on the half grid (2*n+1 points: step endpoints
plus midpoints) so the RK4 stages see the drive at t, t+dt/2 and t+dt and the
integrator keeps its fourth-order accuracy.
"""

import numpy as np

from ._accel import jit_kernel


@jit_kernel
def joglekar_window(x, p):
    # squared base keeps the power well-defined for non-integer p
    return 1.0 - ((2.0 * x - 1.0) ** 2) ** p


@jit_kernel
def drift_trajectory(v_half, dt, r_on, r_off, k_drift, p, x0):
    """Linear-drift memristor driven by v (half-grid samples).

    State law dx/dt = k_drift * i * f(x) with f the Joglekar window,
    memristance M(x) = x*r_on + (1-x)*r_off, RK4 with per-stage clamping.
    Returns (i, x) at the n+1 step endpoints; i[k] = v[k]/M(x[k]).
    """
    n = (v_half.shape[0] - 1) // 2
    x_out = np.empty(n + 1)
    i_out = np.empty(n + 1)
    x = x0
    for k in range(n + 1):
        v = v_half[2 * k]
        m = x * r_on + (1.0 - x) * r_off
        i_out[k] = v / m
        x_out[k] = x
        if k == n:
            break
        vm = v_half[2 * k + 1]
        ve = v_half[2 * k + 2]

        m1 = x * r_on + (1.0 - x) * r_off
        k1 = k_drift * (v / m1) * joglekar_window(x, p)
        x2 = min(max(x + 0.5 * dt * k1, 0.0), 1.0)
        m2 = x2 * r_on + (1.0 - x2) * r_off
        k2 = k_drift * (vm / m2) * joglekar_window(x2, p)
        x3 = min(max(x + 0.5 * dt * k2, 0.0), 1.0)
        m3 = x3 * r_on + (1.0 - x3) * r_off
        k3 = k_drift * (vm / m3) * joglekar_window(x3, p)
        x4 = min(max(x + dt * k3, 0.0), 1.0)
        m4 = x4 * r_on + (1.0 - x4) * r_off
        k4 = k_drift * (ve / m4) * joglekar_window(x4, p)

        x = x + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        x = min(max(x, 0.0), 1.0)
    return i_out, x_out


@jit_kernel
def _series_diode_current(v, m, i_s, nvt):
    """Current through Shockley diode in series with resistance m.

    Solves v = i*m + nvt*ln(1 + i/i_s) for i > -i_s by bisection + Newton.
    """
    if v == 0.0:
        return 0.0
    # bracket: current is monotone in v
    if v > 0.0:
        lo = 0.0
        hi = v / m
        if hi < i_s:
            hi = i_s
        # expand until f(hi) >= 0
        for _ in range(200):
            f = hi * m + nvt * np.log(1.0 + hi / i_s) - v
            if f >= 0.0:
                break
            hi *= 2.0
    else:
        hi = 0.0
        lo = -i_s * (1.0 - 1e-12)
        # f(lo) -> -inf, f(hi) = -v > 0... f(0)=-v>0 so bracket is fine
    i = 0.5 * (lo + hi)
    for _ in range(80):
        f = i * m + nvt * np.log(1.0 + i / i_s) - v
        df = m + nvt / (i_s + i)
        step = f / df
        i_new = i - step
        if i_new <= lo or i_new >= hi:
            i_new = 0.5 * (lo + hi)
        if (i_new * m + nvt * np.log(1.0 + i_new / i_s) - v) > 0.0:
            hi = i_new
        else:
            lo = i_new
        if abs(i_new - i) <= 1e-15 * (abs(i_new) + 1e-30):
            i = i_new
            break
        i = i_new
    return i


@jit_kernel
def rectifying_trajectory(v_half, dt, r_on, r_off, k_drift, p, x0, i_s, nvt):
    """Drift memristor in series with a Shockley diode (rectifying device)."""
    n = (v_half.shape[0] - 1) // 2
    x_out = np.empty(n + 1)
    i_out = np.empty(n + 1)
    x = x0
    for k in range(n + 1):
        v = v_half[2 * k]
        m = x * r_on + (1.0 - x) * r_off
        i_out[k] = _series_diode_current(v, m, i_s, nvt)
        x_out[k] = x
        if k == n:
            break
        vm = v_half[2 * k + 1]
        ve = v_half[2 * k + 2]

        m1 = x * r_on + (1.0 - x) * r_off
        k1 = k_drift * _series_diode_current(v, m1, i_s, nvt) * joglekar_window(x, p)
        x2 = min(max(x + 0.5 * dt * k1, 0.0), 1.0)
        m2 = x2 * r_on + (1.0 - x2) * r_off
        k2 = k_drift * _series_diode_current(vm, m2, i_s, nvt) * joglekar_window(x2, p)
        x3 = min(max(x + 0.5 * dt * k2, 0.0), 1.0)
        m3 = x3 * r_on + (1.0 - x3) * r_off
        k3 = k_drift * _series_diode_current(vm, m3, i_s, nvt) * joglekar_window(x3, p)
        x4 = min(max(x + dt * k3, 0.0), 1.0)
        m4 = x4 * r_on + (1.0 - x4) * r_off
        k4 = k_drift * _series_diode_current(ve, m4, i_s, nvt) * joglekar_window(x4, p)

        x = x + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        x = min(max(x, 0.0), 1.0)
    return i_out, x_out


@jit_kernel
def divider_trajectory(v_half, dt, r_on, r_off, k_drift, p, x0a, x0b):
    """Two drift memristors in series with opposite polarity (one bridge leg).

    Device A sees +i, device B sees -i; returns the midpoint voltage
    v_mid[k] = i*Mb (across device B) plus both state tracks.
    """
    n = (v_half.shape[0] - 1) // 2
    vmid = np.empty(n + 1)
    xa_out = np.empty(n + 1)
    xb_out = np.empty(n + 1)
    xa = x0a
    xb = x0b
    for k in range(n + 1):
        v = v_half[2 * k]
        ma = xa * r_on + (1.0 - xa) * r_off
        mb = xb * r_on + (1.0 - xb) * r_off
        i = v / (ma + mb)
        vmid[k] = i * mb
        xa_out[k] = xa
        xb_out[k] = xb
        if k == n:
            break
        vm = v_half[2 * k + 1]
        ve = v_half[2 * k + 2]

        # RK4 on the coupled pair
        ka1, kb1 = _divider_rates(v, xa, xb, r_on, r_off, k_drift, p)
        xa2 = _clamp01(xa + 0.5 * dt * ka1)
        xb2 = _clamp01(xb + 0.5 * dt * kb1)
        ka2, kb2 = _divider_rates(vm, xa2, xb2, r_on, r_off, k_drift, p)
        xa3 = _clamp01(xa + 0.5 * dt * ka2)
        xb3 = _clamp01(xb + 0.5 * dt * kb2)
        ka3, kb3 = _divider_rates(vm, xa3, xb3, r_on, r_off, k_drift, p)
        xa4 = _clamp01(xa + dt * ka3)
        xb4 = _clamp01(xb + dt * kb3)
        ka4, kb4 = _divider_rates(ve, xa4, xb4, r_on, r_off, k_drift, p)

        xa = _clamp01(xa + dt * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4) / 6.0)
        xb = _clamp01(xb + dt * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4) / 6.0)
    return vmid, xa_out, xb_out


@jit_kernel
def _clamp01(x):
    return min(max(x, 0.0), 1.0)


@jit_kernel
def _divider_rates(v, xa, xb, r_on, r_off, k_drift, p):
    ma = xa * r_on + (1.0 - xa) * r_off
    mb = xb * r_on + (1.0 - xb) * r_off
    i = v / (ma + mb)
    ka = k_drift * i * joglekar_window(xa, p)
    kb = -k_drift * i * joglekar_window(xb, p)
    return ka, kb


@jit_kernel
def chua_rhs(state, alpha, beta, m0, m1, cubic):
    x, y, z = state[0], state[1], state[2]
    if cubic:
        hx = m1 * x + m0 * x * x * x
    else:
        hx = m1 * x + 0.5 * (m0 - m1) * (abs(x + 1.0) - abs(x - 1.0))
    out = np.empty(3)
    out[0] = alpha * (y - x - hx)
    out[1] = x - y + z
    out[2] = -beta * y
    return out


@jit_kernel
def chua_trajectory(alpha, beta, m0, m1, cubic, init, n_steps, dt, bound):
    """RK4 Chua integration; returns (states[n+1, 3], blow_up_step).

    blow_up_step is -1 when the trajectory stays within |state|_inf <= bound,
    otherwise the first step index where it escaped (integration stops there).
    """
    out = np.empty((n_steps + 1, 3))
    s = init.copy()
    out[0] = s
    for k in range(n_steps):
        k1 = chua_rhs(s, alpha, beta, m0, m1, cubic)
        k2 = chua_rhs(s + 0.5 * dt * k1, alpha, beta, m0, m1, cubic)
        k3 = chua_rhs(s + 0.5 * dt * k2, alpha, beta, m0, m1, cubic)
        k4 = chua_rhs(s + dt * k3, alpha, beta, m0, m1, cubic)
        s = s + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        out[k + 1] = s
        if abs(s[0]) > bound or abs(s[1]) > bound or abs(s[2]) > bound:
            return out, k + 1
    return out, -1


@jit_kernel
def chua_receiver(drive, alpha, beta, m0, m1, cubic, y0, z0, xh0, dt, bound):
    """Pecora-Carroll cascade receiver driven by the transmitted x signal.

    Stage 1: the linear (y, z) subsystem integrates with x := drive(t).
    Stage 2: the x-equation re-generates the carrier from the synced y.
    Returns (x_hat, blow_up_step).
    """
    n = drive.shape[0]
    x_hat = np.empty(n)
    y = y0
    z = z0
    xh = xh0
    x_hat[0] = xh
    for k in range(n - 1):
        d0 = drive[k]
        d1 = drive[k + 1]
        dm = 0.5 * (d0 + d1)

        # (y, z) subsystem, x substituted by the drive
        ky1 = d0 - y + z
        kz1 = -beta * y
        y2 = y + 0.5 * dt * ky1
        z2 = z + 0.5 * dt * kz1
        ky2 = dm - y2 + z2
        kz2 = -beta * y2
        y3 = y + 0.5 * dt * ky2
        z3 = z + 0.5 * dt * kz2
        ky3 = dm - y3 + z3
        kz3 = -beta * y3
        y4 = y + dt * ky3
        z4 = z + dt * kz3
        ky4 = d1 - y4 + z4
        kz4 = -beta * y4
        y_new = y + dt * (ky1 + 2.0 * ky2 + 2.0 * ky3 + ky4) / 6.0
        z_new = z + dt * (kz1 + 2.0 * kz2 + 2.0 * kz3 + kz4) / 6.0

        # cascade x stage driven by the receiver's own y (midpoint by average)
        ym = 0.5 * (y + y_new)
        kx1 = alpha * (y - xh - _chua_h(xh, m0, m1, cubic))
        xh2 = xh + 0.5 * dt * kx1
        kx2 = alpha * (ym - xh2 - _chua_h(xh2, m0, m1, cubic))
        xh3 = xh + 0.5 * dt * kx2
        kx3 = alpha * (ym - xh3 - _chua_h(xh3, m0, m1, cubic))
        xh4 = xh + dt * kx3
        kx4 = alpha * (y_new - xh4 - _chua_h(xh4, m0, m1, cubic))
        xh = xh + dt * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4) / 6.0

        y = y_new
        z = z_new
        x_hat[k + 1] = xh
        if abs(xh) > bound or abs(y) > bound or abs(z) > bound:
            return x_hat, k + 1
    return x_hat, -1


@jit_kernel
def _chua_h(x, m0, m1, cubic):
    if cubic:
        return m1 * x + m0 * x * x * x
    return m1 * x + 0.5 * (m0 - m1) * (abs(x + 1.0) - abs(x - 1.0))


@jit_kernel
def circuit_trajectory(i_ph_half, dt, r_a, r_b, r_loop, c_loop, r_t, c_t,
                       i_s_a, nvt_a, i_s_t, nvt_t, trap_enabled):
    """Photoelectrochemical synapse equivalent circuit (current-driven).

    Photocurrent i_ph injects at the electrode node; it splits into the main
    collection path (three series RC loops -> collection diode -> R_b + R_a
    to ground) and, when enabled, a trap branch (diode -> R_T || C_T).
    States: u1..u3 loop voltages, u_t trap voltage.  The node voltage is
    eliminated per stage by a scalar Newton/bisection solve of KCL.
    Output is the potential across R_a (the measured series branch drop).
    """
    n = (i_ph_half.shape[0] - 1) // 2
    v_out = np.empty(n + 1)
    u = np.zeros(3)
    ut = 0.0
    r_series = r_a + r_b
    for k in range(n + 1):
        iph = i_ph_half[2 * k]
        im, it = _circuit_split(iph, u, ut, r_series, r_loop, i_s_a, nvt_a,
                                i_s_t, nvt_t, trap_enabled)
        v_out[k] = im * r_a
        if k == n:
            break
        iph_m = i_ph_half[2 * k + 1]
        iph_e = i_ph_half[2 * k + 2]

        du1, dut1 = _circuit_rates(iph, u, ut, r_series, r_loop, c_loop, r_t,
                                   c_t, i_s_a, nvt_a, i_s_t, nvt_t, trap_enabled)
        u2 = u + 0.5 * dt * du1
        ut2 = ut + 0.5 * dt * dut1
        du2, dut2 = _circuit_rates(iph_m, u2, ut2, r_series, r_loop, c_loop,
                                   r_t, c_t, i_s_a, nvt_a, i_s_t, nvt_t, trap_enabled)
        u3 = u + 0.5 * dt * du2
        ut3 = ut + 0.5 * dt * dut2
        du3, dut3 = _circuit_rates(iph_m, u3, ut3, r_series, r_loop, c_loop,
                                   r_t, c_t, i_s_a, nvt_a, i_s_t, nvt_t, trap_enabled)
        u4 = u + dt * du3
        ut4 = ut + dt * dut3
        du4, dut4 = _circuit_rates(iph_e, u4, ut4, r_series, r_loop, c_loop,
                                   r_t, c_t, i_s_a, nvt_a, i_s_t, nvt_t, trap_enabled)

        u = u + dt * (du1 + 2.0 * du2 + 2.0 * du3 + du4) / 6.0
        ut = ut + dt * (dut1 + 2.0 * dut2 + 2.0 * dut3 + dut4) / 6.0
    return v_out


@jit_kernel
def _diode_i(dv, i_s, nvt):
    # Shockley with linearized deep-reverse tail to avoid exp underflow drama
    if dv < -40.0 * nvt:
        return -i_s
    return i_s * (np.exp(dv / nvt) - 1.0)


@jit_kernel
def _circuit_split(iph, u, ut, r_series, r_loop, i_s_a, nvt_a, i_s_t, nvt_t,
                   trap_enabled):
    """Solve KCL for the electrode node, return (i_main, i_trap)."""
    usum = u[0] + u[1] + u[2]

    # main branch current for node voltage v1: series diode D_a with r_series,
    # behind the series loop back-voltages: v1 - usum = i*r_series + v_diode(i)
    # trap branch: i_t = diode(v1 - ut) into R_T||C_T
    # f(v1) = i_main(v1) + i_trap(v1) - iph, monotone increasing in v1
    lo = usum - 1.0
    hi = usum + 1.0
    for _ in range(200):
        im = _series_diode_current(lo - usum, r_series, i_s_a, nvt_a)
        itr = _diode_i(lo - ut, i_s_t, nvt_t) if trap_enabled else 0.0
        if im + itr - iph <= 0.0:
            break
        lo -= 2.0 * (hi - lo)
    for _ in range(200):
        im = _series_diode_current(hi - usum, r_series, i_s_a, nvt_a)
        itr = _diode_i(hi - ut, i_s_t, nvt_t) if trap_enabled else 0.0
        if im + itr - iph >= 0.0:
            break
        hi += 2.0 * (hi - lo)
    v1 = 0.5 * (lo + hi)
    for _ in range(100):
        im = _series_diode_current(v1 - usum, r_series, i_s_a, nvt_a)
        itr = _diode_i(v1 - ut, i_s_t, nvt_t) if trap_enabled else 0.0
        f = im + itr - iph
        if f > 0.0:
            hi = v1
        else:
            lo = v1
        v1_new = 0.5 * (lo + hi)
        if abs(v1_new - v1) <= 1e-14 * (abs(v1_new) + 1e-12):
            v1 = v1_new
            break
        v1 = v1_new
    im = _series_diode_current(v1 - usum, r_series, i_s_a, nvt_a)
    itr = _diode_i(v1 - ut, i_s_t, nvt_t) if trap_enabled else 0.0
    return im, itr


@jit_kernel
def _circuit_rates(iph, u, ut, r_series, r_loop, c_loop, r_t, c_t,
                   i_s_a, nvt_a, i_s_t, nvt_t, trap_enabled):
    im, itr = _circuit_split(iph, u, ut, r_series, r_loop, i_s_a, nvt_a,
                             i_s_t, nvt_t, trap_enabled)
    du = np.empty(3)
    for j in range(3):
        du[j] = (im - u[j] / r_loop) / c_loop
    dut = (itr - ut / r_t) / c_t if trap_enabled else 0.0
    return du, dut


@jit_kernel
def reservoir_trajectory(v_half, dt, edges_i, edges_j, r_on, r_off, k_drift,
                         p, x0, g_leak, g_in, inject_node, n_nodes):
    """Memristor-network reservoir driven by a current injection.

    Edge conductances are frozen within each step for the nodal solve, then
    the edge states advance by RK4 (edge branch voltage held over the step).
    Returns node potentials at every step endpoint, shape (n+1, n_nodes).
    """
    n = (v_half.shape[0] - 1) // 2
    n_edges = edges_i.shape[0]
    x = x0.copy()
    pots = np.empty((n + 1, n_nodes))
    for k in range(n + 1):
        u = v_half[2 * k]
        # nodal matrix with frozen conductances
        a = np.zeros((n_nodes, n_nodes))
        for e in range(n_edges):
            g = 1.0 / (x[e] * r_on + (1.0 - x[e]) * r_off)
            i_n = edges_i[e]
            j_n = edges_j[e]
            a[i_n, i_n] += g
            a[j_n, j_n] += g
            a[i_n, j_n] -= g
            a[j_n, i_n] -= g
        for d in range(n_nodes):
            a[d, d] += g_leak
        b = np.zeros(n_nodes)
        b[inject_node] = g_in * u
        v_nodes = np.linalg.solve(a, b)
        pots[k] = v_nodes
        if k == n:
            break
        # advance edge states with the branch voltage held over the step
        for e in range(n_edges):
            dv = v_nodes[edges_i[e]] - v_nodes[edges_j[e]]
            xe = x[e]
            k1 = k_drift * (dv / (xe * r_on + (1.0 - xe) * r_off)) * joglekar_window(xe, p)
            x2 = _clamp01(xe + 0.5 * dt * k1)
            k2 = k_drift * (dv / (x2 * r_on + (1.0 - x2) * r_off)) * joglekar_window(x2, p)
            x3 = _clamp01(xe + 0.5 * dt * k2)
            k3 = k_drift * (dv / (x3 * r_on + (1.0 - x3) * r_off)) * joglekar_window(x3, p)
            x4 = _clamp01(xe + dt * k3)
            k4 = k_drift * (dv / (x4 * r_on + (1.0 - x4) * r_off)) * joglekar_window(x4, p)
            x[e] = _clamp01(xe + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0)
    return pots


@jit_kernel
def rosenstein_divergence(embedded, theiler, max_steps):
    """Mean log nearest-neighbor divergence curve (Rosenstein et al.).

    embedded: (n_vectors, dim) delay-embedded series.  For each point the
    nearest neighbor outside the Theiler exclusion zone is found, then the
    log distance is tracked for max_steps forward steps.
    """
    n = embedded.shape[0]
    dim = embedded.shape[1]
    usable = n - max_steps
    log_div = np.zeros(max_steps + 1)
    counts = np.zeros(max_steps + 1)
    for i in range(usable):
        best = 1e300
        best_j = -1
        for j in range(usable):
            sep = i - j
            if sep < 0:
                sep = -sep
            if sep <= theiler:
                continue
            d2 = 0.0
            for m in range(dim):
                diff = embedded[i, m] - embedded[j, m]
                d2 += diff * diff
            if d2 < best and d2 > 0.0:
                best = d2
                best_j = j
        if best_j < 0:
            continue
        for s in range(max_steps + 1):
            d2 = 0.0
            for m in range(dim):
                diff = embedded[i + s, m] - embedded[best_j + s, m]
                d2 += diff * diff
            if d2 > 0.0:
                log_div[s] += 0.5 * np.log(d2)
                counts[s] += 1.0
    for s in range(max_steps + 1):
        if counts[s] > 0.0:
            log_div[s] /= counts[s]
    return log_div, counts
