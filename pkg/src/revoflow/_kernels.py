"""Compiled inner loops for the profile-curve flow.

Everything here works on plain float64 arrays so numba can fuse the
whole RK4 step into one nopython region.  Array pairs (x, y) hold the
profile curve sampled uniformly in the parameter u in [0, 1); h is the
parameter spacing 1/n.

The per-node scratch arrays passed around are:
  rw  1/|gamma'|            ry  1/y
  a   y/|gamma'|            H   kappa1 + kappa2 (mean curvature sum)
  dk  kappa1 - kappa2       tx, ty  Euclidean unit tangent

Two stencil orders are provided.  The 2nd-order variant is what the
production flow driver uses (cheaper per step, and the explicit step
size is capped by stability at either order, see flow.py); the
4th-order variant is kept for refinement studies and cross-checks.
"""
import numpy as np
from numba import njit

_FM = {"reassoc", "contract", "arcp", "nsz"}

RUNNING, CONVERGED, SING_CURV, SING_LEN, STEP_FLOOR, MAX_STEPS, TIME_LIMIT = range(7)

# Nyquist symbol of the squared second-derivative stencil, used to park
# the step size where the RK4 stability factor is small: the linearized
# velocity at the grid's highest mode is ~ CSYM / h_s^4.
CSYM4 = (64.0 / 12.0) ** 2
CSYM2 = 4.0 ** 2

# cfg slots
C_H, C_TOL, C_YFLOOR, C_KBLOW, C_LHBLOW, C_DTFLOOR, C_TMAX, C_MAXSTEP, \
    C_RESEV, C_GROWAG, C_GROWCO, C_TOLW, C_CAPCO, C_AGGF, C_MESH = range(15)
# st slots
S_T, S_DT, S_W, S_DISS, S_DRIFT, S_NACC, S_NREJ, S_NRES, S_SRES, S_SGROW, \
    S_VMAX, S_LEUC, S_LH = range(13)


@njit(cache=True, error_model="numpy", fastmath=_FM)
def geom4(x, y, h, rw, ry, a, H, dk, tx, ty):
    n = x.shape[0]
    c1 = 1.0 / (12.0 * h)
    c2 = 1.0 / (12.0 * h * h)
    amax2 = 0.0
    ymin = 1.0e300
    rwmax = 0.0
    sw = 0.0
    swy = 0.0
    sW = 0.0
    for i in range(2, n - 2):
        xp = (8.0 * (x[i + 1] - x[i - 1]) - (x[i + 2] - x[i - 2])) * c1
        yp = (8.0 * (y[i + 1] - y[i - 1]) - (y[i + 2] - y[i - 2])) * c1
        xpp = (-(x[i + 2] + x[i - 2]) + 16.0 * (x[i + 1] + x[i - 1]) - 30.0 * x[i]) * c2
        ypp = (-(y[i + 2] + y[i - 2]) + 16.0 * (y[i + 1] + y[i - 1]) - 30.0 * y[i]) * c2
        yi = y[i]
        w2 = xp * xp + yp * yp
        rw2 = 1.0 / w2
        rwi = np.sqrt(rw2)
        ryi = 1.0 / yi
        k1 = -(xp * ypp - yp * xpp) * rw2 * rwi
        k2 = xp * rwi * ryi
        Hi = k1 + k2
        H[i] = Hi
        dk[i] = k1 - k2
        a[i] = yi * rwi
        rw[i] = rwi
        ry[i] = ryi
        tx[i] = xp * rwi
        ty[i] = yp * rwi
        a2 = k1 * k1 + k2 * k2
        if a2 > amax2:
            amax2 = a2
        if yi < ymin:
            ymin = yi
        if rwi > rwmax:
            rwmax = rwi
        w = w2 * rwi
        sw += w
        swy += w * ryi
        sW += Hi * Hi * yi * w
    for ii in range(-2, 2):
        i = ii % n
        im2 = (i - 2) % n
        im1 = (i - 1) % n
        ip1 = (i + 1) % n
        ip2 = (i + 2) % n
        xp = (8.0 * (x[ip1] - x[im1]) - (x[ip2] - x[im2])) * c1
        yp = (8.0 * (y[ip1] - y[im1]) - (y[ip2] - y[im2])) * c1
        xpp = (-(x[ip2] + x[im2]) + 16.0 * (x[ip1] + x[im1]) - 30.0 * x[i]) * c2
        ypp = (-(y[ip2] + y[im2]) + 16.0 * (y[ip1] + y[im1]) - 30.0 * y[i]) * c2
        yi = y[i]
        w2 = xp * xp + yp * yp
        rw2 = 1.0 / w2
        rwi = np.sqrt(rw2)
        ryi = 1.0 / yi
        k1 = -(xp * ypp - yp * xpp) * rw2 * rwi
        k2 = xp * rwi * ryi
        Hi = k1 + k2
        H[i] = Hi
        dk[i] = k1 - k2
        a[i] = yi * rwi
        rw[i] = rwi
        ry[i] = ryi
        tx[i] = xp * rwi
        ty[i] = yp * rwi
        a2 = k1 * k1 + k2 * k2
        if a2 > amax2:
            amax2 = a2
        if yi < ymin:
            ymin = yi
        if rwi > rwmax:
            rwmax = rwi
        w = w2 * rwi
        sw += w
        swy += w * ryi
        sW += Hi * Hi * yi * w
    tot = sw + swy + sW + amax2 + rwmax
    ok = np.isfinite(tot) and ymin > 0.0 and sw > 0.0
    return ok, np.sqrt(amax2), ymin, rwmax, h * sw, h * swy, 0.5 * np.pi * h * sW


@njit(cache=True, error_model="numpy", fastmath=_FM)
def geom2(x, y, h, rw, ry, a, H, dk, tx, ty):
    n = x.shape[0]
    c1 = 0.5 / h
    c2 = 1.0 / (h * h)
    amax2 = 0.0
    ymin = 1.0e300
    rwmax = 0.0
    sw = 0.0
    swy = 0.0
    sW = 0.0
    for i in range(1, n - 1):
        xp = (x[i + 1] - x[i - 1]) * c1
        yp = (y[i + 1] - y[i - 1]) * c1
        xpp = (x[i + 1] - 2.0 * x[i] + x[i - 1]) * c2
        ypp = (y[i + 1] - 2.0 * y[i] + y[i - 1]) * c2
        yi = y[i]
        w2 = xp * xp + yp * yp
        rw2 = 1.0 / w2
        rwi = np.sqrt(rw2)
        ryi = 1.0 / yi
        k1 = -(xp * ypp - yp * xpp) * rw2 * rwi
        k2 = xp * rwi * ryi
        Hi = k1 + k2
        H[i] = Hi
        dk[i] = k1 - k2
        a[i] = yi * rwi
        rw[i] = rwi
        ry[i] = ryi
        tx[i] = xp * rwi
        ty[i] = yp * rwi
        a2 = k1 * k1 + k2 * k2
        if a2 > amax2:
            amax2 = a2
        if yi < ymin:
            ymin = yi
        if rwi > rwmax:
            rwmax = rwi
        w = w2 * rwi
        sw += w
        swy += w * ryi
        sW += Hi * Hi * yi * w
    for ii in range(-1, 1):
        i = ii % n
        im1 = (i - 1) % n
        ip1 = (i + 1) % n
        xp = (x[ip1] - x[im1]) * c1
        yp = (y[ip1] - y[im1]) * c1
        xpp = (x[ip1] - 2.0 * x[i] + x[im1]) * c2
        ypp = (y[ip1] - 2.0 * y[i] + y[im1]) * c2
        yi = y[i]
        w2 = xp * xp + yp * yp
        rw2 = 1.0 / w2
        rwi = np.sqrt(rw2)
        ryi = 1.0 / yi
        k1 = -(xp * ypp - yp * xpp) * rw2 * rwi
        k2 = xp * rwi * ryi
        Hi = k1 + k2
        H[i] = Hi
        dk[i] = k1 - k2
        a[i] = yi * rwi
        rw[i] = rwi
        ry[i] = ryi
        tx[i] = xp * rwi
        ty[i] = yp * rwi
        a2 = k1 * k1 + k2 * k2
        if a2 > amax2:
            amax2 = a2
        if yi < ymin:
            ymin = yi
        if rwi > rwmax:
            rwmax = rwi
        w = w2 * rwi
        sw += w
        swy += w * ryi
        sW += Hi * Hi * yi * w
    tot = sw + swy + sW + amax2 + rwmax
    ok = np.isfinite(tot) and ymin > 0.0 and sw > 0.0
    return ok, np.sqrt(amax2), ymin, rwmax, h * sw, h * swy, 0.5 * np.pi * h * sW


@njit(cache=True, error_model="numpy", fastmath=_FM)
def vel4(h, y, rw, ry, a, H, dk, tx, ty, kx, ky):
    """Normal velocity field; writes the Cartesian rates into kx, ky.

    V = -(Delta_g H + 0.5 H (H^2 - 4K)) evaluated with the surface
    Laplacian expanded in the curve parameter, (a H')' / (y w) with
    a = y/w.  Returns (max |V|, dissipation integrand 2*pi*h*sum V^2 y w).
    """
    n = y.shape[0]
    c1 = 1.0 / (12.0 * h)
    c2 = 1.0 / (12.0 * h * h)
    vmax = 0.0
    sD = 0.0
    for i in range(2, n - 2):
        Hp = (8.0 * (H[i + 1] - H[i - 1]) - (H[i + 2] - H[i - 2])) * c1
        Hpp = (-(H[i + 2] + H[i - 2]) + 16.0 * (H[i + 1] + H[i - 1]) - 30.0 * H[i]) * c2
        ap = (8.0 * (a[i + 1] - a[i - 1]) - (a[i + 2] - a[i - 2])) * c1
        lap = (ap * Hp + a[i] * Hpp) * rw[i] * ry[i]
        V = -(lap + 0.5 * H[i] * dk[i] * dk[i])
        kx[i] = V * ty[i]
        ky[i] = -V * tx[i]
        av = abs(V)
        if av > vmax:
            vmax = av
        sD += V * V * y[i] / rw[i]
    for ii in range(-2, 2):
        i = ii % n
        im2 = (i - 2) % n
        im1 = (i - 1) % n
        ip1 = (i + 1) % n
        ip2 = (i + 2) % n
        Hp = (8.0 * (H[ip1] - H[im1]) - (H[ip2] - H[im2])) * c1
        Hpp = (-(H[ip2] + H[im2]) + 16.0 * (H[ip1] + H[im1]) - 30.0 * H[i]) * c2
        ap = (8.0 * (a[ip1] - a[im1]) - (a[ip2] - a[im2])) * c1
        lap = (ap * Hp + a[i] * Hpp) * rw[i] * ry[i]
        V = -(lap + 0.5 * H[i] * dk[i] * dk[i])
        kx[i] = V * ty[i]
        ky[i] = -V * tx[i]
        av = abs(V)
        if av > vmax:
            vmax = av
        sD += V * V * y[i] / rw[i]
    return vmax, 2.0 * np.pi * h * sD


@njit(cache=True, error_model="numpy", fastmath=_FM)
def vel2(h, y, rw, ry, a, H, dk, tx, ty, kx, ky):
    n = y.shape[0]
    c1 = 0.5 / h
    c2 = 1.0 / (h * h)
    vmax = 0.0
    sD = 0.0
    for i in range(1, n - 1):
        Hp = (H[i + 1] - H[i - 1]) * c1
        Hpp = (H[i + 1] - 2.0 * H[i] + H[i - 1]) * c2
        ap = (a[i + 1] - a[i - 1]) * c1
        lap = (ap * Hp + a[i] * Hpp) * rw[i] * ry[i]
        V = -(lap + 0.5 * H[i] * dk[i] * dk[i])
        kx[i] = V * ty[i]
        ky[i] = -V * tx[i]
        av = abs(V)
        if av > vmax:
            vmax = av
        sD += V * V * y[i] / rw[i]
    for ii in range(-1, 1):
        i = ii % n
        im1 = (i - 1) % n
        ip1 = (i + 1) % n
        Hp = (H[ip1] - H[im1]) * c1
        Hpp = (H[ip1] - 2.0 * H[i] + H[im1]) * c2
        ap = (a[ip1] - a[im1]) * c1
        lap = (ap * Hp + a[i] * Hpp) * rw[i] * ry[i]
        V = -(lap + 0.5 * H[i] * dk[i] * dk[i])
        kx[i] = V * ty[i]
        ky[i] = -V * tx[i]
        av = abs(V)
        if av > vmax:
            vmax = av
        sD += V * V * y[i] / rw[i]
    return vmax, 2.0 * np.pi * h * sD


@njit(cache=True, error_model="numpy", fastmath=_FM)
def spline_nat_periodic(t, f, M, cp, dp, u, q):
    """Second derivatives M of the periodic cubic spline through (t, f).

    t has n+1 entries with t[n] the wrap-around abscissa; f[n] must equal
    f[0].  Cyclic tridiagonal system solved by rank-one correction of the
    plain Thomas sweep.
    """
    n = t.shape[0] - 1
    for i in range(n):
        hm = t[i] - t[i - 1] if i > 0 else t[n] - t[n - 1]
        hp = t[i + 1] - t[i]
        fm = f[i - 1] if i > 0 else f[n - 1]
        fp = f[i + 1]
        cp[i] = hp / 6.0
        dp[i] = (hm + hp) / 3.0
        u[i] = (fp - f[i]) / hp - (f[i] - fm) / hm
    a_corner = (t[n] - t[n - 1]) / 6.0
    gamma = -dp[0]
    dp[0] = dp[0] - gamma
    dp[n - 1] = dp[n - 1] - a_corner * a_corner / gamma
    for i in range(n):
        q[i] = 0.0
    q[0] = gamma
    q[n - 1] = a_corner
    for i in range(1, n):
        hm = t[i] - t[i - 1]
        b = hm / 6.0
        m = b / dp[i - 1]
        dp[i] = dp[i] - m * cp[i - 1]
        u[i] = u[i] - m * u[i - 1]
        q[i] = q[i] - m * q[i - 1]
    u[n - 1] = u[n - 1] / dp[n - 1]
    q[n - 1] = q[n - 1] / dp[n - 1]
    for i in range(n - 2, -1, -1):
        u[i] = (u[i] - cp[i] * u[i + 1]) / dp[i]
        q[i] = (q[i] - cp[i] * q[i + 1]) / dp[i]
    fact = (u[0] + u[n - 1] * a_corner / gamma) / (1.0 + q[0] + q[n - 1] * a_corner / gamma)
    for i in range(n):
        M[i] = u[i] - fact * q[i]
    return 0


@njit(cache=True, error_model="numpy", fastmath=_FM)
def spline_eval_periodic(t, f, M, s, out):
    """Evaluate the periodic cubic spline at increasing targets s in [0, t[n])."""
    n = t.shape[0] - 1
    j = 0
    for k in range(s.shape[0]):
        sk = s[k]
        while j < n - 1 and t[j + 1] < sk:
            j += 1
        hj = t[j + 1] - t[j]
        Mj = M[j]
        Mj1 = M[j + 1] if j + 1 < n else M[0]
        fj = f[j]
        fj1 = f[j + 1]
        A = (t[j + 1] - sk) / hj
        B = 1.0 - A
        out[k] = (A * fj + B * fj1
                  + ((A * A * A - A) * Mj + (B * B * B - B) * Mj1) * hj * hj / 6.0)
    return 0


@njit(cache=True, error_model="numpy", fastmath=_FM)
def resample_uniform_inplace(x, y, tk, fx, fy, M, cp, dp, u, q, s, ox, oy):
    """Redistribute the n nodes to uniform chord-length spacing.

    Node 0 keeps its position; the rest move along the periodic cubic
    spline through the current nodes.
    """
    n = x.shape[0]
    tk[0] = 0.0
    for i in range(1, n + 1):
        dx = x[i % n] - x[i - 1]
        dy = y[i % n] - y[i - 1]
        tk[i] = tk[i - 1] + np.sqrt(dx * dx + dy * dy)
    S = tk[n]
    for i in range(n):
        fx[i] = x[i]
        fy[i] = y[i]
    fx[n] = x[0]
    fy[n] = y[0]
    for k in range(n):
        s[k] = S * k / n
    spline_nat_periodic(tk, fx, M, cp, dp, u, q)
    spline_eval_periodic(tk, fx, M, s, ox)
    spline_nat_periodic(tk, fy, M, cp, dp, u, q)
    spline_eval_periodic(tk, fy, M, s, oy)
    for i in range(n):
        x[i] = ox[i]
        y[i] = oy[i]
    return 0


@njit(cache=True, error_model="numpy", fastmath=_FM)
def flow_chunk(x, y, st, cfg, nchunk, order4):
    """Advance the flow by up to nchunk attempted RK4 steps in place.

    Returns one of the status codes; RUNNING means the chunk budget ran
    out.  st carries the evolving scalars (time, step size, energy,
    dissipation, counters) across calls; cfg is read-only.

    A step is accepted only if the energy does not increase beyond a
    tiny slack, which keeps the discrete evolution a genuine descent
    and doubles as the stability control: an unstable step blows the
    energy up immediately and gets rejected.  Node redistribution runs
    every cfg[C_RESEV] accepted steps but only when the chord spacing
    has actually drifted out of uniform by more than cfg[C_MESH]
    relative; resampling an already-uniform mesh only injects spline
    noise and sets a floor under max |V| that never decays.
    """
    n = x.shape[0]
    h = cfg[C_H]
    rwA = np.empty(n); ryA = np.empty(n); aA = np.empty(n); HA = np.empty(n)
    dkA = np.empty(n); txA = np.empty(n); tyA = np.empty(n)
    rwB = np.empty(n); ryB = np.empty(n); aB = np.empty(n); HB = np.empty(n)
    dkB = np.empty(n); txB = np.empty(n); tyB = np.empty(n)
    rwS = np.empty(n); ryS = np.empty(n); aS = np.empty(n); HS = np.empty(n)
    dkS = np.empty(n); txS = np.empty(n); tyS = np.empty(n)
    k1x = np.empty(n); k1y = np.empty(n); k2x = np.empty(n); k2y = np.empty(n)
    k3x = np.empty(n); k3y = np.empty(n); k4x = np.empty(n); k4y = np.empty(n)
    xs = np.empty(n); ys = np.empty(n); xn = np.empty(n); yn = np.empty(n)
    tk = np.empty(n + 1); fx = np.empty(n + 1); fy = np.empty(n + 1)
    Msp = np.empty(n); cp = np.empty(n); dp = np.empty(n)
    usp = np.empty(n); qsp = np.empty(n); ssp = np.empty(n)
    ox = np.empty(n); oy = np.empty(n)

    if order4:
        okc, amax, ymin, rwmax, Leuc, LH, W = geom4(x, y, h, rwA, ryA, aA, HA, dkA, txA, tyA)
    else:
        okc, amax, ymin, rwmax, Leuc, LH, W = geom2(x, y, h, rwA, ryA, aA, HA, dkA, txA, tyA)
    if not okc:
        return SING_CURV
    st[S_W] = W
    st[S_LEUC] = Leuc
    st[S_LH] = LH

    for _ in range(nchunk):
        if ymin < cfg[C_YFLOOR]:
            return SING_CURV
        if amax * Leuc >= cfg[C_KBLOW]:
            return SING_CURV
        if LH >= cfg[C_LHBLOW]:
            return SING_LEN
        if order4:
            vmax, D1 = vel4(h, y, rwA, ryA, aA, HA, dkA, txA, tyA, k1x, k1y)
        else:
            vmax, D1 = vel2(h, y, rwA, ryA, aA, HA, dkA, txA, tyA, k1x, k1y)
        st[S_VMAX] = vmax
        if not np.isfinite(vmax):
            return SING_CURV
        if vmax <= cfg[C_TOL]:
            return CONVERGED
        if st[S_NACC] >= cfg[C_MAXSTEP]:
            return MAX_STEPS
        if st[S_T] >= cfg[C_TMAX]:
            return TIME_LIMIT
        aggressive = vmax > cfg[C_AGGF] * cfg[C_TOL]
        dt = st[S_DT]
        if not aggressive:
            # near convergence, park dt where RK4 damps the highest
            # mode hard so the tail actually decays
            hsmin = h / rwmax
            cap = cfg[C_CAPCO] * hsmin * hsmin * hsmin * hsmin
            if dt > cap:
                dt = cap
                st[S_DT] = cap
        dt_try = dt
        clipped = False
        if st[S_T] + dt_try > cfg[C_TMAX]:
            dt_try = cfg[C_TMAX] - st[S_T]
            clipped = True

        W_n = 1.0e300
        okn = False
        amaxn = 0.0; yminn = 0.0; rwmaxn = 0.0; Leucn = 0.0; LHn = 0.0
        D2 = 0.0
        D3 = 0.0
        for i in range(n):
            xs[i] = x[i] + 0.5 * dt_try * k1x[i]
            ys[i] = y[i] + 0.5 * dt_try * k1y[i]
        if order4:
            ok2, a2_, y2_, rw2_, L2_, LH2_, W2_ = geom4(xs, ys, h, rwS, ryS, aS, HS, dkS, txS, tyS)
        else:
            ok2, a2_, y2_, rw2_, L2_, LH2_, W2_ = geom2(xs, ys, h, rwS, ryS, aS, HS, dkS, txS, tyS)
        if ok2:
            if order4:
                v2_, D2 = vel4(h, ys, rwS, ryS, aS, HS, dkS, txS, tyS, k2x, k2y)
            else:
                v2_, D2 = vel2(h, ys, rwS, ryS, aS, HS, dkS, txS, tyS, k2x, k2y)
            for i in range(n):
                xs[i] = x[i] + 0.5 * dt_try * k2x[i]
                ys[i] = y[i] + 0.5 * dt_try * k2y[i]
            if order4:
                ok3, a3_, y3_, rw3_, L3_, LH3_, W3_ = geom4(xs, ys, h, rwS, ryS, aS, HS, dkS, txS, tyS)
            else:
                ok3, a3_, y3_, rw3_, L3_, LH3_, W3_ = geom2(xs, ys, h, rwS, ryS, aS, HS, dkS, txS, tyS)
            if ok3:
                if order4:
                    v3_, D3 = vel4(h, ys, rwS, ryS, aS, HS, dkS, txS, tyS, k3x, k3y)
                else:
                    v3_, D3 = vel2(h, ys, rwS, ryS, aS, HS, dkS, txS, tyS, k3x, k3y)
                for i in range(n):
                    xs[i] = x[i] + dt_try * k3x[i]
                    ys[i] = y[i] + dt_try * k3y[i]
                if order4:
                    ok4, a4_, y4_, rw4_, L4_, LH4_, W4_ = geom4(xs, ys, h, rwS, ryS, aS, HS, dkS, txS, tyS)
                else:
                    ok4, a4_, y4_, rw4_, L4_, LH4_, W4_ = geom2(xs, ys, h, rwS, ryS, aS, HS, dkS, txS, tyS)
                if ok4:
                    if order4:
                        v4_, D4 = vel4(h, ys, rwS, ryS, aS, HS, dkS, txS, tyS, k4x, k4y)
                    else:
                        v4_, D4 = vel2(h, ys, rwS, ryS, aS, HS, dkS, txS, tyS, k4x, k4y)
                    sixth = dt_try / 6.0
                    for i in range(n):
                        xn[i] = x[i] + sixth * (k1x[i] + 2.0 * (k2x[i] + k3x[i]) + k4x[i])
                        yn[i] = y[i] + sixth * (k1y[i] + 2.0 * (k2y[i] + k3y[i]) + k4y[i])
                    if order4:
                        okn, amaxn, yminn, rwmaxn, Leucn, LHn, W_n = geom4(
                            xn, yn, h, rwB, ryB, aB, HB, dkB, txB, tyB)
                    else:
                        okn, amaxn, yminn, rwmaxn, Leucn, LHn, W_n = geom2(
                            xn, yn, h, rwB, ryB, aB, HB, dkB, txB, tyB)

        if okn and W_n <= st[S_W] + cfg[C_TOLW]:
            for i in range(n):
                x[i] = xn[i]
                y[i] = yn[i]
            st[S_T] += dt_try
            # midpoint-stage dissipation, matches the RK4 quadrature of
            # the energy identity dW/dt = -integral V^2 dmu well enough
            # for the balance check
            st[S_DISS] += dt_try * 0.5 * (D2 + D3)
            st[S_NACC] += 1.0
            st[S_SRES] += 1.0
            st[S_SGROW] += 1.0
            st[S_W] = W_n
            amax = amaxn; ymin = yminn; rwmax = rwmaxn; Leuc = Leucn; LH = LHn
            rwT = rwA; rwA = rwB; rwB = rwT
            ryT = ryA; ryA = ryB; ryB = ryT
            aT = aA; aA = aB; aB = aT
            HT = HA; HA = HB; HB = HT
            dkT = dkA; dkA = dkB; dkB = dkT
            txT = txA; txA = txB; txB = txT
            tyT = tyA; tyA = tyB; tyB = tyT
            st[S_LEUC] = Leuc
            st[S_LH] = LH
            if clipped and st[S_T] >= cfg[C_TMAX]:
                return TIME_LIMIT
            if st[S_SRES] >= cfg[C_RESEV]:
                rwlo = rwA[0]
                rwhi = rwA[0]
                for i in range(1, n):
                    ri = rwA[i]
                    if ri < rwlo:
                        rwlo = ri
                    if ri > rwhi:
                        rwhi = ri
                st[S_SRES] = 0.0
                if rwhi - rwlo > cfg[C_MESH] * rwlo:
                    W_pre = st[S_W]
                    resample_uniform_inplace(x, y, tk, fx, fy, Msp, cp, dp, usp, qsp, ssp, ox, oy)
                    st[S_NRES] += 1.0
                    if order4:
                        okr, amax, ymin, rwmax, Leuc, LH, Wr = geom4(
                            x, y, h, rwA, ryA, aA, HA, dkA, txA, tyA)
                    else:
                        okr, amax, ymin, rwmax, Leuc, LH, Wr = geom2(
                            x, y, h, rwA, ryA, aA, HA, dkA, txA, tyA)
                    if not okr:
                        return SING_CURV
                    st[S_DRIFT] += Wr - W_pre
                    st[S_W] = Wr
                    st[S_LEUC] = Leuc
                    st[S_LH] = LH
            ge = cfg[C_GROWAG] if aggressive else cfg[C_GROWCO]
            if st[S_SGROW] >= ge:
                st[S_DT] = st[S_DT] * 2.0
                st[S_SGROW] = 0.0
        else:
            st[S_NREJ] += 1.0
            st[S_DT] = dt * 0.5
            if not aggressive:
                st[S_SGROW] = 0.0
            if st[S_DT] < cfg[C_DTFLOOR]:
                return STEP_FLOOR
    return RUNNING
