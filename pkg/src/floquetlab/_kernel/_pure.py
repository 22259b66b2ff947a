"""Pure-Python propagation kernel (reference implementation).

Integrates the transfer-matrix system of -y'' + V y = E y,

    d/dx [y'; y] = [[0, V - E], [1, 0]] [y'; y],

with an adaptive Dormand-Prince 5(4) pair, forced step breaks at segment
boundaries of the potential's program table, and power-of-two rescaling so
deeply hyperbolic propagations never overflow.  The compiled kernel in
``_core.pyx`` mirrors this module's semantics step for step; keep the two in
sync.
"""

from __future__ import annotations

import math

import numpy as np

IMPLEMENTATION = "python"

# Dormand-Prince 5(4) tableau
_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
)
_B5 = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
       11.0 / 84.0, 0.0)
# b5 - b4: local error estimate weights
_ERR = (71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
        -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

_RESCALE = 2.0 ** 500
_INV_RESCALE = 2.0 ** -500

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1


def _seg_value(tbl, i, w):
    """Potential value of segment i at fundamental-domain coordinate w."""
    v = tbl.c0[i] + tbl.c1[i] * w
    lo, hi = tbl.hptr[i], tbl.hptr[i + 1]
    for k in range(lo, hi):
        v += tbl.hamp[k] * math.cos(tbl.hfreq[k] * w + tbl.hphase[k])
    lo, hi = tbl.sptr[i], tbl.sptr[i + 1]
    if hi > lo:
        per = tbl.sper[i]
        u = math.fmod(w - tbl.sref[i], per)
        if u < 0.0:
            u += per
        j = lo + _bisect(tbl.sx, lo, hi, u) - 1
        if j < lo:
            x0, x1 = tbl.sx[hi - 1] - per, tbl.sx[lo]
            v0, v1 = tbl.sv[hi - 1], tbl.sv[lo]
        elif j >= hi - 1:
            x0, x1 = tbl.sx[hi - 1], tbl.sx[lo] + per
            v0, v1 = tbl.sv[hi - 1], tbl.sv[lo]
        else:
            x0, x1 = tbl.sx[j], tbl.sx[j + 1]
            v0, v1 = tbl.sv[j], tbl.sv[j + 1]
        v += v0 + (u - x0) / (x1 - x0) * (v1 - v0) if x1 > x0 else v0
    return v


def _bisect(arr, lo, hi, x):
    """Index of first element in arr[lo:hi] greater than x (relative)."""
    left, right = lo, hi
    while left < right:
        mid = (left + right) // 2
        if arr[mid] <= x:
            left = mid + 1
        else:
            right = mid
    return left - lo


def _rk_piece(tbl, seg, E, a, b, y, rtol, atol, max_step, want_pruefer):
    """Advance state y (m00,m01,m10,m11,phi) from a to b inside one segment.

    `a`, `b` are fundamental-domain coordinates (b < a integrates backward).
    Returns (exp2_gained, status).
    """
    exp2 = 0
    span = b - a
    if span == 0.0:
        return 0, STATUS_OK
    direction = 1.0 if span > 0.0 else -1.0
    h = direction * min(abs(span), max_step, 0.1)
    x = a
    k = [[0.0] * 5 for _ in range(7)]
    fsal = None
    hmin = 1e-14 * max(1.0, abs(a), abs(b))
    while direction * (b - x) > 1e-15 * max(1.0, abs(b)):
        if direction * (x + h - b) > 0.0:
            h = b - x
        if abs(h) < hmin:
            return exp2, STATUS_STEP_UNDERFLOW
        # stages
        for s in range(7):
            if s == 0 and fsal is not None:
                k[0] = fsal
                continue
            xs = x + _C[s] * h
            ys = list(y)
            arow = _A[s]
            for j in range(s):
                aj = arow[j]
                if aj != 0.0:
                    kj = k[j]
                    for c in range(5):
                        ys[c] += h * aj * kj[c]
            V = _seg_value(tbl, seg, xs)
            q = V - E
            ks = k[s]
            ks[0] = q * ys[2]
            ks[1] = q * ys[3]
            ks[2] = ys[0]
            ks[3] = ys[1]
            if want_pruefer:
                cp = math.cos(ys[4])
                sp = math.sin(ys[4])
                ks[4] = cp * cp - q * sp * sp
            else:
                ks[4] = 0.0
        ynew = list(y)
        for s in range(7):
            bs = _B5[s]
            if bs != 0.0:
                ksr = k[s]
                for c in range(5):
                    ynew[c] += h * bs * ksr[c]
        # error estimate
        err = 0.0
        ncomp = 5 if want_pruefer else 4
        for c in range(ncomp):
            e = 0.0
            for s in range(7):
                if _ERR[s] != 0.0:
                    e += _ERR[s] * k[s][c]
            e *= h
            sc = atol + rtol * max(abs(y[c]), abs(ynew[c]))
            r = e / sc
            err += r * r
        err = math.sqrt(err / ncomp)
        if err <= 1.0:
            x += h
            y[:] = ynew
            fsal = list(k[6])
            m = max(abs(y[0]), abs(y[1]), abs(y[2]), abs(y[3]))
            if m > _RESCALE:
                for c in range(4):
                    y[c] *= _INV_RESCALE
                    fsal[c] *= _INV_RESCALE
                exp2 += 500
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h *= fac
            if abs(h) > max_step:
                h = direction * max_step
        else:
            fsal = None
            h *= max(0.2, 0.9 * err ** -0.2)
    return exp2, STATUS_OK


def propagate(tbl, E, x0, x1, rtol=1e-10, atol=1e-12, max_step=1e9,
              want_pruefer=False, phi0=0.0):
    """Transfer matrix from x0 to x1 (either direction).

    Returns (m: float64[4], exp2: int, phi: float, status: int) where the
    actual matrix is 2**exp2 * [[m[0], m[1]], [m[2], m[3]]] mapping
    (y'(x0), y(x0)) to (y'(x1), y(x1)); phi is the Pruefer phase at x1 for
    the initial condition phi0 at x0 (only meaningful if requested).
    """
    P = tbl.period
    bounds = tbl.bounds
    m = len(tbl.kind)
    y = [1.0, 0.0, 0.0, 1.0, phi0]
    exp2 = 0
    status = STATUS_OK
    pos = x0
    tol = 1e-12 * max(1.0, P)
    forward = x1 >= x0
    guard = 0
    max_guard = 64 + 8 * (m + 2) * (int(abs(x1 - x0) / P) + 2)
    while (x1 - pos > 1e-14 * max(1.0, abs(x1)) if forward
           else pos - x1 > 1e-14 * max(1.0, abs(x1))):
        guard += 1
        if guard > max_guard:
            status = STATUS_STEP_UNDERFLOW
            break
        u = pos - P * math.floor(pos / P)
        if forward:
            if P - u < tol:
                u = 0.0
            i = _locate(bounds, m, u)
            room = bounds[i + 1] - u
            if room < tol:
                pos += room
                continue
            target = min(x1, pos + room)
        else:
            if u < tol:
                u = P
            i = _locate(bounds, m, u - tol)
            room = u - bounds[i]
            if room < tol:
                pos -= room
                continue
            target = max(x1, pos - room)
        # integrate in fundamental coordinates [u, u + (target - pos)]
        g, st = _rk_piece(tbl, i, E, u, u + (target - pos), y, rtol, atol,
                          max_step, want_pruefer)
        exp2 += g
        if st != STATUS_OK:
            status = st
            break
        pos = target
    return (np.array(y[:4]), exp2, y[4], status)


def _locate(bounds, m, u):
    left, right = 0, m
    while left < right:
        mid = (left + right) // 2
        if bounds[mid + 1] <= u:
            left = mid + 1
        else:
            right = mid
    return min(left, m - 1)


def _mat_mul(a, ea, b, eb):
    """(a, 2^ea) @ (b, 2^eb) with renormalisation."""
    c = [a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
         a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]]
    e = ea + eb
    mx = max(abs(v) for v in c)
    while mx > _RESCALE:
        c = [v * _INV_RESCALE for v in c]
        e += 500
        mx *= _INV_RESCALE
    return c, e


def _circle_lift(mat, phi, anchor_in, anchor_out):
    """Lift of the projective circle map v -> mat v through the anchor.

    The map phi -> angle(mat v(phi)) on R/(pi Z) is an increasing circle
    homeomorphism; `anchor_in -> anchor_out` fixes the branch.  Exactness
    matters only modulo pi: the winding is inherited from the anchor.
    """
    n = math.floor((phi - anchor_in) / math.pi)
    r = phi - anchor_in - n * math.pi  # in [0, pi)
    base = _principal_image(mat, anchor_in)
    img = _principal_image(mat, anchor_in + r)
    d = img - base
    if d < -1e-12:
        d += math.pi
    elif d >= math.pi:
        d -= math.pi
    return anchor_out + n * math.pi + d


def _principal_image(mat, phi):
    c, s = math.cos(phi), math.sin(phi)
    yp = mat[0] * c + mat[1] * s
    yy = mat[2] * c + mat[3] * s
    a = math.atan2(yy, yp)
    return a - math.pi * math.floor(a / math.pi)


def monodromy_many(tbl, Es, rtol=1e-10, atol=1e-12, max_step=1e9,
                   want_pruefer=False, num_threads=1):
    """Monodromy matrices over one period for an array of energies.

    Uses the program table's span structure: each (start, period, reps) run
    is integrated over a single sub-period and raised to the reps-th power;
    the Pruefer phase is threaded through the powers via the circle-map lift.
    Returns (M: (n,4), exp2: (n,), phi: (n,), status: (n,)).
    """
    Es = np.asarray(Es, dtype=float)
    n = len(Es)
    M = np.empty((n, 4))
    exp2 = np.zeros(n, dtype=np.int64)
    phi = np.zeros(n)
    status = np.zeros(n, dtype=np.int32)
    for idx in range(n):
        E = Es[idx]
        acc = [1.0, 0.0, 0.0, 1.0]
        eacc = 0
        ph = 0.0
        ok = STATUS_OK
        for s in range(len(tbl.span_start)):
            a = tbl.span_start[s]
            per = tbl.span_period[s]
            reps = int(tbl.span_reps[s])
            m1, e1, ph1, st = propagate(tbl, E, a, a + per, rtol, atol,
                                        max_step, want_pruefer, ph)
            if st != STATUS_OK:
                ok = st
                break
            cur = list(m1)
            ecur = e1
            if want_pruefer:
                anchor_in, anchor_out = ph, ph1
                ph = ph1
                for _ in range(reps - 1):
                    ph = _circle_lift(cur, ph, anchor_in, anchor_out)
            if reps > 1:
                total, etot = cur, ecur
                for _ in range(reps - 1):
                    total, etot = _mat_mul(cur, ecur, total, etot)
                cur, ecur = total, etot
            acc, eacc = _mat_mul(cur, ecur, acc, eacc)
        M[idx] = acc
        exp2[idx] = eacc
        phi[idx] = ph
        status[idx] = ok
    return M, exp2, phi, status
