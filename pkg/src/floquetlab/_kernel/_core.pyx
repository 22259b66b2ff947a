# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled propagation kernel.

Semantics mirror ``_pure.py`` exactly: adaptive Dormand-Prince 5(4) on the
transfer-matrix system with forced breaks at segment boundaries, power-of-two
rescaling, optional Pruefer phase, and span-power monodromies.  Energy loops
run in parallel (OpenMP).
"""

import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport atan2, cos, fabs, floor, fmod, pow, sin, sqrt

cnp.import_array()

IMPLEMENTATION = "cython"

DEF NSTAGE = 7
DEF RESCALE = 3.273390607896142e150      # 2**500
DEF INV_RESCALE = 3.054936363499605e-151 # 2**-500
DEF M_PI = 3.141592653589793

cdef int STATUS_OK_C = 0
cdef int STATUS_UNDERFLOW_C = 1
STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1

cdef double[NSTAGE] C_NODES
cdef double[NSTAGE][6] A_TAB
cdef double[NSTAGE] B5
cdef double[NSTAGE] ERRW

C_NODES = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0]
A_TAB[0][:] = [0, 0, 0, 0, 0, 0]
A_TAB[1][:] = [1.0 / 5.0, 0, 0, 0, 0, 0]
A_TAB[2][:] = [3.0 / 40.0, 9.0 / 40.0, 0, 0, 0, 0]
A_TAB[3][:] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0, 0, 0]
A_TAB[4][:] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0,
               -212.0 / 729.0, 0, 0]
A_TAB[5][:] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
               -5103.0 / 18656.0, 0]
A_TAB[6][:] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0,
               -2187.0 / 6784.0, 11.0 / 84.0]
B5 = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
      11.0 / 84.0, 0.0]
ERRW = [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
        -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0]


cdef struct Table:
    double period
    int m
    const double* bounds
    const int* kind
    const double* c0
    const double* c1
    const int* hptr
    const double* hamp
    const double* hfreq
    const double* hphase
    const int* sptr
    const double* sx
    const double* sv
    const double* sper
    const double* sref
    int nspan
    const double* span_start
    const double* span_period
    const long long* span_reps


cdef double seg_value(const Table* t, int i, double w) noexcept nogil:
    cdef double v = t.c0[i] + t.c1[i] * w
    cdef int k, lo, hi, left, right, mid, j
    cdef double per, u, x0, x1, v0, v1
    lo = t.hptr[i]
    hi = t.hptr[i + 1]
    for k in range(lo, hi):
        v += t.hamp[k] * cos(t.hfreq[k] * w + t.hphase[k])
    lo = t.sptr[i]
    hi = t.sptr[i + 1]
    if hi > lo:
        per = t.sper[i]
        u = fmod(w - t.sref[i], per)
        if u < 0.0:
            u += per
        left = lo
        right = hi
        while left < right:
            mid = (left + right) >> 1
            if t.sx[mid] <= u:
                left = mid + 1
            else:
                right = mid
        j = left - 1
        if j < lo:
            x0 = t.sx[hi - 1] - per
            x1 = t.sx[lo]
            v0 = t.sv[hi - 1]
            v1 = t.sv[lo]
        elif j >= hi - 1:
            x0 = t.sx[hi - 1]
            x1 = t.sx[lo] + per
            v0 = t.sv[hi - 1]
            v1 = t.sv[lo]
        else:
            x0 = t.sx[j]
            x1 = t.sx[j + 1]
            v0 = t.sv[j]
            v1 = t.sv[j + 1]
        if x1 > x0:
            v += v0 + (u - x0) / (x1 - x0) * (v1 - v0)
        else:
            v += v0
    return v


cdef int rk_piece(const Table* t, int seg, double E, double a, double b,
                  double* y, double rtol, double atol, double max_step,
                  bint pruefer, int* exp2) noexcept nogil:
    cdef double span = b - a
    if span == 0.0:
        return STATUS_OK_C
    cdef double direction = 1.0 if span > 0.0 else -1.0
    cdef double h = fabs(span)
    if max_step < h:
        h = max_step
    if h > 0.1:
        h = 0.1
    h *= direction
    cdef double x = a
    cdef double k[NSTAGE][5]
    cdef double ys[5]
    cdef double ynew[5]
    cdef bint have_fsal = False
    cdef double hmin = 1e-14
    cdef double tmp
    tmp = fabs(a)
    if tmp > 1.0:
        hmin = 1e-14 * tmp
    tmp = fabs(b)
    if 1e-14 * tmp > hmin:
        hmin = 1e-14 * tmp
    cdef double endtol = 1e-15
    tmp = fabs(b)
    if tmp > 1.0:
        endtol = 1e-15 * tmp
    cdef int s, j, c, ncomp
    cdef double xs, V, q, cp, sp, err, e, sc, r, m, fac, aj
    ncomp = 5 if pruefer else 4
    while direction * (b - x) > endtol:
        if direction * (x + h - b) > 0.0:
            h = b - x
        if fabs(h) < hmin:
            return STATUS_UNDERFLOW_C
        for s in range(NSTAGE):
            if s == 0 and have_fsal:
                continue
            xs = x + C_NODES[s] * h
            for c in range(5):
                ys[c] = y[c]
            for j in range(s):
                aj = A_TAB[s][j]
                if aj != 0.0:
                    for c in range(5):
                        ys[c] += h * aj * k[j][c]
            V = seg_value(t, seg, xs)
            q = V - E
            k[s][0] = q * ys[2]
            k[s][1] = q * ys[3]
            k[s][2] = ys[0]
            k[s][3] = ys[1]
            if pruefer:
                cp = cos(ys[4])
                sp = sin(ys[4])
                k[s][4] = cp * cp - q * sp * sp
            else:
                k[s][4] = 0.0
        for c in range(5):
            ynew[c] = y[c]
        for s in range(NSTAGE):
            if B5[s] != 0.0:
                for c in range(5):
                    ynew[c] += h * B5[s] * k[s][c]
        err = 0.0
        for c in range(ncomp):
            e = 0.0
            for s in range(NSTAGE):
                if ERRW[s] != 0.0:
                    e += ERRW[s] * k[s][c]
            e *= h
            sc = fabs(y[c])
            if fabs(ynew[c]) > sc:
                sc = fabs(ynew[c])
            sc = atol + rtol * sc
            r = e / sc
            err += r * r
        err = sqrt(err / ncomp)
        if err <= 1.0:
            x += h
            for c in range(5):
                y[c] = ynew[c]
            for c in range(5):
                k[0][c] = k[6][c]
            have_fsal = True
            m = fabs(y[0])
            if fabs(y[1]) > m:
                m = fabs(y[1])
            if fabs(y[2]) > m:
                m = fabs(y[2])
            if fabs(y[3]) > m:
                m = fabs(y[3])
            if m > RESCALE:
                for c in range(4):
                    y[c] *= INV_RESCALE
                    k[0][c] *= INV_RESCALE
                exp2[0] += 500
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * pow(err, -0.2)
                if fac > 5.0:
                    fac = 5.0
                elif fac < 0.2:
                    fac = 0.2
            h *= fac
            if fabs(h) > max_step:
                h = direction * max_step
        else:
            have_fsal = False
            fac = 0.9 * pow(err, -0.2)
            if fac < 0.2:
                fac = 0.2
            h *= fac
    return STATUS_OK_C


cdef int locate(const double* bounds, int m, double u) noexcept nogil:
    cdef int left = 0, right = m, mid
    while left < right:
        mid = (left + right) >> 1
        if bounds[mid + 1] <= u:
            left = mid + 1
        else:
            right = mid
    if left > m - 1:
        left = m - 1
    return left


cdef int propagate_c(const Table* t, double E, double x0, double x1,
                     double rtol, double atol, double max_step, bint pruefer,
                     double* y, int* exp2) noexcept nogil:
    cdef double P = t.period
    cdef int m = t.m
    cdef double pos = x0, u, room, target
    cdef double tol = 1e-12 if P < 1.0 else 1e-12 * P
    cdef bint forward = x1 >= x0
    cdef double endtol = 1e-14
    if fabs(x1) > 1.0:
        endtol = 1e-14 * fabs(x1)
    cdef int i, st
    cdef long guard = 0
    cdef long max_guard = 64 + 8 * (<long>(m + 2)) * (<long>(fabs(x1 - x0) / P) + 2)
    y[0] = 1.0
    y[1] = 0.0
    y[2] = 0.0
    y[3] = 1.0
    exp2[0] = 0
    while (x1 - pos > endtol) if forward else (pos - x1 > endtol):
        guard += 1
        if guard > max_guard:
            return STATUS_UNDERFLOW_C
        u = pos - P * floor(pos / P)
        if forward:
            if P - u < tol:
                u = 0.0
            i = locate(t.bounds, m, u)
            room = t.bounds[i + 1] - u
            if room < tol:
                pos += room
                continue
            target = x1 if x1 < pos + room else pos + room
        else:
            if u < tol:
                u = P
            i = locate(t.bounds, m, u - tol)
            room = u - t.bounds[i]
            if room < tol:
                pos -= room
                continue
            target = x1 if x1 > pos - room else pos - room
        st = rk_piece(t, i, E, u, u + (target - pos), y, rtol, atol,
                      max_step, pruefer, exp2)
        if st != STATUS_OK_C:
            return st
        pos = target
    return STATUS_OK_C


cdef void mat_mul(double* a, long long ea, double* b, long long eb,
                  double* out, long long* eout) noexcept nogil:
    cdef double c0 = a[0] * b[0] + a[1] * b[2]
    cdef double c1 = a[0] * b[1] + a[1] * b[3]
    cdef double c2 = a[2] * b[0] + a[3] * b[2]
    cdef double c3 = a[2] * b[1] + a[3] * b[3]
    cdef long long e = ea + eb
    cdef double mx = fabs(c0)
    if fabs(c1) > mx:
        mx = fabs(c1)
    if fabs(c2) > mx:
        mx = fabs(c2)
    if fabs(c3) > mx:
        mx = fabs(c3)
    while mx > RESCALE:
        c0 *= INV_RESCALE
        c1 *= INV_RESCALE
        c2 *= INV_RESCALE
        c3 *= INV_RESCALE
        mx *= INV_RESCALE
        e += 500
    out[0] = c0
    out[1] = c1
    out[2] = c2
    out[3] = c3
    eout[0] = e


cdef double principal_image(double* mat, double phi) noexcept nogil:
    cdef double c = cos(phi)
    cdef double s = sin(phi)
    cdef double yp = mat[0] * c + mat[1] * s
    cdef double yy = mat[2] * c + mat[3] * s
    cdef double a = atan2(yy, yp)
    return a - M_PI * floor(a / M_PI)


cdef double circle_lift(double* mat, double phi, double anchor_in,
                        double anchor_out) noexcept nogil:
    cdef double n = floor((phi - anchor_in) / M_PI)
    cdef double r = phi - anchor_in - n * M_PI
    cdef double base = principal_image(mat, anchor_in)
    cdef double img = principal_image(mat, anchor_in + r)
    cdef double d = img - base
    if d < -1e-12:
        d += M_PI
    elif d >= M_PI:
        d -= M_PI
    return anchor_out + n * M_PI + d


cdef void fill_table(Table* t, double period,
                     const double[::1] bounds, const int[::1] kind,
                     const double[::1] c0, const double[::1] c1,
                     const int[::1] hptr, const double[::1] hamp,
                     const double[::1] hfreq, const double[::1] hphase,
                     const int[::1] sptr, const double[::1] sx,
                     const double[::1] sv, const double[::1] sper,
                     const double[::1] sref, const double[::1] span_start,
                     const double[::1] span_period,
                     const long long[::1] span_reps) noexcept:
    t.period = period
    t.m = kind.shape[0]
    t.bounds = &bounds[0]
    t.kind = &kind[0]
    t.c0 = &c0[0]
    t.c1 = &c1[0]
    t.hptr = &hptr[0]
    t.hamp = &hamp[0] if hamp.shape[0] else NULL
    t.hfreq = &hfreq[0] if hfreq.shape[0] else NULL
    t.hphase = &hphase[0] if hphase.shape[0] else NULL
    t.sptr = &sptr[0]
    t.sx = &sx[0] if sx.shape[0] else NULL
    t.sv = &sv[0] if sv.shape[0] else NULL
    t.sper = &sper[0]
    t.sref = &sref[0]
    t.nspan = span_start.shape[0]
    t.span_start = &span_start[0]
    t.span_period = &span_period[0]
    t.span_reps = &span_reps[0]


cdef class _TableView:
    """Keeps the numpy arrays of a ProgramTable alive next to the C struct."""
    cdef Table t
    cdef object refs

    def __init__(self, tbl):
        arrs = (np.ascontiguousarray(tbl.bounds, dtype=np.float64),
                np.ascontiguousarray(tbl.kind, dtype=np.int32),
                np.ascontiguousarray(tbl.c0, dtype=np.float64),
                np.ascontiguousarray(tbl.c1, dtype=np.float64),
                np.ascontiguousarray(tbl.hptr, dtype=np.int32),
                np.ascontiguousarray(tbl.hamp, dtype=np.float64),
                np.ascontiguousarray(tbl.hfreq, dtype=np.float64),
                np.ascontiguousarray(tbl.hphase, dtype=np.float64),
                np.ascontiguousarray(tbl.sptr, dtype=np.int32),
                np.ascontiguousarray(tbl.sx, dtype=np.float64),
                np.ascontiguousarray(tbl.sv, dtype=np.float64),
                np.ascontiguousarray(tbl.sper, dtype=np.float64),
                np.ascontiguousarray(tbl.sref, dtype=np.float64),
                np.ascontiguousarray(tbl.span_start, dtype=np.float64),
                np.ascontiguousarray(tbl.span_period, dtype=np.float64),
                np.ascontiguousarray(tbl.span_reps, dtype=np.int64))
        self.refs = arrs
        fill_table(&self.t, float(tbl.period), arrs[0], arrs[1], arrs[2],
                   arrs[3], arrs[4], arrs[5], arrs[6], arrs[7], arrs[8],
                   arrs[9], arrs[10], arrs[11], arrs[12], arrs[13], arrs[14],
                   arrs[15])


def _view(tbl):
    view = getattr(tbl, "_cview", None)
    if view is None:
        view = _TableView(tbl)
        object.__setattr__(tbl, "_cview", view)
    return view


def propagate(tbl, double E, double x0, double x1, double rtol=1e-10,
              double atol=1e-12, double max_step=1e9,
              bint want_pruefer=False, double phi0=0.0):
    """See ``_pure.propagate``; identical contract."""
    cdef _TableView view = _view(tbl)
    cdef double y[5]
    cdef int exp2 = 0
    cdef int st
    y[4] = phi0
    with nogil:
        st = propagate_full(&view.t, E, x0, x1, rtol, atol, max_step,
                            want_pruefer, y, &exp2)
    m = np.array([y[0], y[1], y[2], y[3]])
    return m, exp2, y[4], st


cdef int propagate_full(const Table* t, double E, double x0, double x1,
                        double rtol, double atol, double max_step,
                        bint pruefer, double* y, int* exp2) noexcept nogil:
    # propagate_c resets the matrix but must preserve the caller's phi0
    cdef double phi_in = y[4]
    y[4] = phi_in
    return propagate_c(t, E, x0, x1, rtol, atol, max_step, pruefer, y, exp2)


def monodromy_many(tbl, Es, double rtol=1e-10, double atol=1e-12,
                   double max_step=1e9, bint want_pruefer=False,
                   int num_threads=1):
    """See ``_pure.monodromy_many``; identical contract, parallel over E."""
    cdef _TableView view = _view(tbl)
    cdef const Table* t = &view.t
    cdef double[::1] E_arr = np.ascontiguousarray(Es, dtype=np.float64)
    cdef Py_ssize_t n = E_arr.shape[0]
    cdef double[:, ::1] M = np.empty((n, 4))
    cdef long long[::1] exp2 = np.zeros(n, dtype=np.int64)
    cdef double[::1] phi = np.zeros(n)
    cdef int[::1] status = np.zeros(n, dtype=np.int32)
    cdef Py_ssize_t idx
    cdef int nt = num_threads if num_threads > 0 else 1
    for idx in prange(n, nogil=True, schedule="dynamic", chunksize=1,
                      num_threads=nt):
        one_monodromy(t, E_arr[idx], rtol, atol, max_step, want_pruefer,
                      &M[idx, 0], &exp2[idx], &phi[idx], &status[idx])
    return np.asarray(M), np.asarray(exp2), np.asarray(phi), np.asarray(status)


cdef void one_monodromy(const Table* t, double E, double rtol, double atol,
                        double max_step, bint pruefer, double* mout,
                        long long* eout, double* phout,
                        int* stout) noexcept nogil:
    cdef double acc[4]
    cdef double cur[4]
    cdef double tot[4]
    cdef double y[5]
    cdef long long eacc = 0, ecur, etot
    cdef int exp2
    cdef double ph = 0.0, anchor_in, anchor_out
    cdef int s, rep, st, c
    cdef long long reps
    cdef double a, per
    acc[0] = 1.0
    acc[1] = 0.0
    acc[2] = 0.0
    acc[3] = 1.0
    stout[0] = STATUS_OK_C
    for s in range(t.nspan):
        a = t.span_start[s]
        per = t.span_period[s]
        reps = t.span_reps[s]
        exp2 = 0
        y[4] = ph
        st = propagate_c(t, E, a, a + per, rtol, atol, max_step, pruefer,
                         y, &exp2)
        if st != STATUS_OK_C:
            stout[0] = st
            break
        for c in range(4):
            cur[c] = y[c]
        ecur = exp2
        if pruefer:
            anchor_in = ph
            anchor_out = y[4]
            ph = y[4]
            for rep in range(reps - 1):
                ph = circle_lift(cur, ph, anchor_in, anchor_out)
        if reps > 1:
            for c in range(4):
                tot[c] = cur[c]
            etot = ecur
            for rep in range(reps - 1):
                mat_mul(cur, ecur, tot, etot, tot, &etot)
            for c in range(4):
                cur[c] = tot[c]
            ecur = etot
        mat_mul(cur, ecur, acc, eacc, acc, &eacc)
    mout[0] = acc[0]
    mout[1] = acc[1]
    mout[2] = acc[2]
    mout[3] = acc[3]
    eout[0] = eacc
    phout[0] = ph
