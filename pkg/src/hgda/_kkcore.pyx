# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled spring-layout solver kernel.

Mirrors ``_kkcore_py`` expression for expression; both backends must
produce bit-identical trajectories, so keep every arithmetic statement in
sync when editing either file (and never add fast-math style flags).
"""

from libc.math cimport sqrt, cos, sin, INFINITY

import numpy as np

BACKEND_NAME = "c"

cdef double GOLDEN_ANGLE = 2.399963229728653


cdef double _total_energy(double[:, ::1] pos, double[:, ::1] lengths,
                          double[:, ::1] strengths) noexcept nogil:
    cdef Py_ssize_t n = pos.shape[0]
    cdef Py_ssize_t i, j
    cdef double e = 0.0, dx, dy, dist, diff
    for i in range(n - 1):
        for j in range(i + 1, n):
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            dist = sqrt(dx * dx + dy * dy)
            diff = dist - lengths[i, j]
            e += strengths[i, j] * diff * diff
    return 0.5 * e


cdef double _local_energy(double[:, ::1] pos, double[:, ::1] lengths,
                          double[:, ::1] strengths, Py_ssize_t m,
                          double x, double y) noexcept nogil:
    cdef Py_ssize_t n = pos.shape[0]
    cdef Py_ssize_t i
    cdef double e = 0.0, dx, dy, d2, dist, diff
    for i in range(n):
        if i == m:
            continue
        dx = x - pos[i, 0]
        dy = y - pos[i, 1]
        d2 = dx * dx + dy * dy
        if d2 == 0.0:
            return INFINITY
        dist = sqrt(d2)
        diff = dist - lengths[m, i]
        e += strengths[m, i] * diff * diff
    return e


cdef void _refresh(double[:, ::1] pos, double[:, ::1] lengths,
                   double[:, ::1] strengths, double[::1] gx,
                   double[::1] gy) noexcept nogil:
    cdef Py_ssize_t n = pos.shape[0]
    cdef Py_ssize_t i, j
    cdef double sx, sy, xi, yi, dx, dy, dist
    for i in range(n):
        sx = 0.0
        sy = 0.0
        xi = pos[i, 0]
        yi = pos[i, 1]
        for j in range(n):
            if j == i:
                continue
            dx = xi - pos[j, 0]
            dy = yi - pos[j, 1]
            dist = sqrt(dx * dx + dy * dy)
            sx += strengths[i, j] * (dx - lengths[i, j] * dx / dist)
            sy += strengths[i, j] * (dy - lengths[i, j] * dy / dist)
        gx[i] = sx
        gy[i] = sy


def solve_layout(pos_arr, lengths_arr, strengths_arr, double eps,
                 long max_outer, long max_inner, double step_cap,
                 double jitter, energy_trace=None):
    """Run the highest-gradient-first Newton relaxation in place.

    ``pos_arr`` is an (n, 2) float64 array updated in place.  Returns
    ``(converged, residual, selections, moves, jitters)`` where
    ``residual`` is the max per-vertex gradient norm recomputed from
    scratch at exit.
    """
    cdef double[:, ::1] pos = pos_arr
    cdef double[:, ::1] lengths = lengths_arr
    cdef double[:, ::1] strengths = strengths_arr
    cdef Py_ssize_t n = pos.shape[0]
    if n <= 1:
        return True, 0.0, 0, 0, 0

    gx_arr = np.zeros(n)
    gy_arr = np.zeros(n)
    cdef double[::1] gx = gx_arr
    cdef double[::1] gy = gy_arr

    cdef bint converged = False, accepted
    cdef long selections = 0, moves = 0, jitters = 0
    cdef long inner, retries, h
    cdef Py_ssize_t i, m
    cdef double residual = 0.0
    cdef double best, di, xm, ym, ang
    cdef double gxm, gym, dxx, dyy, dxy, local_old, local_new
    cdef double dx, dy, d2, dist, d3, k, l, diff, delta, det, sx, sy, step
    cdef double nx2, ny2, xi, yi, dxo, dyo, do, cox, coy, dxn, dyn, dn, cnx, cny
    cdef double gxm_new, gym_new
    cdef bint coincident, trace = energy_trace is not None

    _refresh(pos, lengths, strengths, gx, gy)

    while selections < max_outer:
        best = -1.0
        m = 0
        for i in range(n):
            di = sqrt(gx[i] * gx[i] + gy[i] * gy[i])
            if di > best:
                best = di
                m = i
        if best <= eps:
            # Incremental updates drift; only report convergence that a
            # from-scratch recomputation confirms.
            _refresh(pos, lengths, strengths, gx, gy)
            best = -1.0
            m = 0
            for i in range(n):
                di = sqrt(gx[i] * gx[i] + gy[i] * gy[i])
                if di > best:
                    best = di
                    m = i
            if best <= eps:
                converged = True
                residual = best
                break
        selections += 1

        for inner in range(max_inner):
            # One Newton attempt on vertex m.
            retries = 0
            while True:
                xm = pos[m, 0]
                ym = pos[m, 1]
                gxm = 0.0
                gym = 0.0
                dxx = 0.0
                dyy = 0.0
                dxy = 0.0
                local_old = 0.0
                coincident = False
                for i in range(n):
                    if i == m:
                        continue
                    dx = xm - pos[i, 0]
                    dy = ym - pos[i, 1]
                    d2 = dx * dx + dy * dy
                    if d2 == 0.0:
                        coincident = True
                        break
                    dist = sqrt(d2)
                    d3 = d2 * dist
                    k = strengths[m, i]
                    l = lengths[m, i]
                    diff = dist - l
                    local_old += k * diff * diff
                    gxm += k * (dx - l * dx / dist)
                    gym += k * (dy - l * dy / dist)
                    dxx += k * (1.0 - l * dy * dy / d3)
                    dyy += k * (1.0 - l * dx * dx / d3)
                    dxy += k * (l * dx * dy / d3)
                if not coincident:
                    break
                if retries >= 4:
                    break
                ang = GOLDEN_ANGLE * (m + 1 + jitters)
                pos[m, 0] = xm + jitter * cos(ang)
                pos[m, 1] = ym + jitter * sin(ang)
                jitters += 1
                retries += 1
                _refresh(pos, lengths, strengths, gx, gy)
            if coincident:
                break

            delta = sqrt(gxm * gxm + gym * gym)
            if delta <= eps:
                break

            det = dxx * dyy - dxy * dxy
            if dxx > 0.0 and det > 0.0:
                sx = (dxy * gym - dyy * gxm) / det
                sy = (dxy * gxm - dxx * gym) / det
            else:
                # Hessian not positive definite: steepest descent, capped.
                step = step_cap
                if delta < step:
                    step = delta
                sx = -gxm / delta * step
                sy = -gym / delta * step

            accepted = False
            for h in range(21):
                nx2 = xm + sx
                ny2 = ym + sy
                local_new = _local_energy(pos, lengths, strengths, m, nx2, ny2)
                if local_new <= local_old:
                    accepted = True
                    break
                sx *= 0.5
                sy *= 0.5
            if not accepted:
                break

            gxm_new = 0.0
            gym_new = 0.0
            for i in range(n):
                if i == m:
                    continue
                xi = pos[i, 0]
                yi = pos[i, 1]
                k = strengths[m, i]
                l = lengths[m, i]
                dxo = xi - xm
                dyo = yi - ym
                do = sqrt(dxo * dxo + dyo * dyo)
                cox = k * (dxo - l * dxo / do)
                coy = k * (dyo - l * dyo / do)
                dxn = xi - nx2
                dyn = yi - ny2
                dn = sqrt(dxn * dxn + dyn * dyn)
                cnx = k * (dxn - l * dxn / dn)
                cny = k * (dyn - l * dyn / dn)
                gx[i] += cnx - cox
                gy[i] += cny - coy
                gxm_new -= cnx
                gym_new -= cny
            gx[m] = gxm_new
            gy[m] = gym_new
            pos[m, 0] = nx2
            pos[m, 1] = ny2
            moves += 1
            if trace:
                energy_trace.append(_total_energy(pos, lengths, strengths))

    if not converged:
        _refresh(pos, lengths, strengths, gx, gy)
        best = -1.0
        for i in range(n):
            di = sqrt(gx[i] * gx[i] + gy[i] * gy[i])
            if di > best:
                best = di
        residual = best
        converged = best <= eps

    return bool(converged), residual, selections, moves, jitters
