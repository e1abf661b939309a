"""Pure-Python spring-layout solver kernel (fallback backend).

Mirrors ``_kkcore.pyx`` expression for expression.  Python floats and C
doubles are both IEEE-754 binary64 and every operation here is correctly
rounded, so the two backends produce bit-identical trajectories; keep the
arithmetic statements in sync when editing either file.

Plain lists are used instead of ndarrays in the hot loops: scalar
indexing on lists is several times faster in CPython.
"""

from __future__ import annotations

from math import cos, sin, sqrt

BACKEND_NAME = "python"

GOLDEN_ANGLE = 2.399963229728653

_INF = float("inf")


def _total_energy(xs, ys, lengths, strengths):
    n = len(xs)
    e = 0.0
    for i in range(n - 1):
        li = lengths[i]
        si = strengths[i]
        for j in range(i + 1, n):
            dx = xs[i] - xs[j]
            dy = ys[i] - ys[j]
            dist = sqrt(dx * dx + dy * dy)
            diff = dist - li[j]
            e += si[j] * diff * diff
    return 0.5 * e


def _local_energy(xs, ys, lengths, strengths, m, x, y):
    n = len(xs)
    lm = lengths[m]
    sm = strengths[m]
    e = 0.0
    for i in range(n):
        if i == m:
            continue
        dx = x - xs[i]
        dy = y - ys[i]
        d2 = dx * dx + dy * dy
        if d2 == 0.0:
            return _INF
        dist = sqrt(d2)
        diff = dist - lm[i]
        e += sm[i] * diff * diff
    return e


def _refresh(xs, ys, lengths, strengths, gx, gy):
    n = len(xs)
    for i in range(n):
        sx = 0.0
        sy = 0.0
        xi = xs[i]
        yi = ys[i]
        li = lengths[i]
        si = strengths[i]
        for j in range(n):
            if j == i:
                continue
            dx = xi - xs[j]
            dy = yi - ys[j]
            dist = sqrt(dx * dx + dy * dy)
            sx += si[j] * (dx - li[j] * dx / dist)
            sy += si[j] * (dy - li[j] * dy / dist)
        gx[i] = sx
        gy[i] = sy


def solve_layout(pos_arr, lengths_arr, strengths_arr, eps, max_outer,
                 max_inner, step_cap, jitter, energy_trace=None):
    """Run the highest-gradient-first Newton relaxation in place.

    Same contract as the compiled backend: ``pos_arr`` is an (n, 2)
    float64 array updated in place; returns ``(converged, residual,
    selections, moves, jitters)``.
    """
    n = pos_arr.shape[0]
    if n <= 1:
        return True, 0.0, 0, 0, 0

    xs = pos_arr[:, 0].tolist()
    ys = pos_arr[:, 1].tolist()
    lengths = lengths_arr.tolist()
    strengths = strengths_arr.tolist()
    gx = [0.0] * n
    gy = [0.0] * n

    converged = False
    residual = 0.0
    selections = 0
    moves = 0
    jitters = 0
    trace = energy_trace is not None

    _refresh(xs, ys, lengths, strengths, gx, gy)

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
            _refresh(xs, ys, lengths, strengths, gx, gy)
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

        lm = lengths[m]
        sm = strengths[m]
        for _inner in range(max_inner):
            # One Newton attempt on vertex m.
            retries = 0
            while True:
                xm = xs[m]
                ym = ys[m]
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
                    dx = xm - xs[i]
                    dy = ym - ys[i]
                    d2 = dx * dx + dy * dy
                    if d2 == 0.0:
                        coincident = True
                        break
                    dist = sqrt(d2)
                    d3 = d2 * dist
                    k = sm[i]
                    l = lm[i]
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
                xs[m] = xm + jitter * cos(ang)
                ys[m] = ym + jitter * sin(ang)
                jitters += 1
                retries += 1
                _refresh(xs, ys, lengths, strengths, gx, gy)
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
            for _h in range(21):
                nx2 = xm + sx
                ny2 = ym + sy
                local_new = _local_energy(xs, ys, lengths, strengths, m, nx2, ny2)
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
                xi = xs[i]
                yi = ys[i]
                k = sm[i]
                l = lm[i]
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
            xs[m] = nx2
            ys[m] = ny2
            moves += 1
            if trace:
                energy_trace.append(_total_energy(xs, ys, lengths, strengths))

    if not converged:
        _refresh(xs, ys, lengths, strengths, gx, gy)
        best = -1.0
        for i in range(n):
            di = sqrt(gx[i] * gx[i] + gy[i] * gy[i])
            if di > best:
                best = di
        residual = best
        converged = best <= eps

    for i in range(n):
        pos_arr[i, 0] = xs[i]
        pos_arr[i, 1] = ys[i]
    return converged, residual, selections, moves, jitters
