# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled flow kernels; formula-for-formula twins of pykernels.py."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, log, floor

cnp.import_array()


cdef inline double _smoothstep(double t) nogil:
    return t * t * (3.0 - 2.0 * t)


cdef inline double _smoothstep_d(double t) nogil:
    return 6.0 * t * (1.0 - t)


def stretch_apply(double[:, ::1] pts, double ax, double ay,
                  double eps, double tau_prime, double coef):
    cdef Py_ssize_t i, n = pts.shape[0]
    cdef double px, py, xi, e2 = eps * eps, f, th, c, s
    with nogil:
        for i in range(n):
            px = pts[i, 0] - ax
            py = pts[i, 1] - ay
            xi = px * px + py * py
            if xi >= e2:
                continue
            if xi <= 0.25 * e2:
                f = 0.75 * tau_prime
            else:
                f = tau_prime * (1.0 - xi / e2)
            th = coef * f
            c = cos(th)
            s = sin(th)
            pts[i, 0] = ax + c * px - s * py
            pts[i, 1] = ay + s * px + c * py


def stretch_apply_tan(double[:, ::1] pts, double[:, ::1] vec, double[::1] logn,
                      double ax, double ay, double eps, double tau_prime, double coef):
    cdef Py_ssize_t i, n = pts.shape[0]
    cdef double px, py, xi, e2 = eps * eps, f, th, c, s
    cdef double tpr, q, wx, wy, nm2, inv
    with nogil:
        for i in range(n):
            px = pts[i, 0] - ax
            py = pts[i, 1] - ay
            xi = px * px + py * py
            if xi >= e2:
                continue
            if xi <= 0.25 * e2:
                f = 0.75 * tau_prime
                tpr = 0.0
            else:
                f = tau_prime * (1.0 - xi / e2)
                tpr = -2.0 * coef * tau_prime / e2
            th = coef * f
            q = tpr * (px * vec[i, 0] + py * vec[i, 1])
            wx = vec[i, 0] - q * py
            wy = vec[i, 1] + q * px
            nm2 = wx * wx + wy * wy
            logn[i] += 0.5 * log(nm2)
            inv = 1.0 / sqrt(nm2)
            c = cos(th)
            s = sin(th)
            vec[i, 0] = (c * wx - s * wy) * inv
            vec[i, 1] = (s * wx + c * wy) * inv
            pts[i, 0] = ax + c * px - s * py
            pts[i, 1] = ay + s * px + c * py


cdef inline double _ann_profile(double s, double b, double w, double* gp) nogil:
    cdef double t
    gp[0] = 0.0
    if s <= 0.5 + b - w or s >= 1.0 - b + w:
        return 0.0
    if s < 0.5 + b:
        t = (s - (0.5 + b - w)) / w
        gp[0] = _smoothstep_d(t) / w
        return _smoothstep(t)
    if s <= 1.0 - b:
        return 1.0
    t = (s - (1.0 - b)) / w
    gp[0] = -_smoothstep_d(t) / w
    return 1.0 - _smoothstep(t)


def annulus_apply(double[:, ::1] pts, double ax, double ay,
                  double eps, double b, double w, double coef):
    cdef Py_ssize_t i, n = pts.shape[0]
    cdef double px, py, r, g, gp, th, c, s
    with nogil:
        for i in range(n):
            px = pts[i, 0] - ax
            py = pts[i, 1] - ay
            r = sqrt(px * px + py * py)
            g = _ann_profile(r / eps, b, w, &gp)
            if g == 0.0:
                continue
            th = coef * g
            c = cos(th)
            s = sin(th)
            pts[i, 0] = ax + c * px - s * py
            pts[i, 1] = ay + s * px + c * py


def annulus_apply_tan(double[:, ::1] pts, double[:, ::1] vec, double[::1] logn,
                      double ax, double ay, double eps, double b, double w,
                      double coef, unsigned char[::1] touched):
    cdef Py_ssize_t i, n = pts.shape[0]
    cdef double px, py, r2, r, g, gp, th, c, s, tpr, q, wx, wy, nm2, inv
    with nogil:
        for i in range(n):
            px = pts[i, 0] - ax
            py = pts[i, 1] - ay
            r2 = px * px + py * py
            r = sqrt(r2)
            g = _ann_profile(r / eps, b, w, &gp)
            th = coef * g
            if gp != 0.0:
                if touched is not None:
                    touched[i] |= 1
                tpr = coef * gp / (eps * r)
            else:
                tpr = 0.0
                if th == 0.0:
                    continue
            q = tpr * (px * vec[i, 0] + py * vec[i, 1])
            wx = vec[i, 0] - q * py
            wy = vec[i, 1] + q * px
            nm2 = wx * wx + wy * wy
            logn[i] += 0.5 * log(nm2)
            inv = 1.0 / sqrt(nm2)
            c = cos(th)
            s = sin(th)
            vec[i, 0] = (c * wx - s * wy) * inv
            vec[i, 1] = (s * wx + c * wy) * inv
            pts[i, 0] = ax + c * px - s * py
            pts[i, 1] = ay + s * px + c * py


cdef inline int _find_ball(double x, double y,
                           double[::1] cx, double[::1] cy, double[::1] rr,
                           int[::1] cell_start, int[::1] items,
                           double x0, double y0, double inv_h,
                           int nx, int ny) nogil:
    cdef int ix = <int>floor((x - x0) * inv_h)
    cdef int iy = <int>floor((y - y0) * inv_h)
    cdef int c, j, b
    cdef double dx, dy
    if ix < 0 or ix >= nx or iy < 0 or iy >= ny:
        return -1
    c = ix * ny + iy
    for j in range(cell_start[c], cell_start[c + 1]):
        b = items[j]
        dx = x - cx[b]
        dy = y - cy[b]
        if dx * dx + dy * dy < rr[b] * rr[b]:
            return b
    return -1


def lookup(double[:, ::1] pts, table):
    cdef double[::1] cx = table.cx, cy = table.cy, rr = table.r
    cdef int[::1] cell_start = table.cell_start, items = table.items
    cdef double x0 = table.x0, y0 = table.y0, inv_h = table.inv_h
    cdef int nx = table.nx, ny = table.ny
    cdef Py_ssize_t i, n = pts.shape[0]
    out = np.empty(n, dtype=np.int32)
    cdef int[::1] ov = out
    with nogil:
        for i in range(n):
            ov[i] = _find_ball(pts[i, 0], pts[i, 1], cx, cy, rr,
                               cell_start, items, x0, y0, inv_h, nx, ny)
    return out


def balls_apply(double[:, ::1] pts, table, double[::1] coefs, double w,
                int[::1] idx_out=None):
    cdef double[::1] cx = table.cx, cy = table.cy, rr = table.r
    cdef int[::1] cell_start = table.cell_start, items = table.items
    cdef double x0 = table.x0, y0 = table.y0, inv_h = table.inv_h
    cdef int nx = table.nx, ny = table.ny
    cdef Py_ssize_t i, n = pts.shape[0]
    cdef int b
    cdef double px, py, s, t, g, th, c, sn, R
    with nogil:
        for i in range(n):
            b = _find_ball(pts[i, 0], pts[i, 1], cx, cy, rr,
                           cell_start, items, x0, y0, inv_h, nx, ny)
            if idx_out is not None:
                idx_out[i] = b
            if b < 0:
                continue
            R = rr[b]
            px = pts[i, 0] - cx[b]
            py = pts[i, 1] - cy[b]
            s = sqrt(px * px + py * py) / R
            if s <= 1.0 - w:
                g = 1.0
            else:
                t = (s - (1.0 - w)) / w
                if t > 1.0:
                    t = 1.0
                g = 1.0 - _smoothstep(t)
            th = coefs[b] * g
            c = cos(th)
            sn = sin(th)
            pts[i, 0] = cx[b] + c * px - sn * py
            pts[i, 1] = cy[b] + sn * px + c * py


def balls_apply_tan(double[:, ::1] pts, double[:, ::1] vec, double[::1] logn,
                    table, double[::1] coefs, double w, unsigned char[::1] touched):
    cdef double[::1] cx = table.cx, cy = table.cy, rr = table.r
    cdef int[::1] cell_start = table.cell_start, items = table.items
    cdef double x0 = table.x0, y0 = table.y0, inv_h = table.inv_h
    cdef int nx = table.nx, ny = table.ny
    cdef Py_ssize_t i, n = pts.shape[0]
    cdef int b
    cdef double px, py, r2, r, s, t, g, gp, th, c, sn, R, tpr, q, wx, wy, nm2, inv
    with nogil:
        for i in range(n):
            b = _find_ball(pts[i, 0], pts[i, 1], cx, cy, rr,
                           cell_start, items, x0, y0, inv_h, nx, ny)
            if b < 0:
                continue
            R = rr[b]
            px = pts[i, 0] - cx[b]
            py = pts[i, 1] - cy[b]
            r2 = px * px + py * py
            r = sqrt(r2)
            s = r / R
            if s <= 1.0 - w:
                g = 1.0
                gp = 0.0
                tpr = 0.0
            else:
                t = (s - (1.0 - w)) / w
                if t > 1.0:
                    t = 1.0
                g = 1.0 - _smoothstep(t)
                gp = -_smoothstep_d(t) / (w * R)
                tpr = coefs[b] * gp / r if r2 > 0.0 else 0.0
                if touched is not None:
                    touched[i] |= 1
            th = coefs[b] * g
            q = tpr * (px * vec[i, 0] + py * vec[i, 1])
            wx = vec[i, 0] - q * py
            wy = vec[i, 1] + q * px
            nm2 = wx * wx + wy * wy
            logn[i] += 0.5 * log(nm2)
            inv = 1.0 / sqrt(nm2)
            c = cos(th)
            sn = sin(th)
            vec[i, 0] = (c * wx - sn * wy) * inv
            vec[i, 1] = (sn * wx + c * wy) * inv
            pts[i, 0] = cx[b] + c * px - sn * py
            pts[i, 1] = cy[b] + sn * px + c * py


def bad_bands(double[:, ::1] pts, double ax, double ay, double eps,
              double band, table):
    cdef double[::1] cx = table.cx, cy = table.cy, rr = table.r
    cdef int[::1] cell_start = table.cell_start, items = table.items
    cdef double x0 = table.x0, y0 = table.y0, inv_h = table.inv_h
    cdef int nx = table.nx, ny = table.ny
    cdef Py_ssize_t i, n = pts.shape[0]
    cdef int b
    cdef double px, py, s, d
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] ov = out
    with nogil:
        for i in range(n):
            px = pts[i, 0] - ax
            py = pts[i, 1] - ay
            s = sqrt(px * px + py * py) / eps
            if (s > 1.0 - band and s < 1.0) or (s > 0.5 and s < 0.5 + band):
                ov[i] = 1
                continue
            b = _find_ball(pts[i, 0], pts[i, 1], cx, cy, rr,
                           cell_start, items, x0, y0, inv_h, nx, ny)
            if b >= 0:
                px = pts[i, 0] - cx[b]
                py = pts[i, 1] - cy[b]
                d = sqrt(px * px + py * py)
                if d > (1.0 - band) * rr[b]:
                    ov[i] = 1
    return out
