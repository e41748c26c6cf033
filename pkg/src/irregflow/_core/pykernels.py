"""Pure NumPy implementations of the hot flow kernels.

Semantically identical to the compiled versions in ``_speedups.pyx``; every
operation is an exact radius-preserving rotation applied in place to an
``(n, 2)`` point array, optionally transporting unit tangent vectors and
log magnitudes through the analytic Jacobian.
"""
from __future__ import annotations

import numpy as np


def _rotate(pts, px, py, cx, cy, theta):
    c = np.cos(theta)
    s = np.sin(theta)
    pts[:, 0] = cx + c * px - s * py
    pts[:, 1] = cy + s * px + c * py


def _shear_tangent(vec, logn, px, py, r2, theta_prime_over_r, theta):
    # J = R(theta) [I + (theta'/r) p_perp x p / r] ; q = theta' (p.v) / r^2
    q = np.where(r2 > 0.0, theta_prime_over_r, 0.0) * (px * vec[:, 0] + py * vec[:, 1])
    wx = vec[:, 0] - q * py
    wy = vec[:, 1] + q * px
    nm2 = wx * wx + wy * wy
    logn += 0.5 * np.log(nm2)
    inv = 1.0 / np.sqrt(nm2)
    c = np.cos(theta)
    s = np.sin(theta)
    vec[:, 0] = (c * wx - s * wy) * inv
    vec[:, 1] = (s * wx + c * wy) * inv


def stretch_apply(pts, ax, ay, eps, tau_prime, coef):
    px = pts[:, 0] - ax
    py = pts[:, 1] - ay
    xi = px * px + py * py
    e2 = eps * eps
    f = np.where(xi <= 0.25 * e2, 0.75 * tau_prime, tau_prime * (1.0 - xi / e2))
    f = np.where(xi >= e2, 0.0, f)
    _rotate(pts, px, py, ax, ay, coef * f)


def stretch_apply_tan(pts, vec, logn, ax, ay, eps, tau_prime, coef):
    px = pts[:, 0] - ax
    py = pts[:, 1] - ay
    xi = px * px + py * py
    e2 = eps * eps
    on_ramp = (xi > 0.25 * e2) & (xi < e2)
    f = np.where(xi <= 0.25 * e2, 0.75 * tau_prime, tau_prime * (1.0 - xi / e2))
    f = np.where(xi >= e2, 0.0, f)
    theta = coef * f
    # theta'(r) = -2 coef tau' r / eps^2 on the ramp; theta'/r = -2 coef tau'/eps^2
    tpr = np.where(on_ramp, -2.0 * coef * tau_prime / e2, 0.0)
    _shear_tangent(vec, logn, px, py, xi, tpr, theta)
    _rotate(pts, px, py, ax, ay, theta)


def _annulus_profile(s, b, w):
    up = (s > 0.5 + b - w) & (s < 0.5 + b)
    dn = (s > 1.0 - b) & (s < 1.0 - b + w)
    t_up = np.clip((s - (0.5 + b - w)) / w, 0.0, 1.0)
    t_dn = np.clip((s - (1.0 - b)) / w, 0.0, 1.0)
    g = np.where((s >= 0.5 + b) & (s <= 1.0 - b), 1.0, 0.0)
    g = np.where(up, t_up * t_up * (3.0 - 2.0 * t_up), g)
    g = np.where(dn, 1.0 - t_dn * t_dn * (3.0 - 2.0 * t_dn), g)
    gp = np.where(up, 6.0 * t_up * (1.0 - t_up) / w, 0.0)
    gp = np.where(dn, -6.0 * t_dn * (1.0 - t_dn) / w, gp)
    return g, gp, up | dn


def annulus_apply(pts, ax, ay, eps, b, w, coef):
    px = pts[:, 0] - ax
    py = pts[:, 1] - ay
    r = np.hypot(px, py)
    g, _, _ = _annulus_profile(r / eps, b, w)
    _rotate(pts, px, py, ax, ay, coef * g)


def annulus_apply_tan(pts, vec, logn, ax, ay, eps, b, w, coef, touched):
    px = pts[:, 0] - ax
    py = pts[:, 1] - ay
    r2 = px * px + py * py
    r = np.sqrt(r2)
    g, gp, ramp = _annulus_profile(r / eps, b, w)
    theta = coef * g
    tpr = np.where(r2 > 0.0, coef * gp / (eps * r), 0.0)  # theta'(r)/r
    if touched is not None:
        touched |= ramp.astype(np.uint8)
    _shear_tangent(vec, logn, px, py, r2, tpr, theta)
    _rotate(pts, px, py, ax, ay, theta)


def lookup(pts, table):
    """Index of the covering ball containing each point, -1 outside."""
    n = pts.shape[0]
    ix = np.floor((pts[:, 0] - table.x0) * table.inv_h).astype(np.int64)
    iy = np.floor((pts[:, 1] - table.y0) * table.inv_h).astype(np.int64)
    ok = (ix >= 0) & (ix < table.nx) & (iy >= 0) & (iy < table.ny)
    cell = np.where(ok, ix * table.ny + iy, 0)
    cand = table.padded[cell]  # (n, maxc)
    cand = np.where(ok[:, None], cand, -1)
    safe = np.maximum(cand, 0)
    dx = pts[:, 0:1] - table.cx[safe]
    dy = pts[:, 1:2] - table.cy[safe]
    inside = (cand >= 0) & (dx * dx + dy * dy < table.r[safe] ** 2)
    out = np.where(inside, cand, -1)
    return out.max(axis=1).astype(np.int32) if out.shape[1] else np.full(n, -1, np.int32)


def balls_apply(pts, table, coefs, w, idx_out=None):
    idx = lookup(pts, table)
    if idx_out is not None:
        idx_out[:] = idx
    hit = idx >= 0
    if not np.any(hit):
        return
    i = idx[hit]
    cx = table.cx[i]
    cy = table.cy[i]
    R = table.r[i]
    px = pts[hit, 0] - cx
    py = pts[hit, 1] - cy
    s = np.hypot(px, py) / R
    t = np.clip((s - (1.0 - w)) / w, 0.0, 1.0)
    g = np.where(s <= 1.0 - w, 1.0, 1.0 - t * t * (3.0 - 2.0 * t))
    theta = coefs[i] * g
    c = np.cos(theta)
    sn = np.sin(theta)
    pts[hit, 0] = cx + c * px - sn * py
    pts[hit, 1] = cy + sn * px + c * py


def balls_apply_tan(pts, vec, logn, table, coefs, w, touched):
    idx = lookup(pts, table)
    hit = idx >= 0
    if not np.any(hit):
        return
    i = idx[hit]
    cx = table.cx[i]
    cy = table.cy[i]
    R = table.r[i]
    px = pts[hit, 0] - cx
    py = pts[hit, 1] - cy
    r2 = px * px + py * py
    r = np.sqrt(r2)
    s = r / R
    on_ramp = s > 1.0 - w
    t = np.clip((s - (1.0 - w)) / w, 0.0, 1.0)
    g = np.where(on_ramp, 1.0 - t * t * (3.0 - 2.0 * t), 1.0)
    gp = np.where(on_ramp, -6.0 * t * (1.0 - t) / (w * R), 0.0)
    theta = coefs[i] * g
    tpr = np.where(r2 > 0.0, coefs[i] * gp / np.maximum(r, 1e-300), 0.0)  # theta'(r)/r
    if touched is not None:
        sub = touched[hit]
        sub |= on_ramp.astype(np.uint8)
        touched[hit] = sub
    q = tpr * (px * vec[hit, 0] + py * vec[hit, 1])
    wx = vec[hit, 0] - q * py
    wy = vec[hit, 1] + q * px
    nm2 = wx * wx + wy * wy
    logn[hit] += 0.5 * np.log(nm2)
    inv = 1.0 / np.sqrt(nm2)
    c = np.cos(theta)
    sn = np.sin(theta)
    vec[hit, 0] = (c * wx - sn * wy) * inv
    vec[hit, 1] = (sn * wx + c * wy) * inv
    pts[hit, 0] = cx + c * px - sn * py
    pts[hit, 1] = cy + sn * px + c * py


def bad_bands(pts, ax, ay, eps, band, table):
    """Membership in the bookkeeping bad set (band fraction ``band``).

    Outer annulus band (1-band, 1), inner band (1/2, 1/2+band), and the
    per-ball shells (1-band, 1) in each ball's own scaled radius.
    """
    s = np.hypot(pts[:, 0] - ax, pts[:, 1] - ay) / eps
    bad = ((s > 1.0 - band) & (s < 1.0)) | ((s > 0.5) & (s < 0.5 + band))
    idx = lookup(pts, table)
    hit = idx >= 0
    if np.any(hit):
        i = idx[hit]
        d = np.hypot(pts[hit, 0] - table.cx[i], pts[hit, 1] - table.cy[i])
        bad[hit] |= d > (1.0 - band) * table.r[i]
    return bad.astype(np.uint8)
