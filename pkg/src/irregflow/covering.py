"""Disjoint-ball covering of the reference annulus and the region bookkeeping.

The layout is built once in scale-free units (anchor at the origin, reference
radius 1): concentric base rings plus a deterministic greedy pass that adds
balls wherever some circle ``|x| = R`` is under-covered by the *rigid* parts
of the balls.  Rigid radii are shrunk by the ramp width at the coarsest
supported scale (eps = 2^-3), so one layout validates at every finer eps.
"""
from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .params import Params

TWO_PI = 2.0 * math.pi

DESIGN_EPS = 2.0 ** -3        # coarsest scale the layout is designed for
RADIUS_CAP_FRACTION = 0.495   # radii capped at ~eta/2 so one mixing step moves <= eta*eps
COVERAGE_TARGET_FRACTION = 0.5   # greedy aims for uncovered <= (1 - this) * eta per circle
GAP_REL = 1e-6                # relative disjointness gap
R_FLOOR = 0.006               # smallest greedy ball (scale-free units)


class InfeasibleCovering(RuntimeError):
    pass


# ----------------------------------------------------------------------
# layout construction (scale-free)
# ----------------------------------------------------------------------

def _paint_ball(cov, row_unc, d_grid, cd, phi, r_eff):
    """Mark raster cells covered by the disc (cd, phi, r_eff); update row counts."""
    n_theta = cov.shape[1]
    lo = np.searchsorted(d_grid, cd - r_eff, side="right")
    hi = np.searchsorted(d_grid, cd + r_eff, side="left")
    for i in range(lo, hi):
        d = d_grid[i]
        cospsi = (d * d + cd * cd - r_eff * r_eff) / (2.0 * d * cd)
        if cospsi >= 1.0:
            continue
        psi = math.acos(max(-1.0, cospsi))
        a = int(math.floor((phi - psi) / TWO_PI * n_theta))
        b = int(math.ceil((phi + psi) / TWO_PI * n_theta))
        if b - a >= n_theta:
            row_unc[i] = 0
            cov[i, :] = True
            continue
        a %= n_theta
        b %= n_theta
        if a <= b:
            seg = cov[i, a:b]
            row_unc[i] -= int(seg.size - np.count_nonzero(seg))
            seg[:] = True
        else:
            seg = cov[i, a:]
            row_unc[i] -= int(seg.size - np.count_nonzero(seg))
            seg[:] = True
            seg = cov[i, :b]
            row_unc[i] -= int(seg.size - np.count_nonzero(seg))
            seg[:] = True


def _longest_gap(row):
    """(start_index, length) of the longest circular run of False."""
    n = row.size
    if row.all():
        return 0, 0
    if not row.any():
        return 0, n
    ext = np.concatenate([row, row])
    idx = np.flatnonzero(~ext)
    # break indices into runs
    starts = idx[np.concatenate([[True], np.diff(idx) > 1])]
    ends = idx[np.concatenate([np.diff(idx) > 1, [True]])]
    lengths = ends - starts + 1
    j = int(np.argmax(np.where(starts < n, lengths, 0)))
    return int(starts[j] % n), int(min(lengths[j], n))


def _clearance(cx, cy, cr, x, y):
    if cx.size == 0:
        return np.inf
    return float(np.min(np.hypot(cx - x, cy - y) - cr))


@functools.lru_cache(maxsize=8)
def covering_layout(eta: float, order: int, beta: float, ramp_fraction: float):
    """Scale-free centers and radii; deterministic in its arguments.

    Base structure: one tau-symmetric guard ring hugging the inner circle
    (the only balls allowed to meet it, so property iv is a ring property)
    plus a Cartesian hex lattice over the annulus body.  The lattice rows cut
    the circles at all angles, so no circle aligns with the shrink bands; a
    greedy pass then fills residual throats row by row.
    """
    shrink = ramp_fraction * DESIGN_EPS ** beta
    r_cap = RADIUS_CAP_FRACTION * eta
    tau = TWO_PI / order

    # tau-symmetric guard ring of small near-kissing balls hugging the inner
    # circle; only these balls dip below it, so property iv is a ring property.
    # Small guard balls leave a thin shadow that the graded lattice can close.
    ring0 = 0.5
    m0 = order
    for _ in range(8):
        while 2.0 * ring0 * math.sin(math.pi / m0) > r_cap:
            m0 += order
        rg = 0.999 * ring0 * math.sin(math.pi / m0)
        ring0 = 0.5 + 0.35 * rg
    cxs, cys, crs = [], [], []
    for i in range(m0):
        a = TWO_PI * i / m0
        cxs.append(ring0 * math.cos(a))
        cys.append(ring0 * math.sin(a))
        crs.append(rg)

    # hex lattice clipped to the annulus body; lattice balls never dip below
    # the inner circle and keep clear of the guard ring
    r0 = r_cap
    pitch = 2.0 * r0 * (1.0 + GAP_REL)
    rowh = math.sqrt(3.0) * r0 * (1.0 + GAP_REL)
    nrow = int(math.ceil(2.4 / rowh))
    ncol = int(math.ceil(2.4 / pitch))
    guard_x = np.array(cxs)
    guard_y = np.array(cys)
    for j in range(-nrow, nrow + 1):
        y = j * rowh + 0.137 * r0
        for i in range(-ncol, ncol + 1):
            x = (i + 0.5 * (j & 1)) * pitch + 0.261 * r0
            d = math.hypot(x, y)
            if d > 1.0:
                continue
            # shrink boundary balls to stay clear of the inner circle and the
            # guard ring instead of dropping them (no moat of dead space)
            r_i = min(
                r0,
                (d - 0.5) * (1.0 - 1e-9),
                (float(np.min(np.hypot(guard_x - x, guard_y - y))) - rg) * (1.0 - GAP_REL),
            )
            if r_i < 2.0 * R_FLOOR:
                continue
            cxs.append(x)
            cys.append(y)
            crs.append(r_i)

    # raster of shrunk coverage
    nd, nt = 640, 2560
    d_grid = np.linspace(0.5 + 1e-4, 1.0 - 1e-4, nd)
    cov = np.zeros((nd, nt), dtype=bool)
    row_unc = np.full(nd, nt, dtype=np.int64)
    cx = np.array(cxs)
    cy = np.array(cys)
    cr = np.array(crs)
    for x, y, r in zip(cx, cy, cr):
        _paint_ball(cov, row_unc, d_grid, math.hypot(x, y), math.atan2(y, x), r * (1.0 - shrink))

    target_unc = int((1.0 - COVERAGE_TARGET_FRACTION) * eta * nt)  # uncovered <= eta/2 per circle
    hopeless = np.zeros(nd, dtype=bool)
    for _ in range(20000):
        active = np.where(~hopeless, row_unc, -1)
        worst = int(np.argmax(active))
        if active[worst] <= target_unc:
            break
        d = d_grid[worst]
        unc_idx = np.flatnonzero(~cov[worst])
        step = max(1, unc_idx.size // 96)
        phis = TWO_PI * (unc_idx[::step] + 0.5) / nt
        xs = d * np.cos(phis)
        ys = d * np.sin(phis)
        clear = np.min(
            np.hypot(xs[:, None] - cx[None, :], ys[:, None] - cy[None, :]) - cr[None, :],
            axis=1)
        jbest = int(np.argmax(clear))
        r_new = min(r_cap, float(clear[jbest]) * (1.0 - GAP_REL))
        if r_new < R_FLOOR:
            hopeless[worst] = True
            continue
        x, y, phi = float(xs[jbest]), float(ys[jbest]), float(phis[jbest])
        orbit = [(x, y)]
        if d - r_new < 0.5:
            # meets the inner disc: place the whole tau-orbit (or shrink clear of it)
            angles = phi + tau * np.arange(order)
            ox = d * np.cos(angles)
            oy = d * np.sin(angles)
            r_orb = min(
                r_cap,
                float(np.min(np.hypot(ox[:, None] - cx[None, :],
                                      oy[:, None] - cy[None, :]) - cr[None, :]))
                * (1.0 - GAP_REL),
                d * math.sin(0.5 * tau) * (1.0 - GAP_REL),
            )
            r_nodip = (d - 0.5) * (1.0 - 1e-9)
            if r_orb >= R_FLOOR and d - r_orb < 0.5:
                orbit = list(zip(ox, oy))
                r_new = r_orb
            elif max(r_orb, r_nodip) >= R_FLOOR:
                r_new = max(min(r_new, r_nodip), r_orb if d - r_orb >= 0.5 else 0.0)
                if r_new < R_FLOOR:
                    hopeless[worst] = True
                    continue
            else:
                hopeless[worst] = True
                continue
        for xo, yo in orbit:
            cx = np.append(cx, xo)
            cy = np.append(cy, yo)
            cr = np.append(cr, r_new)
            _paint_ball(cov, row_unc, d_grid,
                        math.hypot(xo, yo), math.atan2(yo, xo), r_new * (1.0 - shrink))

    worst_fraction = float(np.max(row_unc)) / nt
    centers = np.stack([cx, cy], axis=1)
    return centers, cr, worst_fraction


# ----------------------------------------------------------------------
# public spec
# ----------------------------------------------------------------------

@dataclass
class CoveringSpec:
    centers: np.ndarray      # scale-free, relative to the anchor in units of eps
    radii: np.ndarray        # scale-free fractions r_i < eta
    eta: float
    tau: float
    eps: float
    anchor: tuple
    design_uncovered: float = 0.0
    _table: object = field(default=None, repr=False, compare=False)

    @property
    def count(self) -> int:
        return int(self.radii.shape[0])

    def absolute_centers(self) -> np.ndarray:
        return np.asarray(self.anchor) + self.eps * self.centers

    def absolute_radii(self) -> np.ndarray:
        return self.eps * self.radii

    def table(self):
        if self._table is None:
            self._table = _core.build_table(self.absolute_centers(), self.absolute_radii())
        return self._table


def make_covering(params: Params, anchor) -> CoveringSpec:
    """Disjoint balls satisfying the covering properties at ``params.eps``."""
    if params.eta >= 0.5:
        raise InfeasibleCovering("eta must be < 1/2 for the ring construction")
    centers, radii, worst = covering_layout(
        params.eta, params.rotation_order, params.beta, params.ramp_fraction)
    if worst > 0.9 * params.eta:
        raise InfeasibleCovering(
            f"construction stalled at uncovered circle fraction {worst:.3f} (eta={params.eta})")
    return CoveringSpec(
        centers=centers, radii=radii, eta=params.eta, tau=params.tau,
        eps=params.eps, anchor=tuple(anchor), design_uncovered=worst)


def covering_to_json(spec: CoveringSpec) -> str:
    return json.dumps(
        {
            "centers": spec.centers.tolist(),
            "radii": spec.radii.tolist(),
            "eta": spec.eta,
            "tau": spec.tau,
            "eps": spec.eps,
            "anchor": list(spec.anchor),
        },
        sort_keys=True,
    )


def covering_from_json(text: str) -> CoveringSpec:
    doc = json.loads(text)
    return CoveringSpec(
        centers=np.array(doc["centers"], dtype=float),
        radii=np.array(doc["radii"], dtype=float),
        eta=doc["eta"], tau=doc["tau"], eps=doc["eps"], anchor=tuple(doc["anchor"]),
    )


# ----------------------------------------------------------------------
# validation
# ----------------------------------------------------------------------

def _lens_area(d, r1, r2):
    """Intersection area of discs radius r1, r2 with center distance d."""
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        rm = min(r1, r2)
        return math.pi * rm * rm
    a1 = math.acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
    a2 = math.acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
    return (r1 * r1 * (a1 - math.sin(2 * a1) / 2)
            + r2 * r2 * (a2 - math.sin(2 * a2) / 2))


@dataclass(frozen=True)
class ValidationRow:
    prop: str
    margin: float
    worst: str


@dataclass(frozen=True)
class CoveringReport:
    rows: tuple

    def margin(self, prop: str) -> float:
        return next(r.margin for r in self.rows if r.prop == prop)

    def all_nonnegative(self) -> bool:
        return all(r.margin >= 0.0 for r in self.rows)

    def csv_rows(self):
        return [{"property": r.prop, "margin": r.margin, "worst": r.worst} for r in self.rows]


def validate_covering(spec: CoveringSpec, params: Params,
                      n_radii: int = 1000, n_angles: int = 10000) -> CoveringReport:
    """Sampled margins for the four covering properties (nonnegative = pass)."""
    z = spec.centers
    r = spec.radii
    d = np.hypot(z[:, 0], z[:, 1])
    rows = []

    # i. disjointness (exact, scale-free units)
    dx = z[:, 0][:, None] - z[:, 0][None, :]
    dy = z[:, 1][:, None] - z[:, 1][None, :]
    gap = np.hypot(dx, dy) - (r[:, None] + r[None, :])
    np.fill_diagonal(gap, np.inf)
    i, j = np.unravel_index(np.argmin(gap), gap.shape)
    rows.append(ValidationRow("i_disjoint", float(gap[i, j]) * spec.eps,
                              f"balls {i},{j}"))

    # ii. containment in the eta-fattened annulus band and >= 1/4 annulus overlap
    c_lo = float(np.min(d - r - (0.5 - spec.eta)))
    c_hi = float(np.min((1.0 + spec.eta) - (d + r)))
    fracs = np.array([
        (_lens_area(di, ri, 1.0) - _lens_area(di, ri, 0.5)) / (math.pi * ri * ri)
        for di, ri in zip(d, r)
    ])
    worst_b = int(np.argmin(fracs))
    rows.append(ValidationRow("ii_containment", min(c_lo, c_hi) * spec.eps, "band edges"))
    rows.append(ValidationRow("ii_overlap", float(np.min(fracs) - 0.25), f"ball {worst_b}"))

    # iii. every circle mostly inside the rigid (shrunk) balls
    shrink = params.ramp_width
    rigid = _core.build_table(spec.absolute_centers(), spec.absolute_radii() * (1.0 - shrink))
    radii_grid = np.linspace(0.5 + 1e-6, 1.0 - 1e-6, n_radii) * spec.eps
    ang = (np.arange(n_angles) + 0.5) * (TWO_PI / n_angles)
    ca, sa = np.cos(ang), np.sin(ang)
    worst_unc, worst_R = 0.0, 0.0
    for R in radii_grid:
        pts = np.empty((n_angles, 2))
        pts[:, 0] = spec.anchor[0] + R * ca
        pts[:, 1] = spec.anchor[1] + R * sa
        unc = float(np.mean(_core.lookup(pts, rigid) < 0))
        if unc > worst_unc:
            worst_unc, worst_R = unc, R
    rows.append(ValidationRow("iii_circle_coverage", spec.eta - worst_unc,
                              f"R={worst_R / spec.eps:.4f} eps uncovered={worst_unc:.4f}"))
    # strict arc-length variant (length < eta * R), reported for reference
    rows.append(ValidationRow("iii_strict_length_info",
                              spec.eta - TWO_PI * worst_unc,
                              "paper normalization; negative at desk scales"))

    # iv. the sub-annulus family is closed under rotation by tau
    dip = d - r < 0.5
    mism = 0.0
    if np.any(dip):
        c, s = math.cos(spec.tau), math.sin(spec.tau)
        zx = c * z[dip, 0] - s * z[dip, 1]
        zy = s * z[dip, 0] + c * z[dip, 1]
        dd = np.hypot(zx[:, None] - z[dip, 0][None, :], zy[:, None] - z[dip, 1][None, :])
        mism = float(np.max(np.min(dd, axis=1)))
    rows.append(ValidationRow("iv_tau_symmetry", 1e-9 - mism, f"{int(np.sum(dip))} inner balls"))
    rows.append(ValidationRow("radii_below_eta", float(spec.eta - np.max(r)), "max radius"))
    return CoveringReport(tuple(rows))


# ----------------------------------------------------------------------
# regions
# ----------------------------------------------------------------------

@dataclass
class RegionSet:
    """Invariant set O, bad bands A, and the good region Omega.

    ``band="paper"`` uses the full eps^beta bookkeeping bands; ``band="ramp"``
    the actual smooth-ramp sub-bands (the true obstruction to rigidity).
    """

    params: Params
    covering: CoveringSpec
    anchor: tuple

    def _scaled(self, pts):
        p = np.atleast_2d(np.asarray(pts, dtype=float))
        return p, np.hypot(p[:, 0] - self.anchor[0], p[:, 1] - self.anchor[1]) / self.params.eps

    def in_invariant(self, pts):
        p, s = self._scaled(pts)
        inside = (s >= 0.5) & (s <= 1.0)
        idx = _core.lookup(np.ascontiguousarray(p), self.covering.table())
        return inside | (idx >= 0)

    def in_bad(self, pts, band: str = "paper"):
        p, s = self._scaled(pts)
        p = np.ascontiguousarray(p)
        if band == "paper":
            return _core.bad_bands(
                p, self.anchor[0], self.anchor[1], self.params.eps,
                self.params.band_width, self.covering.table()).astype(bool)
        b = self.params.band_width
        w = self.params.ramp_width
        bad = ((s > 0.5 + b - w) & (s < 0.5 + b)) | ((s > 1.0 - b) & (s < 1.0 - b + w))
        idx = _core.lookup(p, self.covering.table())
        hit = idx >= 0
        if np.any(hit):
            i = idx[hit]
            dd = np.hypot(p[hit, 0] - self.covering.table().cx[i],
                          p[hit, 1] - self.covering.table().cy[i])
            bad[hit] |= dd > (1.0 - w) * self.covering.table().r[i]
        return bad

    def good_mask(self, pts, band: str = "paper"):
        p, s = self._scaled(pts)
        in_ball_ref = s <= 1.0
        return in_ball_ref & self.in_invariant(p) & ~self.in_bad(p, band)


def classify_point(regions: RegionSet, x, band: str = "paper") -> str:
    pt = np.asarray(x, dtype=float)[None, :]
    if bool(regions.in_bad(pt, band)[0]):
        return "bad"
    if bool(regions.good_mask(pt, band)[0]):
        return "good"
    if bool(regions.in_invariant(pt)[0]):
        return "invariant-only"
    return "outside"


def region_measures(regions: RegionSet, n_samples: int, rng) -> dict:
    """Hit-or-miss areas of A (both band widths) and the good fraction of B(a, eps)."""
    eps = regions.params.eps
    a = np.asarray(regions.anchor)
    # bad-set measure over the bounding box of the eta-fattened band
    half = (1.0 + regions.params.eta + 0.05) * eps
    box = rng.uniform(-half, half, size=(n_samples, 2)) + a
    area_box = (2.0 * half) ** 2
    bad_paper = float(np.mean(regions.in_bad(box, "paper"))) * area_box
    bad_ramp = float(np.mean(regions.in_bad(box, "ramp"))) * area_box
    # good fraction of the reference ball
    u = rng.uniform(0.0, 1.0, n_samples)
    phi = rng.uniform(0.0, TWO_PI, n_samples)
    rr = eps * np.sqrt(u)
    disc = np.stack([a[0] + rr * np.cos(phi), a[1] + rr * np.sin(phi)], axis=1)
    good_paper = float(np.mean(regions.good_mask(disc, "paper")))
    good_ramp = float(np.mean(regions.good_mask(disc, "ramp")))
    return {
        "bad_area_paper": bad_paper,
        "bad_area_ramp": bad_ramp,
        "good_fraction_paper": good_paper,
        "good_fraction_ramp": good_ramp,
    }
