"""Radial profiles and the divergence-free rotation field families.

Every field here has the form ``amplitude * multiplier * P(|x-c|) * (x-c)^perp``
for a scalar radial profile ``P``, so it is azimuthal, exactly divergence
free, and its flow rotates each circle ``|x-c| = r`` rigidly by an angle
proportional to ``P(r)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .params import Params

__all__ = [
    "RadialProfile",
    "RotationField",
    "NormReport",
    "ResolutionTooCoarse",
    "stretch_field",
    "ball_field",
    "annulus_field",
    "evaluate_field",
    "divergence_residual",
    "compute_norms",
    "field_to_json",
    "field_from_json",
]

STRETCH_F = "stretch_f"
BALL_G = "ball_g"
ANNULUS_G = "annulus_g"


class ResolutionTooCoarse(ValueError):
    """Radial quadrature does not resolve the profile ramp."""


def _smoothstep(t):
    return t * t * (3.0 - 2.0 * t)


def _smoothstep_d(t):
    return 6.0 * t * (1.0 - t)


@dataclass(frozen=True)
class RadialProfile:
    """Scalar profile of the radius; value on kinks is the left limit.

    ``support_radius`` is the outer support边 in absolute units, ``ramp_width``
    the absolute width of each smooth ramp and ``inner_cut`` the inner plateau
    boundary (``eps/2`` for the stretch profile, inner ramp edge for the
    annulus one).
    """

    kind: str
    plateau_value: float
    support_radius: float
    ramp_width: float
    inner_cut: float
    eps: float
    beta: float = 0.5
    ramp_fraction: float = 1.0

    # -- evaluation ------------------------------------------------------
    def value(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == STRETCH_F:
            xi = r * r
            e2 = self.eps * self.eps
            tp = self.plateau_value / 0.75
            ramp = tp * (1.0 - xi / e2)
            out = np.where(xi <= 0.25 * e2, self.plateau_value, ramp)
            return np.where(xi >= e2, 0.0, out)
        if self.kind == BALL_G:
            s = r / self.support_radius
            w = self.ramp_width / self.support_radius
            t = np.clip((s - (1.0 - w)) / w, 0.0, 1.0)
            return np.where(s >= 1.0, 0.0, 1.0 - _smoothstep(t))
        if self.kind == ANNULUS_G:
            scale = self.support_radius
            s = r / scale
            b = self.eps ** self.beta
            w = self.ramp_fraction * b
            up = _smoothstep(np.clip((s - (0.5 + b - w)) / w, 0.0, 1.0))
            down = 1.0 - _smoothstep(np.clip((s - (1.0 - b)) / w, 0.0, 1.0))
            out = np.where(s <= 0.5 + b, up, down)
            return np.where((s <= 0.5 + b - w) | (s >= 1.0 - b + w), 0.0, out)
        raise ValueError(f"unknown profile kind {self.kind!r}")

    def deriv(self, r):
        """d value / d r (left limit on kinks)."""
        r = np.asarray(r, dtype=float)
        if self.kind == STRETCH_F:
            xi = r * r
            e2 = self.eps * self.eps
            tp = self.plateau_value / 0.75
            on_ramp = (xi > 0.25 * e2) & (xi < e2)
            return np.where(on_ramp, -2.0 * tp * r / e2, 0.0)
        if self.kind == BALL_G:
            s = r / self.support_radius
            w = self.ramp_width / self.support_radius
            on = (s > 1.0 - w) & (s < 1.0)
            t = np.clip((s - (1.0 - w)) / w, 0.0, 1.0)
            return np.where(on, -_smoothstep_d(t) / (w * self.support_radius), 0.0)
        if self.kind == ANNULUS_G:
            scale = self.support_radius
            s = r / scale
            b = self.eps ** self.beta
            w = self.ramp_fraction * b
            t_up = np.clip((s - (0.5 + b - w)) / w, 0.0, 1.0)
            t_dn = np.clip((s - (1.0 - b)) / w, 0.0, 1.0)
            up = (s > 0.5 + b - w) & (s < 0.5 + b)
            dn = (s > 1.0 - b) & (s < 1.0 - b + w)
            out = np.where(up, _smoothstep_d(t_up) / (w * scale), 0.0)
            return np.where(dn, -_smoothstep_d(t_dn) / (w * scale), out)
        raise ValueError(f"unknown profile kind {self.kind!r}")

    def breakpoints(self):
        """Radii bounding the smooth segments, innermost first."""
        if self.kind == STRETCH_F:
            return [0.0, 0.5 * self.eps, self.eps]
        if self.kind == BALL_G:
            return [0.0, self.support_radius - self.ramp_width, self.support_radius]
        scale = self.support_radius
        b = self.eps ** self.beta
        w = self.ramp_fraction * b
        return [
            scale * (0.5 + b - w),
            scale * (0.5 + b),
            scale * (1.0 - b),
            scale * (1.0 - b + w),
        ]

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "plateau_value": self.plateau_value,
            "support_radius": self.support_radius,
            "ramp_width": self.ramp_width,
            "inner_cut": self.inner_cut,
            "eps": self.eps,
            "beta": self.beta,
            "ramp_fraction": self.ramp_fraction,
        }


@dataclass(frozen=True)
class RotationField:
    """Azimuthal field amplitude * multiplier * profile(|x-c|) * (x-c)^perp."""

    center: tuple
    amplitude: float
    profile: RadialProfile
    multiplier: float = 1.0

    @property
    def coef(self) -> float:
        return self.amplitude * self.multiplier

    def angular_speed(self, r):
        return self.coef * self.profile.value(r)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        p = pts - np.asarray(self.center)
        r = np.hypot(p[:, 0], p[:, 1])
        w = self.coef * self.profile.value(r)
        out = np.empty_like(pts)
        out[:, 0] = -w * p[:, 1]
        out[:, 1] = w * p[:, 0]
        return out[0] if single else out

    def sup_radius(self) -> float:
        return self.profile.support_radius


# ----------------------------------------------------------------------
# constructors for the three families
# ----------------------------------------------------------------------

def stretch_field(params: Params, anchor, multiplier: float = 1.0) -> RotationField:
    """u^s scaled by a +/-1 (or test) multiplier."""
    prof = RadialProfile(
        kind=STRETCH_F,
        plateau_value=0.75 * params.tau_prime,
        support_radius=params.eps,
        ramp_width=0.5 * params.eps,
        inner_cut=0.5 * params.eps,
        eps=params.eps,
        beta=params.beta,
    )
    return RotationField(tuple(anchor), params.amplitude, prof, multiplier)


def ball_field(params: Params, center, radius_fraction: float, multiplier: float = 1.0) -> RotationField:
    """Rigid rotation inside B(center, r*eps) with a thin outer ramp."""
    scale = radius_fraction * params.eps
    w = params.ramp_width  # fraction of scale
    prof = RadialProfile(
        kind=BALL_G,
        plateau_value=1.0,
        support_radius=scale,
        ramp_width=w * scale,
        inner_cut=(1.0 - w) * scale,
        eps=params.eps,
        beta=params.beta,
        ramp_fraction=params.ramp_fraction,
    )
    return RotationField(tuple(center), params.amplitude, prof, multiplier)


def annulus_field(params: Params, anchor, multiplier: float = 1.0) -> RotationField:
    """Rigid rotation of the annulus eps/2 <= |x-a| <= eps, ramped inside the bands."""
    scale = params.eps
    b = params.band_width
    w = params.ramp_width
    prof = RadialProfile(
        kind=ANNULUS_G,
        plateau_value=1.0,
        support_radius=scale,
        ramp_width=w * scale,
        inner_cut=(0.5 + b) * scale,
        eps=params.eps,
        beta=params.beta,
        ramp_fraction=params.ramp_fraction,
    )
    return RotationField(tuple(anchor), params.amplitude, prof, multiplier)


# ----------------------------------------------------------------------
# pointwise operations
# ----------------------------------------------------------------------

def evaluate_field(field: RotationField, x):
    return field.evaluate(x)


def divergence_residual(field: RotationField, x, h: float):
    """Central-difference estimate of div u at x (exact value is 0)."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    ex = np.array([h, 0.0])
    ey = np.array([0.0, h])
    du1 = field.evaluate(pts + ex)[:, 0] - field.evaluate(pts - ex)[:, 0]
    du2 = field.evaluate(pts + ey)[:, 1] - field.evaluate(pts - ey)[:, 1]
    res = (du1 + du2) / (2.0 * h)
    return float(res[0]) if single else res


# ----------------------------------------------------------------------
# norms
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class NormReport:
    h1_squared: float
    linf: float
    quadrature_cells: int
    tolerance: float

    def csv_row(self, params: Params) -> dict:
        return {
            "eps": params.eps,
            "alpha": params.alpha,
            "beta": params.beta,
            "h1_squared": self.h1_squared,
            "linf": self.linf,
            "resolution": self.quadrature_cells,
        }


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _segment_integral(fun, a, b, cells):
    if b <= a:
        return 0.0
    edges = np.linspace(a, b, cells + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    r = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return float(np.sum(fun(r) * w))


def _spatial_h1_sq(field: RotationField, cells: int) -> float:
    """2*pi * int (v^2 + v'^2 + (v/r)^2) r dr with v = coef * P(r) * r."""
    prof = field.profile
    A = field.coef

    def density(r):
        P = prof.value(r)
        dP = prof.deriv(r)
        v = A * P * r
        vp = A * (P + r * dP)
        vr = A * P
        return (v * v + vp * vp + vr * vr) * r

    pts = [0.0] + list(prof.breakpoints())
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        total += _segment_integral(density, a, b, cells)
    return 2.0 * math.pi * total


def _spatial_linf(field: RotationField, n: int = 4096) -> float:
    prof = field.profile
    pts = [0.0] + list(prof.breakpoints())
    best = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b <= a:
            continue
        r = np.linspace(a, b, n)
        best = max(best, float(np.max(np.abs(field.coef * prof.value(r) * r))))
    return best


def compute_norms(field, t0: float, t1: float, resolution: int = 16) -> NormReport:
    """Time-integrated squared L^2_t H^1_x norm and sup norm.

    ``field`` is a single RotationField (held over [t0, t1]) or any object
    exposing ``piecewise_fields(t0, t1)`` yielding ``(duration, [fields])``
    with pairwise-disjoint supports inside each piece.
    """
    if t1 <= t0:
        raise ValueError("t1 > t0 violated")
    if resolution < 8:
        raise ResolutionTooCoarse("ramp must be resolved by >= 8 radial cells")
    pieces = (
        field.piecewise_fields(t0, t1)
        if hasattr(field, "piecewise_fields")
        else [(t1 - t0, [field])]
    )
    h1 = 0.0
    linf = 0.0
    for duration, flds in pieces:
        for f in flds:
            h1 += duration * _spatial_h1_sq(f, resolution)
            linf = max(linf, _spatial_linf(f))
    # refinement check with doubled radial cells
    h1_fine = 0.0
    for duration, flds in pieces:
        for f in flds:
            h1_fine += duration * _spatial_h1_sq(f, 2 * resolution)
    return NormReport(
        h1_squared=h1_fine,
        linf=linf,
        quadrature_cells=resolution,
        tolerance=abs(h1_fine - h1),
    )


# ----------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------

def field_to_json(field: RotationField) -> str:
    doc = {
        "center": list(field.center),
        "amplitude": field.amplitude,
        "multiplier": field.multiplier,
        "profile": field.profile.as_dict(),
    }
    return json.dumps(doc, sort_keys=True)


def field_from_json(text: str) -> RotationField:
    doc = json.loads(text)
    prof = RadialProfile(**doc["profile"])
    return RotationField(tuple(doc["center"]), doc["amplitude"], prof, doc["multiplier"])
