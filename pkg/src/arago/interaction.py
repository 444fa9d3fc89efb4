"""Casimir-Polder interaction models for sphere and disc obstacles.

A fast particle passing the obstacle at radial distance r = s R accumulates
the eikonal phase phi(s) = -integral V dz / (hbar v_z) along its straight
line of flight. For a thin disc the wall potential -C4/(r-R)^4 acts during
the transit time b/v_z and phi has a closed form; for a sphere the potential
of the tangential plane, -C4/(sqrt(x^2+y^2+z^2)-R)^4 around the sphere
center, is integrated over the full line numerically. The same phi(s) feeds
the quantum pattern (phase factor e^{i phi}) and the classical counter-model
(momentum kick hbar dphi/dr), which is the point of sharing it as one object.

Phases are tabulated once per obstacle/particle/velocity triple on a grid
logarithmic in (s-1) and interpolated as a cubic spline in log-log space; a
power-law continuation handles the far tail below the phase floor. For the
disc's exact power law the spline representation is exact to rounding.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .constants_units import CONST
from .farfield import cutoff_distance
from .numerics import DEFAULT_SPEC, NumericsError, bisect, integrate_adaptive


@dataclass(frozen=True)
class Obstacle:
    """Sphere of radius R, or disc of radius R and thickness b (m)."""

    kind: str
    R: float
    b: float = None

    def __post_init__(self):
        if self.kind not in ("sphere", "disc"):
            raise ValueError(f"obstacle kind must be sphere or disc, "
                             f"got {self.kind!r}")
        if not self.R > 0:
            raise ValueError("R must be positive")
        if self.kind == "disc" and not (self.b is not None and self.b > 0):
            raise ValueError("disc obstacle requires a positive thickness b")


def disc_phase(C4, b, v_z, R, s):
    """Eikonal phase of a disc edge: C4 b / (hbar v_z R^4 (s-1)^4)."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 1.0):
        raise ValueError("phase is defined outside the obstacle only (s > 1)")
    out = C4 * b / (CONST.hbar * v_z * R ** 4 * (s - 1.0) ** 4)
    return float(out) if out.ndim == 0 else out


_SPHERE_X_FAR = 1e6  # truncation radius (units of R) of the line integral


def sphere_phase(C4, v_z, R, s, quad=None):
    """Eikonal phase of a sphere along a straight line at distance s R.

    (C4 / (hbar v_z R^3)) * 2 s * int_0^T cosh(t) / (s cosh(t) - 1)^4 dt
    after substituting z = s R sinh(t); the upper limit T corresponds to a
    radial distance of 1e6 R, beyond which the neglected tail is below
    ~1e-12 of the result (integrand ~ (8/s^3) e^{-3t} out there).
    """
    if not float(s) > 1.0:
        raise ValueError("phase is defined outside the obstacle only (s > 1)")
    s = float(s)
    spec = quad or DEFAULT_SPEC
    T = math.acosh(_SPHERE_X_FAR / s)

    def integrand(t):
        ch = np.cosh(t)
        return ch / (s * ch - 1.0) ** 4

    res = integrate_adaptive(integrand, 0.0, T, spec,
                             points=(1e-3, 1e-2, 0.1, 1.0))
    res.require_converged("sphere phase integral")
    pref = C4 / (CONST.hbar * v_z * R ** 3)
    return pref * 2.0 * s * float(np.real(res.value))


class EikonalPhase:
    """Tabulated interaction phase phi(s) for one obstacle/particle/velocity.

    Exposes phi(s) and dphi_ds(s) for s > 1, with power-law continuation
    outside the tabulated window [1 + s1_min, s_negligible]. s_negligible is
    where phi falls below phase_floor; integrals against (e^{i phi} - 1)
    truncate there with an error bounded by phase_floor times the remaining
    envelope.
    """

    def __init__(self, obstacle, particle, v_z, quad=None,
                 phase_floor=1e-4, n_table=400, s1_min=1e-3):
        if phase_floor <= 0:
            raise ValueError("phase_floor must be positive")
        self.obstacle = obstacle
        self.particle = particle
        self.v_z = v_z
        self.phase_floor = phase_floor
        C4 = particle.C4
        if C4 <= 0:
            raise ValueError("EikonalPhase needs an attractive interaction; "
                             "use phase=None for the ideal case")
        R = obstacle.R

        if obstacle.kind == "disc":
            pref = C4 * obstacle.b / (CONST.hbar * v_z * R ** 4)
            self.s_negligible = 1.0 + (pref / phase_floor) ** 0.25
            raw = lambda s: disc_phase(C4, obstacle.b, v_z, R, s)
        else:
            raw = lambda s: sphere_phase(C4, v_z, R, s, quad)
            # far tail ~ pref * pi/(2 s^3); bracket the floor crossing there
            pref = C4 / (CONST.hbar * v_z * R ** 3)
            hi = max(4.0, (pref * math.pi / (2 * phase_floor)) ** (1 / 3.0) * 2)
            while raw(hi) > phase_floor:
                hi *= 2.0
                if hi > 1e5:
                    raise NumericsError("phase never falls below the floor")
            self.s_negligible = bisect(
                lambda s: raw(s) - phase_floor, 1.0 + s1_min, hi, 1e-6)

        if self.s_negligible <= 1.0 + s1_min:
            raise ValueError("interaction too weak to tabulate: phase floor "
                             "reached inside the near-wall grid")
        x = np.linspace(math.log(s1_min), math.log(self.s_negligible - 1.0),
                        n_table)
        phi_vals = np.array([raw(1.0 + math.exp(xi)) for xi in x])
        if not (np.all(phi_vals > 0) and np.all(np.diff(phi_vals) < 0)):
            raise NumericsError("phase table must be positive and strictly "
                                "decreasing in s")
        self._spline = CubicSpline(x, np.log(phi_vals))
        self._dspline = self._spline.derivative()
        self._x_lo, self._x_hi = x[0], x[-1]
        self._slope_lo = float(self._dspline(self._x_lo))
        self._slope_hi = float(self._dspline(self._x_hi))

    def phi(self, s):
        """Phase in radians, vectorized over s (> 1 required)."""
        s = np.asarray(s, dtype=float)
        if np.any(s <= 1.0):
            raise ValueError("phi(s) requires s > 1")
        x = np.log(s - 1.0)
        x_in = np.clip(x, self._x_lo, self._x_hi)
        logphi = self._spline(x_in)
        # power-law continuation beyond the table on both sides
        logphi = logphi + np.where(x > self._x_hi,
                                   self._slope_hi * (x - self._x_hi), 0.0)
        logphi = logphi + np.where(x < self._x_lo,
                                   self._slope_lo * (x - self._x_lo), 0.0)
        out = np.exp(logphi)
        return float(out) if out.ndim == 0 else out

    def dphi_ds(self, s):
        """Derivative dphi/ds (negative), from the spline representation."""
        s = np.asarray(s, dtype=float)
        if np.any(s <= 1.0):
            raise ValueError("dphi_ds(s) requires s > 1")
        x = np.log(s - 1.0)
        slope = np.where(x > self._x_hi, self._slope_hi,
                         np.where(x < self._x_lo, self._slope_lo,
                                  self._dspline(np.clip(x, self._x_lo,
                                                        self._x_hi))))
        out = self.phi(s) * slope / (s - 1.0)
        return float(out) if out.ndim == 0 else out


def classical_kick(phase, s, from_table=False):
    """Radial momentum kick q = hbar dphi/dr (kg m/s, negative = inward).

    Uses the closed-form derivative for a disc unless from_table forces the
    tabulated route; spheres always use the table.
    """
    obst = phase.obstacle
    if obst.kind == "disc" and not from_table:
        C4 = phase.particle.C4
        s_arr = np.asarray(s, dtype=float)
        if np.any(s_arr <= 1.0):
            raise ValueError("kick requires s > 1")
        out = -4.0 * C4 * obst.b / (phase.v_z * obst.R ** 5
                                    * (s_arr - 1.0) ** 5)
        return float(out) if out.ndim == 0 else out
    return CONST.hbar / obst.R * phase.dphi_ds(s)


def capture_eta(obstacle, particle, v_z, roughness=0.5e-9):
    """Fractional effective enlargement: particles inside (1+eta) R are lost.

    Sphere: shoot classical trajectories (planar, incident parallel to z at
    impact parameter rho) through the attractive potential and bisect the
    boundary between wall-hitting and escaping; approaches within the surface
    roughness scale count as captured. Disc: the transit-time capture cutoff
    of the wall formula with the disc thickness, eta = x_c / R.
    """
    if not v_z > 0:
        raise ValueError("v_z must be positive")
    C4 = particle.C4
    if C4 == 0.0:
        return 0.0
    R = obstacle.R
    if obstacle.kind == "disc":
        return cutoff_distance(C4, obstacle.b, particle.mass, v_z) / R

    A = 4.0 * C4 / (particle.mass_kg * v_z ** 2 * R ** 4)
    delta = roughness / R

    def rhs(t, y):
        x, z, vx, vz = y
        r = math.hypot(x, z)
        f = -A / (r - 1.0) ** 5 / r
        return (vx, vz, f * x, f * z)

    def hit(t, y):
        return math.hypot(y[0], y[1]) - (1.0 + delta)
    hit.terminal = True
    hit.direction = -1

    def escaped(t, y):
        return y[1] - 20.0
    escaped.terminal = True
    escaped.direction = 1

    def outcome(b_imp):
        sol = solve_ivp(rhs, (0.0, 200.0), (b_imp, -20.0, 0.0, 1.0),
                        events=(hit, escaped), rtol=1e-10, atol=1e-12)
        if not sol.success:
            raise NumericsError(f"trajectory integration failed: {sol.message}")
        if sol.t_events[1].size:
            return 1.0
        # wall contact, or still orbiting at the time cap: both count captured
        return -1.0

    lo = 1.0 + 2.0 * delta
    while outcome(lo) > 0:
        # fast passage: even a ray skimming the wall escapes, so the
        # capture boundary sits between the wall and lo. Close in on it.
        gap = lo - (1.0 + delta)
        if gap < 1e-3 * delta:
            return lo - 1.0
        lo = 1.0 + delta + 0.25 * gap
    hi = 1.2
    while outcome(hi) < 0:
        hi *= 1.3
        if hi > 10.0:
            raise NumericsError("no escaping trajectory found out to 10 R")
    b_crit = bisect(outcome, lo, hi, 1e-6)
    return b_crit - 1.0
