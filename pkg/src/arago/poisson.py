"""Near-field Poisson spot engine.

The on-screen intensity behind a circular obstacle, in scaled coordinates
u = r_screen / R, is w_p(u) = |psi(u)|^2 with the radially symmetric Fresnel
amplitude

    psi(u) = int_1^inf ds 2 pi k l s exp(i pi k l s^2 + i phi(s)) J0(2 pi k u s)

where k = R^2/(L2 lambda) (Fresnel parameter), l = (L1+L2)/L1, and phi the
eikonal interaction phase. The semi-infinite oscillatory integral is never
brute-forced. It is evaluated by a Babinet-style decomposition:

    psi(u) = i exp(-i pi k u^2 / l)          (free propagation, closed form)
             - int_0^{1+eta} [bare integrand] ds        (finite, smooth)
             + int_{1+eta}^{s_neg} [bare] (e^{i phi} - 1) ds   (finite)

using the exact result for the phase-free integral extended to zero lower
bound. The capture parameter eta removes adsorbed particles by starting the
obstacle integrals at s = 1 + eta; the last integral truncates where phi
falls below the phase floor, with a truncation error bounded by the floor.

Finite sources average |psi|^2 over the projected source disc (radius
beta = (L2/L1)(R0/R) in u units); velocity spreads average over deterministic
velocity nodes with the interaction phase rebuilt per node.
"""

import hashlib
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .farfield import ConstraintReport
from .interaction import capture_eta as _capture_eta
from .numerics import (DEFAULT_SPEC, NumericsError, bessel_j0, bisect,
                       integrate_adaptive)
from .particles import velocity_nodes


@dataclass(frozen=True)
class DimensionlessParams:
    """The three numbers that fully determine a scaled diffraction pattern."""

    k: float      # Fresnel parameter R^2/(L2 lambda)
    ell: float    # (L1 + L2)/L1
    beta: float   # projected source radius (L2/L1)(R0/R)

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("k must be positive")
        if not self.ell > 1:
            raise ValueError("ell must exceed 1")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")


@dataclass(frozen=True)
class PoissonSetup:
    """Source, obstacle and screen geometry for a near-field run."""

    R0: float        # source pinhole radius, m (0 = point source)
    R: float         # obstacle radius, m
    L1: float        # source to obstacle, m
    L2: float        # obstacle to screen, m
    obstacle: object
    particle: object

    def __post_init__(self):
        if self.R0 < 0:
            raise ValueError("R0 must be non-negative")
        for name in ("R", "L1", "L2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if abs(self.obstacle.R - self.R) > 1e-12 * self.R:
            raise ValueError("obstacle radius must match setup R")
        shadow_bound = self.R * (self.L1 + self.L2) / self.L2
        if not self.R0 < shadow_bound:
            raise ValueError(
                f"R0 = {self.R0:.3e} m leaves no geometric shadow; need "
                f"R0 < R (L1+L2)/L2 = {shadow_bound:.3e} m")
        worst = max(self.R0, self.R) / min(self.L1, self.L2)
        if worst > 0.01:
            warnings.warn(
                f"paraxial approximation strained: transverse/longitudinal "
                f"ratio {worst:.3g} exceeds 0.01", stacklevel=2)

    def dimensionless(self, v=None):
        lam = self.particle.wavelength(v)
        return DimensionlessParams(
            k=self.R ** 2 / (self.L2 * lam),
            ell=(self.L1 + self.L2) / self.L1,
            beta=(self.L2 / self.L1) * (self.R0 / self.R))


@dataclass
class RadialProfile:
    """Radial intensity record: w(u) normalized to the obstacle-free screen."""

    u: np.ndarray
    w: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.w = np.asarray(self.w, dtype=float)
        if self.u.shape != self.w.shape or self.u.ndim != 1:
            raise ValueError("u and w must be matching 1-D arrays")
        if np.any(np.diff(self.u) <= 0):
            raise ValueError("u grid must be strictly increasing")
        if np.any(self.w < 0):
            raise ValueError("intensities must be non-negative")

    def value_at(self, u0):
        """Linear interpolation of w at u0 (convenience for diagnostics)."""
        return float(np.interp(u0, self.u, self.w))


def default_grid(params, n=600, u_max=None):
    """The standard screen grid: n points uniform on [0, 3 ell]."""
    top = 3.0 * params.ell if u_max is None else u_max
    return np.linspace(0.0, top, n)


def _phase_breakpoints(phase, a):
    """Abscissae where phi crosses successive quarter levels, as quad seeds."""
    lo = max(a, 1.0 + 1e-9)
    pts = []
    lvl = phase.phi(lo)
    floor = max(phase.phase_floor * 4.0, 1e-3)
    while lvl > floor:
        lvl /= 4.0
        pts.append(bisect(lambda s: phase.phi(s) - lvl, lo,
                          phase.s_negligible, 1e-10))
    return pts


# Boundary phase (rad) beyond which the interaction integrand oscillates too
# fast for panel quadrature; the wall strip is then handled by _wall_strip.
_PHI_SPLIT = 2000.0


def _wall_strip(u, k, ell, phase, a, b):
    """Endpoint evaluation of the fast-oscillating edge of the interaction
    integral: int_a^b 2*pi*k*ell*s J0(2*pi*k*u*s) exp(i*Psi(s)) ds with
    Psi = pi*k*ell*s^2 + phi(s) and |Psi'| enormous throughout [a, b].

    Integrating twice against d(exp(i*Psi))/(i*Psi') gives a two-term
    series in the endpoint values; each further term is smaller by
    ~|d/ds| / |Psi'|, so the third-order endpoint magnitude serves as the
    error estimate. Returns (value, error) as arrays over u.
    """
    two_pi_k = 2.0 * math.pi * k

    def G(s):
        return (two_pi_k * ell * s) * bessel_j0(two_pi_k * u * s)

    def Psi(s):
        return math.pi * k * ell * s * s + float(phase.phi(s))

    def dPsi(s):
        return 2.0 * math.pi * k * ell * s + float(phase.dphi_ds(s))

    def h0(s):
        return G(s) / (1j * dPsi(s))

    def endpoint(s, sign):
        h = 1e-4 * (s - 1.0)
        h1 = (h0(s + h) - h0(s - h)) / (2.0 * h * 1j * dPsi(s))

        def h1_at(x):
            hx = 1e-4 * (x - 1.0)
            return (h0(x + hx) - h0(x - hx)) / (2.0 * hx * 1j * dPsi(x))

        h2 = (h1_at(s + h) - h1_at(s - h)) / (2.0 * h * abs(dPsi(s)))
        val = sign * (h0(s) - h1) * np.exp(1j * Psi(s))
        return val, np.abs(h2)

    val_b, err_b = endpoint(b, +1.0)
    val_a, err_a = endpoint(a, -1.0)
    return val_a + val_b, 2.0 * (err_a + err_b)


def _amplitude_grid(u_grid, k, ell, phase=None, quad=None, capture=0.0):
    """psi(u) for a whole grid of screen radii in one adaptive pass."""
    spec = quad or DEFAULT_SPEC
    u = np.atleast_1d(np.asarray(u_grid, dtype=float))
    if np.any(u < 0):
        raise ValueError("screen radii must be non-negative")
    if capture < 0:
        raise ValueError("capture parameter must be non-negative")
    a = 1.0 + capture
    two_pi_k = 2.0 * math.pi * k

    def bare(s):
        s = np.asarray(s)
        radial = two_pi_k * ell * s * np.exp(1j * math.pi * k * ell * s * s)
        return radial[:, None] * bessel_j0(two_pi_k * np.outer(s, u))

    free = 1j * np.exp(-1j * math.pi * k * u * u / ell)
    res0 = integrate_adaptive(bare, 0.0, a, spec)
    res0.require_converged("free-edge integral")
    psi = free - res0.value

    if phase is not None:
        if phase.s_negligible <= a:
            raise ValueError("capture radius swallows the tabulated phase; "
                             "nothing left to integrate")

        a_int = a
        strip_err = None
        if phase.phi(a) > _PHI_SPLIT:
            # near the wall the eikonal phase winds through too many cycles
            # for panel quadrature; peel that strip off and evaluate its
            # oscillatory part by the endpoint series instead
            s_split = bisect(lambda s: phase.phi(s) - _PHI_SPLIT, a,
                             phase.s_negligible, 1e-12)
            res_m = integrate_adaptive(lambda s: -bare(s), a, s_split, spec)
            res_m.require_converged("wall-strip shadow integral")
            strip_val, strip_err = _wall_strip(u, k, ell, phase, a, s_split)
            psi = psi + res_m.value + strip_val
            a_int = s_split

        def interacting(s):
            s = np.asarray(s)
            radial = (two_pi_k * ell * s
                      * np.exp(1j * math.pi * k * ell * s * s)
                      * (np.exp(1j * phase.phi(s)) - 1.0))
            return radial[:, None] * bessel_j0(two_pi_k * np.outer(s, u))

        res1 = integrate_adaptive(interacting, a_int, phase.s_negligible,
                                  spec, points=_phase_breakpoints(phase, a_int))
        res1.require_converged("interaction integral")
        psi = psi + res1.value
        if strip_err is not None:
            budget = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(psi))
            if np.any(strip_err > 10.0 * budget):
                raise NumericsError(
                    "wall-strip endpoint series not accurate enough "
                    f"(error ~ {float(np.max(strip_err)):.3e})")

    return psi


def amplitude(u, params, phase=None, quad=None, capture=0.0):
    """Complex diffraction amplitude psi at a single scaled screen radius."""
    return complex(_amplitude_grid([float(u)], params.k, params.ell,
                                   phase, quad, capture)[0])


def point_source_pattern(u_grid, params, phase=None, quad=None, capture=0.0):
    """w_p(u) = |psi(u)|^2 for a point source on axis."""
    psi = _amplitude_grid(u_grid, params.k, params.ell, phase, quad, capture)
    model = "ideal" if phase is None else "quantum"
    return RadialProfile(np.asarray(u_grid, dtype=float), np.abs(psi) ** 2,
                         meta={"model": model, "k": params.k,
                               "ell": params.ell, "capture": capture,
                               "averaging": "none"})


def annular_average(u_grid, beta, radial_fn, n_t=48, n_theta=256):
    """Average a radial function over a disc of radius beta around each u.

    Computes (2/beta^2) int_0^beta t dt <f(sqrt(u^2 + t^2 + 2 u t cos
    theta))>_theta with Gauss-Legendre nodes in t and a midpoint rule in
    theta. Shared by the quantum and classical engines so finite-source
    smearing is bit-identical between the two.
    """
    u = np.asarray(u_grid, dtype=float)
    if beta == 0.0:
        return radial_fn(u)
    x_t, w_t = np.polynomial.legendre.leggauss(n_t)
    t = 0.5 * beta * (x_t + 1.0)
    wt = 0.5 * beta * w_t
    theta = (np.arange(n_theta) + 0.5) * (2.0 * math.pi / n_theta)
    cos_t = np.cos(theta)
    out = np.zeros_like(u)
    for ti, wi in zip(t, wt):
        r = np.sqrt(np.maximum(u[:, None] ** 2 + ti * ti
                               + 2.0 * u[:, None] * ti * cos_t[None, :], 0.0))
        out += wi * ti * radial_fn(r.ravel()).reshape(r.shape).mean(axis=1)
    return out * (2.0 / beta ** 2)


def _auto_capture(setup, phase, v):
    if phase is None:
        return 0.0
    return _capture_eta(setup.obstacle, setup.particle, v)


def source_averaged_pattern(u_grid, setup, phase=None, quad=None,
                            n_samples=48, v=None, capture=None):
    """Pattern averaged over the finite source disc (radius R0).

    The point-source pattern is evaluated once on a working grid extended by
    the projected source radius beta, interpolated, and folded with the
    annular-offset kernel. capture=None computes the adsorption radius from
    the obstacle and particle when an interaction phase is given.
    """
    v_eff = setup.particle.v_long if v is None else v
    p = setup.dimensionless(v_eff)
    if capture is None:
        capture = _auto_capture(setup, phase, v_eff)
    u = np.asarray(u_grid, dtype=float)
    if p.beta == 0.0:
        prof = point_source_pattern(u, p, phase, quad, capture)
        prof.meta["averaging"] = "source(beta=0)"
        return prof

    du = p.ell / 200.0  # the default grid density, 600 points per 3 ell
    top = u.max() + p.beta + 2 * du
    work = np.linspace(0.0, top, max(int(math.ceil(top / du)) + 1, 64))
    wp = point_source_pattern(work, p, phase, quad, capture)
    interp = CubicSpline(wp.u, wp.w)
    w = annular_average(u, p.beta, lambda r: np.maximum(interp(r), 0.0),
                        n_t=n_samples)
    model = "ideal" if phase is None else "quantum"
    return RadialProfile(u, np.maximum(w, 0.0),
                         meta={"model": model, "k": p.k, "ell": p.ell,
                               "beta": p.beta, "capture": capture,
                               "averaging": "source"})


def wavelength_averaged_pattern(u_grid, setup, phase_family=None, quad=None,
                                n_v_samples=9, source_averaging=True):
    """Pattern averaged over the particle's velocity distribution.

    phase_family maps a velocity to the interaction phase at that velocity
    (None for the ideal obstacle); both the Fresnel parameter and the phase
    are rebuilt per velocity node. dv_rel = 0 reduces to the single-velocity
    result.
    """
    u = np.asarray(u_grid, dtype=float)
    vs, weights = velocity_nodes(setup.particle, n_v_samples)
    acc = np.zeros_like(u)
    for v_i, w_i in zip(vs, weights):
        phase_i = phase_family(v_i) if phase_family is not None else None
        if source_averaging:
            prof = source_averaged_pattern(u, setup, phase_i, quad, v=v_i)
        else:
            p_i = setup.dimensionless(v_i)
            cap = _auto_capture(setup, phase_i, v_i)
            prof = point_source_pattern(u, p_i, phase_i, quad, cap)
        acc += w_i * prof.w
    model = "ideal" if phase_family is None else "quantum"
    return RadialProfile(u, acc, meta={
        "model": model, "averaging": "source+velocity" if source_averaging
        else "velocity", "n_v": len(vs)})


def spot_radius(params):
    """Estimated bright-spot radius 0.4/k (units of R).

    The first dark ring sits near the first zero of J0, at
    2.40483/(2 pi k) = 0.383/k; 0.4/k is the conventional round number.
    """
    return 0.4 / params.k


def visibility_checks(setup, v=None):
    """Geometry sanity checks for seeing a spot at all, as report rows."""
    v_eff = setup.particle.v_long if v is None else v
    p = setup.dimensionless(v_eff)
    lam = setup.particle.wavelength(v_eff)
    rows = [
        ConstraintReport(
            "spot_vs_shadow", p.k * p.ell, 0.4, p.k * p.ell >= 0.4,
            "k*ell must stay above ~0.4 or the spot is wider than the "
            "shadow (larger is better)"),
        ConstraintReport(
            "source_radius", setup.R0, 0.4 * setup.L1 * lam / setup.R,
            setup.R0 <= 0.4 * setup.L1 * lam / setup.R,
            "source pinhole small enough not to smear the spot away"),
        ConstraintReport(
            "shadow_existence", setup.R0,
            setup.R * (setup.L1 + setup.L2) / setup.L2,
            setup.R0 < setup.R * (setup.L1 + setup.L2) / setup.L2,
            "source small enough that a geometric shadow exists"),
        ConstraintReport(
            "paraxial", max(setup.R0, setup.R) / min(setup.L1, setup.L2),
            0.01,
            max(setup.R0, setup.R) / min(setup.L1, setup.L2) <= 0.01,
            "transverse scales must stay far below the distances"),
    ]
    return rows


def profile_fingerprint(profile):
    """Stable hash of a profile's numbers, for determinism checks."""
    h = hashlib.sha256()
    h.update(profile.u.tobytes())
    h.update(profile.w.tobytes())
    return h.hexdigest()
