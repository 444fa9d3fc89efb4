"""Classical deflection counter-model.

Instead of a diffracted wave, each particle follows a straight ray from the
point source, receives the instantaneous radial momentum kick
q(r) = hbar dphi/dr in the obstacle plane, and continues ballistically to
the screen. The screen intensity follows from flux conservation in the
radial measure: a source annulus s ds maps to a screen annulus u du through
u_final(s), so

    w_cl(u) = sum_branches  ell^2 s / (u |du_final/ds|)

normalized to 1 on the open screen (pinned at u = 3 ell). Attraction bends
rays across the axis, so a screen radius u generally has preimages on both
the crossed (u_final < 0) and uncrossed sides; the inversion walks all
monotone segments of the ray map. The on-axis focal ray makes w_cl diverge
like 1/u at the origin; the divergence is integrable against the area
element u du and is never evaluated at u = 0.

The classical and quantum engines consume the same EikonalPhase object and
the same source-averaging kernel, so model comparisons are like for like.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .interaction import classical_kick
from .poisson import RadialProfile, annular_average


@dataclass
class RayMap:
    """Obstacle-plane radii mapped to signed screen radii, plus |du/ds|."""

    s_grid: np.ndarray
    u_final: np.ndarray      # signed: negative means the ray crossed the axis
    jacobian: np.ndarray     # |du_final/ds|
    meta: dict = field(default_factory=dict)


def ray_map(params, phase, particle, v_z, eta, s_max=8.0, n=4000):
    """Build the kick-and-project ray map on [1+eta, s_max].

    phase=None means no interaction (pure shadow projection u = ell s).
    The grid is geometric in the wall distance s - (1+eta) because the kick
    spans many decades near the surface.
    """
    if eta < 0:
        raise ValueError("eta must be non-negative")
    a = 1.0 + eta
    if s_max <= a + 1e-6:
        raise ValueError("s_max must exceed 1 + eta")
    offs = np.geomspace(1e-9, s_max - a, n - 1)
    s = np.concatenate([[a], a + offs])

    if phase is None:
        u_fin = params.ell * s
    else:
        q = classical_kick(phase, s)  # kg m/s, negative toward the axis
        lam = particle.wavelength(v_z)
        R = phase.obstacle.R
        L2 = R * R / (params.k * lam)
        u_fin = params.ell * s + L2 * q / (particle.mass_kg * v_z * R)
        tail = abs(u_fin[-1] / (params.ell * s[-1]) - 1.0)
        if tail > 1e-3:
            raise ValueError(
                f"ray map not ballistic at s_max={s_max}: residual kick "
                f"{tail:.2e}; enlarge s_max")

    jac = np.gradient(u_fin, s)
    caustics = np.flatnonzero(np.diff(np.signbit(jac)))
    return RayMap(s, u_fin, np.abs(jac),
                  meta={"ell": params.ell, "k": params.k, "eta": eta,
                        "caustic_nodes": caustics.tolist()})


def _branch_sum(targets, rmap):
    """Sum ell^2 s/(u |du/ds|) over every ray-map branch hitting each target.

    targets are positive screen radii; both map signs contribute (a ray at
    u_final = -u lands at radius u).
    """
    ell = rmap.meta["ell"]
    s, u_f = rmap.s_grid, rmap.u_final
    du = np.diff(u_f)
    ds = np.diff(s)
    w = np.zeros_like(targets)

    # walk monotone runs of u_final so each segment is invertible
    run_start = 0
    sign = 0.0
    edges = []
    for i, step in enumerate(du):
        sgn = math.copysign(1.0, step) if step != 0 else sign
        if sign == 0.0:
            sign = sgn
        elif sgn != sign:
            edges.append((run_start, i))
            run_start, sign = i, sgn
    edges.append((run_start, len(du)))

    for lo, hi in edges:
        seg_u = u_f[lo:hi + 1]
        ascending = seg_u[-1] >= seg_u[0]
        view = seg_u if ascending else seg_u[::-1]
        for tsign in (1.0, -1.0):
            t = tsign * targets
            idx = np.searchsorted(view, t, side="right")
            inside = (idx > 0) & (idx < len(view))
            if not np.any(inside):
                continue
            j = idx[inside] - 1
            if not ascending:
                j = (len(view) - 2) - j
            j += lo
            frac = (t[inside] - u_f[j]) / np.where(du[j] == 0, np.inf, du[j])
            s_at = s[j] + frac * ds[j]
            jac = np.abs(du[j] / ds[j])
            contrib = ell * ell * s_at / (targets[inside]
                                          * np.where(jac == 0, np.inf, jac))
            np.add.at(w, np.flatnonzero(inside), contrib)
    return w


def classical_point_pattern(u_grid, rmap):
    """Screen intensity of the deflection model for a point source.

    Requires u > 0 everywhere (the focal divergence is never evaluated at
    the origin); pinned to 1 at u = 3 ell.
    """
    u = np.asarray(u_grid, dtype=float)
    if np.any(u <= 0):
        raise ValueError("classical pattern diverges at u = 0; "
                         "use a grid of strictly positive radii")
    ell = rmap.meta["ell"]
    pin = _branch_sum(np.array([3.0 * ell]), rmap)[0]
    if pin <= 0:
        raise ValueError("ray map does not reach u = 3 ell; enlarge s_max")
    w = _branch_sum(u, rmap) / pin
    return RadialProfile(u, w, meta={"model": "classical", "ell": ell,
                                     "eta": rmap.meta["eta"],
                                     "averaging": "none"})


def classical_source_averaged(u_grid, setup, rmap, n_samples=48, v=None):
    """Finite-source version, using the same annular kernel as the quantum
    engine. The integrable 1/u focal divergence is handled by interpolating
    u * w(u), which stays finite down to the axis."""
    v_eff = setup.particle.v_long if v is None else v
    p = setup.dimensionless(v_eff)
    u = np.asarray(u_grid, dtype=float)
    if p.beta == 0.0:
        prof = classical_point_pattern(u, rmap)
        prof.meta["averaging"] = "source(beta=0)"
        return prof
    top = u.max() + p.beta
    ell = rmap.meta["ell"]
    work = np.unique(np.concatenate([
        np.geomspace(1e-6 * ell, 0.2 * ell, 500),
        np.linspace(0.2 * ell, top * 1.001, 2000)]))
    g = work * classical_point_pattern(work, rmap).w  # u*w, finite at 0
    w = annular_average(u, p.beta, lambda r: np.interp(r, work, g)
                        / np.maximum(r, 1e-300), n_t=n_samples)
    return RadialProfile(u, np.maximum(w, 0.0),
                         meta={"model": "classical", "ell": ell,
                               "beta": p.beta, "eta": rmap.meta["eta"],
                               "averaging": "source"})


@dataclass(frozen=True)
class DistinguishabilityReport:
    """How far apart the quantum and classical central spots are."""

    ratio: float        # quantum/classical height at the first off-axis node
    l1_shadow: float    # integrated |w_q - w_cl| over the shadow region
    u_probe: float      # where the ratio was taken


def distinguishability(u_grid, setup, quantum, classical):
    """Central-height ratio and shadow-region L1 distance of two profiles."""
    u = np.asarray(u_grid, dtype=float)
    if not (np.array_equal(u, quantum.u) and np.array_equal(u, classical.u)):
        raise ValueError("profiles must share the query grid")
    pos = np.flatnonzero(u > 0)
    if pos.size == 0:
        raise ValueError("need at least one positive radius")
    i0 = pos[0]
    wq, wc = quantum.w[i0], classical.w[i0]
    ratio = math.inf if wc == 0 else wq / wc
    ell = setup.dimensionless().ell
    shadow = u < ell
    l1 = float(np.trapezoid(np.abs(quantum.w[shadow] - classical.w[shadow]),
                            u[shadow]))
    return DistinguishabilityReport(ratio, l1, float(u[i0]))
