import math

import numpy as np
import pytest

from arago.classical import (
    classical_point_pattern,
    classical_source_averaged,
    distinguishability,
    ray_map,
)
from arago.interaction import EikonalPhase, Obstacle, capture_eta
from arago.particles import ParticleSpecies
from arago.poisson import (
    DimensionlessParams,
    PoissonSetup,
    RadialProfile,
    point_source_pattern,
)

V_10PM = 2.0255394488692375


def _fig3(kind):
    b = 10e-9 if kind == "disc" else None
    obs = Obstacle(kind, 500e-9, b)
    p = ParticleSpecies("au100", 19700.0, 5e-28, 2.0)
    setup = PoissonSetup(500e-9, 500e-9, 0.125, 0.125, obs, p)
    phase = EikonalPhase(obs, p, p.v_long)
    eta = capture_eta(obs, p, p.v_long)
    rmap = ray_map(setup.dimensionless(), phase, p, p.v_long, eta)
    return setup, phase, eta, rmap


def test_free_map_is_pure_projection():
    par = DimensionlessParams(k=0.2, ell=2.0, beta=0.0)
    p = ParticleSpecies("au100", 19700.0, 0.0, V_10PM)
    rmap = ray_map(par, None, p, p.v_long, eta=0.0)
    assert np.allclose(rmap.u_final, 2.0 * rmap.s_grid, rtol=1e-14)
    grid = np.linspace(0.5, 6.0, 111)
    w = classical_point_pattern(grid, rmap).w
    # sharp geometric shadow at u = ell: zero inside, one outside, with at
    # most one grid cell of transition
    assert np.all(w[grid < 2.0 - 0.06] == 0.0)
    assert np.allclose(w[grid > 2.0 + 0.06], 1.0, rtol=1e-6)


def test_ray_map_validation():
    par = DimensionlessParams(k=0.2, ell=2.0, beta=0.0)
    p = ParticleSpecies("au100", 19700.0, 0.0, V_10PM)
    with pytest.raises(ValueError, match="eta"):
        ray_map(par, None, p, p.v_long, eta=-0.1)
    with pytest.raises(ValueError, match="s_max"):
        ray_map(par, None, p, p.v_long, eta=0.0, s_max=0.5)


def test_ray_map_ballistic_guard():
    # truncating the map while the kick is still strong must be rejected
    setup, phase, eta, _ = _fig3("sphere")
    with pytest.raises(ValueError, match="ballistic"):
        ray_map(setup.dimensionless(), phase, setup.particle,
                setup.particle.v_long, eta, s_max=1.5)


def test_attraction_pulls_rays_inward():
    setup, phase, eta, rmap = _fig3("sphere")
    assert np.all(rmap.u_final < setup.dimensionless().ell * rmap.s_grid)


def test_focal_ray_exists():
    # strong near-wall kicks throw the innermost rays across the axis, so the
    # map changes sign somewhere
    _, _, _, rmap = _fig3("sphere")
    assert rmap.u_final[0] < 0 < rmap.u_final[-1]


def test_central_divergence_slope():
    # the focal accumulation behaves like 1/u near the axis; frozen fitted
    # slopes: sphere -0.9986, disc -1.0018
    for kind, frozen in (("sphere", -0.9986), ("disc", -1.0018)):
        _, _, _, rmap = _fig3(kind)
        u = np.geomspace(0.02, 0.2, 25)
        w = classical_point_pattern(u, rmap).w
        slope = np.polyfit(np.log(u), np.log(w), 1)[0]
        assert slope == pytest.approx(frozen, abs=0.02)
        assert slope == pytest.approx(-1.0, abs=0.1)


def test_flux_conservation():
    # integral of w over an inner disc must match the obstacle-plane flux
    # that lands there: int 2 s ds over |u_f| <= U times ell^2 (both in the
    # pinned normalization), to 1%
    for kind in ("sphere", "disc"):
        _, _, _, rmap = _fig3(kind)
        U = 6.0
        u = np.linspace(1e-3, U, 4001)
        prof = classical_point_pattern(u, rmap)
        lhs = np.trapezoid(prof.w * 2.0 * u, u)
        ell = rmap.meta["ell"]
        pin_u = np.array([3.0 * ell])
        pin = classical_point_pattern(pin_u, rmap).w[0]  # 1 by construction
        inside = np.abs(rmap.u_final) <= U
        rhs = np.trapezoid(2.0 * rmap.s_grid[inside] * ell ** 2,
                           rmap.s_grid[inside])
        assert pin == pytest.approx(1.0, rel=1e-12)
        assert lhs == pytest.approx(rhs, rel=0.015)


def test_central_flux_integrable():
    # 1/u is integrable against 2 pi u du; the enclosed flux near the axis
    # stays finite
    _, _, _, rmap = _fig3("sphere")
    u = np.linspace(1e-4, 0.5, 2000)
    w = classical_point_pattern(u, rmap).w
    enclosed = np.trapezoid(w * 2.0 * math.pi * u, u)
    assert np.isfinite(enclosed)
    assert enclosed < 10.0


def test_source_averaging_regularizes_center():
    setup, phase, eta, rmap = _fig3("sphere")
    grid = np.linspace(0.025, 3.0, 60)
    prof = classical_source_averaged(grid, setup, rmap)
    assert np.all(np.isfinite(prof.w))
    assert prof.w[0] > 0


def test_source_averaged_beta_zero_identity():
    obs = Obstacle("sphere", 500e-9)
    p = ParticleSpecies("au100", 19700.0, 5e-28, 2.0)
    setup = PoissonSetup(0.0, 500e-9, 0.125, 0.125, obs, p)
    phase = EikonalPhase(obs, p, p.v_long)
    eta = capture_eta(obs, p, p.v_long)
    rmap = ray_map(setup.dimensionless(), phase, p, p.v_long, eta)
    grid = np.linspace(0.1, 3.0, 30)
    a = classical_point_pattern(grid, rmap)
    b = classical_source_averaged(grid, setup, rmap)
    assert np.array_equal(a.w, b.w)


def test_pattern_rejects_origin():
    _, _, _, rmap = _fig3("sphere")
    with pytest.raises(ValueError, match="diverges"):
        classical_point_pattern(np.array([0.0, 1.0]), rmap)


def test_distinguishability_identical_profiles():
    setup, _, _, _ = _fig3("sphere")
    u = np.linspace(0.025, 6.0, 40)
    prof = RadialProfile(u, np.ones_like(u))
    rep = distinguishability(u, setup, prof, prof)
    assert rep.ratio == 1.0
    assert rep.l1_shadow == 0.0
    assert rep.u_probe == pytest.approx(0.025)


def test_distinguishability_zero_classical():
    setup, _, _, _ = _fig3("sphere")
    u = np.linspace(0.025, 6.0, 40)
    q = RadialProfile(u, np.ones_like(u))
    c = RadialProfile(u, np.zeros_like(u))
    assert distinguishability(u, setup, q, c).ratio == math.inf


def test_distinguishability_grid_mismatch():
    setup, _, _, _ = _fig3("sphere")
    u = np.linspace(0.025, 6.0, 40)
    q = RadialProfile(u, np.ones_like(u))
    c = RadialProfile(u[:-1], np.ones(39))
    with pytest.raises(ValueError, match="grid"):
        distinguishability(u, setup, q, c)
