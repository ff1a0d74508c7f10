"""Level-set extraction and the slice-wise identities on the radial case."""

import math

import numpy as np
import pytest

from gnplab.errors import (DegenerateSlice, LevelOutOfRange, RayMisses,
                           VanishingGradient)
from gnplab.levelsets import (boundary_coupling, check_coarea,
                              check_estimate_d, check_first_order_detachment,
                              check_green_per_slice, check_strict_inclusion,
                              check_thickness_ode, curvature_on_slice,
                              extract_slice, grad_floor, mask_at_level,
                              slice_star_shaped, thickness_curve, _march)
from gnplab.solver import gradient, grid_from_bbox

T = 0.04
R_T = math.exp(-8 * T)          # level radius of u at T


def test_march_recovers_a_circle():
    g = grid_from_bbox(np.array([[-1.25, -1.25], [1.25, 1.25]]), 1.0 / 128)
    xs = g.origin[0] + np.arange(g.nx) * g.h
    ys = g.origin[1] + np.arange(g.ny) * g.h
    X, Y = np.meshgrid(xs, ys)
    cone = 1.0 - np.hypot(X, Y)
    loops, chains, area = _march(cone, 0.4, g.origin, g.h)
    assert len(loops) == 1 and not chains
    arr = loops[0]
    r = np.hypot(arr[:, 0], arr[:, 1])
    assert np.abs(r - 0.6).max() < 1e-3
    assert area == pytest.approx(math.pi * 0.36, rel=1e-3)
    per = np.sum(np.hypot(*np.diff(np.vstack([arr, arr[:1]]), axis=0).T))
    assert per == pytest.approx(2 * math.pi * 0.6, rel=2e-3)


def test_march_splits_components():
    g = grid_from_bbox(np.array([[-2.2, -1.2], [2.2, 1.2]]), 1.0 / 64)
    xs = g.origin[0] + np.arange(g.nx) * g.h
    ys = g.origin[1] + np.arange(g.ny) * g.h
    X, Y = np.meshgrid(xs, ys)
    two = np.maximum(1.0 - np.hypot(X - 1.1, Y), 1.0 - np.hypot(X + 1.1, Y))
    loops, chains, area = _march(two, 0.5, g.origin, g.h)
    assert len(loops) == 2
    assert area == pytest.approx(2 * math.pi * 0.25, rel=2e-3)


def test_slice_zero_is_the_domain_boundary(fld128, radial_domain):
    sl = extract_slice(fld128, radial_domain, 0.0)
    assert sl.meta.get("geometric")
    assert sl.area == pytest.approx(radial_domain.area)
    assert sl.perimeter == pytest.approx(radial_domain.perimeter)
    assert np.allclose(sl.thickness, 0.5)


def test_slice_matches_radial_geometry(fld128, radial_domain):
    sl = extract_slice(fld128, radial_domain, T)
    assert sl.n_components == 1 and not sl.open_contours
    assert sl.perimeter == pytest.approx(2 * math.pi * R_T, rel=1e-2)
    assert sl.area == pytest.approx(math.pi * R_T**2, rel=1e-2)
    assert sl.thickness_defined.all()
    assert np.abs(sl.thickness - (R_T - 0.5)).max() < fld128.grid.h


def test_slice_level_guards(fld128, radial_domain):
    with pytest.raises(LevelOutOfRange):
        extract_slice(fld128, radial_domain, -0.01)
    with pytest.raises(LevelOutOfRange):
        extract_slice(fld128, radial_domain, 10.0)
    top = fld128.max()
    with pytest.raises(LevelOutOfRange):
        extract_slice(fld128, radial_domain, 0.999 * top)
    with pytest.raises(DegenerateSlice):
        extract_slice(fld128, radial_domain, 0.99999 * top,
                      enforce_crit=False)


def test_thickness_curve_and_misses(fld128, radial_domain):
    ts = np.array([0.0, 0.01, 0.04, 0.07])
    d = thickness_curve(fld128, radial_domain, 0, ts)
    exact = np.exp(-8 * ts) - 0.5
    exact[0] = 0.5
    assert np.abs(d - exact).max() < 2 * fld128.grid.h
    with pytest.raises(ValueError):
        thickness_curve(fld128, radial_domain, 0, [0.05, 0.01])
    # u on the core boundary is 0.125 ln 2; levels above are unreachable
    with pytest.raises(RayMisses):
        thickness_curve(fld128, radial_domain, 0, [0.1])


def test_thickness_ode(fld128, radial_domain):
    lhs, rhs, rel = check_thickness_ode(fld128, radial_domain, 0, T, 1e-3)
    assert rel < 0.02
    assert rhs == pytest.approx(-8 * R_T, rel=5e-3)


def test_estimate_d_reconstruction(fld128, radial_domain):
    d_rec, d_geo, rel = check_estimate_d(fld128, radial_domain, 0, 200)
    assert d_geo == 0.5
    assert rel < 2e-3


def test_first_order_detachment(fld128, radial_domain):
    rel = check_first_order_detachment(fld128, radial_domain, 0, 0.005)
    assert rel < 0.05
    with pytest.raises(LevelOutOfRange):
        check_first_order_detachment(fld128, radial_domain, 0, 0.1)


def test_strict_inclusion_threshold(fld128, radial_domain):
    assert check_strict_inclusion(fld128, radial_domain, T)
    assert not check_strict_inclusion(fld128, radial_domain, 0.1)


def test_star_shaped_slice(fld128, radial_domain):
    assert slice_star_shaped(fld128, radial_domain, T)


def test_mask_monotone_and_floor(fld128):
    m1 = mask_at_level(fld128, 0.01)
    m2 = mask_at_level(fld128, 0.05)
    assert not np.any(m2 & ~m1)
    assert grad_floor(gradient(fld128)) > 0


def test_boundary_coupling_radial(pair128, radial_domain, oracle_ref):
    u, v = pair128
    prod, defined, spread = boundary_coupling(u, v, radial_domain)
    assert defined.all()
    assert spread < 1.03
    exact = oracle_ref.grad_u(1.0) * oracle_ref.grad_v(1.0)
    assert np.median(prod[defined]) == pytest.approx(exact, rel=0.02)


def test_curvature_u_slice(fld128, radial_domain):
    sl = extract_slice(fld128, radial_domain, T, with_thickness=False,
                       enforce_crit=False)
    cs = curvature_on_slice(fld128, sl)
    kap = np.median(cs.kappa)
    assert kap == pytest.approx(1.0 / R_T, rel=0.02)
    # divergence and split forms agree sample by sample
    rel = np.abs(cs.kappa - cs.kappa_split) / np.abs(cs.kappa)
    assert np.median(rel) < 1e-2
    # outside the core the Laplacian part vanishes
    assert np.abs(np.median(cs.term1)) < 1e-6


def test_curvature_v_slice(pair128, radial_domain, oracle_ref):
    u, v = pair128
    s = 0.01
    r_s = oracle_ref.v_level_radius(s)
    sl = extract_slice(v, radial_domain, s, with_thickness=False,
                       enforce_crit=False)
    cs = curvature_on_slice(v, sl, which="v", companion=u)
    assert np.median(cs.kappa) == pytest.approx(1.0 / r_s, rel=0.02)
    t1_exact = oracle_ref.u(r_s) / oracle_ref.grad_v(r_s)
    assert np.median(cs.term1) == pytest.approx(t1_exact, rel=0.03)


def test_coarea_identities(fld128, pair128, radial_domain, unit_source):
    u, v = pair128
    reports = check_coarea(u, radial_domain, unit_source, n_levels=100,
                           companion=v)
    names = [r.name for r in reports]
    assert names == ["grad_u_vs_contour_length", "source_mass_vs_slices",
                     "u_mass_vs_v_slices"]
    for r in reports:
        assert r.rel_err < 0.02, r


def test_green_per_slice(fld128, radial_domain, unit_source):
    grad = gradient(fld128)
    for t in np.linspace(0.01, 0.07, 5):
        rep = check_green_per_slice(fld128, radial_domain, unit_source,
                                    float(t), grad=grad)
        assert rep.source_mass == pytest.approx(math.pi / 4, rel=5e-3)
        assert rep.rel_err < 0.02
        # the radial case saturates the length bound
        assert rep.perimeter_bound <= rep.perimeter * 1.01
